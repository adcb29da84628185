// SPDX-License-Identifier: Apache-2.0
//! Algebra of the KASUMI components.
//!
//! FI factors as `fi(x, ki) = fi2(ki ^ fi1(x))` with `fi1` and `fi2` fixed
//! permutations. Every (input, output) pair therefore pins the FI key
//! uniquely, and FO can be completed from a partial key guess. FL leaks a
//! bit-level description of the sub-keys compatible with an (input, output)
//! pair.

use serde::Serialize;

use crate::kasumi::{fi, fi_inv, FlKey, FoKeys, S7, S7_INV, S9, S9_INV};

// fi1 takes x packed as nine||seven and returns seven||nine, which is the
// layout the key is XORed into. fi2 works on the seven||nine layout
// throughout.

/// Key-independent first half of FI.
pub fn fi1(x: u16) -> u16 {
    let seven = x & 0x7f;
    let nine = S9[(x >> 7) as usize] ^ seven;
    let seven = S7[seven as usize] ^ (nine & 0x7f);
    (seven << 9) | nine
}

pub fn fi1_inv(t: u16) -> u16 {
    let (seven, nine) = (t >> 9, t & 0x1ff);
    let seven = S7_INV[(seven ^ (nine & 0x7f)) as usize];
    let nine = S9_INV[(nine ^ seven) as usize];
    (nine << 7) | seven
}

/// Key-independent second half of FI.
pub fn fi2(t: u16) -> u16 {
    let (seven, nine) = (t >> 9, t & 0x1ff);
    let nine = S9[nine as usize] ^ seven;
    let seven = S7[seven as usize] ^ (nine & 0x7f);
    (seven << 9) | nine
}

pub fn fi2_inv(y: u16) -> u16 {
    let (seven, nine) = (y >> 9, y & 0x1ff);
    let seven = S7_INV[(seven ^ (nine & 0x7f)) as usize];
    let nine = S9_INV[(nine ^ seven) as usize];
    (seven << 9) | nine
}

/// The unique `ki` with `fi(x, ki) == y`.
pub fn recover_fi_key(x: u16, y: u16) -> u16 {
    fi1(x) ^ fi2_inv(y)
}

/// `Δ` such that `fi(x, ki) == fi(x2, ki ^ Δ)` for every `ki`.
pub fn fi_equal_output_delta(x: u16, x2: u16) -> u16 {
    fi1(x) ^ fi1(x2)
}

/// Keys `(ki, ki2)` with `fi(x, ki) == fi(x2, ki2) == y`.
pub fn fi_keypair_for_target(x: u16, x2: u16, y: u16) -> (u16, u16) {
    (recover_fi_key(x, y), recover_fi_key(x2, y))
}

/// Solve for `(KO_2, KO_3)` so that FO maps `x` to `y` under the guessed
/// `KI_1, KO_1, KI_2, KI_3`. A solution always exists and is unique.
pub fn fo_complete(x: u32, y: u32, ki1: u16, ko1: u16, ki2: u16, ki3: u16) -> (u16, u16) {
    let (xl, xr) = ((x >> 16) as u16, x as u16);
    let (yl, yr) = ((y >> 16) as u16, y as u16);
    // middle value shared by all three FO rounds
    let t = xr ^ fi(xl ^ ko1, ki1);
    let ko2 = xr ^ fi_inv(yl ^ t, ki2);
    let ko3 = fi_inv(yl ^ yr, ki3) ^ t;
    (ko2, ko3)
}

/// [`fo_complete`] packaged as a full FO key set.
pub fn fo_complete_keys(x: u32, y: u32, ki1: u16, ko1: u16, ki2: u16, ki3: u16) -> FoKeys {
    let (ko2, ko3) = fo_complete(x, y, ki1, ko1, ki2, ki3);
    FoKeys {
        ko1,
        ko2,
        ko3,
        ki1,
        ki2,
        ki3,
    }
}

/// All FL keys mapping a given input to a given output.
///
/// Bits of `KL_1` are forced where `X_L` is set; bits of `KL_2` are forced
/// where `Y_R` is clear. The remaining bits are free.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FlKeyClass {
    pub kl1_forced_mask: u16,
    pub kl1_forced_value: u16,
    pub kl2_forced_mask: u16,
    pub kl2_forced_value: u16,
    pub consistent: bool,
    pub free_bit_count: u32,
    #[serde(skip)]
    width: u32,
}

impl FlKeyClass {
    /// Number of member keys (0 when inconsistent).
    pub fn size(&self) -> u64 {
        if self.consistent {
            1u64 << self.free_bit_count
        } else {
            0
        }
    }

    pub fn contains(&self, kl: FlKey) -> bool {
        self.consistent
            && kl.kl1 & self.kl1_forced_mask == self.kl1_forced_value
            && kl.kl2 & self.kl2_forced_mask == self.kl2_forced_value
            && (kl.kl1 | kl.kl2) & !half_mask(self.width) == 0
    }

    /// The `index`-th member: free bits of `KL_1` (low to high) take the low
    /// bits of `index`, then free bits of `KL_2`.
    pub fn member(&self, index: u64) -> Option<FlKey> {
        if index >= self.size() {
            return None;
        }
        let m = half_mask(self.width);
        let mut bits = index;
        let mut spread = |free: u16| -> u16 {
            let mut v = 0u16;
            for b in 0..self.width {
                if free >> b & 1 == 1 {
                    v |= ((bits & 1) as u16) << b;
                    bits >>= 1;
                }
            }
            v
        };
        let kl1 = self.kl1_forced_value | spread(!self.kl1_forced_mask & m);
        let kl2 = self.kl2_forced_value | spread(!self.kl2_forced_mask & m);
        Some(FlKey { kl1, kl2 })
    }

    pub fn members(&self) -> impl Iterator<Item = FlKey> + '_ {
        (0..self.size()).filter_map(|i| self.member(i))
    }
}

fn half_mask(width: u32) -> u16 {
    ((1u32 << width) - 1) as u16
}

fn ror(x: u16, n: u32, width: u32) -> u16 {
    let m = half_mask(width);
    let x = x & m;
    ((x >> n) | (x << (width - n))) & m
}

/// FL key class over halves of `width` bits. KASUMI uses 16; narrower widths
/// exist so the classification can be checked against exhaustive search.
pub fn fl_key_class_width(xl: u16, xr: u16, yl: u16, yr: u16, width: u32) -> FlKeyClass {
    assert!((2..=16).contains(&width), "half width must be in 2..=16");
    let m = half_mask(width);
    let (xl, xr, yl, yr) = (xl & m, xr & m, yl & m, yr & m);
    // Y_R ^ X_R = (X_L & KL_1) <<< 1 ; Y_L ^ X_L = (Y_R | KL_2) <<< 1
    let a = ror(yr ^ xr, 1, width);
    let b = ror(yl ^ xl, 1, width);
    let consistent = a & !xl & m == 0 && yr & !b & m == 0;
    let kl1_forced_mask = xl;
    let kl2_forced_mask = !yr & m;
    FlKeyClass {
        kl1_forced_mask,
        kl1_forced_value: a & kl1_forced_mask,
        kl2_forced_mask,
        kl2_forced_value: b & kl2_forced_mask,
        consistent,
        free_bit_count: (width - xl.count_ones()) + yr.count_ones(),
        width,
    }
}

/// Every FL key `(KL_1, KL_2)` with `fl(x, kl) == y`.
pub fn fl_key_class(x: u32, y: u32) -> FlKeyClass {
    fl_key_class_width((x >> 16) as u16, x as u16, (y >> 16) as u16, y as u16, 16)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kasumi::fl;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fi_splits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20_000 {
            let (x, k): (u16, u16) = rng.gen();
            assert_eq!(fi2(k ^ fi1(x)), fi(x, k));
            assert_eq!(fi1_inv(fi1(x)), x);
            assert_eq!(fi2_inv(fi2(x)), x);
        }
    }

    #[test]
    fn fi1_zero_regression() {
        // frozen from the implementation after the reference vectors passed
        assert_eq!(fi1(0), 0x22a7);
    }

    #[test]
    fn recover_zero_key() {
        let x = 0xbeef;
        assert_eq!(recover_fi_key(x, fi(x, 0)), 0);
    }

    #[test]
    fn delta_identity() {
        assert_eq!(fi_equal_output_delta(0x1357, 0x1357), 0);
        let (a, b) = fi_keypair_for_target(0x4242, 0x4242, 0x9999);
        assert_eq!(a, b);
    }

    #[test]
    fn delta_exhaustive() {
        let (x, x2, ki) = (0x0f0f, 0xa5a5, 0x1234);
        let d = fi_equal_output_delta(x, x2);
        let target = fi(x, ki);
        let hits: Vec<u16> = (0..=u16::MAX).filter(|&k| fi(x2, k) == target).collect();
        assert_eq!(hits, vec![ki ^ d]);
    }

    #[test]
    fn fo_complete_true_point() {
        let k = FoKeys {
            ko1: 0x1111,
            ko2: 0x2222,
            ko3: 0x3333,
            ki1: 0x4444,
            ki2: 0x5555,
            ki3: 0x6666,
        };
        let x = 0x0102_0304;
        let y = crate::kasumi::fo(x, &k);
        assert_eq!(
            fo_complete(x, y, k.ki1, k.ko1, k.ki2, k.ki3),
            (k.ko2, k.ko3)
        );
    }

    #[test]
    fn fl_class_fully_forced() {
        // X_L all ones, Y_R all zeros: no free bits
        let kl = FlKey {
            kl1: 0x1234,
            kl2: 0xfedc,
        };
        // pick X_R so that Y_R = 0
        let xl = 0xffff;
        let xr = (kl.kl1 & xl).rotate_left(1);
        let x = ((xl as u32) << 16) | xr as u32;
        let y = fl(x, kl);
        assert_eq!(y as u16, 0);
        let c = fl_key_class(x, y);
        assert!(c.consistent);
        assert_eq!(c.size(), 1);
        assert_eq!(c.member(0), Some(kl));
    }

    #[test]
    fn fl_class_inconsistent() {
        // X_L = 0 forces Y_R = X_R
        let c = fl_key_class(0x0000_0001, 0x0000_0002);
        assert!(!c.consistent);
        assert_eq!(c.size(), 0);
        assert_eq!(c.members().count(), 0);
    }
}
