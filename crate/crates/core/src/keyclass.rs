// SPDX-License-Identifier: Apache-2.0
//! Equivalence classes `[K]_{P0,C0}` of 1- and 2-round KASUMI.
//!
//! A class holds every master key sending a fixed plaintext `P0` to a fixed
//! pre-swap output `C0`. Neither class is enumerated in full (2^96 and about
//! 2^64 members); instead a guessed portion of the key is completed to a
//! member, and seeded sampling drives the outer loop.
//!
//! * One round: guess `k1, k2, k3, k4, k5, k8` (the FL key plus `KO_1`,
//!   `KI_1..3`), then FO completion yields `k6` and `k7` uniquely.
//! * Two rounds: guess the FL words `k1..k4`, then sweep `k6`; each value
//!   pins `k5`, `k7` and `k8` through the two FO equation chains and one
//!   16-bit residual equation filters the candidates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{self, fo_complete};
use crate::error::{Error, Result};
use crate::kasumi::{self, fl, fl_inv, Block64, FlKey, MasterKey, KEY_CONSTANTS};

/// A sub-key position in a KASUMI round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubKeySlot {
    Kl1,
    Kl2,
    Ko1,
    Ko2,
    Ko3,
    Ki1,
    Ki2,
    Ki3,
}

/// How a sub-key slot is derived from a master-key word: either rotated left
/// or XORed with the word's constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Transform {
    Rotate(u32),
    Constant,
}

impl SubKeySlot {
    pub const ALL: [SubKeySlot; 8] = [
        SubKeySlot::Kl1,
        SubKeySlot::Kl2,
        SubKeySlot::Ko1,
        SubKeySlot::Ko2,
        SubKeySlot::Ko3,
        SubKeySlot::Ki1,
        SubKeySlot::Ki2,
        SubKeySlot::Ki3,
    ];

    fn row(self) -> (usize, Transform) {
        match self {
            SubKeySlot::Kl1 => (0, Transform::Rotate(1)),
            SubKeySlot::Kl2 => (2, Transform::Constant),
            SubKeySlot::Ko1 => (1, Transform::Rotate(5)),
            SubKeySlot::Ko2 => (5, Transform::Rotate(8)),
            SubKeySlot::Ko3 => (6, Transform::Rotate(13)),
            SubKeySlot::Ki1 => (4, Transform::Constant),
            SubKeySlot::Ki2 => (3, Transform::Constant),
            SubKeySlot::Ki3 => (7, Transform::Constant),
        }
    }

    /// Index `j` in `1..=8` of the master word `k_j` feeding this slot in
    /// round `round`.
    pub fn source_word(self, round: usize) -> usize {
        (round - 1 + self.row().0) % 8 + 1
    }

    /// Sub-key value from the source word.
    pub fn from_word(self, round: usize, word: u16) -> u16 {
        match self.row().1 {
            Transform::Rotate(n) => word.rotate_left(n),
            Transform::Constant => word ^ KEY_CONSTANTS[self.source_word(round) - 1],
        }
    }

    /// Source word from the sub-key value.
    pub fn to_word(self, round: usize, value: u16) -> u16 {
        match self.row().1 {
            Transform::Rotate(n) => value.rotate_right(n),
            Transform::Constant => value ^ KEY_CONSTANTS[self.source_word(round) - 1],
        }
    }

    pub fn derive(self, round: usize, master: &MasterKey) -> u16 {
        self.from_word(round, master.k(self.source_word(round)))
    }
}

/// Rounds covered by a class: the output is taken before the final swap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassSpec {
    pub p0: Block64,
    pub c0: Block64,
    pub rounds: usize,
}

impl ClassSpec {
    pub fn new(p0: Block64, c0: Block64, rounds: usize) -> Result<Self> {
        if !(1..=2).contains(&rounds) {
            return Err(Error::InvalidParams(format!(
                "key classes are defined for 1 or 2 rounds, got {rounds}"
            )));
        }
        Ok(ClassSpec { p0, c0, rounds })
    }

    /// Class of a known key: `C0` is its pre-swap output on `p0`.
    pub fn from_key(p0: Block64, key: &MasterKey, rounds: usize) -> Result<Self> {
        let c0 = kasumi::encrypt(p0, key, rounds, true)?;
        Self::new(p0, c0, rounds)
    }

    pub fn contains(&self, key: &MasterKey) -> bool {
        kasumi::Kasumi::new(key)
            .encrypt_rounds(self.p0, self.rounds)
            .swapped()
            == self.c0
    }
}

/// The 96 guessed bits of the 1-round class, in master-key coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Round1Guess {
    pub k1: u16,
    pub k2: u16,
    pub k3: u16,
    pub k4: u16,
    pub k5: u16,
    pub k8: u16,
}

impl Round1Guess {
    pub fn of_key(key: &MasterKey) -> Self {
        Round1Guess {
            k1: key.k(1),
            k2: key.k(2),
            k3: key.k(3),
            k4: key.k(4),
            k5: key.k(5),
            k8: key.k(8),
        }
    }

    fn random(rng: &mut impl Rng) -> Self {
        let w: [u16; 6] = rng.gen();
        Round1Guess {
            k1: w[0],
            k2: w[1],
            k3: w[2],
            k4: w[3],
            k5: w[4],
            k8: w[5],
        }
    }
}

fn require_rounds(spec: &ClassSpec, rounds: usize) -> Result<()> {
    if spec.rounds != rounds {
        return Err(Error::InvalidParams(format!(
            "class spec is for {} round(s), operation needs {rounds}",
            spec.rounds
        )));
    }
    Ok(())
}

/// Complete a 1-round guess to the unique class member extending it.
pub fn round1_complete(spec: &ClassSpec, guess: &Round1Guess) -> Result<MasterKey> {
    require_rounds(spec, 1)?;
    if spec.c0.left != spec.p0.left {
        return Err(Error::EmptyClass(
            "one-round output must keep the left half of P0",
        ));
    }
    use SubKeySlot::*;
    let kl = FlKey {
        kl1: Kl1.from_word(1, guess.k1),
        kl2: Kl2.from_word(1, guess.k3),
    };
    let x = fl(spec.p0.left, kl);
    let y = spec.p0.right ^ spec.c0.right;
    let (ko2, ko3) = fo_complete(
        x,
        y,
        Ki1.from_word(1, guess.k5),
        Ko1.from_word(1, guess.k2),
        Ki2.from_word(1, guess.k4),
        Ki3.from_word(1, guess.k8),
    );
    Ok(MasterKey([
        guess.k1,
        guess.k2,
        guess.k3,
        guess.k4,
        guess.k5,
        Ko2.to_word(1, ko2),
        Ko3.to_word(1, ko3),
        guess.k8,
    ]))
}

/// `count` class members from seeded random guesses.
pub fn round1_sample(spec: &ClassSpec, count: usize, seed: u64) -> Result<Vec<MasterKey>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| round1_complete(spec, &Round1Guess::random(&mut rng)))
        .collect()
}

/// The FL words guessed by the 2-round solver.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Round2Head {
    pub k1: u16,
    pub k2: u16,
    pub k3: u16,
    pub k4: u16,
}

impl Round2Head {
    pub fn of_key(key: &MasterKey) -> Self {
        Round2Head {
            k1: key.k(1),
            k2: key.k(2),
            k3: key.k(3),
            k4: key.k(4),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Round2Tail {
    pub k5: u16,
    pub k6: u16,
    pub k7: u16,
    pub k8: u16,
}

impl Round2Tail {
    pub fn of_key(key: &MasterKey) -> Self {
        Round2Tail {
            k5: key.k(5),
            k6: key.k(6),
            k7: key.k(7),
            k8: key.k(8),
        }
    }

    pub fn join(&self, head: &Round2Head) -> MasterKey {
        MasterKey([
            head.k1, head.k2, head.k3, head.k4, self.k5, self.k6, self.k7, self.k8,
        ])
    }
}

/// FO inputs and outputs of the two rounds once the FL keys are fixed:
/// `FO_1(a) = b` and `FO_2(c) = d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Round2Context {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl Round2Context {
    pub fn new(spec: &ClassSpec, head: &Round2Head) -> Self {
        use SubKeySlot::*;
        let (p, c0) = (spec.p0, spec.c0);
        let rkl1 = FlKey {
            kl1: Kl1.from_word(1, head.k1),
            kl2: Kl2.from_word(1, head.k3),
        };
        let rkl2 = FlKey {
            kl1: Kl1.from_word(2, head.k2),
            kl2: Kl2.from_word(2, head.k4),
        };
        Round2Context {
            a: fl(p.left, rkl1),
            b: c0.left ^ p.right,
            c: c0.left,
            d: fl_inv(c0.right ^ p.left, rkl2),
        }
    }
}

/// A keyed permutation with the FI factorisation `fi(x, k) = fi2(k ^ fi1(x))`,
/// over words of `bits()` bits. KASUMI's FI is the 16-bit instance; narrower
/// instances let the 2-round solver be checked against exhaustive search.
pub trait FiFamily: Sync {
    fn bits(&self) -> u32;
    fn fi(&self, x: u16, k: u16) -> u16;
    fn fi_inv(&self, y: u16, k: u16) -> u16;
    /// Unique `k` with `fi(x, k) == y`.
    fn recover_key(&self, x: u16, y: u16) -> u16;

    fn mask(&self) -> u16 {
        ((1u32 << self.bits()) - 1) as u16
    }

    fn rol(&self, x: u16, n: u32) -> u16 {
        let (w, m) = (self.bits(), self.mask());
        let n = n % w;
        let x = x & m;
        if n == 0 {
            x
        } else {
            ((x << n) | (x >> (w - n))) & m
        }
    }

    fn ror(&self, x: u16, n: u32) -> u16 {
        let w = self.bits();
        self.rol(x, w - n % w)
    }

    /// `k'_i = k_i ^ c_i`, constant truncated to the word width.
    fn prime(&self, k: u16, i: usize) -> u16 {
        (k ^ KEY_CONSTANTS[i - 1]) & self.mask()
    }
}

/// KASUMI's own FI.
#[derive(Clone, Copy, Debug, Default)]
pub struct KasumiFi;

impl FiFamily for KasumiFi {
    fn bits(&self) -> u32 {
        16
    }

    #[inline]
    fn fi(&self, x: u16, k: u16) -> u16 {
        kasumi::fi(x, k)
    }

    #[inline]
    fn fi_inv(&self, y: u16, k: u16) -> u16 {
        kasumi::fi_inv(y, k)
    }

    #[inline]
    fn recover_key(&self, x: u16, y: u16) -> u16 {
        analysis::recover_fi_key(x, y)
    }
}

/// FI-shaped keyed permutation on `bits`-bit words built from two seeded
/// random permutations: `fi(x, k) = outer[k ^ inner[x]]`.
#[derive(Clone, Debug)]
pub struct NarrowFi {
    bits: u32,
    inner: Vec<u16>,
    outer: Vec<u16>,
    outer_inv: Vec<u16>,
    inner_inv: Vec<u16>,
}

impl NarrowFi {
    pub fn new(bits: u32, seed: u64) -> Self {
        assert!(
            (2..=12).contains(&bits),
            "narrow FI width must be in 2..=12"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1usize << bits;
        let perm = |rng: &mut ChaCha8Rng| {
            let mut p: Vec<u16> = (0..n as u16).collect();
            rand::seq::SliceRandom::shuffle(p.as_mut_slice(), rng);
            let mut inv = vec![0u16; n];
            for (i, &v) in p.iter().enumerate() {
                inv[v as usize] = i as u16;
            }
            (p, inv)
        };
        let (inner, inner_inv) = perm(&mut rng);
        let (outer, outer_inv) = perm(&mut rng);
        NarrowFi {
            bits,
            inner,
            outer,
            outer_inv,
            inner_inv,
        }
    }
}

impl FiFamily for NarrowFi {
    fn bits(&self) -> u32 {
        self.bits
    }

    fn fi(&self, x: u16, k: u16) -> u16 {
        let m = self.mask();
        self.outer[((k & m) ^ self.inner[(x & m) as usize]) as usize]
    }

    fn fi_inv(&self, y: u16, k: u16) -> u16 {
        let m = self.mask();
        self.inner_inv[((k & m) ^ self.outer_inv[(y & m) as usize]) as usize]
    }

    fn recover_key(&self, x: u16, y: u16) -> u16 {
        let m = self.mask();
        self.inner[(x & m) as usize] ^ self.outer_inv[(y & m) as usize]
    }
}

/// How the 2-round tail equations are solved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[non_exhaustive]
pub enum SolveStrategy {
    /// Sweep every `k6`; the rest of the tail follows deterministically.
    #[default]
    PivotSweep,
}

/// Work done by one head's tail solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveCost {
    /// `k6` candidates tried.
    pub pivots: u64,
    /// FI, FI^{-1} and FI key-recovery evaluations.
    pub fi_evals: u64,
}

/// FI evaluations spent on each pivot by [`SolveStrategy::PivotSweep`].
pub const FI_EVALS_PER_PIVOT: u64 = 5;
/// FI evaluations spent once per head before the sweep.
pub const FI_EVALS_PER_HEAD: u64 = 1;

/// Solve both FO chains for the tail words, over any FI family.
///
/// Halves of the context words are `bits()` wide: `a_L = a >> bits`,
/// `a_R = a & mask`.
pub fn solve_chains<F: FiFamily>(
    fam: &F,
    ctx: &Round2Context,
    head: &Round2Head,
    strategy: SolveStrategy,
) -> (Vec<Round2Tail>, SolveCost) {
    let SolveStrategy::PivotSweep = strategy;
    let (w, m) = (fam.bits(), fam.mask());
    let split = |v: u32| (((v >> w) as u16) & m, (v as u16) & m);
    let (al, ar) = split(ctx.a);
    let (bl, br) = split(ctx.b);
    let (cl, cr) = split(ctx.c);
    let (dl, dr) = split(ctx.d);

    // Round-1 FO: KO1 = k2<<<5, KI2 = k4'. Round-2 FO: KO1 = k3<<<5, KI3 = k1'.
    let r1_x1 = al ^ fam.rol(head.k2, 5);
    let r1_ki2 = fam.prime(head.k4, 4);
    let r2_x1 = cl ^ fam.rol(head.k3, 5);
    let k8_rot = fam.fi_inv(dl ^ dr, fam.prime(head.k1, 1));
    let mut cost = SolveCost {
        pivots: 0,
        fi_evals: FI_EVALS_PER_HEAD,
    };

    let mut tails = Vec::new();
    for k6 in 0..=m {
        cost.pivots += 1;
        // v is the middle FO value of round 1
        let v = bl ^ fam.fi(ar ^ fam.rol(k6, 8), r1_ki2);
        let k5p = fam.recover_key(r1_x1, v ^ ar);
        let k5 = fam.prime(k5p, 5);
        // w is the middle FO value of round 2
        let wv = cr ^ fam.fi(r2_x1, fam.prime(k6, 6));
        let k7 = fam.ror(cr ^ fam.fi_inv(dl ^ wv, k5p), 8);
        let k8 = fam.ror(wv ^ k8_rot, 13);
        // residual: round-1 KO3 = k7<<<13
        let ko3 = fam.fi_inv(bl ^ br, fam.prime(k8, 8)) ^ v;
        cost.fi_evals += FI_EVALS_PER_PIVOT;
        if ko3 == fam.rol(k7, 13) {
            tails.push(Round2Tail { k5, k6, k7, k8 });
        }
    }
    tails.sort_unstable();
    tails.dedup();
    (tails, cost)
}

/// All 2-round class members extending `head`, as tails.
pub fn round2_solve_tail(spec: &ClassSpec, head: &Round2Head) -> Result<Vec<Round2Tail>> {
    round2_solve_tail_with(spec, head, SolveStrategy::default()).map(|(t, _)| t)
}

pub fn round2_solve_tail_with(
    spec: &ClassSpec,
    head: &Round2Head,
    strategy: SolveStrategy,
) -> Result<(Vec<Round2Tail>, SolveCost)> {
    require_rounds(spec, 2)?;
    let ctx = Round2Context::new(spec, head);
    Ok(solve_chains(&KasumiFi, &ctx, head, strategy))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Round2Search {
    pub heads: u64,
    /// Member keys found, sorted.
    #[serde(skip)]
    pub keys: Vec<MasterKey>,
    /// `survivors[n]` = number of heads that produced exactly `n` tails.
    pub survivor_histogram: Vec<u64>,
    pub mean_survivors: f64,
    pub cost: SolveCost,
}

/// Run the tail solver over `head_count` seeded random heads.
pub fn round2_search(spec: &ClassSpec, head_count: usize, seed: u64) -> Result<Round2Search> {
    require_rounds(spec, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let heads: Vec<Round2Head> = (0..head_count)
        .map(|_| {
            let w: [u16; 4] = rng.gen();
            Round2Head {
                k1: w[0],
                k2: w[1],
                k3: w[2],
                k4: w[3],
            }
        })
        .collect();
    let per_head: Vec<(Vec<MasterKey>, SolveCost)> = heads
        .par_iter()
        .map(|h| {
            let (tails, cost) = round2_solve_tail_with(spec, h, SolveStrategy::default())
                .expect("round count checked above");
            (tails.iter().map(|t| t.join(h)).collect(), cost)
        })
        .collect();

    let mut histogram = Vec::new();
    let mut keys = Vec::new();
    let mut cost = SolveCost::default();
    for (k, c) in per_head {
        if histogram.len() <= k.len() {
            histogram.resize(k.len() + 1, 0);
        }
        histogram[k.len()] += 1;
        cost.pivots += c.pivots;
        cost.fi_evals += c.fi_evals;
        keys.extend(k);
    }
    keys.sort_unstable();
    keys.dedup();
    let mean_survivors = if head_count == 0 {
        0.0
    } else {
        keys.len() as f64 / head_count as f64
    };
    Ok(Round2Search {
        heads: head_count as u64,
        keys,
        survivor_histogram: histogram,
        mean_survivors,
        cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_key(rng: &mut impl Rng) -> MasterKey {
        MasterKey(rng.gen())
    }

    #[test]
    fn slot_rows_match_schedule() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let key = random_key(&mut rng);
            let ks = kasumi::key_schedule(&key);
            for r in 1..=8 {
                let rk = ks.round(r);
                let want = [
                    rk.kl.kl1, rk.kl.kl2, rk.fo.ko1, rk.fo.ko2, rk.fo.ko3, rk.fo.ki1, rk.fo.ki2,
                    rk.fo.ki3,
                ];
                for (slot, w) in SubKeySlot::ALL.iter().zip(want) {
                    assert_eq!(slot.derive(r, &key), w, "{slot:?} round {r}");
                }
            }
        }
    }

    #[test]
    fn class_spec_rejects_rounds() {
        assert!(ClassSpec::new(Block64::default(), Block64::default(), 3).is_err());
        let spec = ClassSpec::new(Block64::default(), Block64::default(), 2).unwrap();
        assert!(round1_complete(&spec, &Round1Guess::default()).is_err());
        let spec1 = ClassSpec::new(Block64::default(), Block64::default(), 1).unwrap();
        assert!(round2_solve_tail(&spec1, &Round2Head::default()).is_err());
    }

    #[test]
    fn round1_empty_class() {
        let spec = ClassSpec::new(Block64::new(1, 2), Block64::new(3, 4), 1).unwrap();
        assert!(matches!(
            round1_complete(&spec, &Round1Guess::default()),
            Err(Error::EmptyClass(_))
        ));
    }

    #[test]
    fn round1_true_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let key = random_key(&mut rng);
            let spec = ClassSpec::from_key(Block64::from_u64(rng.gen()), &key, 1).unwrap();
            assert_eq!(
                round1_complete(&spec, &Round1Guess::of_key(&key)).unwrap(),
                key
            );
        }
    }

    #[test]
    fn round1_sample_basics() {
        let spec = ClassSpec::from_key(Block64::new(5, 6), &MasterKey([9; 8]), 1).unwrap();
        assert!(round1_sample(&spec, 0, 1).unwrap().is_empty());
        let a = round1_sample(&spec, 50, 7).unwrap();
        assert_eq!(a, round1_sample(&spec, 50, 7).unwrap());
        assert!(a.iter().all(|k| spec.contains(k)));
    }

    #[test]
    fn round2_true_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5 {
            let key = random_key(&mut rng);
            let spec = ClassSpec::from_key(Block64::from_u64(rng.gen()), &key, 2).unwrap();
            let tails = round2_solve_tail(&spec, &Round2Head::of_key(&key)).unwrap();
            assert!(tails.contains(&Round2Tail::of_key(&key)));
            for t in &tails {
                assert!(spec.contains(&t.join(&Round2Head::of_key(&key))));
            }
        }
    }

    #[test]
    fn round2_search_basics() {
        let spec = ClassSpec::from_key(Block64::new(1, 2), &MasterKey([3; 8]), 2).unwrap();
        let empty = round2_search(&spec, 0, 1).unwrap();
        assert!(empty.keys.is_empty());
        assert_eq!(empty.heads, 0);
        let a = round2_search(&spec, 4, 9).unwrap();
        assert_eq!(a, round2_search(&spec, 4, 9).unwrap());
        assert!(a.keys.iter().all(|k| spec.contains(k)));
        assert_eq!(a.survivor_histogram.iter().sum::<u64>(), 4);
    }

    #[test]
    fn narrow_fi_is_fi_shaped() {
        let f = NarrowFi::new(6, 1);
        for x in 0..64u16 {
            for k in 0..64u16 {
                let y = f.fi(x, k);
                assert_eq!(f.fi_inv(y, k), x);
                assert_eq!(f.recover_key(x, y), k);
            }
        }
        assert_eq!(f.rol(0b100000, 1), 1);
        assert_eq!(f.ror(1, 1), 0b100000);
        assert_eq!(f.ror(f.rol(0b101101, 13), 13), 0b101101);
    }
}
