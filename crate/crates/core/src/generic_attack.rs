// SPDX-License-Identifier: Apache-2.0
//! Key-classification attack on a toy cipher with key longer than block.
//!
//! For a cipher `E: {0,1}^n x {0,1}^k -> {0,1}^n` with `k > n`, the keys
//! sending `P0` to `C0` form a class of about `2^{k-n}` keys. Given a class
//! generator, one key of the class is found by scanning about `2^n` keys,
//! after which the class is generated and filtered with further known pairs.
//! The attack's own work is thus `O(max(2^n, 2^{k-n}))` encryptions.
//!
//! The toy cipher is small enough that the class generator can be brute
//! force; its work is reported separately from the attack's.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest key width for which exhaustive class enumeration is allowed.
pub const MAX_KEY_BITS: u32 = 28;
pub const MAX_BLOCK_BITS: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToyCipherParams {
    /// Block bits (even).
    pub n: u32,
    /// Key bits.
    pub k: u32,
    pub rounds: u32,
    pub sbox_seed: u64,
}

impl ToyCipherParams {
    pub fn new(n: u32, k: u32, rounds: u32, sbox_seed: u64) -> Result<Self> {
        let p = ToyCipherParams {
            n,
            k,
            rounds,
            sbox_seed,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.n < 2 || !self.n.is_multiple_of(2) || self.n > MAX_BLOCK_BITS {
            return bad(format!(
                "block bits must be even and in 2..={MAX_BLOCK_BITS}, got {}",
                self.n
            ));
        }
        if self.k <= self.n || self.k > MAX_KEY_BITS {
            return bad(format!(
                "key bits must satisfy n < k <= {MAX_KEY_BITS}, got n={} k={}",
                self.n, self.k
            ));
        }
        if self.rounds < 4 {
            return bad(format!("need at least 4 rounds, got {}", self.rounds));
        }
        Ok(())
    }

    pub fn block_mask(&self) -> u32 {
        (1u32 << self.n) - 1
    }

    pub fn key_count(&self) -> u64 {
        1u64 << self.k
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownPair {
    pub p: u32,
    pub c: u32,
}

/// Balanced Feistel over `n/2`-bit halves. Round `i` uses the `n/2` low bits
/// of the key rotated right by `5i`, XORed with a round constant, and a
/// seeded random S-box as round function.
#[derive(Clone, Debug)]
pub struct ToyCipher {
    params: ToyCipherParams,
    sbox: Vec<u16>,
    half: u32,
    half_mask: u32,
}

const KEY_ROTATION_STEP: u32 = 5;

impl ToyCipher {
    pub fn new(params: ToyCipherParams) -> Result<Self> {
        params.validate()?;
        let half = params.n / 2;
        let mut sbox: Vec<u16> = (0..1u32 << half).map(|v| v as u16).collect();
        sbox.shuffle(&mut ChaCha8Rng::seed_from_u64(params.sbox_seed));
        Ok(ToyCipher {
            params,
            sbox,
            half,
            half_mask: (1u32 << half) - 1,
        })
    }

    pub fn params(&self) -> &ToyCipherParams {
        &self.params
    }

    #[inline]
    fn round_key(&self, key: u32, i: u32) -> u32 {
        let k = self.params.k;
        let r = (i * KEY_ROTATION_STEP) % k;
        let kmask = ((1u64 << k) - 1) as u32;
        let rot = if r == 0 {
            key
        } else {
            ((key >> r) | (key << (k - r))) & kmask
        };
        (rot ^ (i + 1).wrapping_mul(0x9e37_79b9) >> 7) & self.half_mask
    }

    #[inline]
    fn f(&self, x: u32, rk: u32) -> u32 {
        self.sbox[((x ^ rk) & self.half_mask) as usize] as u32
    }

    #[inline]
    pub fn encrypt(&self, p: u32, key: u32) -> u32 {
        let (mut l, mut r) = (p >> self.half & self.half_mask, p & self.half_mask);
        for i in 0..self.params.rounds {
            (l, r) = (r, l ^ self.f(r, self.round_key(key, i)));
        }
        (l << self.half) | r
    }

    #[inline]
    pub fn decrypt(&self, c: u32, key: u32) -> u32 {
        let (mut l, mut r) = (c >> self.half & self.half_mask, c & self.half_mask);
        for i in (0..self.params.rounds).rev() {
            (l, r) = (r ^ self.f(l, self.round_key(key, i)), l);
        }
        (l << self.half) | r
    }

    fn check_width(&self, block: u32, key: Option<u32>) -> Result<()> {
        if block & !self.params.block_mask() != 0 {
            return Err(Error::InvalidParams(format!(
                "block {block:#x} wider than {} bits",
                self.params.n
            )));
        }
        if let Some(key) = key {
            if (key as u64) >= self.params.key_count() {
                return Err(Error::InvalidParams(format!(
                    "key {key:#x} wider than {} bits",
                    self.params.k
                )));
            }
        }
        Ok(())
    }
}

pub fn toy_encrypt(p: u32, key: u32, params: &ToyCipherParams) -> Result<u32> {
    let c = ToyCipher::new(*params)?;
    c.check_width(p, Some(key))?;
    Ok(c.encrypt(p, key))
}

pub fn toy_decrypt(c: u32, key: u32, params: &ToyCipherParams) -> Result<u32> {
    let t = ToyCipher::new(*params)?;
    t.check_width(c, Some(key))?;
    Ok(t.decrypt(c, key))
}

fn enumerate_with(cipher: &ToyCipher, p0: u32, c0: u32) -> Vec<u32> {
    const CHUNK: u64 = 1 << 14;
    let total = cipher.params.key_count();
    let mut keys: Vec<u32> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(total);
            (lo as u32..hi as u32).filter(move |&key| cipher.encrypt(p0, key) == c0)
        })
        .collect();
    keys.sort_unstable();
    keys
}

/// Every key in `[0, 2^k)` mapping `p0` to `c0`, ascending.
pub fn toy_class_enumerate(p0: u32, c0: u32, params: &ToyCipherParams) -> Result<Vec<u32>> {
    let cipher = ToyCipher::new(*params)?;
    cipher.check_width(p0, None)?;
    cipher.check_width(c0, None)?;
    Ok(enumerate_with(&cipher, p0, c0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackOutcome {
    /// Lowest class member fitting every pair.
    pub key: Option<u32>,
    /// First key found by the interval scan.
    pub phase1_key: Option<u32>,
    /// Keys encrypted by the interval scan.
    pub phase1_scanned: u64,
    /// Index `i` of the interval `[i 2^n, (i+1) 2^n)` holding the phase-1 key.
    pub phase1_interval: Option<u64>,
    pub class_size: u64,
    /// Encryptions spent checking class members against the other pairs.
    pub phase2_encryptions: u64,
    /// Attack work: phase 1 plus phase 2.
    pub encryptions: u64,
    /// Work spent inside the class generator (exhaustive here).
    pub oracle_encryptions: u64,
}

/// Recover a key consistent with at least three known pairs.
///
/// Phase 1 scans keys in interval order for one mapping `pairs[0].p` to
/// `pairs[0].c`; phase 2 generates that key's class and returns its lowest
/// member that also fits every other pair.
pub fn algorithm1_recover(pairs: &[KnownPair], params: &ToyCipherParams) -> Result<AttackOutcome> {
    if pairs.len() < 3 {
        return Err(Error::TooFewPairs(pairs.len()));
    }
    let cipher = ToyCipher::new(*params)?;
    for pair in pairs {
        cipher.check_width(pair.p, None)?;
        cipher.check_width(pair.c, None)?;
    }
    let (p0, c0) = (pairs[0].p, pairs[0].c);

    let mut out = AttackOutcome {
        key: None,
        phase1_key: None,
        phase1_scanned: 0,
        phase1_interval: None,
        class_size: 0,
        phase2_encryptions: 0,
        encryptions: 0,
        oracle_encryptions: 0,
    };

    let total = params.key_count();
    let hit = (0..total).find(|&key| cipher.encrypt(p0, key as u32) == c0);
    out.phase1_scanned = hit.map_or(total, |key| key + 1);
    let Some(found) = hit else {
        out.encryptions = out.phase1_scanned;
        return Ok(out);
    };
    out.phase1_key = Some(found as u32);
    out.phase1_interval = Some(found >> params.n);

    let class = enumerate_with(&cipher, p0, c0);
    out.oracle_encryptions = total;
    out.class_size = class.len() as u64;

    for &candidate in &class {
        let mut fits = true;
        for pair in &pairs[1..] {
            out.phase2_encryptions += 1;
            if cipher.encrypt(pair.p, candidate) != pair.c {
                fits = false;
                break;
            }
        }
        if fits {
            out.key = Some(candidate);
            break;
        }
    }
    out.encryptions = out.phase1_scanned + out.phase2_encryptions;
    Ok(out)
}

/// Known pairs for a hidden key, from seeded distinct plaintexts.
pub fn known_pairs(
    key: u32,
    count: usize,
    params: &ToyCipherParams,
    seed: u64,
) -> Result<Vec<KnownPair>> {
    let cipher = ToyCipher::new(*params)?;
    cipher.check_width(0, Some(key))?;
    let mut plaintexts: Vec<u32> = (0..=params.block_mask()).collect();
    let (chosen, _) = plaintexts.partial_shuffle(&mut ChaCha8Rng::seed_from_u64(seed), count);
    Ok(chosen
        .iter()
        .map(|&p| KnownPair {
            p,
            c: cipher.encrypt(p, key),
        })
        .collect())
}
