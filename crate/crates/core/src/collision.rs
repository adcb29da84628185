// SPDX-License-Identifier: Apache-2.0
//! Birthday collisions of round-reduced KASUMI under many keys.
//!
//! A fixed plaintext is encrypted under `N` distinct keys; outputs are
//! compared on their top `compare_bits` bits. With `b` compared bits about
//! `C(N, 2) / 2^b` colliding pairs are expected for a random-looking cipher.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kasumi::{encrypt_trace, Block64, Kasumi, MasterKey, RoundTrace};

/// Most keys an in-memory scan will hold.
pub const IN_MEMORY_KEY_LIMIT: u64 = 1 << 25;

const BATCH: u64 = 1 << 14;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum ScanMode {
    #[default]
    InMemory,
    /// Spill `(output, key)` records into `buckets` files under `dir` (a
    /// fresh temporary directory when `None`) and group one bucket at a time.
    Bucketed { dir: Option<PathBuf>, buckets: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanConfig {
    pub p0: Block64,
    /// Total keys scanned, including `injected`.
    pub num_keys: u64,
    pub rounds: usize,
    pub compare_bits: u32,
    pub seed: u64,
    /// Keys scanned before the generated ones.
    pub injected: Vec<MasterKey>,
    pub mode: ScanMode,
}

impl ScanConfig {
    pub fn new(p0: Block64, num_keys: u64, rounds: usize, compare_bits: u32, seed: u64) -> Self {
        ScanConfig {
            p0,
            num_keys,
            rounds,
            compare_bits,
            seed,
            injected: Vec::new(),
            mode: ScanMode::InMemory,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1..=8).contains(&self.rounds) {
            return Err(Error::InvalidRounds(self.rounds));
        }
        if !(1..=64).contains(&self.compare_bits) {
            return Err(Error::InvalidParams(format!(
                "compare bits must be in 1..=64, got {}",
                self.compare_bits
            )));
        }
        if self.num_keys < 2 {
            return Err(Error::InvalidParams("need at least 2 keys".into()));
        }
        if (self.injected.len() as u64) > self.num_keys {
            return Err(Error::InvalidParams(format!(
                "{} injected keys exceed the key count {}",
                self.injected.len(),
                self.num_keys
            )));
        }
        if self.mode == ScanMode::InMemory && self.num_keys > IN_MEMORY_KEY_LIMIT {
            return Err(Error::Capacity {
                requested: self.num_keys,
                limit: IN_MEMORY_KEY_LIMIT,
            });
        }
        if let ScanMode::Bucketed { buckets, .. } = self.mode {
            if buckets == 0 {
                return Err(Error::InvalidParams("bucket count must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Top `bits` bits of a 64-bit value, left in place.
#[inline]
pub fn truncate(v: u64, bits: u32) -> u64 {
    if bits >= 64 {
        v
    } else {
        v & !(u64::MAX >> bits)
    }
}

// Counter-mode key stream. The high word is a seeded bijection of the
// counter, so keys from one seed are pairwise distinct.
#[inline]
fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// The `index`-th generated key for `seed`.
pub fn generated_key(seed: u64, index: u64) -> MasterKey {
    let s = mix64(seed ^ 0x6a09_e667_f3bc_c908);
    let hi = mix64(index ^ s);
    let lo = mix64(mix64(index.wrapping_add(s.rotate_left(17))) ^ 0x3c6e_f372_fe94_f82b);
    MasterKey::from_u128(((hi as u128) << 64) | lo as u128)
}

/// Keys with equal truncated output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionGroup {
    /// Output truncated to the compared bits (uncompared bits zero).
    pub output: u64,
    /// Sorted ascending.
    pub keys: Vec<MasterKey>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollisionReport {
    pub groups: Vec<CollisionGroup>,
    pub pair_count: u64,
    pub keys_scanned: u64,
    pub expected_pairs: f64,
    pub p0: Block64,
    pub rounds: usize,
    pub compare_bits: u32,
    pub seed: u64,
}

/// `C(n, 2) / 2^bits`.
pub fn expected_pairs(n: u64, bits: u32) -> f64 {
    let n = n as f64;
    n * (n - 1.0) / 2.0 / 2f64.powi(bits as i32)
}

fn key_at(config: &ScanConfig, index: u64) -> MasterKey {
    let injected = config.injected.len() as u64;
    if index < injected {
        config.injected[index as usize]
    } else {
        generated_key(config.seed, index - injected)
    }
}

fn batch_records(config: &ScanConfig, batch: u64) -> Vec<(u64, MasterKey)> {
    let lo = batch * BATCH;
    let hi = (lo + BATCH).min(config.num_keys);
    (lo..hi)
        .map(|i| {
            let key = key_at(config, i);
            let out = Kasumi::new(&key).encrypt_rounds(config.p0, config.rounds);
            (truncate(out.to_u64(), config.compare_bits), key)
        })
        .collect()
}

fn group_sorted(records: &mut [(u64, MasterKey)], groups: &mut Vec<CollisionGroup>) {
    records.sort_unstable();
    for run in records.chunk_by(|a, b| a.0 == b.0) {
        if run.len() >= 2 {
            let mut keys: Vec<MasterKey> = run.iter().map(|r| r.1).collect();
            keys.dedup();
            if keys.len() >= 2 {
                groups.push(CollisionGroup {
                    output: run[0].0,
                    keys,
                });
            }
        }
    }
}

fn scan_bucketed(
    config: &ScanConfig,
    dir: Option<&PathBuf>,
    buckets: u32,
) -> Result<Vec<CollisionGroup>> {
    let tmp;
    let root = match dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            d.clone()
        }
        None => {
            tmp = tempfile::tempdir()?;
            tmp.path().to_path_buf()
        }
    };
    let paths: Vec<PathBuf> = (0..buckets)
        .map(|b| root.join(format!("bucket-{b:05}.bin")))
        .collect();
    let mut writers = paths
        .iter()
        .map(|p| File::create(p).map(BufWriter::new))
        .collect::<std::io::Result<Vec<_>>>()?;

    let batches = config.num_keys.div_ceil(BATCH);
    // a bounded window of batches in flight at once
    let window = (rayon::current_num_threads() as u64).max(1) * 4;
    let mut start = 0;
    while start < batches {
        let end = (start + window).min(batches);
        let chunk: Vec<Vec<(u64, MasterKey)>> = (start..end)
            .into_par_iter()
            .map(|b| batch_records(config, b))
            .collect();
        for (out, key) in chunk.into_iter().flatten() {
            let b = (mix64(out) % buckets as u64) as usize;
            writers[b].write_all(&out.to_le_bytes())?;
            writers[b].write_all(&key.to_bytes())?;
        }
        start = end;
    }
    for w in &mut writers {
        w.flush()?;
    }
    drop(writers);

    let mut groups = Vec::new();
    for path in &paths {
        let mut reader = BufReader::new(File::open(path)?);
        let mut records = Vec::new();
        let mut buf = [0u8; 24];
        loop {
            match reader.read_exact(&mut buf) {
                Ok(()) => {}
                Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => break,
                Err(e) => return Err(e.into()),
            }
            let out = u64::from_le_bytes(buf[..8].try_into().unwrap());
            let key = MasterKey::from_bytes(buf[8..].try_into().unwrap());
            records.push((out, key));
        }
        group_sorted(&mut records, &mut groups);
        std::fs::remove_file(path)?;
    }
    Ok(groups)
}

/// Encrypt `p0` under `num_keys` distinct keys and report every group of
/// keys whose truncated round-`rounds` outputs coincide.
pub fn birthday_scan(config: &ScanConfig) -> Result<CollisionReport> {
    config.validate()?;
    let mut groups = match &config.mode {
        ScanMode::InMemory => {
            let mut records: Vec<(u64, MasterKey)> = (0..config.num_keys.div_ceil(BATCH))
                .into_par_iter()
                .flat_map_iter(|b| batch_records(config, b))
                .collect();
            let mut groups = Vec::new();
            group_sorted(&mut records, &mut groups);
            groups
        }
        ScanMode::Bucketed { dir, buckets } => scan_bucketed(config, dir.as_ref(), *buckets)?,
    };
    groups.sort_unstable_by_key(|g| g.output);
    let pair_count = groups
        .iter()
        .map(|g| {
            let n = g.keys.len() as u64;
            n * (n - 1) / 2
        })
        .sum();
    Ok(CollisionReport {
        groups,
        pair_count,
        keys_scanned: config.num_keys,
        expected_pairs: expected_pairs(config.num_keys, config.compare_bits),
        p0: config.p0,
        rounds: config.rounds,
        compare_bits: config.compare_bits,
        seed: config.seed,
    })
}

/// Re-encrypt every grouped key; true when all reproduce their group output.
pub fn verify_report(report: &CollisionReport) -> bool {
    report.groups.iter().all(|g| {
        g.keys.iter().all(|k| {
            let out = Kasumi::new(k).encrypt_rounds(report.p0, report.rounds);
            truncate(out.to_u64(), report.compare_bits) == g.output
        })
    })
}

/// Estimate of `p(C_i = C'_i | C_j = C'_j)` over key pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalEstimate {
    pub round_i: usize,
    pub round_j: usize,
    pub compare_bits: u32,
    pub keys_scanned: u64,
    pub seed: u64,
    /// Key pairs colliding at round `j`.
    pub pairs_j: u64,
    /// Of those, pairs also colliding at round `i`.
    pub pairs_both: u64,
    pub expected_pairs_j: f64,
    /// `None` when no pair collides at round `j`.
    pub probability: Option<f64>,
    /// 95% Wilson score interval.
    pub interval95: Option<(f64, f64)>,
}

pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Option<(f64, f64)> {
    if trials == 0 {
        return None;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Some(((centre - half).max(0.0), (centre + half).min(1.0)))
}

/// Among key pairs whose truncated round-`j` outputs collide, the fraction
/// whose truncated round-`i` outputs also collide (`i > j`).
pub fn conditional_stats(
    p0: Block64,
    num_keys: u64,
    round_i: usize,
    round_j: usize,
    compare_bits: u32,
    seed: u64,
) -> Result<ConditionalEstimate> {
    if round_i <= round_j {
        return Err(Error::InvalidParams(format!(
            "need i > j, got i={round_i} j={round_j}"
        )));
    }
    if round_j < 1 {
        return Err(Error::InvalidRounds(round_j));
    }
    let config = ScanConfig::new(p0, num_keys, round_i, compare_bits, seed);
    config.validate()?;

    let mut records: Vec<(u64, u64)> = (0..num_keys.div_ceil(BATCH))
        .into_par_iter()
        .flat_map_iter(|b| {
            let lo = b * BATCH;
            let hi = (lo + BATCH).min(num_keys);
            let config = &config;
            (lo..hi).map(move |n| {
                let cipher = Kasumi::new(&key_at(config, n));
                let at_j = cipher.encrypt_rounds(p0, round_j);
                let at_i = continue_rounds(&cipher, at_j, round_j, round_i);
                (
                    truncate(at_j.to_u64(), compare_bits),
                    truncate(at_i.to_u64(), compare_bits),
                )
            })
        })
        .collect();
    records.sort_unstable();

    let (mut pairs_j, mut pairs_both) = (0u64, 0u64);
    for run in records.chunk_by(|a, b| a.0 == b.0) {
        let n = run.len() as u64;
        pairs_j += n * (n - 1) / 2;
        for sub in run.chunk_by(|a, b| a.1 == b.1) {
            let m = sub.len() as u64;
            pairs_both += m * (m - 1) / 2;
        }
    }
    let probability = (pairs_j > 0).then(|| pairs_both as f64 / pairs_j as f64);
    Ok(ConditionalEstimate {
        round_i,
        round_j,
        compare_bits,
        keys_scanned: num_keys,
        seed,
        pairs_j,
        pairs_both,
        expected_pairs_j: expected_pairs(num_keys, compare_bits),
        probability,
        interval95: wilson_interval(pairs_both, pairs_j, 1.96),
    })
}

fn continue_rounds(cipher: &Kasumi, state: Block64, from: usize, to: usize) -> Block64 {
    let (mut l, mut r) = (state.left, state.right);
    for i in from + 1..=to {
        let f = crate::kasumi::round_function(i, l, cipher.schedule().round(i));
        (l, r) = (r ^ f, l);
    }
    Block64::new(l, r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairReport {
    pub equal: bool,
    pub trace1: RoundTrace,
    pub trace2: RoundTrace,
}

impl PairReport {
    /// Rounds (1-based) whose pre-swap outputs agree in each half:
    /// `(round, left_equal, right_equal)`.
    pub fn per_round(&self) -> Vec<(usize, bool, bool)> {
        self.trace1
            .rounds
            .iter()
            .zip(&self.trace2.rounds)
            .enumerate()
            .map(|(i, (a, b))| (i + 1, a.left == b.left, a.right == b.right))
            .collect()
    }
}

pub fn verify_equal_ciphertext_pair(
    p0: Block64,
    key1: &MasterKey,
    key2: &MasterKey,
    rounds: usize,
) -> Result<PairReport> {
    let trace1 = encrypt_trace(p0, key1, rounds)?;
    let trace2 = encrypt_trace(p0, key2, rounds)?;
    Ok(PairReport {
        equal: trace1.output == trace2.output,
        trace1,
        trace2,
    })
}
