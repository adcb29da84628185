// SPDX-License-Identifier: Apache-2.0
//! Line-oriented test-vector files.
//!
//! Each non-blank, non-`#` line is a record:
//!
//! ```text
//! <plaintext> <key> <rounds> <expected> [<c1>,<c2>,...]
//! ```
//!
//! where every `c_i` is `left:right` in 8-digit hex (the pre-swap pair after
//! round `i`) and `expected` is the standard-convention state after `rounds`
//! rounds. A `key-order le|be` directive sets how subsequent keys are read.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hex;
use crate::kasumi::{encrypt_trace, Block64, KeyHexOrder, MasterKey};

/// The equal-ciphertext reference pair, shipped with the crate.
pub const EQUAL_PAIR: &str = include_str!("../vectors/equal_pair.txt");
/// Standard conformance vector.
pub const TS35203: &str = include_str!("../vectors/ts35203.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorRecord {
    pub line: usize,
    pub plaintext: Block64,
    pub key: MasterKey,
    pub key_order: KeyHexOrder,
    pub rounds: usize,
    pub expected: Block64,
    pub trace: Vec<Block64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VectorOutcome {
    pub line: usize,
    pub key: String,
    pub expected: String,
    pub actual: String,
    pub output_ok: bool,
    /// Rounds (1-based) whose trace entry did not match.
    pub trace_mismatches: Vec<usize>,
}

impl VectorOutcome {
    pub fn passed(&self) -> bool {
        self.output_ok && self.trace_mismatches.is_empty()
    }
}

fn parse_pair(s: &str) -> Option<Block64> {
    let (l, r) = s.split_once(':')?;
    Some(Block64::new(
        hex::parse_u32(l).ok()?,
        hex::parse_u32(r).ok()?,
    ))
}

pub fn parse(text: &str, path: &Path) -> Result<Vec<VectorRecord>> {
    let err = |line: usize, msg: String| Error::VectorParse {
        path: PathBuf::from(path),
        line,
        msg,
    };
    let mut order = KeyHexOrder::LittleEndian;
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields[0] == "key-order" {
            order = match fields.get(1).copied() {
                Some("le") => KeyHexOrder::LittleEndian,
                Some("be") => KeyHexOrder::BigEndian,
                other => return Err(err(line, format!("bad key-order {other:?}"))),
            };
            continue;
        }
        if !(4..=5).contains(&fields.len()) {
            return Err(err(
                line,
                format!("expected 4 or 5 fields, got {}", fields.len()),
            ));
        }
        let plaintext = Block64::from_hex(fields[0]).map_err(|e| err(line, e.to_string()))?;
        let key = MasterKey::from_hex(fields[1], order).map_err(|e| err(line, e.to_string()))?;
        let rounds: usize = fields[2]
            .parse()
            .map_err(|_| err(line, format!("bad round count {:?}", fields[2])))?;
        if !(1..=8).contains(&rounds) {
            return Err(err(line, format!("round count {rounds} outside 1..=8")));
        }
        let expected = Block64::from_hex(fields[3]).map_err(|e| err(line, e.to_string()))?;
        let trace = match fields.get(4) {
            None => Vec::new(),
            Some(t) => t
                .split(',')
                .map(|p| parse_pair(p).ok_or_else(|| err(line, format!("bad trace entry {p:?}"))))
                .collect::<Result<Vec<_>>>()?,
        };
        if trace.len() > rounds {
            return Err(err(
                line,
                format!("{} trace entries for {rounds} rounds", trace.len()),
            ));
        }
        out.push(VectorRecord {
            line,
            plaintext,
            key,
            key_order: order,
            rounds,
            expected,
            trace,
        });
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<Vec<VectorRecord>> {
    parse(&std::fs::read_to_string(path)?, path)
}

pub fn check(record: &VectorRecord) -> VectorOutcome {
    let trace = encrypt_trace(record.plaintext, &record.key, record.rounds)
        .expect("round count validated at parse time");
    let trace_mismatches = record
        .trace
        .iter()
        .enumerate()
        .filter(|(i, want)| trace.rounds[*i] != **want)
        .map(|(i, _)| i + 1)
        .collect();
    VectorOutcome {
        line: record.line,
        key: record.key.to_hex(record.key_order),
        expected: record.expected.to_hex(),
        actual: trace.output.to_hex(),
        output_ok: trace.output == record.expected,
        trace_mismatches,
    }
}
