// SPDX-License-Identifier: Apache-2.0
//! KASUMI cryptanalysis workbench.
//!
//! * [`kasumi`]: the cipher, full and round-reduced, with per-round traces.
//! * [`analysis`]: FI/FO/FL algebra (FI key recovery, FO completion, FL
//!   key classes).
//! * [`keyclass`]: equivalence classes of 1- and 2-round KASUMI keys.
//! * [`generic_attack`]: the key-classification attack on a toy cipher.
//! * [`collision`]: birthday collision scans and conditional statistics.
//! * [`vectors`]: test-vector files.

pub mod analysis;
pub mod collision;
pub mod error;
pub mod generic_attack;
pub mod hex;
pub mod kasumi;
pub mod keyclass;
pub mod vectors;

pub use error::{Error, Result};
pub use kasumi::{
    decrypt, encrypt, encrypt_trace, fi, fi_inv, fl, fl_inv, fo, fo_inv, key_schedule, Block64,
    FlKey, FoKeys, Kasumi, KeyHexOrder, KeySchedule, MasterKey, RoundKeys, RoundTrace,
};
