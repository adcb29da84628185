// SPDX-License-Identifier: Apache-2.0
//! Criterion benchmarks for `kasumi-lab`; run with `cargo bench -p kasumi-lab-bench`.
