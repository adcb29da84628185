// SPDX-License-Identifier: Apache-2.0
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use kasumi_lab::collision::{birthday_scan, ScanConfig};
use kasumi_lab::keyclass::{round2_solve_tail, ClassSpec, Round2Head};
use kasumi_lab::{encrypt, fi, Block64, MasterKey};

fn cipher(c: &mut Criterion) {
    let key = MasterKey([
        0x4009, 0x378a, 0xcbda, 0x3581, 0x23b6, 0xa89c, 0x1541, 0xd9f1,
    ]);
    let p = Block64::from_u64(0xea024714ad5c4d84);
    c.bench_function("fi", |b| {
        b.iter(|| fi(black_box(0x1234), black_box(0xabcd)))
    });
    let mut g = c.benchmark_group("encrypt");
    for rounds in [1, 2, 8] {
        g.bench_with_input(BenchmarkId::from_parameter(rounds), &rounds, |b, &r| {
            b.iter(|| encrypt(black_box(p), &key, r, false).unwrap())
        });
    }
    g.finish();
}

fn round2(c: &mut Criterion) {
    let key = MasterKey([1, 2, 3, 4, 5, 6, 7, 8]);
    let spec = ClassSpec::from_key(Block64::from_u64(0x0123456789abcdef), &key, 2).unwrap();
    let head = Round2Head::of_key(&key);
    c.bench_function("round2_solve_tail", |b| {
        b.iter(|| round2_solve_tail(&spec, black_box(&head)).unwrap())
    });
}

fn scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("birthday_scan");
    g.sample_size(10);
    for log_n in [12, 16] {
        let cfg = ScanConfig::new(Block64::default(), 1 << log_n, 8, 32, 1);
        g.bench_with_input(
            BenchmarkId::from_parameter(format!("2^{log_n}")),
            &cfg,
            |b, cfg| b.iter(|| birthday_scan(cfg).unwrap()),
        );
    }
    g.finish();
}

criterion_group!(benches, cipher, round2, scan);
criterion_main!(benches);
