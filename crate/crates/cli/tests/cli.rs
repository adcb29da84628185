// SPDX-License-Identifier: Apache-2.0
use std::process::{Command, Output};

use serde_json::Value;

const KEY1: &str = "F1D941159CA8B6238135DACB8A370940";
const KEY2: &str = "CAFF6AC383136437A70C4560AC98CE9F";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kasumi-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is JSON"))
        .collect()
}

#[test]
fn encrypt_reference_key() {
    let o = run(&[
        "encrypt",
        "--p",
        "0000000000000000",
        "--key",
        KEY1,
        "--rounds",
        "8",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "2dbcda8d84cdad86");
}

#[test]
fn encrypt_decrypt_big_endian_key() {
    let key = "2BD6459F82C5B300952C49104881FF48";
    let o = run(&[
        "--key-order",
        "be",
        "encrypt",
        "--p",
        "EA024714AD5C4D84",
        "--key",
        key,
    ]);
    assert_eq!(stdout(&o).trim(), "df1f9b251c0bf45f");
    let o = run(&[
        "decrypt",
        "--key-order",
        "be",
        "--p",
        "df1f9b251c0bf45f",
        "--key",
        key,
    ]);
    assert_eq!(stdout(&o).trim(), "ea024714ad5c4d84");
}

#[test]
fn trace_lines() {
    let o = run(&["trace", "--p", "0000000000000000", "--key", KEY2]);
    let out = stdout(&o);
    assert!(out.starts_with("--->> c1: left=0, right=aa108129\n"));
    assert!(out.contains("--->> c8: left=84cdad86, right=2dbcda8d\n"));
}

#[test]
fn records_round_trip() {
    let o = run(&[
        "--format",
        "records",
        "trace",
        "--p",
        "0000000000000000",
        "--key",
        KEY1,
    ]);
    let recs = records(&o);
    assert_eq!(recs.len(), 9);
    assert_eq!(recs[0]["right"], "db16eed5");
    assert_eq!(recs[8]["output"], "2dbcda8d84cdad86");

    let o = run(&[
        "--format",
        "records",
        "fo-complete",
        "--x",
        "01234567",
        "--y",
        "89abcdef",
        "--ki1",
        "0001",
        "--ko1",
        "0002",
        "--ki2",
        "0003",
        "--ki3",
        "0004",
    ]);
    let rec = &records(&o)[0];
    let field = |k: &str| u16::from_str_radix(rec[k].as_str().unwrap(), 16).unwrap();
    let keys = kasumi_lab::FoKeys {
        ko1: field("ko1"),
        ko2: field("ko2"),
        ko3: field("ko3"),
        ki1: field("ki1"),
        ki2: field("ki2"),
        ki3: field("ki3"),
    };
    assert_eq!(kasumi_lab::fo(0x01234567, &keys), 0x89abcdef);
}

#[test]
fn width_errors_exit_2() {
    let o = run(&["encrypt", "--p", "0000000000000000", "--key", &KEY1[..31]]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["encrypt", "--p", "00000000000000", "--key", KEY1]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "encrypt",
        "--p",
        "0000000000000000",
        "--key",
        KEY1,
        "--rounds",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn capacity_exits_3() {
    let o = run(&["collide", "--keys", "40000000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bucketed"));
}

#[test]
fn seed_required() {
    let o = run(&["collide", "--keys", "1000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn vectors_pass() {
    for file in ["equal-pair", "ts35203"] {
        let o = run(&["vectors", "--file", file]);
        assert!(o.status.success(), "{file}");
    }
}

#[test]
fn broken_vector_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(
        &path,
        format!("key-order le\n0000000000000000 {KEY1} 8 2dbcda8d84cdad87\n"),
    )
    .unwrap();
    let o = run(&["vectors", "--file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn pair_and_injected_collision() {
    let o = run(&["pair", "--key1", KEY1, "--key2", KEY2]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("c7: left differ right equal"));

    let o = run(&[
        "--format",
        "records",
        "collide",
        "--keys",
        "4096",
        "--compare-bits",
        "64",
        "--seed",
        "9",
        "--inject",
        KEY1,
        "--inject",
        KEY2,
    ]);
    assert!(o.status.success());
    let recs = records(&o);
    assert_eq!(recs[0]["output"], "2dbcda8d84cdad86");
    assert_eq!(recs.last().unwrap()["pairs"], 1);
}

#[test]
fn bucketed_matches_in_memory() {
    let base = [
        "collide",
        "--keys",
        "20000",
        "--compare-bits",
        "28",
        "--seed",
        "5",
    ];
    let a = run(&base);
    let mut args = base.to_vec();
    args.extend(["--bucketed", "--buckets", "4"]);
    let b = run(&args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn class1_members_encrypt_to_class_output() {
    let p = "0123456789abcdef";
    let o = run(&[
        "--format", "records", "class1", "--p", p, "--key", KEY1, "--count", "5", "--seed", "2",
    ]);
    assert!(o.status.success());
    let order = kasumi_lab::KeyHexOrder::LittleEndian;
    let p0 = kasumi_lab::Block64::from_hex(p).unwrap();
    let key = kasumi_lab::MasterKey::from_hex(KEY1, order).unwrap();
    let c0 = kasumi_lab::encrypt(p0, &key, 1, true).unwrap();
    for r in records(&o) {
        let m = kasumi_lab::MasterKey::from_hex(r["key"].as_str().unwrap(), order).unwrap();
        assert_eq!(kasumi_lab::encrypt(p0, &m, 1, true).unwrap(), c0);
    }
}

#[test]
fn toy_attack_recovers() {
    let o = run(&[
        "--format",
        "records",
        "toy-attack",
        "--n",
        "12",
        "--k",
        "16",
        "--seed",
        "3",
    ]);
    assert!(o.status.success());
    let rec = &records(&o)[0];
    assert!(rec["key"].is_u64());
    assert!(rec["encryptions"].as_u64().unwrap() <= 4 * 4096);
}

#[test]
fn fl_class_inconsistent_exits_1() {
    let o = run(&["fl-class", "--x", "12345678", "--y", "9abcdef0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&[
        "fl-class",
        "--x",
        "00000000",
        "--y",
        "00000000",
        "--members",
        "2",
    ]);
    assert!(o.status.success());
}
