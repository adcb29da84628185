// SPDX-License-Identifier: Apache-2.0
//! `kasumi-lab` command-line tool.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 capacity limit exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kasumi_lab::analysis::{
    fi_equal_output_delta, fi_keypair_for_target, fl_key_class, fo_complete_keys, recover_fi_key,
};
use kasumi_lab::collision::{
    birthday_scan, conditional_stats, verify_equal_ciphertext_pair, verify_report, ScanConfig,
    ScanMode,
};
use kasumi_lab::generic_attack::{algorithm1_recover, known_pairs, ToyCipherParams};
use kasumi_lab::hex::{parse_u16, parse_u32};
use kasumi_lab::keyclass::{round1_sample, round2_search, ClassSpec};
use kasumi_lab::{vectors, Block64, Error, KeyHexOrder, MasterKey};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "kasumi-lab",
    version,
    about = "KASUMI key-class and collision toolkit"
)]
struct Cli {
    /// Output format: human-readable text or one JSON object per line.
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,

    /// Byte order of 128-bit key hex strings.
    #[arg(long, value_enum, global = true, default_value = "le")]
    key_order: Order,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Le,
    Be,
}

impl From<Order> for KeyHexOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::Le => KeyHexOrder::LittleEndian,
            Order::Be => KeyHexOrder::BigEndian,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Encrypt one block.
    Encrypt(CipherArgs),
    /// Decrypt one block.
    Decrypt(CipherArgs),
    /// Print the pre-swap output of every round.
    Trace {
        #[arg(long)]
        p: String,
        #[arg(long)]
        key: String,
        #[arg(long, default_value_t = 8)]
        rounds: usize,
    },
    /// Recover the FI subkey from an input/output pair.
    FiRecover {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Key difference giving equal FI outputs for two inputs.
    FiDelta {
        #[arg(long)]
        x: String,
        #[arg(long)]
        x2: String,
        /// Also solve for a key pair hitting this common output.
        #[arg(long)]
        y: Option<String>,
    },
    /// Complete KO2 and KO3 from an FO input/output pair and guessed subkeys.
    FoComplete {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        ki1: String,
        #[arg(long)]
        ko1: String,
        #[arg(long)]
        ki2: String,
        #[arg(long)]
        ki3: String,
    },
    /// Describe the FL subkeys mapping X to Y.
    FlClass {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Print this many members.
        #[arg(long, default_value_t = 0)]
        members: u64,
    },
    /// Sample keys from a 1-round equivalence class.
    Class1 {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Search a 2-round equivalence class over random heads.
    Class2 {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 16)]
        heads: usize,
        #[arg(long)]
        seed: u64,
        /// Print every key found.
        #[arg(long)]
        keys: bool,
    },
    /// Generic class-based key recovery on a small Feistel cipher.
    ToyAttack {
        #[arg(long, default_value_t = 16)]
        n: u32,
        #[arg(long, default_value_t = 24)]
        k: u32,
        #[arg(long, default_value_t = 8)]
        rounds: u32,
        #[arg(long, default_value_t = 1)]
        sbox_seed: u64,
        /// Hidden key (hex); drawn from --seed when omitted.
        #[arg(long)]
        key: Option<String>,
        #[arg(long, default_value_t = 3)]
        pairs: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Birthday scan for keys with equal truncated ciphertexts.
    Collide {
        #[arg(long, default_value = "0000000000000000")]
        p: String,
        #[arg(long)]
        keys: u64,
        #[arg(long, default_value_t = 8)]
        rounds: usize,
        #[arg(long, default_value_t = 64)]
        compare_bits: u32,
        #[arg(long)]
        seed: u64,
        /// Scan these keys before the generated ones.
        #[arg(long = "inject")]
        inject: Vec<String>,
        #[command(flatten)]
        bucket: BucketArgs,
    },
    /// Estimate p(round i collides | round j collides).
    CondStats {
        #[arg(long, default_value = "0000000000000000")]
        p: String,
        #[arg(long)]
        keys: u64,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long, default_value_t = 32)]
        compare_bits: u32,
        #[arg(long)]
        seed: u64,
    },
    /// Compare the round traces of two keys.
    Pair {
        #[arg(long, default_value = "0000000000000000")]
        p: String,
        #[arg(long)]
        key1: String,
        #[arg(long)]
        key2: String,
        #[arg(long, default_value_t = 8)]
        rounds: usize,
    },
    /// Check a test-vector file (`equal-pair`, `ts35203` or a path).
    Vectors {
        #[arg(long, default_value = "equal-pair")]
        file: String,
    },
}

#[derive(Args)]
struct CipherArgs {
    /// 64-bit block in hex.
    #[arg(long)]
    p: String,
    #[arg(long)]
    key: String,
    #[arg(long, default_value_t = 8)]
    rounds: usize,
    /// Omit the final half swap.
    #[arg(long)]
    pre_swap: bool,
}

#[derive(Args)]
struct ClassArgs {
    #[arg(long)]
    p: String,
    /// Pre-swap output defining the class.
    #[arg(long, required_unless_present = "key", conflicts_with = "key")]
    c: Option<String>,
    /// Derive the class output from this key instead.
    #[arg(long)]
    key: Option<String>,
}

#[derive(Args)]
struct BucketArgs {
    /// Spill records to disk and group them bucket by bucket.
    #[arg(long)]
    bucketed: bool,
    #[arg(long, default_value_t = 64)]
    buckets: u32,
    /// Directory for bucket files (a temporary directory by default).
    #[arg(long)]
    spill_dir: Option<PathBuf>,
}

enum Failure {
    Verify(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Run = Result<(), Failure>;

struct Ctx {
    format: Format,
    order: KeyHexOrder,
}

impl Ctx {
    fn emit(&self, record: Value, text: impl FnOnce() -> String) {
        match self.format {
            Format::Records => println!("{record}"),
            Format::Text => println!("{}", text()),
        }
    }

    fn key(&self, s: &str) -> Result<MasterKey, Error> {
        MasterKey::from_hex(s, self.order)
    }

    fn key_hex(&self, k: &MasterKey) -> String {
        k.to_hex(self.order)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let ctx = Ctx {
        format: cli.format,
        order: cli.key_order.into(),
    };
    match run(&ctx, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Capacity { .. } => 3,
                Error::EmptyClass(_) => 1,
                _ => 2,
            })
        }
    }
}

fn run(ctx: &Ctx, command: Command) -> Run {
    match command {
        Command::Encrypt(a) => cipher(ctx, a, true),
        Command::Decrypt(a) => cipher(ctx, a, false),
        Command::Trace { p, key, rounds } => {
            let p = Block64::from_hex(&p)?;
            let t = kasumi_lab::encrypt_trace(p, &ctx.key(&key)?, rounds)?;
            for (i, c) in t.rounds.iter().enumerate() {
                ctx.emit(json!({"round": i + 1, "left": format!("{:08x}", c.left), "right": format!("{:08x}", c.right)}), || {
                    format!("--->> c{}: left={:x}, right={:x}", i + 1, c.left, c.right)
                });
            }
            ctx.emit(json!({"output": t.output}), || {
                format!("output {}", t.output)
            });
            Ok(())
        }
        Command::FiRecover { x, y } => {
            let (x, y) = (parse_u16(&x)?, parse_u16(&y)?);
            let k = recover_fi_key(x, y);
            ctx.emit(
                json!({"x": hex16(x), "y": hex16(y), "ki": hex16(k)}),
                || hex16(k),
            );
            Ok(())
        }
        Command::FiDelta { x, x2, y } => {
            let (x, x2) = (parse_u16(&x)?, parse_u16(&x2)?);
            let d = fi_equal_output_delta(x, x2);
            let pair = y
                .map(|y| parse_u16(&y))
                .transpose()?
                .map(|y| (y, fi_keypair_for_target(x, x2, y)));
            let mut rec = json!({"x": hex16(x), "x2": hex16(x2), "delta": hex16(d)});
            if let Some((y, (k, k2))) = pair {
                rec["y"] = hex16(y).into();
                rec["k"] = hex16(k).into();
                rec["k2"] = hex16(k2).into();
            }
            ctx.emit(rec, || match pair {
                Some((_, (k, k2))) => format!("delta {} k {} k2 {}", hex16(d), hex16(k), hex16(k2)),
                None => format!("delta {}", hex16(d)),
            });
            Ok(())
        }
        Command::FoComplete {
            x,
            y,
            ki1,
            ko1,
            ki2,
            ki3,
        } => {
            let (x, y) = (parse_u32(&x)?, parse_u32(&y)?);
            let k = fo_complete_keys(
                x,
                y,
                parse_u16(&ki1)?,
                parse_u16(&ko1)?,
                parse_u16(&ki2)?,
                parse_u16(&ki3)?,
            );
            ctx.emit(
                json!({"ko1": hex16(k.ko1), "ko2": hex16(k.ko2), "ko3": hex16(k.ko3), "ki1": hex16(k.ki1), "ki2": hex16(k.ki2), "ki3": hex16(k.ki3)}),
                || format!("ko2 {} ko3 {}", hex16(k.ko2), hex16(k.ko3)),
            );
            Ok(())
        }
        Command::FlClass { x, y, members } => {
            let (x, y) = (parse_u32(&x)?, parse_u32(&y)?);
            let class = fl_key_class(x, y);
            ctx.emit(json!(class), || {
                format!(
                    "consistent {} free bits {} size {}\nkl1 mask {} value {}\nkl2 mask {} value {}",
                    class.consistent,
                    class.free_bit_count,
                    class.size(),
                    hex16(class.kl1_forced_mask),
                    hex16(class.kl1_forced_value),
                    hex16(class.kl2_forced_mask),
                    hex16(class.kl2_forced_value)
                )
            });
            for m in class.members().take(members as usize) {
                ctx.emit(json!({"kl1": hex16(m.kl1), "kl2": hex16(m.kl2)}), || {
                    format!("{} {}", hex16(m.kl1), hex16(m.kl2))
                });
            }
            if !class.consistent {
                return Err(Failure::Verify("no FL subkey maps X to Y".into()));
            }
            Ok(())
        }
        Command::Class1 { class, count, seed } => {
            let spec = class_spec(ctx, &class, 1)?;
            for key in round1_sample(&spec, count, seed)? {
                if !spec.contains(&key) {
                    return Err(Failure::Verify(format!(
                        "{} left the class",
                        ctx.key_hex(&key)
                    )));
                }
                let hex = ctx.key_hex(&key);
                ctx.emit(json!({"key": hex}), || hex.clone());
            }
            Ok(())
        }
        Command::Class2 {
            class,
            heads,
            seed,
            keys,
        } => {
            let spec = class_spec(ctx, &class, 2)?;
            eprintln!("searching {heads} heads ({} pivots each)", 1u32 << 16);
            let s = round2_search(&spec, heads, seed)?;
            if let Some(k) = s.keys.iter().find(|k| !spec.contains(k)) {
                return Err(Failure::Verify(format!(
                    "{} left the class",
                    ctx.key_hex(k)
                )));
            }
            if keys {
                for k in &s.keys {
                    let hex = ctx.key_hex(k);
                    ctx.emit(json!({"key": hex}), || hex.clone());
                }
            }
            ctx.emit(json!(s), || {
                format!(
                    "heads {} keys {} mean survivors {:.3} pivots {} fi evals {}",
                    s.heads,
                    s.keys.len(),
                    s.mean_survivors,
                    s.cost.pivots,
                    s.cost.fi_evals
                )
            });
            Ok(())
        }
        Command::ToyAttack {
            n,
            k,
            rounds,
            sbox_seed,
            key,
            pairs,
            seed,
        } => {
            let params = ToyCipherParams::new(n, k, rounds, sbox_seed)?;
            let hidden = match key {
                Some(s) => u32::from_str_radix(s.trim_start_matches("0x"), 16)
                    .map_err(|_| Error::InvalidHex(s.clone()))?,
                None => (kasumi_lab::collision::generated_key(seed, 0).to_u128() as u32) & mask(k),
            };
            if hidden > mask(k) {
                return Err(
                    Error::InvalidParams(format!("key {hidden:#x} exceeds {k} bits")).into(),
                );
            }
            let known = known_pairs(hidden, pairs, &params, seed)?;
            eprintln!("scanning up to 2^{k} keys");
            let out = algorithm1_recover(&known, &params)?;
            let mut rec = json!(out);
            rec["hidden"] = format!("{hidden:x}").into();
            ctx.emit(rec, || {
                format!(
                    "hidden {hidden:x} recovered {} class size {} encryptions {} (phase 1 {}, phase 2 {}) oracle {}",
                    out.key.map_or("none".into(), |k| format!("{k:x}")),
                    out.class_size,
                    out.encryptions,
                    out.phase1_scanned,
                    out.phase2_encryptions,
                    out.oracle_encryptions
                )
            });
            match out.key {
                Some(_) => Ok(()),
                None => Err(Failure::Verify("no key fits every pair".into())),
            }
        }
        Command::Collide {
            p,
            keys,
            rounds,
            compare_bits,
            seed,
            inject,
            bucket,
        } => {
            let mut cfg = ScanConfig::new(Block64::from_hex(&p)?, keys, rounds, compare_bits, seed);
            cfg.injected = inject
                .iter()
                .map(|s| ctx.key(s))
                .collect::<Result<_, _>>()?;
            if bucket.bucketed {
                cfg.mode = ScanMode::Bucketed {
                    dir: bucket.spill_dir,
                    buckets: bucket.buckets,
                };
            }
            eprintln!("scanning {keys} keys");
            let report = birthday_scan(&cfg)?;
            for g in &report.groups {
                let ks: Vec<String> = g.keys.iter().map(|k| ctx.key_hex(k)).collect();
                ctx.emit(
                    json!({"output": format!("{:016x}", g.output), "keys": ks}),
                    || format!("{:016x} {}", g.output, ks.join(" ")),
                );
            }
            ctx.emit(
                json!({"pairs": report.pair_count, "expected_pairs": report.expected_pairs, "keys_scanned": report.keys_scanned, "rounds": report.rounds, "compare_bits": report.compare_bits, "seed": report.seed}),
                || format!("pairs {} expected {:.3} keys {}", report.pair_count, report.expected_pairs, report.keys_scanned),
            );
            if !verify_report(&report) {
                return Err(Failure::Verify("a reported group does not collide".into()));
            }
            Ok(())
        }
        Command::CondStats {
            p,
            keys,
            i,
            j,
            compare_bits,
            seed,
        } => {
            let est = conditional_stats(Block64::from_hex(&p)?, keys, i, j, compare_bits, seed)?;
            ctx.emit(json!(est), || {
                let p = est.probability.map_or("n/a".into(), |p| format!("{p:.4}"));
                let ci = est
                    .interval95
                    .map_or("n/a".into(), |(a, b)| format!("[{a:.4}, {b:.4}]"));
                format!(
                    "pairs at round {} {} (expected {:.2}), also at round {} {}; p {} 95% CI {}",
                    est.round_j,
                    est.pairs_j,
                    est.expected_pairs_j,
                    est.round_i,
                    est.pairs_both,
                    p,
                    ci
                )
            });
            Ok(())
        }
        Command::Pair {
            p,
            key1,
            key2,
            rounds,
        } => {
            let r = verify_equal_ciphertext_pair(
                Block64::from_hex(&p)?,
                &ctx.key(&key1)?,
                &ctx.key(&key2)?,
                rounds,
            )?;
            for (round, l, rt) in r.per_round() {
                ctx.emit(
                    json!({"round": round, "left_equal": l, "right_equal": rt}),
                    || format!("c{round}: left {} right {}", eq(l), eq(rt)),
                );
            }
            ctx.emit(
                json!({"equal": r.equal, "output1": r.trace1.output, "output2": r.trace2.output}),
                || {
                    format!(
                        "{} {} {}",
                        r.trace1.output,
                        r.trace2.output,
                        if r.equal { "equal" } else { "differ" }
                    )
                },
            );
            if !r.equal {
                return Err(Failure::Verify("ciphertexts differ".into()));
            }
            Ok(())
        }
        Command::Vectors { file } => {
            let records = match file.as_str() {
                "equal-pair" => vectors::parse(vectors::EQUAL_PAIR, "equal-pair".as_ref())?,
                "ts35203" => vectors::parse(vectors::TS35203, "ts35203".as_ref())?,
                path => vectors::load(path.as_ref())?,
            };
            let mut failed = 0;
            for r in &records {
                let o = vectors::check(r);
                failed += !o.passed() as usize;
                ctx.emit(json!(o), || {
                    let status = if o.passed() { "ok  " } else { "FAIL" };
                    let mut s = format!(
                        "{status} line {} key {} expected {} got {}",
                        o.line, o.key, o.expected, o.actual
                    );
                    if !o.trace_mismatches.is_empty() {
                        s += &format!(" trace mismatch at rounds {:?}", o.trace_mismatches);
                    }
                    s
                });
            }
            if failed > 0 {
                return Err(Failure::Verify(format!(
                    "{failed} of {} vectors failed",
                    records.len()
                )));
            }
            Ok(())
        }
    }
}

fn cipher(ctx: &Ctx, a: CipherArgs, forward: bool) -> Run {
    let input = Block64::from_hex(&a.p)?;
    let key = ctx.key(&a.key)?;
    let out = if forward {
        kasumi_lab::encrypt(input, &key, a.rounds, a.pre_swap)?
    } else {
        kasumi_lab::decrypt(input, &key, a.rounds, a.pre_swap)?
    };
    ctx.emit(
        json!({"input": input, "key": ctx.key_hex(&key), "rounds": a.rounds, "output": out}),
        || out.to_hex(),
    );
    Ok(())
}

fn class_spec(ctx: &Ctx, a: &ClassArgs, rounds: usize) -> Result<ClassSpec, Error> {
    let p0 = Block64::from_hex(&a.p)?;
    match (&a.c, &a.key) {
        (Some(c), _) => ClassSpec::new(p0, Block64::from_hex(c)?, rounds),
        (None, Some(k)) => ClassSpec::from_key(p0, &ctx.key(k)?, rounds),
        (None, None) => Err(Error::InvalidParams("need --c or --key".into())),
    }
}

fn hex16(v: u16) -> String {
    format!("{v:04x}")
}

fn mask(bits: u32) -> u32 {
    ((1u64 << bits) - 1) as u32
}

fn eq(b: bool) -> &'static str {
    if b {
        "equal"
    } else {
        "differ"
    }
}
