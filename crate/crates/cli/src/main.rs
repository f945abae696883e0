mod io;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use grc_core::analysis::{
    check_overlap_bound, check_pair_mr_bijection, check_phase_isomorphism, check_theorem5,
    gsdrp_measure, power_measure, Verdict,
};
use grc_core::generators::{gen_fibonacci, gen_gsdrp, gen_power, gen_repetitive, XorShift64Star};
use grc_core::repair::mr_order_signature;
use grc_core::{
    decode, encode, grammar_stats, mr_repair_compress_with_trim, naive_mr_compress,
    repair_compress, repair_enumerate, Algorithm, Grammar, SizeMetric, TieBreak, TrimSide,
};

use crate::io::{read_bytes, read_input, read_text, write_bytes, write_output};

#[derive(Parser)]
#[command(
    name = "grc",
    version,
    about = "Grammar compression by recursive pairing"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compress a text into a .grc grammar file.
    Compress {
        #[arg(long, value_enum)]
        algo: AlgoArg,
        #[arg(long, value_enum, default_value = "first")]
        tiebreak: TieArg,
        /// End dropped from repeats that start and end alike (mr only).
        #[arg(long, value_enum)]
        trim: Option<TrimArg>,
        #[arg(short = 'o')]
        out: PathBuf,
        input: PathBuf,
    },
    /// Expand a .grc file back to its text.
    Decompress {
        #[arg(short = 'o')]
        out: PathBuf,
        input: PathBuf,
    },
    /// Print rule count, rule lengths, start length and total size.
    ///
    /// A .grc input is decoded; any other input is compressed with --algo
    /// and the compression is timed.
    Stats {
        #[arg(long, value_enum, default_value = "with-terminals")]
        metric: MetricArg,
        #[arg(long, value_enum)]
        algo: Option<AlgoArg>,
        input: PathBuf,
    },
    /// Write a generated text to a .sym file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run a checker and report pass/fail; exits nonzero on any failure.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Enumerate every RePair grammar over all tie choices.
    Enumerate {
        input: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        max_branches: usize,
    },
    /// Time all three compressors on each input.
    Bench {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Repair,
    Mr,
    NaiveMr,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Repair => Algorithm::RePair,
            AlgoArg::Mr => Algorithm::MrRePair,
            AlgoArg::NaiveMr => Algorithm::NaiveMrRePair,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    First,
    Lex,
}

#[derive(Clone, Copy, ValueEnum)]
enum TrimArg {
    Prefix,
    Suffix,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    WithTerminals,
    Without,
}

#[derive(Args)]
struct Out {
    #[arg(short = 'o')]
    out: PathBuf,
}

#[derive(Subcommand)]
enum GenKind {
    Gsdrp {
        #[arg(long)]
        f: u32,
        #[command(flatten)]
        out: Out,
    },
    Power {
        /// A single symbol, given as one byte.
        #[arg(long)]
        u: String,
        #[arg(long)]
        w: String,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        out: Out,
    },
    Fib {
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        out: Out,
    },
    Repetitive {
        #[arg(long)]
        copies: u32,
        #[arg(long)]
        patterns: u32,
        #[arg(long)]
        patlen: u32,
        #[arg(long)]
        sigma: u32,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
}

/// Texts to check: files, or seeded random texts.
#[derive(Args)]
struct Texts {
    #[arg(conflicts_with = "random")]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 100, requires = "random")]
    n: usize,
    #[arg(long, default_value_t = 4, requires = "random")]
    sigma: u32,
    #[arg(long, default_value_t = 100, requires = "random")]
    trials: usize,
    #[arg(long, default_value_t = 0, requires = "random")]
    seed: u64,
}

#[derive(Subcommand)]
enum Check {
    /// Most frequent pairs map one-to-one into most frequent maximal repeats.
    Bijection(Texts),
    /// Occurrences of most frequent maximal repeats overlap by at most one.
    Overlap(Texts),
    /// RePair and MR-RePair phases agree up to renaming.
    Isomorphism {
        #[command(flatten)]
        texts: Texts,
        #[arg(long, default_value_t = 200_000)]
        max_branches: usize,
    },
    /// Tie choice on the gsdrp(f) text changes grammar size by f+2.
    Gsdrp {
        #[arg(long)]
        f: u32,
    },
    /// MR-RePair is at most RePair and more than half of it, same order.
    Theorem5(Texts),
    /// Naive-MR-RePair exceeds RePair by (m-1)(|w|-1)-1 on power texts.
    Theorem4 {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        wlen: usize,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Returns false when a verification failed.
fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Compress {
            algo,
            tiebreak,
            trim,
            out,
            input,
        } => {
            if trim.is_some() && !matches!(algo, AlgoArg::Mr) {
                bail!("--trim applies only to --algo mr");
            }
            let text = read_text(&input)?;
            let tie = match tiebreak {
                TieArg::First => TieBreak::FirstOccurrence,
                TieArg::Lex => TieBreak::LexicographicMin,
            };
            let side = match trim {
                Some(TrimArg::Suffix) => TrimSide::Suffix,
                _ => TrimSide::Prefix,
            };
            let g = compress_with(&text, algo, &tie, side)?;
            write_bytes(&out, &encode(&g, algo.into())?)?;
            println!(
                "{}: {} symbols -> grammar size {}",
                out.display(),
                text.len(),
                g.size(SizeMetric::WithTerminalRules)
            );
        }
        Cmd::Decompress { out, input } => {
            let (g, _) = decode(&read_bytes(&input)?)?;
            write_output(&out, &g.expand_text())?;
        }
        Cmd::Stats {
            metric,
            algo,
            input,
        } => stats(&input, metric, algo)?,
        Cmd::Gen { kind } => {
            let (text, out) = match kind {
                GenKind::Gsdrp { f, out } => (gen_gsdrp(f)?, out),
                GenKind::Power { u, w, m, out } => {
                    let [u] = u.as_bytes() else {
                        bail!("--u must be a single byte");
                    };
                    let w: Vec<u32> = w.bytes().map(u32::from).collect();
                    (gen_power(*u as u32, &w, m)?, out)
                }
                GenKind::Fib { k, out } => (gen_fibonacci(k)?, out),
                GenKind::Repetitive {
                    copies,
                    patterns,
                    patlen,
                    sigma,
                    seed,
                    out,
                } => (gen_repetitive(copies, patterns, patlen, sigma, seed)?, out),
            };
            write_output(&out.out, &text)?;
            println!("{}: {} symbols", out.out.display(), text.len());
        }
        Cmd::Verify { check } => return verify(check),
        Cmd::Enumerate {
            input,
            max_branches,
        } => enumerate(&input, max_branches)?,
        Cmd::Bench { inputs } => bench(&inputs)?,
    }
    Ok(true)
}

fn compress_with(text: &[u32], algo: AlgoArg, tie: &TieBreak, side: TrimSide) -> Result<Grammar> {
    Ok(match algo {
        AlgoArg::Repair => repair_compress(text, tie)?.0,
        AlgoArg::Mr => mr_repair_compress_with_trim(text, tie, side)?.0,
        AlgoArg::NaiveMr => naive_mr_compress(text, tie)?,
    })
}

fn stats(input: &Path, metric: MetricArg, algo: Option<AlgoArg>) -> Result<()> {
    let raw = read_bytes(input)?;
    let start = Instant::now();
    let g = if raw.starts_with(grc_core::codec::GRC_MAGIC) {
        if algo.is_some() {
            bail!(
                "--algo is only used for text inputs; {} is already a grammar",
                input.display()
            );
        }
        decode(&raw)?.0
    } else {
        let Some(algo) = algo else {
            bail!(
                "{} is not a .grc file; pass --algo to compress it",
                input.display()
            );
        };
        let text = read_text(input)?;
        let start = Instant::now();
        let g = compress_with(&text, algo, &TieBreak::FirstOccurrence, TrimSide::Prefix)?;
        return print_stats(&g, metric, start.elapsed().as_secs_f64());
    };
    print_stats(&g, metric, start.elapsed().as_secs_f64())
}

fn print_stats(g: &Grammar, metric: MetricArg, secs: f64) -> Result<()> {
    let s = grammar_stats(g)?;
    let metric = match metric {
        MetricArg::WithTerminals => SizeMetric::WithTerminalRules,
        MetricArg::Without => SizeMetric::WithoutTerminalRules,
    };
    println!("rules\t{}", s.rule_count_excl_terminals);
    println!("rule_lengths\t{}", s.rhs_total_excl_start_excl_terminals);
    println!("start_length\t{}", s.start_len);
    println!("total_size\t{}", s.total(metric));
    println!("elapsed_s\t{secs:.6}");
    Ok(())
}

fn texts(src: &Texts) -> Result<Vec<(String, Vec<u32>)>> {
    if src.random {
        if src.sigma == 0 || src.n == 0 {
            bail!("--n and --sigma must be positive");
        }
        let mut rng = XorShift64Star::new(src.seed);
        return Ok((0..src.trials)
            .map(|i| {
                let t = (0..src.n).map(|_| rng.below(src.sigma)).collect();
                (format!("random#{i}"), t)
            })
            .collect());
    }
    if src.inputs.is_empty() {
        bail!("give input files or --random");
    }
    src.inputs
        .iter()
        .map(|p| Ok((p.display().to_string(), read_input(p)?)))
        .collect()
}

fn report(name: &str, texts: &[(String, Vec<u32>)], check: impl Fn(&[u32]) -> Verdict) -> bool {
    let (mut pass, mut skip, mut fail) = (0, 0, 0);
    for (label, t) in texts {
        let v = check(t);
        match &v {
            Verdict::Pass => pass += 1,
            Verdict::Skipped(_) => skip += 1,
            Verdict::Counterexample(_) => fail += 1,
        }
        let tag = match v {
            Verdict::Pass => "PASS",
            Verdict::Skipped(_) => "SKIP",
            Verdict::Counterexample(_) => "FAIL",
        };
        println!("{tag} {name} {label}: {v}");
    }
    println!("{name}: {pass} passed, {skip} skipped, {fail} failed");
    fail == 0
}

fn verify(check: Check) -> Result<bool> {
    Ok(match check {
        Check::Bijection(src) => report("bijection", &texts(&src)?, check_pair_mr_bijection),
        Check::Overlap(src) => report("overlap", &texts(&src)?, check_overlap_bound),
        Check::Isomorphism {
            texts: src,
            max_branches,
        } => report("isomorphism", &texts(&src)?, |t| {
            check_phase_isomorphism(t, max_branches)
        }),
        Check::Theorem5(src) => report("theorem5", &texts(&src)?, check_theorem5),
        Check::Gsdrp { f } => {
            let r = gsdrp_measure(f)?;
            let n = 6 * f as usize * f as usize - 2 * f as usize;
            let ok = r.n == n && r.diff == f as i64 + 2;
            println!(
                "{} gsdrp f={f}: n={} prefer={} defer={} diff {} (expected {}), lower bound {:.6}",
                if ok { "PASS" } else { "FAIL" },
                r.n,
                r.g_prefer_xy,
                r.g_defer_xy,
                r.diff,
                f + 2,
                r.lower_bound_at_n
            );
            ok
        }
        Check::Theorem4 { m, wlen } => {
            let r = power_measure(m, wlen)?;
            println!(
                "{} theorem4 m={m} |w|={wlen}: n={} g_rp={} g_nmr={} diff {} (expected {})",
                if r.holds() { "PASS" } else { "FAIL" },
                r.n,
                r.g_rp,
                r.g_nmr,
                r.diff(),
                r.expected_diff
            );
            r.holds()
        }
    })
}

fn enumerate(input: &Path, max_branches: usize) -> Result<()> {
    let text = read_text(input)?;
    let runs = repair_enumerate(&text, max_branches)?;
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    let mut classes: BTreeMap<_, usize> = BTreeMap::new();
    for r in &runs {
        *sizes
            .entry(r.grammar.size(SizeMetric::WithTerminalRules))
            .or_default() += 1;
        *classes
            .entry(mr_order_signature(&r.grammar, &r.log))
            .or_default() += 1;
    }
    println!("grammars\t{}", runs.len());
    println!("mr_order_classes\t{}", classes.len());
    for (size, count) in sizes {
        println!("size {size}\t{count}");
    }
    Ok(())
}

fn bench(inputs: &[PathBuf]) -> Result<()> {
    println!("file\talgo\tn\trules\trule_lengths\tstart_length\ttotal_size\tseconds");
    for path in inputs {
        let text = read_text(path)?;
        for (name, algo) in [
            ("repair", AlgoArg::Repair),
            ("mr", AlgoArg::Mr),
            ("naive-mr", AlgoArg::NaiveMr),
        ] {
            let start = Instant::now();
            let g = compress_with(&text, algo, &TieBreak::FirstOccurrence, TrimSide::Prefix)?;
            let secs = start.elapsed().as_secs_f64();
            let s = grammar_stats(&g)?;
            println!(
                "{}\t{name}\t{}\t{}\t{}\t{}\t{}\t{secs:.6}",
                path.display(),
                text.len(),
                s.rule_count_excl_terminals,
                s.rhs_total_excl_start_excl_terminals,
                s.start_len,
                s.total_size
            );
        }
    }
    Ok(())
}
