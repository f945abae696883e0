//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the report is always
//! printed.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use grc_core::analysis::{
    check_overlap_bound, check_pair_mr_bijection, check_phase_isomorphism, gsdrp_lower_bound,
    gsdrp_measure, has_self_overlapping_top_repeat, power_measure, theorem5_measure, Verdict,
};
use grc_core::generators::{gen_fibonacci, gen_gsdrp, gen_power, gen_repetitive};
use grc_core::repair::mr_order_signature;
use grc_core::{
    compress, decompress, encode, mr_repair_compress, naive_mr_compress, repair_compress,
    repair_enumerate, Algorithm, SizeMetric, TieBreak,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const ALGOS: [Algorithm; 3] = [
    Algorithm::RePair,
    Algorithm::MrRePair,
    Algorithm::NaiveMrRePair,
];
const SEED: u64 = 0x5EED_2019;

fn bytes(s: &str) -> Vec<u32> {
    s.bytes().map(u32::from).collect()
}

fn power_text() -> Vec<u32> {
    bytes(&("abcd".repeat(7) + "a"))
}

fn figure_texts() -> Vec<Vec<u32>> {
    vec![
        bytes("abracadabra"),
        power_text(),
        bytes("abcdeabccde"),
        bytes("bcxdabcyabzdabvbcuda"),
    ]
}

fn random_text(rng: &mut StdRng, n: usize, sigma: u32) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..sigma)).collect()
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    match (out, limit) {
        (Ok(msg), Some(l)) if took >= l => Err(format!("{msg}; took {took:.2?}, limit {l:?}")),
        (Ok(msg), _) => Ok(format!("{msg}; {took:.2?}")),
        (Err(e), _) => Err(e),
    }
}

fn figure_sizes() -> Outcome {
    let tie = TieBreak::FirstOccurrence;
    let mut got = Vec::new();
    for t in [bytes("abracadabra"), power_text()] {
        let rp = repair_compress(&t, &tie).unwrap().0;
        let nmr = naive_mr_compress(&t, &tie).unwrap();
        let mr = mr_repair_compress(&t, &tie).unwrap().0;
        got.push([rp, nmr, mr].map(|g| g.size(SizeMetric::WithTerminalRules)));
    }
    let want = [[16, 14, 15], [18, 19, 16]];
    if got == want {
        Ok(format!("{got:?}"))
    } else {
        Err(format!("got {got:?}, want {want:?}"))
    }
}

fn round_trip_all() -> Outcome {
    let mut inputs: Vec<(String, Vec<u32>)> = Vec::new();
    for (i, t) in figure_texts().into_iter().enumerate() {
        inputs.push((format!("figure#{i}"), t));
    }
    for k in 5..=25 {
        inputs.push((format!("fib({k})"), gen_fibonacci(k).unwrap()));
    }
    for f in 2..=6 {
        inputs.push((format!("gsdrp({f})"), gen_gsdrp(f).unwrap()));
    }
    for m in 1..=4 {
        for wl in 1..=4u32 {
            let w: Vec<u32> = (1..=wl).collect();
            inputs.push((format!("power({m},{wl})"), gen_power(0, &w, m).unwrap()));
        }
    }
    inputs.push((
        "repetitive".into(),
        gen_repetitive(4, 64, 16, 16, SEED).unwrap(),
    ));
    let mut rng = StdRng::seed_from_u64(SEED);
    for i in 0..100 {
        let n = rng.gen_range(1..=10_000);
        let t: Vec<u32> = (0..n).map(|_| rng.gen::<u8>() as u32).collect();
        inputs.push((format!("random#{i}"), t));
    }
    let mut checked = 0;
    for (name, t) in &inputs {
        for algo in ALGOS {
            let g = compress(t, algo).map_err(|e| format!("{name} {algo:?}: {e}"))?;
            let b = encode(&g, algo).map_err(|e| format!("{name} {algo:?}: {e}"))?;
            let back = decompress(&b).map_err(|e| format!("{name} {algo:?}: {e}"))?;
            if &back != t {
                return Err(format!("{name} {algo:?}: decompressed text differs"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} round trips"))
}

fn verdict_tally(texts: &[Vec<u32>], check: impl Fn(&[u32]) -> Verdict) -> Result<usize, String> {
    let mut pass = 0;
    for t in texts {
        match check(t) {
            Verdict::Pass => pass += 1,
            other => return Err(format!("{other} on {t:?}")),
        }
    }
    Ok(pass)
}

fn lemma_checks() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 3);
    let sigmas = [2, 4, 16];
    let mut texts = figure_texts();
    for i in 0..500 {
        let n = rng.gen_range(1..=300);
        texts.push(random_text(&mut rng, n, sigmas[i % 3]));
    }
    let a = verdict_tally(&texts, check_pair_mr_bijection)?;
    let b = verdict_tally(&texts, check_overlap_bound)?;
    Ok(format!(
        "bijection {a}/{} and overlap {b}/{} texts",
        texts.len(),
        texts.len()
    ))
}

fn phase_isomorphism() -> Outcome {
    const LIMIT: usize = 200_000;
    for s in ["abracadabra", "abcdeabccde"] {
        let v = check_phase_isomorphism(&bytes(s), LIMIT);
        if !v.is_pass() {
            return Err(format!("{s}: {v}"));
        }
    }
    let mut rng = StdRng::seed_from_u64(SEED + 4);
    let (mut passed, mut drawn) = (0, 0);
    while passed < 100 {
        drawn += 1;
        if drawn > 10_000 {
            return Err(format!("only {passed} eligible texts in {drawn} draws"));
        }
        let n = rng.gen_range(8..=40);
        let sigma = rng.gen_range(2..=4);
        let t = random_text(&mut rng, n, sigma);
        if has_self_overlapping_top_repeat(&t).unwrap() {
            continue;
        }
        match check_phase_isomorphism(&t, LIMIT) {
            Verdict::Pass => passed += 1,
            Verdict::Skipped(_) => {}
            Verdict::Counterexample(c) => return Err(format!("{t:?}: {c}")),
        }
    }
    Ok(format!(
        "2 figure texts + {passed} random texts ({drawn} drawn)"
    ))
}

fn enumeration() -> Outcome {
    let runs = repair_enumerate(&bytes("abcdeabccde"), 100_000).map_err(|e| e.to_string())?;
    if runs.len() != 12 {
        return Err(format!("abcdeabccde: {} rule sets, want 12", runs.len()));
    }
    let mut classes: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    for r in &runs {
        classes
            .entry(mr_order_signature(&r.grammar, &r.log))
            .or_default()
            .push(r.grammar.size(SizeMetric::WithTerminalRules));
    }
    let shape: Vec<usize> = classes.values().map(Vec::len).collect();
    if shape != [6, 6] {
        return Err(format!("class sizes {shape:?}, want [6, 6]"));
    }
    if classes.values().any(|s| s.iter().any(|&x| x != s[0])) {
        return Err(format!("sizes differ inside a class: {classes:?}"));
    }
    let runs =
        repair_enumerate(&bytes("bcxdabcyabzdabvbcuda"), 100_000).map_err(|e| e.to_string())?;
    let sizes: std::collections::BTreeSet<usize> = runs
        .iter()
        .map(|r| r.grammar.size(SizeMetric::WithoutTerminalRules))
        .collect();
    if !(sizes.contains(&18) && sizes.contains(&19)) {
        return Err(format!(
            "bcxdabcyabzdabvbcuda sizes {sizes:?} lack 18 or 19"
        ));
    }
    Ok(format!(
        "12 rule sets in classes {shape:?}; second text sizes {sizes:?}"
    ))
}

fn gsdrp() -> Outcome {
    let mut rows = Vec::new();
    for f in 3..=8u32 {
        let r = gsdrp_measure(f).map_err(|e| e.to_string())?;
        let n = (6 * f * f - 2 * f) as usize;
        let bound = gsdrp_lower_bound(n);
        if r.n != n || r.diff != f as i64 + 2 || (bound - (f as f64 + 2.0)).abs() > 1e-9 {
            return Err(format!("f = {f}: {r:?}"));
        }
        rows.push(format!(
            "f={f}: {}-{}={}",
            r.g_prefer_xy, r.g_defer_xy, r.diff
        ));
    }
    Ok(rows.join(", "))
}

fn power() -> Outcome {
    let mut rows = Vec::new();
    for (m, wl) in [(2, 3), (3, 3), (3, 4), (4, 5)] {
        let r = power_measure(m, wl).map_err(|e| e.to_string())?;
        if !r.holds() {
            return Err(format!("{r:?}: diff {}", r.diff()));
        }
        rows.push(format!("({m},{wl}): {}-{}={}", r.g_nmr, r.g_rp, r.diff()));
    }
    Ok(rows.join(", "))
}

fn theorem5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 8);
    let mut worst = 1.0f64;
    for i in 0..200 {
        let n = rng.gen_range(1..=2000);
        let sigma = [2, 3, 4, 8, 26][i % 5];
        let t = random_text(&mut rng, n, sigma);
        let r = theorem5_measure(&t).map_err(|e| format!("text #{i}: {e}"))?;
        if !r.holds() {
            return Err(format!("text #{i}: g_mr = {}, g_rp = {}", r.g_mr, r.g_rp));
        }
        worst = worst.min(r.g_mr as f64 / r.g_rp as f64);
    }
    Ok(format!("200 texts, min g_mr/g_rp = {worst:.3}"))
}

fn table2() -> Outcome {
    let tie = TieBreak::FirstOccurrence;
    for k in 1..=25 {
        let t = gen_fibonacci(k).unwrap();
        let rp = repair_compress(&t, &tie)
            .unwrap()
            .0
            .size(SizeMetric::WithTerminalRules);
        let mr = mr_repair_compress(&t, &tie)
            .unwrap()
            .0
            .size(SizeMetric::WithTerminalRules);
        if rp != mr {
            return Err(format!("fib({k}): RePair {rp}, MR-RePair {mr}"));
        }
    }
    let t = gen_repetitive(8, 128, 32, 64, SEED).unwrap();
    let rp = repair_compress(&t, &tie)
        .unwrap()
        .0
        .size(SizeMetric::WithTerminalRules);
    let mr = mr_repair_compress(&t, &tie)
        .unwrap()
        .0
        .size(SizeMetric::WithTerminalRules);
    let ratio = mr as f64 / rp as f64;
    if ratio > 0.75 {
        return Err(format!("repetitive: g_mr/g_rp = {mr}/{rp} = {ratio:.3}"));
    }
    Ok(format!(
        "fib 1..=25 equal; repetitive g_mr/g_rp = {mr}/{rp} = {ratio:.3}"
    ))
}

fn performance() -> Outcome {
    const MB: u32 = 1 << 20;
    // 32 copies of patterns of length 64 over 77 symbols, as in rand77
    let time = |bytes: u32| {
        let t = gen_repetitive(32, bytes / (32 * 64), 64, 77, SEED).unwrap();
        let start = Instant::now();
        let (g, _) = mr_repair_compress(&t, &TieBreak::FirstOccurrence).unwrap();
        let took = start.elapsed();
        assert_eq!(g.expand_text().len(), t.len());
        took
    };
    let small = time(5 * MB);
    let large = time(10 * MB);
    let ratio = large.as_secs_f64() / small.as_secs_f64();
    let msg = format!("5 MB {small:.2?}, 10 MB {large:.2?}, ratio {ratio:.2}");
    if large >= Duration::from_secs(60) || ratio >= 3.0 {
        Err(msg)
    } else {
        Ok(msg)
    }
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (
            "figure-exact sizes",
            Some(Duration::from_secs(1)),
            figure_sizes,
        ),
        ("round trip", Some(Duration::from_secs(30)), round_trip_all),
        (
            "pair/repeat bijection and overlap bound",
            None,
            lemma_checks,
        ),
        ("first-phase isomorphism", None, phase_isomorphism),
        ("tie enumeration classes", None, enumeration),
        ("tie-break size gap", None, gsdrp),
        ("naive repeat replacement penalty", None, power),
        ("MR-RePair vs RePair in the same order", None, theorem5),
        (
            "fibonacci and repetitive sizes",
            Some(Duration::from_secs(60)),
            table2,
        ),
        ("performance smoke test", None, performance),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let out =
            std::panic::catch_unwind(|| timed(limit, f)).unwrap_or_else(|_| Err("panicked".into()));
        match out {
            Ok(msg) => println!("PASS [{:>2}] {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
