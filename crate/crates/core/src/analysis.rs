//! Brute-force oracles and checkers for the structural facts tying RePair to
//! maximal repeats.
//!
//! Everything here is quadratic or worse and meant for small inputs; the
//! oracle refuses texts longer than its cap.

use std::collections::HashSet;
use std::fmt;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::generators::{gen_gsdrp, gen_power, XorShift64Star};
use crate::grammar::{equality_pattern, map_to_alphabet, Grammar, SizeMetric};
use crate::mr::{mr_repair_compress, naive_mr_compress, MaxRepeat};
use crate::pairs::PairIndex;
use crate::repair::{repair_compress, repair_following_trace, CompressError, TieBreak};

pub const DEFAULT_ORACLE_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("text of length {n} exceeds the oracle cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
}

/// Outcome of a checker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// The check does not apply (hypothesis violated, input too large).
    Skipped(String),
    Counterexample(String),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        *self == Verdict::Pass
    }

    pub fn is_counterexample(&self) -> bool {
        matches!(self, Verdict::Counterexample(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Skipped(why) => write!(f, "skipped: {why}"),
            Verdict::Counterexample(what) => write!(f, "counterexample: {what}"),
        }
    }
}

pub fn brute_maximal_repeats(t: &[u32]) -> Result<Vec<MaxRepeat>, OracleError> {
    brute_maximal_repeats_capped(t, DEFAULT_ORACLE_CAP)
}

/// All maximal repeats of length at least 2, by refining occurrence classes
/// one symbol at a time. Sorted by frequency (descending), first occurrence,
/// then length (descending).
pub fn brute_maximal_repeats_capped(t: &[u32], cap: usize) -> Result<Vec<MaxRepeat>, OracleError> {
    let n = t.len();
    if n > cap {
        return Err(OracleError::CapExceeded { n, cap });
    }
    let mut out = Vec::new();
    // classes of start positions sharing a length-`len` substring
    let mut classes: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut len = 0;
    while !classes.is_empty() {
        let mut next = Vec::new();
        for class in classes {
            let mut split: FxHashMap<u32, Vec<usize>> = FxHashMap::default();
            for &i in &class {
                if i + len < n {
                    split.entry(t[i + len]).or_default().push(i);
                }
            }
            next.extend(split.into_values().filter(|c| c.len() >= 2));
        }
        len += 1;
        for class in &next {
            if len >= 2 && is_maximal(t, class, len) {
                out.push(MaxRepeat {
                    symbols: t[class[0]..class[0] + len].to_vec(),
                    freq: class.len() as u32,
                    occurrences: class.iter().map(|&i| i as u32).collect(),
                });
            }
        }
        classes = next;
    }
    out.sort_by(|a, b| {
        b.freq
            .cmp(&a.freq)
            .then(a.occurrences[0].cmp(&b.occurrences[0]))
            .then(b.symbols.len().cmp(&a.symbols.len()))
    });
    Ok(out)
}

fn is_maximal(t: &[u32], occ: &[usize], len: usize) -> bool {
    let uniform = |f: &dyn Fn(usize) -> Option<u32>| {
        let first = f(occ[0]);
        first.is_some() && occ.iter().all(|&i| f(i) == first)
    };
    let left = |i: usize| i.checked_sub(1).map(|j| t[j]);
    let right = |i: usize| t.get(i + len).copied();
    !uniform(&left) && !uniform(&right)
}

/// Overlap-counted pair frequencies.
fn pair_counts(t: &[u32]) -> FxHashMap<(u32, u32), u32> {
    let mut m = FxHashMap::default();
    for w in t.windows(2) {
        *m.entry((w[0], w[1])).or_insert(0) += 1;
    }
    m
}

fn most_frequent(mrs: &[MaxRepeat]) -> &[MaxRepeat] {
    let f = mrs.first().map_or(0, |r| r.freq);
    let end = mrs.iter().position(|r| r.freq != f).unwrap_or(mrs.len());
    &mrs[..end]
}

fn oracle_or_skip(t: &[u32]) -> Result<Vec<MaxRepeat>, Verdict> {
    brute_maximal_repeats(t).map_err(|e| Verdict::Skipped(e.to_string()))
}

/// A pair is most frequent iff it occurs once in exactly one most frequent
/// maximal repeat, and the top pair and top repeat frequencies agree.
pub fn check_pair_mr_bijection(t: &[u32]) -> Verdict {
    let mrs = match oracle_or_skip(t) {
        Ok(m) => m,
        Err(v) => return v,
    };
    let counts = pair_counts(t);
    let fp = counts.values().copied().max().unwrap_or(0);
    let engine = PairIndex::build(t).max_frequency();
    if engine != fp {
        return Verdict::Counterexample(format!("pair index reports {engine}, direct count {fp}"));
    }
    let top = most_frequent(&mrs);
    let fr = top.first().map_or(0, |r| r.freq);
    if fp < 2 {
        return if top.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Counterexample(format!("repeat of frequency {fr} but no repeated pair"))
        };
    }
    if fp != fr {
        return Verdict::Counterexample(format!(
            "top pair frequency {fp}, top repeat frequency {fr}"
        ));
    }
    for (&p, _) in counts.iter().filter(|(_, &c)| c == fp) {
        let hits: usize = top
            .iter()
            .map(|r| r.symbols.windows(2).filter(|w| (w[0], w[1]) == p).count())
            .sum();
        if hits != 1 {
            return Verdict::Counterexample(format!(
                "most frequent pair {p:?} occurs {hits} times across most frequent repeats"
            ));
        }
    }
    for r in top {
        for w in r.symbols.windows(2) {
            if counts[&(w[0], w[1])] != fp {
                return Verdict::Counterexample(format!(
                    "pair {:?} inside {:?} is not most frequent",
                    (w[0], w[1]),
                    r.symbols
                ));
            }
        }
    }
    Verdict::Pass
}

/// Any two occurrences of most frequent maximal repeats share at most one
/// position.
pub fn check_overlap_bound(t: &[u32]) -> Verdict {
    let mrs = match oracle_or_skip(t) {
        Ok(m) => m,
        Err(v) => return v,
    };
    let mut occ: Vec<(usize, usize, usize)> = Vec::new();
    for (id, r) in most_frequent(&mrs).iter().enumerate() {
        for &s in &r.occurrences {
            occ.push((s as usize, s as usize + r.symbols.len(), id));
        }
    }
    occ.sort_unstable();
    for (i, &(s1, e1, r1)) in occ.iter().enumerate() {
        for &(s2, e2, r2) in &occ[i + 1..] {
            if s2 >= e1 {
                break;
            }
            let overlap = e1.min(e2) - s2;
            if overlap > 1 {
                return Verdict::Counterexample(format!(
                    "{:?}@{s1} and {:?}@{s2} overlap by {overlap}",
                    mrs[r1].symbols, mrs[r2].symbols
                ));
            }
        }
    }
    Verdict::Pass
}

/// True if some most frequent maximal repeat has two overlapping
/// occurrences.
pub fn has_self_overlapping_top_repeat(t: &[u32]) -> Result<bool, OracleError> {
    let mrs = brute_maximal_repeats(t)?;
    Ok(most_frequent(&mrs).iter().any(|r| {
        r.occurrences
            .windows(2)
            .any(|w| ((w[1] - w[0]) as usize) < r.symbols.len())
    }))
}

/// Budgeted search over one phase: every way to finish the phase of
/// frequency `f` from `idx`, recorded as equality patterns of the result.
struct PhaseSearch {
    budget: usize,
    seen: HashSet<Vec<u32>>,
    outcomes: HashSet<Vec<u32>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Step {
    Pair,
    Repeat,
}

impl PhaseSearch {
    fn new(budget: usize) -> Self {
        PhaseSearch {
            budget,
            seen: HashSet::new(),
            outcomes: HashSet::new(),
        }
    }

    fn run(&mut self, idx: &PairIndex, f: u32, next_var: u32, step: Step) -> Result<(), ()> {
        let pattern = equality_pattern(&idx.symbols());
        if !self.seen.insert(pattern.clone()) {
            return Ok(());
        }
        if self.budget == 0 {
            return Err(());
        }
        self.budget -= 1;
        if idx.max_frequency() < f {
            self.outcomes.insert(pattern);
            return Ok(());
        }
        let mut done_repeats = HashSet::new();
        for p in idx.pairs_with_frequency(f).collect::<Vec<_>>() {
            let mut child = idx.clone();
            match step {
                Step::Pair => {
                    child.replace_pair(p, next_var).expect("pair present");
                }
                Step::Repeat => {
                    if !apply_repeat(&mut child, p, next_var, &mut done_repeats) {
                        continue;
                    }
                }
            }
            self.run(&child, f, next_var + 1, step)?;
        }
        Ok(())
    }
}

/// One MR-RePair step through pair `p`; false if its repeat was already tried.
fn apply_repeat(idx: &mut PairIndex, p: (u32, u32), v: u32, done: &mut HashSet<Vec<u32>>) -> bool {
    let r = crate::mr::extend_to_maximal_repeat(idx, p);
    if !done.insert(r.symbols.clone()) {
        return false;
    }
    let kept = crate::mr::trim_if_bookended(&r.symbols);
    idx.replace_run_greedy(&r.occurrences, kept.len(), v)
        .expect("repeat occurrences present");
    true
}

/// Finishes the current phase with uniformly random choices among most
/// frequent pairs.
fn random_pair_phase(idx: &mut PairIndex, f: u32, next_var: &mut u32, rng: &mut XorShift64Star) {
    while idx.max_frequency() == f && f >= 2 {
        let ps: Vec<_> = idx.pairs_with_frequency(f).collect();
        let p = ps[rng.below(ps.len() as u32) as usize];
        idx.replace_pair(p, *next_var).expect("pair present");
        *next_var += 1;
    }
}

/// Compares RePair and maximal-repeat replacement phase by phase: every way
/// RePair can finish a phase must match, up to renaming, some way of
/// replacing that phase's most frequent maximal repeats. The first phase is
/// searched exhaustively on both sides; later phases follow a few seeded
/// random RePair runs and search only the repeat side. Texts whose most
/// frequent repeats overlap themselves are skipped. `branch_limit` bounds
/// the states visited per search.
pub fn check_phase_isomorphism(t: &[u32], branch_limit: usize) -> Verdict {
    check_phase_isomorphism_seeded(t, branch_limit, 4, 0)
}

pub fn check_phase_isomorphism_seeded(
    t: &[u32],
    branch_limit: usize,
    samples: u32,
    seed: u64,
) -> Verdict {
    if t.is_empty() {
        return Verdict::Pass;
    }
    let (_, mapped) = map_to_alphabet(t);
    match has_self_overlapping_top_repeat(&mapped) {
        Err(e) => return Verdict::Skipped(e.to_string()),
        Ok(true) => {
            return Verdict::Skipped("a most frequent maximal repeat overlaps itself".into());
        }
        Ok(false) => {}
    }
    let idx = PairIndex::build(&mapped);
    let f = idx.max_frequency();
    if f < 2 {
        return Verdict::Pass;
    }
    let base = mapped.iter().max().map_or(0, |m| m + 1);
    let mut rp = PhaseSearch::new(branch_limit);
    let mut mr = PhaseSearch::new(branch_limit);
    if rp.run(&idx, f, base, Step::Pair).is_err() || mr.run(&idx, f, base, Step::Repeat).is_err() {
        return Verdict::Skipped(format!("first phase exceeds {branch_limit} states"));
    }
    if let Some(bad) = rp.outcomes.iter().find(|o| !mr.outcomes.contains(*o)) {
        return Verdict::Counterexample(format!(
            "first phase (f = {f}): RePair outcome with pattern {bad:?} matches no repeat replacement"
        ));
    }

    let mut rng = XorShift64Star::new(seed);
    for sample in 0..samples {
        let mut idx = idx.clone();
        let mut next_var = base;
        random_pair_phase(&mut idx, f, &mut next_var, &mut rng);
        loop {
            let g = idx.max_frequency();
            if g < 2 {
                break;
            }
            let symbols = idx.symbols();
            if has_self_overlapping_top_repeat(&symbols).unwrap_or(true) {
                // hypothesis fails from here on this run
                break;
            }
            let mut repeats = PhaseSearch::new(branch_limit);
            if repeats.run(&idx, g, next_var, Step::Repeat).is_err() {
                break;
            }
            random_pair_phase(&mut idx, g, &mut next_var, &mut rng);
            let got = equality_pattern(&idx.symbols());
            if !repeats.outcomes.contains(&got) {
                return Verdict::Counterexample(format!(
                    "sample {sample}, phase f = {g}: RePair outcome {got:?} matches no repeat replacement"
                ));
            }
        }
    }
    Verdict::Pass
}

/// Naive-MR-RePair driven directly by the brute-force oracle: each step
/// takes the first repeat in oracle order and replaces its occurrences
/// greedily from the left. Used to cross-check the pair-based driver.
pub fn naive_mr_compress_oracle(text: &[u32]) -> Result<Grammar, CompressError> {
    if text.is_empty() {
        return Err(CompressError::EmptyInput);
    }
    let (terminals, mut work) = map_to_alphabet(text);
    let k = terminals.len() as u32;
    let mut bodies: Vec<Vec<u32>> = Vec::new();
    loop {
        let mrs = brute_maximal_repeats(&work)
            .map_err(|e| CompressError::InconsistentTrace(e.to_string()))?;
        let Some(r) = mrs.first() else { break };
        let v = k + bodies.len() as u32;
        let len = r.symbols.len();
        let mut out = Vec::with_capacity(work.len());
        let mut occ = r.occurrences.iter().map(|&s| s as usize).peekable();
        let mut i = 0;
        while i < work.len() {
            while occ.peek().is_some_and(|&s| s < i) {
                occ.next();
            }
            if occ.peek() == Some(&i) {
                out.push(v);
                i += len;
            } else {
                out.push(work[i]);
                i += 1;
            }
        }
        bodies.push(r.symbols.clone());
        work = out;
    }
    bodies.push(work);
    Ok(Grammar::from_bodies(terminals, bodies))
}

/// Sizes of the two extreme RePair runs on the tie-break stress text.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GsdrpReport {
    pub f: u32,
    pub n: usize,
    /// Size without terminal rules when `xy` is taken as soon as possible.
    pub g_prefer_xy: usize,
    /// Size without terminal rules when `xy` is taken last among its ties.
    pub g_defer_xy: usize,
    pub diff: i64,
    pub lower_bound_at_n: f64,
}

pub fn gsdrp_lower_bound(n: usize) -> f64 {
    (((6 * n + 1) as f64).sqrt() + 13.0) / 6.0
}

/// Runs RePair on [`gen_gsdrp`]`(f)` preferring and deferring the pair `xy`.
pub fn gsdrp_measure(f: u32) -> Result<GsdrpReport, CompressError> {
    let t = gen_gsdrp(f).map_err(|e| CompressError::InconsistentTrace(e.to_string()))?;
    // x and y are the two smallest symbols, hence working symbols 0 and 1
    let xy = (0, 1);
    let size = |tie: TieBreak| -> Result<usize, CompressError> {
        let (g, _) = repair_compress(&t, &tie)?;
        Ok(g.size(SizeMetric::WithoutTerminalRules))
    };
    let g_prefer_xy = size(TieBreak::Prefer(xy))?;
    let g_defer_xy = size(TieBreak::Defer(xy))?;
    Ok(GsdrpReport {
        f,
        n: t.len(),
        g_prefer_xy,
        g_defer_xy,
        diff: g_prefer_xy as i64 - g_defer_xy as i64,
        lower_bound_at_n: gsdrp_lower_bound(t.len()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PowerReport {
    pub m: u32,
    pub wlen: usize,
    pub n: usize,
    pub g_rp: usize,
    pub g_nmr: usize,
    /// `(m − 1)(|w| − 1) − 1`.
    pub expected_diff: i64,
}

impl PowerReport {
    pub fn diff(&self) -> i64 {
        self.g_nmr as i64 - self.g_rp as i64
    }

    pub fn holds(&self) -> bool {
        self.diff() == self.expected_diff
    }
}

/// RePair against Naive-MR-RePair on `(u w)^{2^{m+1}−1} u` with `u = 0`,
/// `w = 1..=wlen`, both breaking ties by first occurrence.
pub fn power_measure(m: u32, wlen: usize) -> Result<PowerReport, CompressError> {
    let w: Vec<u32> = (1..=wlen as u32).collect();
    let t = gen_power(0, &w, m).map_err(|e| CompressError::InconsistentTrace(e.to_string()))?;
    let tie = TieBreak::FirstOccurrence;
    let (rp, _) = repair_compress(&t, &tie)?;
    let nmr = naive_mr_compress(&t, &tie)?;
    Ok(PowerReport {
        m,
        wlen,
        n: t.len(),
        g_rp: rp.size(SizeMetric::WithTerminalRules),
        g_nmr: nmr.size(SizeMetric::WithTerminalRules),
        expected_diff: (m as i64 - 1) * (wlen as i64 - 1) - 1,
    })
}

/// Sizes of MR-RePair and of RePair replaying its repeat order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Theorem5Report {
    pub g_mr: usize,
    pub g_rp: usize,
    pub start_mr: usize,
    pub start_rp: usize,
}

impl Theorem5Report {
    pub fn holds(&self) -> bool {
        self.g_rp < 2 * self.g_mr && self.g_mr <= self.g_rp
    }
}

pub fn theorem5_measure(t: &[u32]) -> Result<Theorem5Report, CompressError> {
    let (mr, trace) = mr_repair_compress(t, &TieBreak::FirstOccurrence)?;
    let (rp, _) = repair_following_trace(t, &trace)?;
    Ok(Theorem5Report {
        g_mr: mr.size(SizeMetric::WithTerminalRules),
        g_rp: rp.size(SizeMetric::WithTerminalRules),
        start_mr: mr.start_rule().rhs.len(),
        start_rp: rp.start_rule().rhs.len(),
    })
}

/// `g_rp / 2 < g_mr ≤ g_rp` with RePair following MR-RePair's repeat order.
pub fn check_theorem5(t: &[u32]) -> Verdict {
    match theorem5_measure(t) {
        Err(e) => Verdict::Counterexample(e.to_string()),
        Ok(r) if r.holds() => Verdict::Pass,
        Ok(r) => Verdict::Counterexample(format!("g_mr = {}, g_rp = {}", r.g_mr, r.g_rp)),
    }
}
