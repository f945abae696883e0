//! RePair with explicit tie-breaking, exhaustive tie enumeration, and a
//! replay mode that follows the repeat selection order of an MR-RePair run.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::grammar::{expand_unchecked, map_to_alphabet, Grammar};
use crate::mr::MrTrace;
use crate::pairs::{IndexError, Pair, PairIndex, PairOrder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompressError {
    #[error("input is empty")]
    EmptyInput,
    #[error("pair ({}, {}) chosen with frequency {got}, but the maximum is {max}", .pair.0, .pair.1)]
    NotMostFrequent { pair: Pair, got: u32, max: u32 },
    #[error("trace does not match the text: {0}")]
    InconsistentTrace(String),
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// How to pick among pairs of equal maximum frequency. Pairs are written
/// over working symbols: terminal-rule variables are numbered by ascending
/// terminal value, so on inputs over `0..k` they coincide with the input.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    FirstOccurrence,
    LexicographicMin,
    /// Take this pair whenever it is most frequent.
    Prefer(Pair),
    /// Take this pair only when it is the sole most frequent pair.
    Defer(Pair),
    /// Take these pairs in order while each is most frequent; entries that
    /// are not most frequent when reached are dropped. Falls back to first
    /// occurrence once exhausted.
    Scripted(Vec<Pair>),
}

impl TieBreak {
    pub fn queue_order(&self) -> PairOrder {
        match self {
            TieBreak::LexicographicMin => PairOrder::Lexicographic,
            _ => PairOrder::FirstOccurrence,
        }
    }

    pub(crate) fn chooser(&self) -> TieState<'_> {
        TieState {
            policy: self,
            cursor: 0,
        }
    }
}

pub(crate) struct TieState<'a> {
    policy: &'a TieBreak,
    cursor: usize,
}

impl TieState<'_> {
    /// Picks a most frequent pair; the index must hold at least one pair.
    pub(crate) fn choose(&mut self, idx: &PairIndex) -> Pair {
        let top = idx.top_pair().expect("no pairs left").pair;
        let f = idx.max_frequency();
        match self.policy {
            TieBreak::FirstOccurrence | TieBreak::LexicographicMin => top,
            TieBreak::Prefer(p) => {
                if idx.count(*p) == f {
                    *p
                } else {
                    top
                }
            }
            TieBreak::Defer(p) => {
                if top != *p || f < 2 {
                    return top;
                }
                idx.pairs_with_frequency(f).find(|q| q != p).unwrap_or(top)
            }
            TieBreak::Scripted(script) => {
                while let Some(&q) = script.get(self.cursor) {
                    self.cursor += 1;
                    if idx.count(q) == f {
                        return q;
                    }
                }
                top
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RunStep {
    pub pair: Pair,
    pub frequency: u32,
    pub replaced: usize,
    pub variable: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RunLog {
    pub steps: Vec<RunStep>,
}

impl RunLog {
    /// Maximal runs of steps sharing one frequency.
    pub fn phases(&self) -> Vec<&[RunStep]> {
        self.steps
            .chunk_by(|a, b| a.frequency == b.frequency)
            .collect()
    }
}

/// Runs RePair, asking `choose` for the pair to replace at each step.
pub fn repair_with<F>(
    text: &[u32],
    order: PairOrder,
    mut choose: F,
) -> Result<(Grammar, RunLog), CompressError>
where
    F: FnMut(&PairIndex) -> Result<Pair, CompressError>,
{
    if text.is_empty() {
        return Err(CompressError::EmptyInput);
    }
    let (terminals, mapped) = map_to_alphabet(text);
    let k = terminals.len() as u32;
    let mut idx = PairIndex::build_with_order(&mapped, order);
    let mut bodies: Vec<Vec<u32>> = Vec::new();
    let mut log = RunLog::default();
    loop {
        let f = idx.max_frequency();
        if f < 2 {
            break;
        }
        let pair = choose(&idx)?;
        let got = idx.count(pair);
        if got != f {
            return Err(CompressError::NotMostFrequent { pair, got, max: f });
        }
        let v = k + bodies.len() as u32;
        let replaced = idx.replace_pair(pair, v)?;
        bodies.push(vec![pair.0, pair.1]);
        log.steps.push(RunStep {
            pair,
            frequency: f,
            replaced,
            variable: v,
        });
    }
    bodies.push(idx.symbols());
    Ok((Grammar::from_bodies(terminals, bodies), log))
}

pub fn repair_compress(text: &[u32], tie: &TieBreak) -> Result<(Grammar, RunLog), CompressError> {
    let mut state = tie.chooser();
    repair_with(text, tie.queue_order(), |idx| Ok(state.choose(idx)))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("enumeration exceeded {limit} branches ({found} distinct grammars so far)")]
pub struct BranchLimitExceeded {
    pub limit: usize,
    pub found: usize,
}

/// One outcome of [`repair_enumerate`].
#[derive(Clone, Debug)]
pub struct EnumeratedRun {
    pub grammar: Grammar,
    pub log: RunLog,
}

/// Every grammar RePair can produce on `text` over all choices among most
/// frequent pairs. Grammars are compared with variables in creation order,
/// so two runs that create the same rules in a different order are distinct.
/// `branch_limit` bounds the number of completed runs explored.
pub fn repair_enumerate(
    text: &[u32],
    branch_limit: usize,
) -> Result<Vec<EnumeratedRun>, BranchLimitExceeded> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let (terminals, mapped) = map_to_alphabet(text);
    let mut walk = Enumeration {
        k: terminals.len() as u32,
        limit: branch_limit,
        leaves: 0,
        found: BTreeMap::new(),
    };
    let idx = PairIndex::build(&mapped);
    walk.visit(idx, &mut Vec::new(), &mut Vec::new())?;
    Ok(walk
        .found
        .into_iter()
        .map(|(bodies, log)| EnumeratedRun {
            grammar: Grammar::from_bodies(terminals.clone(), bodies),
            log,
        })
        .collect())
}

struct Enumeration {
    k: u32,
    limit: usize,
    leaves: usize,
    found: BTreeMap<Vec<Vec<u32>>, RunLog>,
}

impl Enumeration {
    fn visit(
        &mut self,
        idx: PairIndex,
        bodies: &mut Vec<Vec<u32>>,
        steps: &mut Vec<RunStep>,
    ) -> Result<(), BranchLimitExceeded> {
        let (f, pairs) = idx.most_frequent_pairs();
        if f < 2 {
            self.leaves += 1;
            if self.leaves > self.limit {
                return Err(BranchLimitExceeded {
                    limit: self.limit,
                    found: self.found.len(),
                });
            }
            let mut all = bodies.clone();
            all.push(idx.symbols());
            self.found.insert(
                all,
                RunLog {
                    steps: steps.clone(),
                },
            );
            return Ok(());
        }
        let v = self.k + bodies.len() as u32;
        let last = pairs.len() - 1;
        let mut idx = Some(idx);
        for (i, pf) in pairs.into_iter().enumerate() {
            let mut child = if i == last {
                idx.take().unwrap()
            } else {
                idx.as_ref().unwrap().clone()
            };
            let replaced = child
                .replace_pair(pf.pair, v)
                .expect("most frequent pair is present");
            bodies.push(vec![pf.pair.0, pf.pair.1]);
            steps.push(RunStep {
                pair: pf.pair,
                frequency: f,
                replaced,
                variable: v,
            });
            let res = self.visit(child, bodies, steps);
            bodies.pop();
            steps.pop();
            res?;
        }
        Ok(())
    }
}

/// The strings consolidated in each phase of a run: for every frequency
/// `f`, the sorted expansions (original symbol values) of the variables
/// created in that phase that no other variable of the phase uses. Runs with
/// equal signatures selected maximal repeats in the same order.
pub type MrOrderSignature = Vec<(u32, Vec<Vec<u32>>)>;

pub fn mr_order_signature(g: &Grammar, log: &RunLog) -> MrOrderSignature {
    let mut out = Vec::new();
    for phase in log.phases() {
        let lo = phase[0].variable;
        let hi = phase[phase.len() - 1].variable;
        let mut used = vec![false; (hi - lo + 1) as usize];
        for step in phase {
            for s in [step.pair.0, step.pair.1] {
                if (lo..=hi).contains(&s) {
                    used[(s - lo) as usize] = true;
                }
            }
        }
        let mut tops: Vec<Vec<u32>> = (lo..=hi)
            .filter(|v| !used[(v - lo) as usize])
            .map(|v| {
                expand_unchecked(g, v)
                    .into_iter()
                    .map(|t| g.terminals[t as usize])
                    .collect()
            })
            .collect();
        tops.sort();
        out.push((phase[0].frequency, tops));
    }
    out
}

/// Runs RePair so that it consolidates maximal repeats in the order recorded
/// by an MR-RePair run on the same text: each step takes the leftmost most
/// frequent pair lying inside a replaced occurrence of the earliest pending
/// selection of the current phase.
pub fn repair_following_trace(
    text: &[u32],
    trace: &MrTrace,
) -> Result<(Grammar, RunLog), CompressError> {
    if let Some(bad) = trace
        .phases
        .iter()
        .flat_map(|p| &p.selections)
        .flat_map(|s| &s.intervals)
        .find(|&&(a, b)| a >= b || b > text.len())
    {
        return Err(CompressError::InconsistentTrace(format!(
            "interval {bad:?} outside a text of length {}",
            text.len()
        )));
    }
    let mut phase = 0usize;
    let mut selection = 0usize;
    repair_with(text, PairOrder::FirstOccurrence, |idx| {
        let f = idx.max_frequency();
        while phase < trace.phases.len() && trace.phases[phase].frequency > f {
            phase += 1;
            selection = 0;
        }
        let Some(current) = trace.phases.get(phase).filter(|p| p.frequency == f) else {
            return Err(CompressError::InconsistentTrace(format!(
                "no recorded phase of frequency {f}"
            )));
        };
        while let Some(sel) = current.selections.get(selection) {
            if let Some(p) = pair_inside(idx, &sel.intervals, f) {
                return Ok(p);
            }
            selection += 1;
        }
        Err(CompressError::InconsistentTrace(format!(
            "pairs of frequency {f} remain after all recorded selections"
        )))
    })
}

/// Leftmost pair of frequency `f` whose span lies inside one of `intervals`.
fn pair_inside(idx: &PairIndex, intervals: &[(usize, usize)], f: u32) -> Option<Pair> {
    for &(a, b) in intervals {
        let mut c = a as u32;
        while (c as usize) < b && !idx.is_active(c) {
            c += 1;
        }
        while (c as usize) < b {
            let n = idx.next_cell(c)?;
            if idx.span_end(n) > b {
                break;
            }
            let p = (idx.symbol(c), idx.symbol(n));
            if idx.count(p) == f {
                return Some(p);
            }
            c = n;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::SizeMetric;

    fn bytes(s: &str) -> Vec<u32> {
        s.bytes().map(u32::from).collect()
    }

    #[test]
    fn abracadabra_first_occurrence() {
        let (g, log) = repair_compress(&bytes("abracadabra"), &TieBreak::FirstOccurrence).unwrap();
        assert_eq!(g.size(SizeMetric::WithTerminalRules), 16);
        assert_eq!(g.expand_text(), bytes("abracadabra"));
        // a=0 b=1 c=2 d=3 r=4: v5 -> ab, v6 -> v5 r, v7 -> v6 a
        assert_eq!(
            g.bodies(),
            vec![vec![0, 1], vec![5, 4], vec![6, 0], vec![7, 2, 0, 3, 7]]
        );
        assert_eq!(log.steps.len(), 3);
        assert_eq!(log.phases().len(), 1);
    }

    #[test]
    fn power_text_first_occurrence() {
        let t = bytes(&("abcd".repeat(7) + "a"));
        let (g, log) = repair_compress(&t, &TieBreak::FirstOccurrence).unwrap();
        assert_eq!(g.size(SizeMetric::WithTerminalRules), 18);
        assert_eq!(g.expand_text(), t);
        let freqs: Vec<u32> = log.steps.iter().map(|s| s.frequency).collect();
        assert_eq!(freqs, vec![7, 7, 7, 6, 2]);
        // the overlap-counted pair of frequency 2 is replaced once
        assert_eq!(log.steps[4].replaced, 1);
    }

    #[test]
    fn single_symbol() {
        let (g, log) = repair_compress(&[b'a' as u32], &TieBreak::FirstOccurrence).unwrap();
        assert_eq!(g.size(SizeMetric::WithTerminalRules), 2);
        assert!(log.steps.is_empty());
        assert_eq!(
            repair_compress(&[], &TieBreak::FirstOccurrence).unwrap_err(),
            CompressError::EmptyInput
        );
    }

    #[test]
    fn prefer_and_defer() {
        let t = bytes("bcxdabcyabzdabvbcuda");
        let (a, b, d) = (0u32, 1, 3); // a b c d u v x y z
        let (g, _) = repair_compress(&t, &TieBreak::Prefer((a, b))).unwrap();
        assert_eq!(g.size(SizeMetric::WithoutTerminalRules), 19);
        let (g, _) = repair_compress(&t, &TieBreak::Prefer((d, a))).unwrap();
        assert_eq!(g.size(SizeMetric::WithoutTerminalRules), 18);
        let (g, log) = repair_compress(&t, &TieBreak::Defer((1, 2))).unwrap();
        assert_ne!(log.steps[0].pair, (1, 2));
        assert_eq!(g.expand_text(), t);
    }

    #[test]
    fn scripted_consumes_in_order() {
        let t = bytes("abcdeabccde");
        // a=0 b=1 c=2 d=3 e=4; replace de first, then cd is gone so (2,3) is dropped
        let tie = TieBreak::Scripted(vec![(3, 4), (2, 3), (0, 1)]);
        let (g, log) = repair_compress(&t, &tie).unwrap();
        assert_eq!(log.steps[0].pair, (3, 4));
        assert_eq!(log.steps[1].pair, (0, 1));
        assert_eq!(g.expand_text(), t);
    }

    #[test]
    fn lexicographic_policy() {
        let t = bytes("bcxdabcyabzdabvbcuda");
        let (_, log) = repair_compress(&t, &TieBreak::LexicographicMin).unwrap();
        assert_eq!(log.steps[0].pair, (0, 1));
    }

    #[test]
    fn enumerate_small() {
        let runs = repair_enumerate(&bytes("ab"), 10).unwrap();
        assert_eq!(runs.len(), 1);
        let runs = repair_enumerate(&bytes("abcdeabccde"), 1000).unwrap();
        assert_eq!(runs.len(), 12);
        for r in &runs {
            assert_eq!(r.grammar.expand_text(), bytes("abcdeabccde"));
        }
        let err = repair_enumerate(&bytes("abcdeabccde"), 5).unwrap_err();
        assert_eq!(err.limit, 5);
    }

    #[test]
    fn signature_classes() {
        let runs = repair_enumerate(&bytes("abcdeabccde"), 1000).unwrap();
        let mut classes: BTreeMap<MrOrderSignature, Vec<usize>> = BTreeMap::new();
        for r in &runs {
            classes
                .entry(mr_order_signature(&r.grammar, &r.log))
                .or_default()
                .push(r.grammar.size(SizeMetric::WithTerminalRules));
        }
        assert_eq!(classes.len(), 2);
        for sizes in classes.values() {
            assert_eq!(sizes.len(), 6);
            assert!(sizes.iter().all(|&s| s == sizes[0]));
        }
    }

    #[test]
    fn trace_rejects_out_of_range_interval() {
        use crate::mr::{MaxRepeat, MrPhase, MrSelection};
        let trace = MrTrace {
            phases: vec![MrPhase {
                frequency: 2,
                selections: vec![MrSelection {
                    repeat: MaxRepeat {
                        symbols: vec![0, 1],
                        freq: 2,
                        occurrences: vec![0, 40],
                    },
                    replaced: vec![0, 1],
                    intervals: vec![(0, 2), (40, 42)],
                    variable: 2,
                }],
            }],
        };
        assert!(matches!(
            repair_following_trace(&bytes("abab"), &trace),
            Err(CompressError::InconsistentTrace(_))
        ));
    }
}
