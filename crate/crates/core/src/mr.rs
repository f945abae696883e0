//! MR-RePair and Naive-MR-RePair.
//!
//! Both locate a most frequent maximal repeat by taking a most frequent pair
//! and extending it while every occurrence agrees on the neighbouring symbol.
//! A most frequent pair sits inside exactly one most frequent maximal repeat,
//! and both have the same frequency, so frequency bookkeeping stays on pairs.

use crate::grammar::{map_to_alphabet, Grammar};
use crate::pairs::{Pair, PairIndex};
use crate::repair::{CompressError, TieBreak};

/// A maximal repeat of a working text. `occurrences` are the start cells of
/// every (possibly overlapping) occurrence, ascending; for a freshly built
/// text these are plain positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MaxRepeat {
    pub symbols: Vec<u32>,
    pub freq: u32,
    pub occurrences: Vec<u32>,
}

/// Which end to drop from a repeat whose first and last symbols coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TrimSide {
    /// Keep `r[1..|r|-1]`.
    #[default]
    Prefix,
    /// Keep `r[2..|r|]`.
    Suffix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MrSelection {
    pub repeat: MaxRepeat,
    /// The string actually turned into a rule, over working symbols.
    pub replaced: Vec<u32>,
    /// Original-text spans `[start, end)` of the replaced occurrences.
    pub intervals: Vec<(usize, usize)>,
    pub variable: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MrPhase {
    pub frequency: u32,
    pub selections: Vec<MrSelection>,
}

/// Selection order of a run, grouped by strictly decreasing frequency.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MrTrace {
    pub phases: Vec<MrPhase>,
}

impl MrTrace {
    fn push(&mut self, frequency: u32, sel: MrSelection) {
        match self.phases.last_mut() {
            Some(p) if p.frequency == frequency => p.selections.push(sel),
            _ => self.phases.push(MrPhase {
                frequency,
                selections: vec![sel],
            }),
        }
    }

    pub fn selections(&self) -> impl Iterator<Item = &MrSelection> {
        self.phases.iter().flat_map(|p| &p.selections)
    }
}

/// Extends a most frequent pair to the maximal repeat containing it. An
/// occurrence touching either end of the text blocks extension on that side.
pub fn extend_to_maximal_repeat(idx: &PairIndex, p: Pair) -> MaxRepeat {
    let mut starts = idx.occurrences(p);
    let mut ends: Vec<u32> = starts
        .iter()
        .map(|&c| idx.next_cell(c).expect("pair occurrence has a right cell"))
        .collect();
    let mut left = Vec::new();
    while let Some(sym) = uniform(idx, &starts, PairIndex::prev_cell) {
        left.push(sym);
        for c in &mut starts {
            *c = idx.prev_cell(*c).unwrap();
        }
    }
    let mut right = Vec::new();
    while let Some(sym) = uniform(idx, &ends, PairIndex::next_cell) {
        right.push(sym);
        for c in &mut ends {
            *c = idx.next_cell(*c).unwrap();
        }
    }
    let mut symbols: Vec<u32> = left.into_iter().rev().collect();
    symbols.extend([p.0, p.1]);
    symbols.extend(right);
    MaxRepeat {
        symbols,
        freq: starts.len() as u32,
        occurrences: starts,
    }
}

/// The symbol every cell in `cells` has on one side, if they all agree.
fn uniform(
    idx: &PairIndex,
    cells: &[u32],
    step: fn(&PairIndex, u32) -> Option<u32>,
) -> Option<u32> {
    let mut sym = None;
    for &c in cells {
        let s = idx.symbol(step(idx, c)?);
        match sym {
            None => sym = Some(s),
            Some(t) if t != s => return None,
            Some(_) => {}
        }
    }
    sym
}

/// Drops the last symbol when `|r| > 2` and `r` starts and ends alike.
pub fn trim_if_bookended(r: &[u32]) -> Vec<u32> {
    trim(r, TrimSide::Prefix).to_vec()
}

fn trim(r: &[u32], side: TrimSide) -> &[u32] {
    match r {
        [first, .., last] if r.len() > 2 && first == last => match side {
            TrimSide::Prefix => &r[..r.len() - 1],
            TrimSide::Suffix => &r[1..],
        },
        _ => r,
    }
}

pub fn mr_repair_compress(
    text: &[u32],
    tie: &TieBreak,
) -> Result<(Grammar, MrTrace), CompressError> {
    mr_repair_compress_with_trim(text, tie, TrimSide::Prefix)
}

pub fn mr_repair_compress_with_trim(
    text: &[u32],
    tie: &TieBreak,
    side: TrimSide,
) -> Result<(Grammar, MrTrace), CompressError> {
    run(text, tie, Some(side))
}

/// Replaces the whole most frequent maximal repeat, as many occurrences as
/// fit left to right, without trimming.
pub fn naive_mr_compress(text: &[u32], tie: &TieBreak) -> Result<Grammar, CompressError> {
    run(text, tie, None).map(|(g, _)| g)
}

pub fn naive_mr_compress_traced(
    text: &[u32],
    tie: &TieBreak,
) -> Result<(Grammar, MrTrace), CompressError> {
    run(text, tie, None)
}

fn run(
    text: &[u32],
    tie: &TieBreak,
    trim_side: Option<TrimSide>,
) -> Result<(Grammar, MrTrace), CompressError> {
    if text.is_empty() {
        return Err(CompressError::EmptyInput);
    }
    let (terminals, mapped) = map_to_alphabet(text);
    let k = terminals.len() as u32;
    let mut idx = PairIndex::build_with_order(&mapped, tie.queue_order());
    let mut chooser = tie.chooser();
    let mut bodies: Vec<Vec<u32>> = Vec::new();
    let mut trace = MrTrace::default();
    loop {
        let f = idx.max_frequency();
        if f < 2 {
            break;
        }
        let pair = chooser.choose(&idx);
        let got = idx.count(pair);
        if got != f {
            return Err(CompressError::NotMostFrequent { pair, got, max: f });
        }
        let repeat = extend_to_maximal_repeat(&idx, pair);
        let (replaced, starts): (Vec<u32>, Vec<u32>) = match trim_side {
            None => (repeat.symbols.clone(), repeat.occurrences.clone()),
            Some(side) => {
                let kept = trim(&repeat.symbols, side).to_vec();
                let starts = if kept.len() < repeat.symbols.len() && side == TrimSide::Suffix {
                    repeat
                        .occurrences
                        .iter()
                        .map(|&c| idx.next_cell(c).unwrap())
                        .collect()
                } else {
                    repeat.occurrences.clone()
                };
                (kept, starts)
            }
        };
        let len = replaced.len();
        // spans are measured before the cells are merged
        let spans: Vec<(u32, usize)> = starts
            .iter()
            .map(|&s| {
                let mut e = s;
                for _ in 1..len {
                    e = idx.next_cell(e).unwrap();
                }
                (s, idx.span_end(e))
            })
            .collect();
        let v = k + bodies.len() as u32;
        let done = idx.replace_run_greedy(&starts, len, v)?;
        let mut intervals = Vec::with_capacity(done.len());
        let mut it = spans.iter();
        for s in done {
            let &(_, end) = it.find(|(c, _)| *c == s).unwrap();
            intervals.push((s as usize, end));
        }
        bodies.push(replaced.clone());
        trace.push(
            f,
            MrSelection {
                repeat,
                replaced,
                intervals,
                variable: v,
            },
        );
    }
    bodies.push(idx.symbols());
    Ok((Grammar::from_bodies(terminals, bodies), trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::SizeMetric;

    fn bytes(s: &str) -> Vec<u32> {
        s.bytes().map(u32::from).collect()
    }

    fn pair(s: &str) -> Pair {
        let b = s.as_bytes();
        (b[0] as u32, b[1] as u32)
    }

    #[test]
    fn extension_examples() {
        let idx = PairIndex::build(&bytes("abracadabra"));
        let r = extend_to_maximal_repeat(&idx, pair("ab"));
        assert_eq!(r.symbols, bytes("abra"));
        assert_eq!((r.freq, r.occurrences.clone()), (2, vec![0, 7]));
        let r = extend_to_maximal_repeat(&idx, pair("ra"));
        assert_eq!(r.symbols, bytes("abra"));

        let idx = PairIndex::build(&bytes("abab"));
        let r = extend_to_maximal_repeat(&idx, pair("ab"));
        assert_eq!(r.symbols, bytes("ab"));

        let idx = PairIndex::build(&bytes("xyzxyw"));
        let r = extend_to_maximal_repeat(&idx, pair("xy"));
        assert_eq!(r.symbols, bytes("xy"));
    }

    #[test]
    fn trimming() {
        assert_eq!(trim_if_bookended(&bytes("abra")), bytes("abr"));
        assert_eq!(trim_if_bookended(&bytes("ab")), bytes("ab"));
        assert_eq!(trim_if_bookended(&bytes("aa")), bytes("aa"));
        assert_eq!(
            trim(&bytes("abra"), TrimSide::Suffix),
            bytes("bra").as_slice()
        );
    }

    #[test]
    fn mr_figure_sizes() {
        let (g, trace) =
            mr_repair_compress(&bytes("abracadabra"), &TieBreak::FirstOccurrence).unwrap();
        assert_eq!(g.size(SizeMetric::WithTerminalRules), 15);
        assert_eq!(g.expand_text(), bytes("abracadabra"));
        assert_eq!(trace.phases.len(), 1);
        assert_eq!(
            trace.phases[0].selections[0].intervals,
            vec![(0, 3), (7, 10)]
        );
        assert_eq!(
            trace.phases[0].selections[1].intervals,
            vec![(0, 4), (7, 11)]
        );

        let t = bytes(&("abcd".repeat(7) + "a"));
        let (g, trace) = mr_repair_compress(&t, &TieBreak::FirstOccurrence).unwrap();
        assert_eq!(g.size(SizeMetric::WithTerminalRules), 16);
        assert_eq!(g.expand_text(), t);
        let freqs: Vec<u32> = trace.phases.iter().map(|p| p.frequency).collect();
        assert_eq!(freqs, vec![7, 6, 2]);
        // working symbols: a b c d = 0 1 2 3
        assert_eq!(
            trace.phases[0].selections[0].repeat.symbols,
            vec![0, 1, 2, 3, 0]
        );
    }

    #[test]
    fn suffix_trim_same_size() {
        for s in ["abracadabra", "abcdabcdabcdabcda", "aabaabaabaa"] {
            let t = bytes(s);
            let (p, _) =
                mr_repair_compress_with_trim(&t, &TieBreak::FirstOccurrence, TrimSide::Prefix)
                    .unwrap();
            let (q, _) =
                mr_repair_compress_with_trim(&t, &TieBreak::FirstOccurrence, TrimSide::Suffix)
                    .unwrap();
            assert_eq!(q.expand_text(), t);
            assert_eq!(
                p.size(SizeMetric::WithTerminalRules),
                q.size(SizeMetric::WithTerminalRules)
            );
        }
    }

    #[test]
    fn naive_figure_sizes() {
        let g = naive_mr_compress(&bytes("abracadabra"), &TieBreak::FirstOccurrence).unwrap();
        assert_eq!(g.size(SizeMetric::WithTerminalRules), 14);
        let t = bytes(&("abcd".repeat(7) + "a"));
        let g = naive_mr_compress(&t, &TieBreak::FirstOccurrence).unwrap();
        assert_eq!(g.size(SizeMetric::WithTerminalRules), 19);
        assert_eq!(g.expand_text(), t);
        let g = naive_mr_compress(&bytes("ab"), &TieBreak::FirstOccurrence).unwrap();
        assert_eq!(g.size(SizeMetric::WithTerminalRules), 4);
    }

    #[test]
    fn fibonacci_matches_repair() {
        use crate::generators::gen_fibonacci;
        use crate::repair::repair_compress;
        for k in 1..=25 {
            let t = gen_fibonacci(k).unwrap();
            let (mr, _) = mr_repair_compress(&t, &TieBreak::FirstOccurrence).unwrap();
            let (rp, _) = repair_compress(&t, &TieBreak::FirstOccurrence).unwrap();
            assert_eq!(
                mr.size(SizeMetric::WithTerminalRules),
                rp.size(SizeMetric::WithTerminalRules),
                "k = {k}"
            );
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn text() -> impl Strategy<Value = Vec<u32>> {
            (1u32..5).prop_flat_map(|s| proptest::collection::vec(0..s, 1..300))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(300))]

            #[test]
            fn runs_expand_to_input(t in text()) {
                for tie in [TieBreak::FirstOccurrence, TieBreak::LexicographicMin] {
                    let (g, _) = mr_repair_compress(&t, &tie).unwrap();
                    prop_assert!(g.validate().is_ok());
                    prop_assert_eq!(g.expand_text(), t.clone());
                    let g = naive_mr_compress(&t, &tie).unwrap();
                    prop_assert!(g.validate().is_ok());
                    prop_assert_eq!(g.expand_text(), t.clone());
                }
            }

            #[test]
            fn trace_is_well_formed(t in text()) {
                let (g, trace) = mr_repair_compress(&t, &TieBreak::FirstOccurrence).unwrap();
                prop_assert!(trace.phases.windows(2).all(|w| w[0].frequency > w[1].frequency));
                for phase in &trace.phases {
                    for sel in &phase.selections {
                        prop_assert_eq!(sel.repeat.freq, phase.frequency);
                        // a self-overlapping repeat may leave a single replaceable occurrence
                        prop_assert!(!sel.intervals.is_empty());
                        prop_assert!(sel.intervals.windows(2).all(|w| w[0].1 <= w[1].0));
                        let want = crate::grammar::expand(&g, sel.variable).unwrap();
                        let want: Vec<u32> = want.into_iter().map(|i| g.terminals[i as usize]).collect();
                        for &(a, b) in &sel.intervals {
                            prop_assert_eq!(&t[a..b], want.as_slice());
                        }
                    }
                }
            }

            #[test]
            fn trim_side_does_not_change_size(t in text()) {
                let tie = TieBreak::FirstOccurrence;
                let (p, _) = mr_repair_compress_with_trim(&t, &tie, TrimSide::Prefix).unwrap();
                let (q, _) = mr_repair_compress_with_trim(&t, &tie, TrimSide::Suffix).unwrap();
                prop_assert_eq!(q.expand_text(), t);
                prop_assert_eq!(p.size(SizeMetric::WithTerminalRules), q.size(SizeMetric::WithTerminalRules));
            }
        }
    }
}
