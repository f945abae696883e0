//! Straight-line grammars: symbols, rules, size accounting, expansion and
//! validation.
//!
//! Every grammar produced in this crate follows one layout: the first `k`
//! variables are the terminal rules `v_i -> i` (one per alphabet entry,
//! ordered by ascending original symbol value), compressor rules follow in
//! creation order, and the start rule is the last rule.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

/// An atom of a rule body: either a terminal index (into the alphabet) or a
/// variable id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Terminal(u32),
    Variable(u32),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Terminal(t) => write!(f, "#{t}"),
            Symbol::Variable(v) => write!(f, "v{v}"),
        }
    }
}

pub type SymSeq = Vec<Symbol>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub lhs: u32,
    pub rhs: SymSeq,
}

impl Rule {
    pub fn is_terminal(&self) -> bool {
        matches!(self.rhs.as_slice(), [Symbol::Terminal(_)])
    }
}

/// Which rules count towards the grammar size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SizeMetric {
    #[default]
    WithTerminalRules,
    WithoutTerminalRules,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("grammar has no rules")]
    NoRules,
    #[error("variable v{0} has more than one rule")]
    Nondeterministic(u32),
    #[error("rule at index {index} defines v{lhs}; rules must be listed in variable order")]
    Misnumbered { index: usize, lhs: u32 },
    #[error("rule v{var} has an empty right-hand side")]
    EmptyRhs { var: u32 },
    #[error("rule v{var} references v{referenced}, which is not an earlier variable")]
    Ordering { var: u32, referenced: u32 },
    #[error("rule v{var} references terminal {terminal} outside the alphabet")]
    TerminalOutOfRange { var: u32, terminal: u32 },
    #[error("rule v{var} mixes a terminal into a multi-symbol right-hand side")]
    MixedRule { var: u32 },
    #[error("variable v{var} must be the terminal rule v{var} -> #{var}")]
    TerminalLayout { var: u32 },
    #[error("start variable v{start} must be the last, non-terminal rule")]
    BadStart { start: u32 },
    #[error("terminal table is not strictly ascending at index {index}")]
    UnsortedTerminals { index: usize },
}

/// A deterministic straight-line grammar.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grammar {
    /// Original symbol value of each terminal index, ascending.
    pub terminals: Vec<u32>,
    /// Variable `i` is `rules[i]`.
    pub rules: Vec<Rule>,
    pub start: u32,
}

impl Grammar {
    /// Builds a grammar in the standard layout. `bodies` holds the right-hand
    /// sides of all non-terminal rules in creation order, written as variable
    /// ids (terminal `i` is variable `i`); the last body is the start rule.
    pub fn from_bodies(terminals: Vec<u32>, bodies: Vec<Vec<u32>>) -> Grammar {
        let k = terminals.len() as u32;
        let mut rules = Vec::with_capacity(terminals.len() + bodies.len());
        for t in 0..k {
            rules.push(Rule {
                lhs: t,
                rhs: vec![Symbol::Terminal(t)],
            });
        }
        for (i, body) in bodies.into_iter().enumerate() {
            rules.push(Rule {
                lhs: k + i as u32,
                rhs: body.into_iter().map(Symbol::Variable).collect(),
            });
        }
        let start = rules.len().saturating_sub(1) as u32;
        Grammar {
            terminals,
            rules,
            start,
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.terminals.len()
    }

    /// Right-hand sides of the non-terminal rules as variable ids, in
    /// variable order (the inverse of [`Grammar::from_bodies`]).
    pub fn bodies(&self) -> Vec<Vec<u32>> {
        self.rules[self.alphabet_size()..]
            .iter()
            .map(|r| {
                r.rhs
                    .iter()
                    .map(|s| match *s {
                        Symbol::Variable(v) => v,
                        Symbol::Terminal(t) => t,
                    })
                    .collect()
            })
            .collect()
    }

    pub fn start_rule(&self) -> &Rule {
        &self.rules[self.start as usize]
    }

    pub fn validate(&self) -> Result<(), GrammarError> {
        validate(self)
    }

    pub fn size(&self, metric: SizeMetric) -> usize {
        self.rules
            .iter()
            .filter(|r| metric == SizeMetric::WithTerminalRules || !r.is_terminal())
            .map(|r| r.rhs.len())
            .sum()
    }

    /// Decompressed text as original symbol values.
    pub fn expand_text(&self) -> Vec<u32> {
        expand_unchecked(self, self.start)
            .into_iter()
            .map(|t| self.terminals[t as usize])
            .collect()
    }
}

pub fn validate(g: &Grammar) -> Result<(), GrammarError> {
    if g.rules.is_empty() {
        return Err(GrammarError::NoRules);
    }
    if let Some(i) = g.terminals.windows(2).position(|w| w[0] >= w[1]) {
        return Err(GrammarError::UnsortedTerminals { index: i + 1 });
    }
    let k = g.terminals.len() as u32;
    let mut seen: HashMap<u32, usize> = HashMap::with_capacity(g.rules.len());
    for (index, rule) in g.rules.iter().enumerate() {
        if seen.insert(rule.lhs, index).is_some() {
            return Err(GrammarError::Nondeterministic(rule.lhs));
        }
        if rule.lhs as usize != index {
            return Err(GrammarError::Misnumbered {
                index,
                lhs: rule.lhs,
            });
        }
        let var = rule.lhs;
        if rule.rhs.is_empty() {
            return Err(GrammarError::EmptyRhs { var });
        }
        if var < k {
            if rule.rhs != [Symbol::Terminal(var)] {
                return Err(GrammarError::TerminalLayout { var });
            }
            continue;
        }
        if let [Symbol::Terminal(t)] = rule.rhs.as_slice() {
            if *t >= k {
                return Err(GrammarError::TerminalOutOfRange { var, terminal: *t });
            }
            // a second rule for the same terminal is legal but off-layout
            return Err(GrammarError::TerminalLayout { var });
        }
        for s in &rule.rhs {
            match *s {
                Symbol::Terminal(_) => return Err(GrammarError::MixedRule { var }),
                Symbol::Variable(v) if v >= var => {
                    return Err(GrammarError::Ordering { var, referenced: v })
                }
                Symbol::Variable(_) => {}
            }
        }
    }
    let last = g.rules.len() as u32 - 1;
    if g.start != last || g.start < k {
        return Err(GrammarError::BadStart { start: g.start });
    }
    Ok(())
}

/// Total right-hand-side length over all rules, start rule included.
pub fn grammar_size(g: &Grammar, metric: SizeMetric) -> Result<usize, GrammarError> {
    validate(g)?;
    Ok(g.size(metric))
}

/// Derives variable `v` down to terminal indices.
pub fn expand(g: &Grammar, v: u32) -> Result<Vec<u32>, GrammarError> {
    validate(g)?;
    if v as usize >= g.rules.len() {
        return Err(GrammarError::Ordering {
            var: g.start,
            referenced: v,
        });
    }
    Ok(expand_unchecked(g, v))
}

/// Stack-based expansion; assumes `g` is valid.
pub(crate) fn expand_unchecked(g: &Grammar, v: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut stack = vec![Symbol::Variable(v)];
    while let Some(s) = stack.pop() {
        match s {
            Symbol::Terminal(t) => out.push(t),
            Symbol::Variable(v) => {
                let rhs = &g.rules[v as usize].rhs;
                stack.extend(rhs.iter().rev().copied());
            }
        }
    }
    out
}

/// Lengths of the expansions of every variable, computed bottom-up.
pub fn expansion_lengths(g: &Grammar) -> Vec<u64> {
    let mut len = vec![0u64; g.rules.len()];
    for (i, r) in g.rules.iter().enumerate() {
        len[i] = r
            .rhs
            .iter()
            .map(|s| match *s {
                Symbol::Terminal(_) => 1,
                Symbol::Variable(v) => len[v as usize],
            })
            .sum();
    }
    len
}

/// Dense alphabet of `text` (distinct values, ascending) and the text
/// rewritten over it, i.e. over the terminal-rule variables.
pub fn map_to_alphabet(text: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut terminals = text.to_vec();
    terminals.sort_unstable();
    terminals.dedup();
    let mapped = if terminals.last().is_some_and(|&m| (m as usize) < 1 << 20) {
        let mut table = vec![0u32; *terminals.last().unwrap() as usize + 1];
        for (i, &t) in terminals.iter().enumerate() {
            table[t as usize] = i as u32;
        }
        text.iter().map(|&c| table[c as usize]).collect()
    } else {
        text.iter()
            .map(|c| terminals.binary_search(c).unwrap() as u32)
            .collect()
    };
    (terminals, mapped)
}

/// Maps each symbol to the index of its first occurrence.
pub fn equality_pattern<T: Eq + Hash>(t: &[T]) -> Vec<u32> {
    let mut first: HashMap<&T, u32> = HashMap::new();
    t.iter()
        .map(|s| {
            let next = first.len() as u32;
            *first.entry(s).or_insert(next)
        })
        .collect()
}

/// True iff the two sequences are equal up to a bijective renaming.
pub fn isomorphic<A: Eq + Hash, B: Eq + Hash>(a: &[A], b: &[B]) -> bool {
    a.len() == b.len() && equality_pattern(a) == equality_pattern(b)
}

/// The four figures reported per grammar: non-terminal non-start rules,
/// their total right-hand-side length, the start rule length and the total
/// size with terminal rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrammarStats {
    pub rule_count_excl_terminals: usize,
    pub rhs_total_excl_start_excl_terminals: usize,
    pub start_len: usize,
    pub total_size: usize,
    pub alphabet_size: usize,
}

impl GrammarStats {
    pub fn total(&self, metric: SizeMetric) -> usize {
        match metric {
            SizeMetric::WithTerminalRules => self.total_size,
            SizeMetric::WithoutTerminalRules => self.total_size - self.alphabet_size,
        }
    }
}

pub fn grammar_stats(g: &Grammar) -> Result<GrammarStats, GrammarError> {
    validate(g)?;
    let k = g.alphabet_size();
    let start = g.start as usize;
    let inner = &g.rules[k..start];
    let rhs_total: usize = inner.iter().map(|r| r.rhs.len()).sum();
    let start_len = g.rules[start].rhs.len();
    Ok(GrammarStats {
        rule_count_excl_terminals: inner.len(),
        rhs_total_excl_start_excl_terminals: rhs_total,
        start_len,
        total_size: rhs_total + start_len + k,
        alphabet_size: k,
    })
}
