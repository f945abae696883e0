//! Occurrence-threaded working text with exact pair frequencies.
//!
//! The text lives in an array of cells. A cell keeps its index for the whole
//! run, so cell indices double as offsets into the original input: an active
//! cell covers the original positions `cell..span_end(cell)`. Replacing a run
//! of symbols writes the new symbol into the run's first cell and retires the
//! rest.
//!
//! Every adjacent pair of active cells is threaded into the occurrence chain
//! of its pair, keyed by the left cell. Chains are kept in ascending cell
//! order, so a chain head is the first occurrence of its pair in the current
//! text. Counts include self-overlapping occurrences (`aaa` holds `aa` twice).
//!
//! Pairs seen at least twice sit in an ordered queue keyed by
//! `(frequency desc, tie key)`; the tie key is either the first occurrence or
//! the pair itself, see [`PairOrder`].

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;
use thiserror::Error;

pub type Pair = (u32, u32);

const NONE: u32 = u32::MAX;
const DEAD: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairFreq {
    pub pair: Pair,
    pub count: u32,
}

/// Secondary key of the frequency queue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PairOrder {
    /// Leftmost first occurrence wins.
    #[default]
    FirstOccurrence,
    /// Smallest `(left, right)` symbol pair wins.
    Lexicographic,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("pair ({}, {}) does not occur in the text", .0.0, .0.1)]
    PairAbsent(Pair),
    #[error("cell {0} is not an active position")]
    InactiveCell(u32),
    #[error("run positions must be strictly ascending (cell {0})")]
    Unsorted(u32),
    #[error("run at cell {0} overlaps the previous run")]
    Overlap(u32),
    #[error("run at cell {cell} extends past the end of the text")]
    RunPastEnd { cell: u32 },
    #[error("run length must be at least 2, got {0}")]
    BadRunLength(usize),
}

#[derive(Clone, Debug)]
struct PairRecord {
    pair: Pair,
    count: u32,
    head: u32,
    tail: u32,
    queued: Option<(u32, u64)>,
    dirty: bool,
}

#[derive(Clone, Debug)]
pub struct PairIndex {
    sym: Vec<u32>,
    prev: Vec<u32>,
    next: Vec<u32>,
    occ_prev: Vec<u32>,
    occ_next: Vec<u32>,
    occ_pair: Vec<u32>,
    records: Vec<PairRecord>,
    lookup: FxHashMap<Pair, u32>,
    queue: BTreeSet<(u32, u64, u32)>,
    /// Records whose queue key may be stale; flushed after each replacement.
    dirty: Vec<u32>,
    order: PairOrder,
    active: usize,
}

impl PairIndex {
    pub fn build(text: &[u32]) -> PairIndex {
        PairIndex::build_with_order(text, PairOrder::FirstOccurrence)
    }

    pub fn build_with_order(text: &[u32], order: PairOrder) -> PairIndex {
        assert!(text.len() < NONE as usize, "text too long for 32-bit cells");
        let n = text.len();
        let mut idx = PairIndex {
            sym: text.to_vec(),
            prev: (0..n as u32).map(|i| i.wrapping_sub(1)).collect(),
            next: (1..=n as u32).collect(),
            occ_prev: vec![NONE; n],
            occ_next: vec![NONE; n],
            occ_pair: vec![NONE; n],
            records: Vec::new(),
            lookup: FxHashMap::default(),
            queue: BTreeSet::new(),
            dirty: Vec::new(),
            order,
            active: n,
        };
        if n > 0 {
            idx.prev[0] = NONE;
            idx.next[n - 1] = NONE;
        }
        // thread chains without touching the queue, then queue once
        for c in 0..n.saturating_sub(1) {
            let pair = (text[c], text[c + 1]);
            let pid = idx.record_for(pair);
            idx.append(c as u32, pid);
        }
        for pid in 0..idx.records.len() as u32 {
            idx.requeue(pid);
        }
        idx
    }

    pub fn order(&self) -> PairOrder {
        self.order
    }

    /// Number of active symbols.
    pub fn len(&self) -> usize {
        self.active
    }

    pub fn is_empty(&self) -> bool {
        self.active == 0
    }

    /// Length of the text the index was built from.
    pub fn original_len(&self) -> usize {
        self.sym.len()
    }

    pub fn first_cell(&self) -> Option<u32> {
        (self.active > 0).then_some(0)
    }

    pub fn is_active(&self, cell: u32) -> bool {
        (cell as usize) < self.sym.len() && self.sym[cell as usize] != DEAD
    }

    pub fn symbol(&self, cell: u32) -> u32 {
        self.sym[cell as usize]
    }

    pub fn next_cell(&self, cell: u32) -> Option<u32> {
        some(self.next[cell as usize])
    }

    pub fn prev_cell(&self, cell: u32) -> Option<u32> {
        some(self.prev[cell as usize])
    }

    /// One past the last original position covered by `cell`.
    pub fn span_end(&self, cell: u32) -> usize {
        self.next_cell(cell).map_or(self.sym.len(), |c| c as usize)
    }

    pub fn cells(&self) -> Cells<'_> {
        Cells {
            idx: self,
            at: self.first_cell(),
        }
    }

    /// The current text.
    pub fn symbols(&self) -> Vec<u32> {
        self.cells().map(|(_, s)| s).collect()
    }

    pub fn count(&self, pair: Pair) -> u32 {
        self.lookup
            .get(&pair)
            .map_or(0, |&pid| self.records[pid as usize].count)
    }

    pub fn first_occurrence(&self, pair: Pair) -> Option<u32> {
        let pid = *self.lookup.get(&pair)?;
        some(self.records[pid as usize].head)
    }

    /// Left cells of every occurrence of `pair`, ascending.
    pub fn occurrences(&self, pair: Pair) -> Vec<u32> {
        let mut out = Vec::new();
        if let Some(&pid) = self.lookup.get(&pair) {
            let mut c = self.records[pid as usize].head;
            while c != NONE {
                out.push(c);
                c = self.occ_next[c as usize];
            }
        }
        out
    }

    /// The maximum pair frequency; 0 when the text has fewer than two symbols.
    pub fn max_frequency(&self) -> u32 {
        match self.queue.first() {
            Some(&(inv, _, _)) => u32::MAX - inv,
            None if self.active >= 2 => 1,
            None => 0,
        }
    }

    /// The most frequent pair under the index's tie order.
    pub fn top_pair(&self) -> Option<PairFreq> {
        if let Some(&(inv, _, pid)) = self.queue.first() {
            return Some(PairFreq {
                pair: self.records[pid as usize].pair,
                count: u32::MAX - inv,
            });
        }
        let c = self.first_cell()?;
        let n = self.next_cell(c)?;
        Some(PairFreq {
            pair: (self.symbol(c), self.symbol(n)),
            count: 1,
        })
    }

    /// Pairs of frequency `f` (at least 2) in tie-key order.
    pub fn pairs_with_frequency(&self, f: u32) -> impl Iterator<Item = Pair> + '_ {
        let inv = u32::MAX - f;
        self.queue
            .range((inv, 0, 0)..=(inv, u64::MAX, u32::MAX))
            .map(|&(_, _, pid)| self.records[pid as usize].pair)
    }

    /// `(f, pairs)` with the pairs of maximum frequency `f` ordered by first
    /// occurrence in the current text.
    pub fn most_frequent_pairs(&self) -> (u32, Vec<PairFreq>) {
        let f = self.max_frequency();
        let mut pairs: Vec<(u32, Pair)> = match f {
            0 => Vec::new(),
            1 => {
                let mut seen = rustc_hash::FxHashSet::default();
                self.adjacent_pairs()
                    .filter(|&(_, p)| seen.insert(p))
                    .collect()
            }
            _ => self
                .pairs_with_frequency(f)
                .map(|p| (self.first_occurrence(p).unwrap(), p))
                .collect(),
        };
        pairs.sort_unstable();
        (
            f,
            pairs
                .into_iter()
                .map(|(_, pair)| PairFreq { pair, count: f })
                .collect(),
        )
    }

    /// Every adjacent active pair with its left cell, in text order.
    pub fn adjacent_pairs(&self) -> impl Iterator<Item = (u32, Pair)> + '_ {
        self.cells()
            .filter_map(move |(c, s)| self.next_cell(c).map(|n| (c, (s, self.symbol(n)))))
    }

    /// Replaces the occurrences of `pair` greedily left to right (an
    /// occurrence overlapping an already replaced one is skipped). Returns
    /// the number of replacements.
    pub fn replace_pair(&mut self, pair: Pair, v: u32) -> Result<usize, IndexError> {
        let occ = self.occurrences(pair);
        if occ.is_empty() {
            return Err(IndexError::PairAbsent(pair));
        }
        Ok(self.replace_runs(&occ, 2, v, false)?.len())
    }

    /// Replaces each run of `len` active symbols starting at the given cells
    /// by `v`. Runs must be ascending and pairwise disjoint.
    pub fn replace_run(&mut self, starts: &[u32], len: usize, v: u32) -> Result<usize, IndexError> {
        Ok(self.replace_runs(starts, len, v, true)?.len())
    }

    /// Like [`PairIndex::replace_run`], but runs overlapping an earlier
    /// selected run are skipped. Returns the cells actually replaced.
    pub fn replace_run_greedy(
        &mut self,
        starts: &[u32],
        len: usize,
        v: u32,
    ) -> Result<Vec<u32>, IndexError> {
        self.replace_runs(starts, len, v, false)
    }

    fn replace_runs(
        &mut self,
        starts: &[u32],
        len: usize,
        v: u32,
        strict: bool,
    ) -> Result<Vec<u32>, IndexError> {
        if len < 2 {
            return Err(IndexError::BadRunLength(len));
        }
        let mut runs: Vec<(u32, u32)> = Vec::with_capacity(starts.len());
        let mut last_start: Option<u32> = None;
        for &s in starts {
            if !self.is_active(s) {
                return Err(IndexError::InactiveCell(s));
            }
            if last_start.is_some_and(|p| s <= p) {
                return Err(IndexError::Unsorted(s));
            }
            last_start = Some(s);
            if runs.last().is_some_and(|&(_, e)| s <= e) {
                if strict {
                    return Err(IndexError::Overlap(s));
                }
                continue;
            }
            let mut e = s;
            for _ in 1..len {
                e = self.next[e as usize];
                if e == NONE {
                    return Err(IndexError::RunPastEnd { cell: s });
                }
            }
            runs.push((s, e));
        }

        for &(s, e) in &runs {
            if let Some(p) = self.prev_cell(s) {
                self.unlink(p);
            }
            let mut c = s;
            loop {
                self.unlink(c);
                if c == e {
                    break;
                }
                c = self.next[c as usize];
            }
        }

        for &(s, e) in &runs {
            let after = self.next[e as usize];
            let mut c = self.next[s as usize];
            while c != after {
                let nx = self.next[c as usize];
                self.sym[c as usize] = DEAD;
                self.prev[c as usize] = NONE;
                self.next[c as usize] = NONE;
                c = nx;
            }
            self.sym[s as usize] = v;
            self.next[s as usize] = after;
            if after != NONE {
                self.prev[after as usize] = s;
            }
        }
        self.active -= runs.len() * (len - 1);

        for (i, &(s, _)) in runs.iter().enumerate() {
            if let Some(p) = self.prev_cell(s) {
                let pair = (self.symbol(p), v);
                self.link(p, pair);
            }
            if let Some(n) = self.next_cell(s) {
                let next_is_run = runs.get(i + 1).is_some_and(|&(ns, _)| ns == n);
                if !next_is_run {
                    let pair = (v, self.symbol(n));
                    self.link(s, pair);
                }
            }
        }
        self.flush();
        Ok(runs.into_iter().map(|(s, _)| s).collect())
    }

    fn record_for(&mut self, pair: Pair) -> u32 {
        let next = self.records.len() as u32;
        *self.lookup.entry(pair).or_insert_with(|| {
            self.records.push(PairRecord {
                pair,
                count: 0,
                head: NONE,
                tail: NONE,
                queued: None,
                dirty: false,
            });
            next
        })
    }

    fn append(&mut self, c: u32, pid: u32) {
        let rec = &mut self.records[pid as usize];
        // walk back from the tail to keep the chain ascending
        let mut after = rec.tail;
        while after != NONE && after > c {
            after = self.occ_prev[after as usize];
        }
        let before = if after == NONE {
            rec.head
        } else {
            self.occ_next[after as usize]
        };
        self.occ_prev[c as usize] = after;
        self.occ_next[c as usize] = before;
        if after == NONE {
            rec.head = c;
        } else {
            self.occ_next[after as usize] = c;
        }
        if before == NONE {
            rec.tail = c;
        } else {
            self.occ_prev[before as usize] = c;
        }
        self.occ_pair[c as usize] = pid;
        rec.count += 1;
    }

    fn link(&mut self, c: u32, pair: Pair) {
        let pid = self.record_for(pair);
        self.append(c, pid);
        self.touch(pid);
    }

    fn unlink(&mut self, c: u32) {
        let pid = self.occ_pair[c as usize];
        if pid == NONE {
            return;
        }
        let (p, n) = (self.occ_prev[c as usize], self.occ_next[c as usize]);
        let rec = &mut self.records[pid as usize];
        if p == NONE {
            rec.head = n;
        } else {
            self.occ_next[p as usize] = n;
        }
        if n == NONE {
            rec.tail = p;
        } else {
            self.occ_prev[n as usize] = p;
        }
        rec.count -= 1;
        self.occ_pair[c as usize] = NONE;
        self.occ_prev[c as usize] = NONE;
        self.occ_next[c as usize] = NONE;
        self.touch(pid);
    }

    fn touch(&mut self, pid: u32) {
        let rec = &mut self.records[pid as usize];
        if !rec.dirty {
            rec.dirty = true;
            self.dirty.push(pid);
        }
    }

    fn flush(&mut self) {
        let dirty = std::mem::take(&mut self.dirty);
        for &pid in &dirty {
            self.records[pid as usize].dirty = false;
            self.requeue(pid);
        }
        self.dirty = dirty;
        self.dirty.clear();
    }

    fn requeue(&mut self, pid: u32) {
        let rec = &self.records[pid as usize];
        let key = (rec.count >= 2).then(|| {
            let tie = match self.order {
                PairOrder::FirstOccurrence => rec.head as u64,
                PairOrder::Lexicographic => ((rec.pair.0 as u64) << 32) | rec.pair.1 as u64,
            };
            (u32::MAX - rec.count, tie)
        });
        if key == rec.queued {
            return;
        }
        if let Some((inv, tie)) = rec.queued {
            self.queue.remove(&(inv, tie, pid));
        }
        if let Some((inv, tie)) = key {
            self.queue.insert((inv, tie, pid));
        }
        self.records[pid as usize].queued = key;
    }

    /// Recomputes every count from the active text and compares it with the
    /// maintained state.
    #[doc(hidden)]
    pub fn check_consistency(&self) -> Result<(), String> {
        let fresh = PairIndex::build_with_order(&self.symbols(), self.order);
        let mut live: Vec<(Pair, u32)> = self
            .records
            .iter()
            .filter(|r| r.count > 0)
            .map(|r| (r.pair, r.count))
            .collect();
        let mut want: Vec<(Pair, u32)> = fresh.records.iter().map(|r| (r.pair, r.count)).collect();
        live.sort_unstable();
        want.sort_unstable();
        if live != want {
            return Err(format!("counts diverged: {live:?} vs {want:?}"));
        }
        for (pid, rec) in self.records.iter().enumerate() {
            let mut c = rec.head;
            let mut last = None;
            let mut seen = 0;
            while c != NONE {
                if last.is_some_and(|l| l >= c) {
                    return Err(format!("chain of {:?} not ascending", rec.pair));
                }
                if self.occ_pair[c as usize] != pid as u32 {
                    return Err(format!("cell {c} threaded into the wrong chain"));
                }
                let n = self.next[c as usize];
                if n == NONE || (self.sym[c as usize], self.sym[n as usize]) != rec.pair {
                    return Err(format!("cell {c} does not hold {:?}", rec.pair));
                }
                last = Some(c);
                seen += 1;
                c = self.occ_next[c as usize];
            }
            if seen != rec.count {
                return Err(format!(
                    "count of {:?} is {} but chain has {seen}",
                    rec.pair, rec.count
                ));
            }
        }
        let queued = self.records.iter().filter(|r| r.count >= 2).count();
        if queued != self.queue.len() {
            return Err("queue size mismatch".into());
        }
        if self.max_frequency() != fresh.max_frequency() {
            return Err("max frequency mismatch".into());
        }
        Ok(())
    }
}

fn some(c: u32) -> Option<u32> {
    (c != NONE).then_some(c)
}

pub struct Cells<'a> {
    idx: &'a PairIndex,
    at: Option<u32>,
}

impl Iterator for Cells<'_> {
    type Item = (u32, u32);

    fn next(&mut self) -> Option<(u32, u32)> {
        let c = self.at?;
        self.at = self.idx.next_cell(c);
        Some((c, self.idx.symbol(c)))
    }
}
