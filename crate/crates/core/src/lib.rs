//! Grammar compression by recursive pairing.
//!
//! Three compressors share one working-text engine ([`pairs::PairIndex`]):
//!
//! * [`repair`]: RePair, which replaces a most frequent adjacent pair per step;
//! * [`mr`]: MR-RePair, which extends the chosen pair to its maximal repeat and
//!   replaces the whole repeat at once, and Naive-MR-RePair;
//! * tie-breaking among equally frequent pairs is explicit ([`repair::TieBreak`]),
//!   since it decides which maximal repeats win shared symbols.
//!
//! [`analysis`] holds brute-force oracles and checkers for the structural
//! properties linking pairs and maximal repeats, [`generators`] builds the
//! adversarial and synthetic inputs, and [`codec`] is the on-disk format.

pub mod analysis;
pub mod codec;
pub mod generators;
pub mod grammar;
pub mod mr;
pub mod pairs;
pub mod repair;

pub use codec::{decode, decompress, encode, Algorithm, CodecError};
pub use grammar::{
    expand, grammar_size, grammar_stats, isomorphic, validate, Grammar, GrammarError, GrammarStats,
    Rule, SizeMetric, SymSeq, Symbol,
};
pub use mr::{
    extend_to_maximal_repeat, mr_repair_compress, mr_repair_compress_with_trim, naive_mr_compress,
    trim_if_bookended, MaxRepeat, MrTrace, TrimSide,
};
pub use pairs::{IndexError, Pair, PairFreq, PairIndex, PairOrder};
pub use repair::{
    repair_compress, repair_enumerate, repair_following_trace, CompressError, RunLog, TieBreak,
};

/// Compresses `text` with the given algorithm and default tie-breaking.
pub fn compress(text: &[u32], algo: Algorithm) -> Result<Grammar, CompressError> {
    let tie = TieBreak::FirstOccurrence;
    match algo {
        Algorithm::RePair => repair_compress(text, &tie).map(|(g, _)| g),
        Algorithm::MrRePair => mr_repair_compress(text, &tie).map(|(g, _)| g),
        Algorithm::NaiveMrRePair => naive_mr_compress(text, &tie),
    }
}
