//! Fixed inputs shared by the benchmarks.

use grc_core::generators::{gen_fibonacci, gen_repetitive};

/// Named benchmark texts: a scaled-down rand77-style corpus at two sizes and
/// a Fibonacci string.
pub fn corpus() -> Vec<(&'static str, Vec<u32>)> {
    vec![
        (
            "repetitive-256k",
            gen_repetitive(32, 128, 64, 77, 1).unwrap(),
        ),
        (
            "repetitive-512k",
            gen_repetitive(32, 256, 64, 77, 1).unwrap(),
        ),
        ("fib-27", gen_fibonacci(27).unwrap()),
    ]
}
