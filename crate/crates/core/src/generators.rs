//! Deterministic input generators. All symbols are `u32`; byte-valued
//! outputs (Fibonacci strings) use ASCII codes.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("parameter `{name}` must be at least {min}, got {got}")]
    TooSmall {
        name: &'static str,
        min: u64,
        got: u64,
    },
    #[error("u and w must consist of pairwise distinct symbols")]
    RepeatedSymbol,
    #[error("output of {0} symbols is too long")]
    TooLong(u128),
}

fn at_least(name: &'static str, got: u64, min: u64) -> Result<(), GenError> {
    if got < min {
        Err(GenError::TooSmall { name, min, got })
    } else {
        Ok(())
    }
}

/// `B L^{f-1} R^{f-1}` where
///
/// ```text
/// B = l1 x y r1  l2 x y r2 ... lf x y rf
/// L = ◇ l1 x  ◇ l2 x ... ◇ lf x
/// R = ◇ y r1  ◇ y r2 ... ◇ y rf
/// ```
///
/// Symbol ids: `x = 0`, `y = 1`, `l_i = 1 + i`, `r_i = 1 + f + i`; every `◇`
/// is a fresh id counting up from `2f + 2`, distinct across all copies.
/// Length is `6f² − 2f`.
pub fn gen_gsdrp(f: u32) -> Result<Vec<u32>, GenError> {
    at_least("f", f as u64, 2)?;
    let n = 6 * (f as u128).pow(2) - 2 * f as u128;
    if n > u32::MAX as u128 {
        return Err(GenError::TooLong(n));
    }
    let (x, y) = (0u32, 1u32);
    let l = |i: u32| 1 + i;
    let r = |i: u32| 1 + f + i;
    let mut out = Vec::with_capacity(n as usize);
    for i in 1..=f {
        out.extend([l(i), x, y, r(i)]);
    }
    let mut fresh = 2 * f + 2;
    let mut diamond = || {
        fresh += 1;
        fresh - 1
    };
    for _ in 1..f {
        for i in 1..=f {
            out.extend([diamond(), l(i), x]);
        }
    }
    for _ in 1..f {
        for i in 1..=f {
            out.extend([diamond(), y, r(i)]);
        }
    }
    Ok(out)
}

/// `(u w)^{2^{m+1} − 1} u`, with `u` a single symbol.
pub fn gen_power(u: u32, w: &[u32], m: u32) -> Result<Vec<u32>, GenError> {
    at_least("m", m as u64, 1)?;
    at_least("|w|", w.len() as u64, 1)?;
    let mut seen: Vec<u32> = w.to_vec();
    seen.push(u);
    seen.sort_unstable();
    if seen.windows(2).any(|p| p[0] == p[1]) {
        return Err(GenError::RepeatedSymbol);
    }
    let reps = 1u128.checked_shl(m + 1).map(|p| p - 1).unwrap_or(u128::MAX);
    let n = reps.saturating_mul(w.len() as u128 + 1).saturating_add(1);
    if n > u32::MAX as u128 {
        return Err(GenError::TooLong(n));
    }
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..reps {
        out.push(u);
        out.extend_from_slice(w);
    }
    out.push(u);
    Ok(out)
}

/// `F1 = b`, `F2 = a`, `Fk = F(k−1) F(k−2)`.
pub fn gen_fibonacci(k: u32) -> Result<Vec<u32>, GenError> {
    at_least("k", k as u64, 1)?;
    if k > 47 {
        return Err(GenError::TooLong(fib_len(k)));
    }
    let (mut prev, mut cur) = (vec![b'a' as u32], vec![b'b' as u32]);
    if k == 1 {
        return Ok(cur);
    }
    // invariant: cur = F(j), prev = F(j-1), starting with j = 2
    std::mem::swap(&mut prev, &mut cur);
    for _ in 2..k {
        let mut next = cur.clone();
        next.extend_from_slice(&prev);
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur)
}

fn fib_len(k: u32) -> u128 {
    let (mut a, mut b) = (1u128, 1u128);
    for _ in 2..k {
        (a, b) = (b, a.saturating_add(b));
    }
    b
}

/// xorshift64* (Vigna). State is `seed ^ 0x9E3779B97F4A7C15`, replaced by
/// that constant if zero. Each step: `x ^= x >> 12; x ^= x << 25;
/// x ^= x >> 27`, output `x * 0x2545F4914F6CDD1D` (wrapping).
#[derive(Clone, Debug)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    const MIX: u64 = 0x9E37_79B9_7F4A_7C15;

    pub fn new(seed: u64) -> Self {
        let s = seed ^ Self::MIX;
        XorShift64Star {
            state: if s == 0 { Self::MIX } else { s },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// `(next_u64() >> 32) % bound`.
    pub fn below(&mut self, bound: u32) -> u32 {
        ((self.next_u64() >> 32) % bound as u64) as u32
    }
}

/// A block of `patterns` random strings of length `patlen` over `0..sigma`,
/// repeated `copies` times. Symbols are drawn in order with
/// [`XorShift64Star::below`].
pub fn gen_repetitive(
    copies: u32,
    patterns: u32,
    patlen: u32,
    sigma: u32,
    seed: u64,
) -> Result<Vec<u32>, GenError> {
    at_least("copies", copies as u64, 1)?;
    at_least("patterns", patterns as u64, 1)?;
    at_least("patlen", patlen as u64, 1)?;
    at_least("sigma", sigma as u64, 1)?;
    let block_len = patterns as u128 * patlen as u128;
    let n = block_len * copies as u128;
    if n > u32::MAX as u128 {
        return Err(GenError::TooLong(n));
    }
    let mut rng = XorShift64Star::new(seed);
    let block: Vec<u32> = (0..block_len).map(|_| rng.below(sigma)).collect();
    Ok(block.repeat(copies as usize))
}
