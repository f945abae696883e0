//! `.grc` grammar files and `.sym` symbol files.
//!
//! ```text
//! .grc:  "GRCF"  version:u8=1  algo:u8  k:u32  terminals:[u32; k]
//!        m:u32  m × (arity:varint  ids:[varint; arity])
//! .sym:  "SYMT"  count:u32  symbols:[u32; count]
//! ```
//!
//! Integers are little-endian; varints are minimal unsigned LEB128. Rule
//! `j` defines variable `k + j`, and an id below `k` is a terminal index, so
//! file ids coincide with in-memory variable ids. Terminal rules are implied
//! by the table. The last rule is the start rule.

use thiserror::Error;

use crate::grammar::{Grammar, GrammarError};

pub const GRC_MAGIC: &[u8; 4] = b"GRCF";
pub const GRC_VERSION: u8 = 1;
pub const SYM_MAGIC: &[u8; 4] = b"SYMT";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Algorithm {
    RePair = 0,
    MrRePair = 1,
    NaiveMrRePair = 2,
}

impl TryFrom<u8> for Algorithm {
    type Error = CodecError;

    fn try_from(b: u8) -> Result<Self, CodecError> {
        match b {
            0 => Ok(Algorithm::RePair),
            1 => Ok(Algorithm::MrRePair),
            2 => Ok(Algorithm::NaiveMrRePair),
            _ => Err(CodecError::BadAlgo(b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported version {0}")]
    BadVersion(u8),
    #[error("unknown algorithm tag {0}")]
    BadAlgo(u8),
    #[error("unexpected end of data at byte {0}")]
    Truncated(usize),
    #[error("non-minimal or oversized varint at byte {0}")]
    BadVarint(usize),
    #[error("rule {rule} references id {id}, which is not defined before it")]
    ForwardReference { rule: u32, id: u64 },
    #[error("rule {0} has arity zero")]
    ZeroArity(u32),
    #[error("file declares no rules")]
    NoRules,
    #[error("{0} trailing bytes")]
    TrailingBytes(usize),
    #[error("grammar is invalid: {0}")]
    Invalid(#[from] GrammarError),
}

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    while v >= 0x80 {
        out.push((v as u8) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

/// Serializes a valid grammar.
pub fn encode(g: &Grammar, algo: Algorithm) -> Result<Vec<u8>, CodecError> {
    g.validate()?;
    let k = g.alphabet_size();
    let bodies = g.bodies();
    let mut out =
        Vec::with_capacity(14 + 4 * k + bodies.iter().map(|b| b.len() + 1).sum::<usize>());
    out.extend_from_slice(GRC_MAGIC);
    out.push(GRC_VERSION);
    out.push(algo as u8);
    out.extend_from_slice(&(k as u32).to_le_bytes());
    for &t in &g.terminals {
        out.extend_from_slice(&t.to_le_bytes());
    }
    out.extend_from_slice(&(bodies.len() as u32).to_le_bytes());
    for body in &bodies {
        put_varint(&mut out, body.len() as u64);
        for &id in body {
            put_varint(&mut out, id as u64);
        }
    }
    Ok(out)
}

struct Reader<'a> {
    b: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], CodecError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.b.len());
        let end = end.ok_or(CodecError::Truncated(self.b.len()))?;
        let s = &self.b[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn varint(&mut self) -> Result<u64, CodecError> {
        let at = self.pos;
        let mut v = 0u64;
        for i in 0..10 {
            let byte = self.u8()?;
            let bits = (byte & 0x7f) as u64;
            if i == 9 && bits > 1 {
                return Err(CodecError::BadVarint(at));
            }
            v |= bits << (7 * i);
            if byte & 0x80 == 0 {
                // a zero final byte after the first is a padded encoding
                if i > 0 && byte == 0 {
                    return Err(CodecError::BadVarint(at));
                }
                return Ok(v);
            }
        }
        Err(CodecError::BadVarint(at))
    }
}

/// Parses and validates a `.grc` file.
pub fn decode(b: &[u8]) -> Result<(Grammar, Algorithm), CodecError> {
    let mut r = Reader { b, pos: 0 };
    if r.take(4).map_err(|_| CodecError::BadMagic)? != GRC_MAGIC {
        return Err(CodecError::BadMagic);
    }
    let version = r.u8()?;
    if version != GRC_VERSION {
        return Err(CodecError::BadVersion(version));
    }
    let algo = Algorithm::try_from(r.u8()?)?;
    let k = r.u32()?;
    // bound allocations by what the input can actually hold
    if (k as usize).saturating_mul(4) > b.len() {
        return Err(CodecError::Truncated(b.len()));
    }
    let terminals = (0..k).map(|_| r.u32()).collect::<Result<Vec<_>, _>>()?;
    let m = r.u32()?;
    if m == 0 {
        return Err(CodecError::NoRules);
    }
    if m as usize > b.len() - r.pos {
        return Err(CodecError::Truncated(b.len()));
    }
    let mut bodies = Vec::with_capacity(m as usize);
    for j in 0..m {
        let arity = r.varint()?;
        if arity == 0 {
            return Err(CodecError::ZeroArity(j));
        }
        if arity > (b.len() - r.pos) as u64 {
            return Err(CodecError::Truncated(b.len()));
        }
        let limit = k as u64 + j as u64;
        let mut body = Vec::with_capacity(arity as usize);
        for _ in 0..arity {
            let id = r.varint()?;
            if id >= limit {
                return Err(CodecError::ForwardReference { rule: j, id });
            }
            body.push(id as u32);
        }
        bodies.push(body);
    }
    if r.pos != b.len() {
        return Err(CodecError::TrailingBytes(b.len() - r.pos));
    }
    let g = Grammar::from_bodies(terminals, bodies);
    g.validate()?;
    Ok((g, algo))
}

/// Decodes and expands to original symbol values.
pub fn decompress(b: &[u8]) -> Result<Vec<u32>, CodecError> {
    decode(b).map(|(g, _)| g.expand_text())
}

pub fn write_sym(symbols: &[u32]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 4 * symbols.len());
    out.extend_from_slice(SYM_MAGIC);
    out.extend_from_slice(&(symbols.len() as u32).to_le_bytes());
    for s in symbols {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

pub fn read_sym(b: &[u8]) -> Result<Vec<u32>, CodecError> {
    let mut r = Reader { b, pos: 0 };
    if r.take(4).map_err(|_| CodecError::BadMagic)? != SYM_MAGIC {
        return Err(CodecError::BadMagic);
    }
    let n = r.u32()? as usize;
    let body = b.len() - r.pos;
    if n.saturating_mul(4) > body {
        return Err(CodecError::Truncated(b.len()));
    }
    if n * 4 < body {
        return Err(CodecError::TrailingBytes(body - n * 4));
    }
    Ok(r.b[r.pos..]
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}
