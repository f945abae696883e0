use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use grc_core::codec::{read_sym, write_sym};

fn is_sym(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "sym")
}

/// Reads `.sym` files as symbol containers and anything else as raw bytes.
pub fn read_input(path: &Path) -> Result<Vec<u32>> {
    let raw = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if is_sym(path) {
        read_sym(&raw).with_context(|| format!("parsing {}", path.display()))
    } else {
        Ok(raw.into_iter().map(u32::from).collect())
    }
}

/// Like [`read_input`] but rejects empty texts.
pub fn read_text(path: &Path) -> Result<Vec<u32>> {
    let t = read_input(path)?;
    if t.is_empty() {
        bail!("{} is empty; grammars need a nonempty text", path.display());
    }
    Ok(t)
}

/// Writes a `.sym` container if `path` ends in `.sym`, raw bytes otherwise.
pub fn write_output(path: &Path, symbols: &[u32]) -> Result<()> {
    let bytes = if is_sym(path) {
        write_sym(symbols)
    } else {
        symbols
            .iter()
            .map(|&s| u8::try_from(s))
            .collect::<Result<Vec<u8>, _>>()
            .map_err(|_| anyhow::anyhow!("symbols exceed 255; write to a .sym file instead"))?
    };
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}
