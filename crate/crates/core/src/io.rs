//! JSON file loading with byte-offset error positions.

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::error::{Error, Result};

/// Byte offset of 1-based `(line, column)` in `text`, clamped to its length.
pub fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

pub fn parse_json<J: DeserializeOwned>(text: &str, origin: &str) -> Result<J> {
    serde_json::from_str(text).map_err(|e| {
        let offset = byte_offset(text, e.line(), e.column());
        Error::Parse(format!("{origin}: byte {offset}: {e}"))
    })
}

pub fn read_json<J: DeserializeOwned>(path: impl AsRef<Path>) -> Result<J> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: cannot read: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

pub fn write_json<J: serde::Serialize>(path: impl AsRef<Path>, value: &J) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::Parse(format!("{}: cannot write: {e}", path.display())))
}
