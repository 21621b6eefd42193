//! Codebook file format.
//!
//! ```text
//! cnr-codebook v1 codec=<label>
//! <index> <message-hex> <codeword>
//! ...
//! ```
//!
//! The first line is the header; `<label>` runs to the end of the line and
//! names how the code was built (`huffman`, `trimmed-huffman`,
//! `external:<command>`, or anything else). Each following line is one
//! record, separated by single spaces: the 0-based message index in decimal
//! (records appear in index order starting at 0), the message bytes as
//! lowercase hex or `-` for the empty message, and the codeword as ASCII
//! `0`/`1`. Every line ends with `\n`. Nothing else is accepted.

use std::fmt::Write as _;

use crate::bits::BitString;
use crate::codec::code::PrefixCode;
use crate::error::{Error, Result};

pub const CODEBOOK_MAGIC: &str = "cnr-codebook";
pub const CODEBOOK_VERSION: &str = "v1";

/// A code together with the label of the codec that produced it.
#[derive(Clone, Debug)]
pub struct Codebook {
    pub codec: String,
    pub code: PrefixCode,
}

impl Codebook {
    pub fn new(codec: impl Into<String>, code: PrefixCode) -> Self {
        Codebook {
            codec: codec.into(),
            code,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{CODEBOOK_MAGIC} {CODEBOOK_VERSION} codec={}\n", self.codec);
        for (i, (m, w)) in self.code.entries().iter().enumerate() {
            let msg = if m.is_empty() { "-".to_owned() } else { hex::encode(m) };
            let _ = writeln!(out, "{i} {msg} {w}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, what: &str| Error::CodebookFormat(format!("line {line}: {what}"));
        let body = text
            .strip_suffix('\n')
            .ok_or_else(|| err(1, "file must end with a newline"))?;
        let mut lines = body.split('\n');
        let header = lines.next().unwrap_or_default();
        let codec = header
            .strip_prefix(CODEBOOK_MAGIC)
            .and_then(|h| h.strip_prefix(' '))
            .ok_or_else(|| err(1, "missing codebook header"))?;
        let codec = codec
            .strip_prefix(CODEBOOK_VERSION)
            .and_then(|h| h.strip_prefix(" codec="))
            .ok_or_else(|| err(1, "unsupported codebook version"))?;
        if codec.contains('\r') {
            return Err(err(1, "carriage return in header"));
        }

        let mut entries = Vec::new();
        for (k, line) in lines.enumerate() {
            let n = k + 2;
            let fields: Vec<&str> = line.split(' ').collect();
            let [index, msg, word] = fields[..] else {
                return Err(err(n, "expected `<index> <message-hex> <codeword>`"));
            };
            if index != k.to_string() {
                return Err(err(n, &format!("expected index {k}, found `{index}`")));
            }
            let message = match msg {
                "-" => Vec::new(),
                hexed if hexed.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) => {
                    hex::decode(hexed).map_err(|e| err(n, &format!("bad message hex: {e}")))?
                }
                _ => return Err(err(n, "message must be lowercase hex or `-`")),
            };
            if message.is_empty() && msg != "-" {
                return Err(err(n, "empty message must be written as `-`"));
            }
            let word: BitString = word.parse().map_err(|_| err(n, "codeword must be 0/1"))?;
            entries.push((message, word));
        }
        let code = PrefixCode::new(entries).map_err(|e| Error::CodebookFormat(e.to_string()))?;
        Ok(Codebook {
            codec: codec.to_owned(),
            code,
        })
    }
}
