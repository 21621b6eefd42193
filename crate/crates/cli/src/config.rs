use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rand::RngCore;

use cnr_core::codec::{parse_space, Codebook};
use cnr_core::keystore::{OsRandom, PersistentPool, SeededRandom};
use cnr_core::ExactSpace;

/// Environment variable naming the default key directory.
pub const KEY_DIR_ENV: &str = "CNR_KEY_DIR";

/// A usage error detected by the front end rather than by the library.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn cli_error(kind: &'static str, message: impl Into<String>) -> anyhow::Error {
    CliError {
        kind,
        message: message.into(),
    }
    .into()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodecChoice {
    Huffman,
    TrimmedHuffman,
    External(String),
}

impl CodecChoice {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        match text {
            "huffman" => Ok(CodecChoice::Huffman),
            "trimmed-huffman" => Ok(CodecChoice::TrimmedHuffman),
            _ => match text.strip_prefix("external:") {
                Some(cmd) if !cmd.trim().is_empty() => Ok(CodecChoice::External(cmd.trim().to_owned())),
                _ => Err(cli_error(
                    "UnknownCodec",
                    format!("unknown codec `{text}`; expected huffman, trimmed-huffman or external:<command>"),
                )),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            CodecChoice::Huffman => "huffman".into(),
            CodecChoice::TrimmedHuffman => "trimmed-huffman".into(),
            CodecChoice::External(cmd) => format!("external:{cmd}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RngMode {
    Os,
    Seeded(u64),
}

impl RngMode {
    /// Parses `os` or `seeded:<u64>`; seeded mode needs `insecure_ok`.
    pub fn parse(text: &str, insecure_ok: bool) -> anyhow::Result<Self> {
        if text == "os" {
            return Ok(RngMode::Os);
        }
        let seed = text
            .strip_prefix("seeded:")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| cli_error("BadRngMode", format!("rng mode `{text}` is not os or seeded:<u64>")))?;
        if !insecure_ok {
            return Err(cli_error(
                "InsecureRngRefused",
                "seeded randomness is predictable; pass --insecure-test to allow it",
            ));
        }
        Ok(RngMode::Seeded(seed))
    }

    pub fn source(&self) -> Box<dyn RngCore> {
        self.derived(0)
    }

    /// An independent stream for a second purpose (e.g. pads vs keys).
    pub fn derived(&self, stream: u64) -> Box<dyn RngCore> {
        match *self {
            RngMode::Os => Box::new(OsRandom),
            RngMode::Seeded(seed) => Box::new(SeededRandom::insecure_from_seed(
                seed.wrapping_add(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15)),
            )),
        }
    }
}

/// Paths and choices shared by the session subcommands.
#[derive(Clone, Debug)]
pub struct SessionConfig {
    pub codebook: PathBuf,
    pub key_pool: Option<PathBuf>,
    pub codec: Option<CodecChoice>,
    codec_text: Option<String>,
}

impl SessionConfig {
    pub fn new(codebook: PathBuf, key_pool: Option<PathBuf>, codec: Option<String>) -> Self {
        SessionConfig {
            codebook,
            key_pool: key_pool.map(|k| resolve_key_path(&k)),
            codec: codec.as_deref().and_then(|c| CodecChoice::parse(c).ok()),
            codec_text: codec,
        }
    }

    /// Loads the codebook and checks it against the requested codec.
    pub fn load_codebook(&self) -> anyhow::Result<Codebook> {
        let text = fs::read_to_string(&self.codebook)
            .with_context(|| format!("reading codebook {}", self.codebook.display()))?;
        let book = Codebook::parse(&text)?;
        if let Some(requested) = &self.codec_text {
            let expected = self.codec.as_ref().map(CodecChoice::label);
            if expected.as_deref() != Some(book.codec.as_str()) {
                return Err(cli_error(
                    "CodecMismatch",
                    format!("codebook was built with `{}`, not `{requested}`", book.codec),
                ));
            }
        }
        Ok(book)
    }

    pub fn open_pool(&self) -> anyhow::Result<PersistentPool> {
        let path = self
            .key_pool
            .as_ref()
            .ok_or_else(|| cli_error("MissingKey", "no key pool given"))?;
        PersistentPool::open(path).with_context(|| format!("opening key pool {}", path.display()))
    }
}

/// Resolves a relative key path against `$CNR_KEY_DIR` when it is set.
pub fn resolve_key_path(path: &Path) -> PathBuf {
    match std::env::var_os(KEY_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

pub fn load_space(path: &Path) -> anyhow::Result<ExactSpace> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading message space {}", path.display()))?;
    Ok(parse_space(&text)?)
}
