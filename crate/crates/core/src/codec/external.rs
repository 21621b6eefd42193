//! Turning an arbitrary deterministic compressor into a prefix-free code
//! over a finite message space.
//!
//! Each output `b` is framed as `γ(|b|) ‖ b`, where `γ` is the Elias-gamma
//! code of the bit length. Framed words of different content are never
//! prefixes of one another; messages whose framed outputs coincide get a
//! `⌈log₂ L⌉`-bit index suffix.

use std::collections::HashMap;
use std::io::Write;
use std::process::{Command, Stdio};

use crate::bits::BitString;
use crate::codec::code::{ceil_log2, PrefixCode};
use crate::codec::space::MessageSpace;
use crate::codec::trim::bin;
use crate::error::{Error, Result};
use crate::scalar::Probability;

/// A deterministic transform from message bytes to a bit string.
pub trait ExternalCompressor {
    fn id(&self) -> &str;

    fn compress(&self, message: &[u8]) -> Result<BitString>;
}

/// Wraps a closure producing bits.
pub struct FnCompressor<F> {
    id: String,
    f: F,
}

impl<F: Fn(&[u8]) -> BitString> FnCompressor<F> {
    pub fn new(id: impl Into<String>, f: F) -> Self {
        FnCompressor { id: id.into(), f }
    }
}

impl<F: Fn(&[u8]) -> BitString> ExternalCompressor for FnCompressor<F> {
    fn id(&self) -> &str {
        &self.id
    }

    fn compress(&self, message: &[u8]) -> Result<BitString> {
        Ok((self.f)(message))
    }
}

/// Runs a system command with the message on stdin; stdout is the output.
///
/// The command line is split on whitespace, no shell is involved.
pub struct CommandCompressor {
    id: String,
    program: String,
    args: Vec<String>,
}

impl CommandCompressor {
    pub fn new(command_line: &str) -> Result<Self> {
        let mut parts = command_line.split_whitespace().map(str::to_owned);
        let program = parts.next().ok_or_else(|| Error::CompressorFailed {
            id: command_line.into(),
            reason: "empty command".into(),
        })?;
        Ok(CommandCompressor {
            id: command_line.trim().to_owned(),
            program,
            args: parts.collect(),
        })
    }
}

impl ExternalCompressor for CommandCompressor {
    fn id(&self) -> &str {
        &self.id
    }

    fn compress(&self, message: &[u8]) -> Result<BitString> {
        let fail = |reason: String| Error::CompressorFailed {
            id: self.id.clone(),
            reason,
        };
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| fail(e.to_string()))?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let input = message.to_vec();
        let writer = std::thread::spawn(move || stdin.write_all(&input));
        let output = child.wait_with_output().map_err(|e| fail(e.to_string()))?;
        writer
            .join()
            .map_err(|_| fail("stdin writer panicked".into()))?
            .map_err(|e| fail(e.to_string()))?;
        if !output.status.success() {
            return Err(fail(format!("exited with {}", output.status)));
        }
        Ok(BitString::from_whole_bytes(&output.stdout))
    }
}

/// Elias-gamma code of `n ≥ 1`: `⌊log₂ n⌋` zeros, then `n` in binary.
pub fn gamma_encode(n: u64) -> BitString {
    assert!(n >= 1, "gamma code is defined for n >= 1");
    let width = (u64::BITS - n.leading_zeros()) as usize;
    let mut out = BitString::zeros(width - 1);
    out.extend_from(&BitString::from_uint(n, width));
    out
}

/// Decodes a gamma code at the front of `bits`: `(n, bits consumed)`.
pub fn gamma_decode(bits: &BitString) -> Option<(u64, usize)> {
    let zeros = bits.iter().take_while(|b| !b).count();
    if zeros >= 64 || bits.len() < 2 * zeros + 1 {
        return None;
    }
    let n = bits.slice(zeros, 2 * zeros + 1).to_uint()?;
    Some((n, 2 * zeros + 1))
}

/// Frames `payload` with its gamma-coded bit length. An empty payload is
/// framed as the single bit `0`.
pub fn frame(payload: &BitString) -> BitString {
    if payload.is_empty() {
        return frame(&BitString::zeros(1));
    }
    gamma_encode(payload.len() as u64).concat(payload)
}

/// Builds an explicit prefix-free codebook by running `compressor` on every
/// message of `space`.
///
/// Every message is compressed twice; differing outputs are reported as
/// [`Error::NondeterministicCompressor`].
pub fn wrap_external<C, P>(compressor: &C, space: &MessageSpace<P>) -> Result<PrefixCode>
where
    C: ExternalCompressor + ?Sized,
    P: Probability,
{
    let mut framed = Vec::with_capacity(space.len());
    for m in space.messages() {
        let first = compressor.compress(m)?;
        let second = compressor.compress(m)?;
        if first != second {
            return Err(Error::NondeterministicCompressor(compressor.id().to_owned()));
        }
        framed.push(frame(&first));
    }

    let mut groups: HashMap<&BitString, usize> = HashMap::new();
    for w in &framed {
        *groups.entry(w).or_default() += 1;
    }
    let collided: Vec<bool> = framed.iter().map(|w| groups[w] > 1).collect();

    let width = ceil_log2(space.len());
    let words = framed
        .iter()
        .zip(collided)
        .enumerate()
        .map(|(i, (w, clash))| if clash { w.concat(&bin(i, width)) } else { w.clone() })
        .collect();
    let code = PrefixCode::for_space(space, words)?;
    debug_assert!(code.verify_prefix_free());
    Ok(code)
}
