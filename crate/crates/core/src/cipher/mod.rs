//! The compression-and-randomisation transform.
//!
//! A message is encoded with a prefix-free code into `s` bits, the `s` bits
//! are XORed with the next `s` key bits, and `l − s` fresh random bits are
//! appended so that every ciphertext is exactly `l` bits long, where `l` is
//! the longest codeword. Decryption XORs key bits in one at a time and stops
//! at the first complete codeword.

pub mod wire;

use std::ops::Range;

use rand::RngCore;

use crate::bits::BitString;
use crate::codec::{MessageSpace, PrefixCode, Step};
use crate::error::{Error, Result};
use crate::keystore::{KeySource, PoolId};
use crate::scalar::Probability;

pub use wire::{read_session, write_session, SessionHeader};

/// A ciphertext of exactly `l` bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ciphertext {
    bits: BitString,
}

impl Ciphertext {
    pub fn from_bits(bits: BitString) -> Self {
        Ciphertext { bits }
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    /// The public length `l`.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Result of one encryption, with the key range it consumed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncryptionRecord {
    pub ciphertext: Ciphertext,
    pub key_bits_used: usize,
    pub pool_id: PoolId,
    pub key_range: Range<u64>,
}

/// `(codeword ⊕ key) ‖ pad`; `key` must be as long as `codeword`.
pub fn seal(codeword: &BitString, key: &BitString, pad: &BitString) -> Result<Ciphertext> {
    let mut bits = codeword.xor(key)?;
    bits.extend_from(pad);
    Ok(Ciphertext { bits })
}

/// Encrypts `message`, taking exactly `|code(message)|` key bits from `pool`
/// and the padding from `rng`.
pub fn encrypt<K, R>(
    message: &[u8],
    code: &PrefixCode,
    pool: &mut K,
    rng: &mut R,
) -> Result<EncryptionRecord>
where
    K: KeySource + ?Sized,
    R: RngCore + ?Sized,
{
    let codeword = code.encode(message)?;
    let s = codeword.len();
    let start = pool.cursor();
    let key = pool.take(s)?;
    let pad = BitString::random(rng, code.max_len() - s);
    let ciphertext = seal(codeword, &key, &pad)?;
    Ok(EncryptionRecord {
        ciphertext,
        key_bits_used: s,
        pool_id: pool.pool_id(),
        key_range: start..start + s as u64,
    })
}

/// Decrypts by prefix scan, consuming exactly as many key bits as the
/// recovered codeword is long. On failure no key bits are consumed and no
/// message is returned.
pub fn decrypt<'c, K>(ciphertext: &Ciphertext, code: &'c PrefixCode, pool: &mut K) -> Result<&'c [u8]>
where
    K: KeySource + ?Sized,
{
    let l = code.max_len();
    if ciphertext.len() != l {
        return Err(Error::DecryptionFailed(format!(
            "ciphertext has {} bits, the code's length is {l}",
            ciphertext.len()
        )));
    }
    let remaining = pool.remaining();
    let available = usize::try_from(remaining).map_or(l, |r| r.min(l));
    let key = pool.peek(available)?;
    let mut decoder = code.decoder();
    for i in 0..available {
        match decoder.push(ciphertext.bits.bit(i) ^ key.bit(i)) {
            Step::Continue => {}
            Step::Done { index, consumed } => {
                pool.take(consumed)?;
                return Ok(code.message(index));
            }
            Step::Dead => {
                return Err(Error::DecryptionFailed(
                    "no codeword matches; wrong key, desynchronized pool or corrupted ciphertext"
                        .into(),
                ))
            }
        }
    }
    if available < l {
        return Err(Error::KeyExhausted {
            requested: l as u64,
            remaining,
        });
    }
    Err(Error::DecryptionFailed("no prefix of the ciphertext is a codeword".into()))
}

/// Expected key bits consumed per message, `Σ P(m)·|code(m)|`.
pub fn key_cost<P: Probability>(space: &MessageSpace<P>, code: &PrefixCode) -> Result<P> {
    code.average_length(space)
}

/// The unpadded variant: compress then one-time-pad, nothing else.
///
/// INSECURE. The ciphertext length equals the codeword length and so reveals
/// information about the message. Kept only to demonstrate that leak.
pub mod naive {
    use super::*;

    pub fn seal_unpadded(codeword: &BitString, key: &BitString) -> Result<BitString> {
        codeword.xor(key)
    }

    pub fn encrypt_unpadded<K: KeySource + ?Sized>(
        message: &[u8],
        code: &PrefixCode,
        pool: &mut K,
    ) -> Result<BitString> {
        let codeword = code.encode(message)?;
        let key = pool.take(codeword.len())?;
        seal_unpadded(codeword, &key)
    }
}
