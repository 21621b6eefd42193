//! Compression-and-randomisation perfect cipher.
//!
//! A message from a finite space is compressed with a prefix-free code,
//! the codeword is XORed with exactly as many one-time-pad key bits as it is
//! long, and fresh random bits pad the result to the length `l` of the
//! longest codeword. Every ciphertext therefore has the same length and is
//! uniform over `{0,1}^l` whatever the message, while the expected key
//! consumption equals the average codeword length, which a Huffman code
//! keeps within one bit of the Shannon entropy.
//!
//! - [`codec`]: message spaces, Huffman and trimmed codes, framing of
//!   external compressors, codebook files.
//! - [`keystore`]: key pools with a forward-only cursor, persisted write-ahead.
//! - [`cipher`]: encryption, prefix-scan decryption, the session byte format.
//! - [`verify`]: the exact secrecy oracle, chi-square uniformity, leak and
//!   bound reports.
//!
//! Probabilities are generic over [`Probability`]; use [`ExactSpace`] when
//! results must be exact and [`FloatSpace`] otherwise.

pub mod bits;
pub mod cipher;
pub mod codec;
pub mod error;
pub mod keystore;
pub mod scalar;
pub mod verify;

pub use bits::BitString;
pub use cipher::{decrypt, encrypt, key_cost, Ciphertext, EncryptionRecord};
pub use codec::{
    build_huffman, trim_code, verify_prefix_free, wrap_external, Codebook, MessageSpace, PrefixCode,
};
pub use error::{Error, Result};
pub use keystore::{KeyPool, KeySource, OsRandom, PersistentPool, SeededRandom};
pub use scalar::Probability;

pub use num_rational::BigRational;

/// Exact rational probabilities.
pub type Rational = BigRational;

pub type ExactSpace = MessageSpace<BigRational>;
pub type FloatSpace = MessageSpace<f64>;
pub type SingleSpace = MessageSpace<f32>;
