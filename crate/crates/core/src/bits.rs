//! Bit strings with an explicit length, packed MSB-first.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::error::{Error, Result};

/// An ordered sequence of bits.
///
/// Storage is packed MSB-first; bits past `len` in the last byte are always
/// zero so that derived equality and hashing see only the logical content.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitString {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    pub fn zeros(len: usize) -> Self {
        BitString {
            bytes: vec![0; len.div_ceil(8)],
            len,
        }
    }

    /// Takes the first `len` bits of `bytes` (MSB-first).
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if len > bytes.len() * 8 {
            return Err(Error::InvalidLength(format!(
                "{len} bits requested from {} bytes",
                bytes.len()
            )));
        }
        let mut bytes = bytes[..len.div_ceil(8)].to_vec();
        if !len.is_multiple_of(8) {
            let last = bytes.len() - 1;
            bytes[last] &= 0xffu8 << (8 - len % 8);
        }
        Ok(BitString { bytes, len })
    }

    /// All bits of `bytes`.
    pub fn from_whole_bytes(bytes: &[u8]) -> Self {
        BitString {
            bytes: bytes.to_vec(),
            len: bytes.len() * 8,
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut out = BitString::new();
        for b in bits {
            out.push(b);
        }
        out
    }

    /// The low `width` bits of `value`, most significant first.
    pub fn from_uint(value: u64, width: usize) -> Self {
        assert!(width <= 64, "width {width} exceeds 64 bits");
        (0..width)
            .rev()
            .map(|i| (value >> i) & 1 == 1)
            .collect()
    }

    /// `n` uniformly random bits.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> Self {
        let mut bytes = vec![0u8; n.div_ceil(8)];
        rng.fill_bytes(&mut bytes);
        // cannot fail: the buffer holds exactly enough bytes
        BitString::from_bytes(&bytes, n).expect("sized buffer")
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| self.bytes[i / 8] >> (7 - i % 8) & 1 == 1)
    }

    pub fn bit(&self, i: usize) -> bool {
        self.get(i)
            .unwrap_or_else(|| panic!("bit index {i} out of range for length {}", self.len))
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 0x80u8 >> (i % 8);
        if value {
            self.bytes[i / 8] |= mask;
        } else {
            self.bytes[i / 8] &= !mask;
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        self.len += 1;
        let i = self.len - 1;
        if bit {
            self.bytes[i / 8] |= 0x80 >> (i % 8);
        }
    }

    pub fn extend_from(&mut self, other: &BitString) {
        if self.len.is_multiple_of(8) {
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
        } else {
            for b in other.iter() {
                self.push(b);
            }
        }
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    /// Bits `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> BitString {
        assert!(start <= end && end <= self.len, "slice {start}..{end} of {}", self.len);
        if start.is_multiple_of(8) {
            let bytes = &self.bytes[start / 8..];
            return BitString::from_bytes(bytes, end - start).expect("in range");
        }
        (start..end).map(|i| self.bit(i)).collect()
    }

    pub fn starts_with(&self, prefix: &BitString) -> bool {
        if prefix.len > self.len {
            return false;
        }
        let full = prefix.len / 8;
        if self.bytes[..full] != prefix.bytes[..full] {
            return false;
        }
        (full * 8..prefix.len).all(|i| self.bit(i) == prefix.bit(i))
    }

    /// Bitwise XOR of two equal-length strings.
    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len != other.len {
            return Err(Error::InvalidLength(format!(
                "xor of {} and {} bits",
                self.len, other.len
            )));
        }
        Ok(BitString {
            bytes: self
                .bytes
                .iter()
                .zip(&other.bytes)
                .map(|(a, b)| a ^ b)
                .collect(),
            len: self.len,
        })
    }

    /// Packed bytes, final byte zero-padded in its low bits.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    /// Interprets the string as an unsigned big-endian integer.
    pub fn to_uint(&self) -> Option<u64> {
        (self.len <= 64).then(|| self.iter().fold(0u64, |acc, b| acc << 1 | u64::from(b)))
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitString::from_bits(iter)
    }
}

/// Shorter strings first, then lexicographic.
impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.bytes.cmp(&other.bytes))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Parses ASCII `0`/`1`; the empty string is the empty bit string.
impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidLength(format!("`{other}` is not a bit"))),
            })
            .collect()
    }
}

/// Compares two bit strings in dictionary order (a prefix sorts before its
/// extensions), as opposed to the length-first [`Ord`].
pub fn lexicographic(a: &BitString, b: &BitString) -> Ordering {
    a.iter().cmp(b.iter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn msb_first_packing() {
        let b = bs("1010000011");
        assert_eq!(b.len(), 10);
        assert_eq!(b.as_bytes(), &[0b1010_0000, 0b1100_0000]);
        assert_eq!(BitString::from_bytes(&[0xff, 0xff], 10).unwrap().as_bytes(), &[0xff, 0xc0]);
    }

    #[test]
    fn empty_string_is_valid() {
        let e = bs("");
        assert!(e.is_empty());
        assert_eq!(e.to_string(), "");
        assert!(bs("01").starts_with(&e));
    }

    #[test]
    fn uint_round_trip() {
        assert_eq!(BitString::from_uint(3, 4).to_string(), "0011");
        assert_eq!(bs("1101").to_uint(), Some(13));
        assert_eq!(BitString::from_uint(0, 0).len(), 0);
    }

    #[test]
    fn xor_rejects_length_mismatch() {
        assert_eq!(bs("01").xor(&bs("11")).unwrap(), bs("10"));
        assert!(bs("01").xor(&bs("1")).is_err());
    }

    #[test]
    fn rejects_non_bits() {
        assert!("012".parse::<BitString>().is_err());
    }

    #[test]
    fn dictionary_order_puts_prefix_first() {
        assert_eq!(lexicographic(&bs("0"), &bs("01")), Ordering::Less);
        assert_eq!(lexicographic(&bs("01"), &bs("1")), Ordering::Less);
        assert_eq!(bs("1").cmp(&bs("01")), Ordering::Less);
    }

    proptest! {
        #[test]
        fn slice_and_concat_agree(bits in proptest::collection::vec(any::<bool>(), 0..80), cut in 0usize..80) {
            let s = BitString::from_bits(bits.iter().copied());
            let cut = cut.min(s.len());
            let joined = s.slice(0, cut).concat(&s.slice(cut, s.len()));
            prop_assert_eq!(&joined, &s);
            prop_assert!(s.starts_with(&s.slice(0, cut)));
            prop_assert_eq!(s.to_string().parse::<BitString>().unwrap(), s);
        }
    }
}
