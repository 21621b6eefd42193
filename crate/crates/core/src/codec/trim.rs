//! Trimmed codes: cap every codeword at `⌈log₂ L⌉ + 1` bits.
//!
//! A codeword no longer than `w = ⌈log₂ L⌉` is kept behind a `0` flag; a
//! longer one is replaced by a `1` flag followed by the message's 0-based
//! index in exactly `w` bits.

use crate::bits::BitString;
use crate::codec::code::{ceil_log2, PrefixCode};
use crate::codec::space::MessageSpace;
use crate::error::{Error, Result};
use crate::scalar::Probability;

/// `i` in binary, most significant bit first, exactly `width` bits wide.
pub fn bin(i: usize, width: usize) -> BitString {
    debug_assert!(width >= 64 || (i as u128) < (1u128 << width), "{i} does not fit {width} bits");
    (0..width).rev().map(|k| k < usize::BITS as usize && (i >> k) & 1 == 1).collect()
}

/// Trims `code`, using the message order of `space` for the index branch.
pub fn trim_code<P: Probability>(code: &PrefixCode, space: &MessageSpace<P>) -> Result<PrefixCode> {
    let n = space.len();
    if n < 2 {
        return Err(Error::DegenerateSpace(format!(
            "trimming needs at least 2 messages, got {n}"
        )));
    }
    if !code.covers_exactly(space) {
        return Err(Error::InvalidCode(
            "code does not cover exactly the messages of the space".into(),
        ));
    }
    let width = ceil_log2(n);
    let words = space
        .messages()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let original = code.encode(m)?;
            let mut word = BitString::with_capacity(width + 1);
            if original.len() <= width {
                word.push(false);
                word.extend_from(original);
            } else {
                word.push(true);
                word.extend_from(&bin(i, width));
            }
            Ok(word)
        })
        .collect::<Result<Vec<_>>>()?;
    PrefixCode::for_space(space, words)
}
