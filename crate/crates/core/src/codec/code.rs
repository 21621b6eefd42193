use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use crate::bits::{lexicographic, BitString};
use crate::codec::space::MessageSpace;
use crate::error::{Error, Result};
use crate::scalar::Probability;

/// One node of the decoding trie: children for bit 0 and bit 1, and the
/// message index when a codeword ends here.
#[derive(Clone, Debug, Default)]
struct Node {
    child: [Option<u32>; 2],
    leaf: Option<u32>,
}

/// An injective, prefix-free codebook over a finite set of messages.
///
/// Entries keep their construction order, which is the message order of the
/// space the code was built for.
#[derive(Clone, Debug)]
pub struct PrefixCode {
    entries: Vec<(Vec<u8>, BitString)>,
    lookup: HashMap<Vec<u8>, usize>,
    trie: Vec<Node>,
    max_len: usize,
}

impl PrefixCode {
    /// Builds a code from `(message, codeword)` pairs.
    ///
    /// Rejects empty codebooks, duplicate messages, empty codewords, and
    /// codeword sets that are not prefix-free.
    pub fn new(entries: Vec<(Vec<u8>, BitString)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidCode("empty codebook".into()));
        }
        let mut lookup = HashMap::with_capacity(entries.len());
        for (i, (m, w)) in entries.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::InvalidCode(format!("message {i} has an empty codeword")));
            }
            if lookup.insert(m.clone(), i).is_some() {
                return Err(Error::InvalidCode(format!(
                    "message {} appears twice",
                    hex::encode(m)
                )));
            }
        }
        if !verify_prefix_free(entries.iter().map(|(_, w)| w)) {
            return Err(Error::InvalidCode("codewords are not prefix-free".into()));
        }
        let max_len = max_codeword_length(entries.iter().map(|(_, w)| w))?;

        let mut trie = vec![Node::default()];
        for (i, (_, word)) in entries.iter().enumerate() {
            let mut at = 0usize;
            for b in word.iter() {
                let next = match trie[at].child[usize::from(b)] {
                    Some(n) => n as usize,
                    None => {
                        trie.push(Node::default());
                        let n = trie.len() - 1;
                        trie[at].child[usize::from(b)] = Some(n as u32);
                        n
                    }
                };
                at = next;
            }
            trie[at].leaf = Some(i as u32);
        }

        Ok(PrefixCode {
            entries,
            lookup,
            trie,
            max_len,
        })
    }

    /// Pairs the messages of `space` with `codewords`, in order.
    pub fn for_space<P: Probability>(
        space: &MessageSpace<P>,
        codewords: Vec<BitString>,
    ) -> Result<Self> {
        if codewords.len() != space.len() {
            return Err(Error::InvalidCode(format!(
                "{} codewords for {} messages",
                codewords.len(),
                space.len()
            )));
        }
        PrefixCode::new(space.messages().iter().cloned().zip(codewords).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The longest codeword length, which is the ciphertext length `l`.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn entries(&self) -> &[(Vec<u8>, BitString)] {
        &self.entries
    }

    pub fn codewords(&self) -> impl Iterator<Item = &BitString> {
        self.entries.iter().map(|(_, w)| w)
    }

    pub fn index_of(&self, message: &[u8]) -> Option<usize> {
        self.lookup.get(message).copied()
    }

    pub fn message(&self, index: usize) -> &[u8] {
        &self.entries[index].0
    }

    pub fn codeword(&self, index: usize) -> &BitString {
        &self.entries[index].1
    }

    pub fn encode(&self, message: &[u8]) -> Result<&BitString> {
        self.index_of(message)
            .map(|i| &self.entries[i].1)
            .ok_or(Error::NotInCodebook)
    }

    /// Finds the unique codeword that prefixes `stream`.
    ///
    /// Returns the message and the number of bits it consumed.
    pub fn decode_prefix(&self, stream: &BitString) -> Result<(&[u8], usize)> {
        let mut decoder = self.decoder();
        for b in stream.iter() {
            match decoder.push(b) {
                Step::Continue => {}
                Step::Done { index, consumed } => return Ok((self.message(index), consumed)),
                Step::Dead => break,
            }
        }
        Err(Error::NotACodeword)
    }

    /// Incremental decoder fed one bit at a time.
    pub fn decoder(&self) -> PrefixDecoder<'_> {
        PrefixDecoder {
            code: self,
            node: Some(0),
            consumed: 0,
        }
    }

    /// True iff the codebook is injective and prefix-free.
    pub fn verify_prefix_free(&self) -> bool {
        verify_prefix_free(self.codewords())
    }

    /// Kraft sum `Σ 2^-|w|`, exactly.
    pub fn kraft_sum(&self) -> BigRational {
        let l = self.max_len;
        let numer: BigInt = self
            .codewords()
            .map(|w| BigInt::one() << (l - w.len()))
            .sum();
        BigRational::new(numer, BigInt::one() << l)
    }

    /// `Σ P(m)·|code(m)|` over the messages of `space`.
    pub fn average_length<P: Probability>(&self, space: &MessageSpace<P>) -> Result<P> {
        let mut total = P::zero();
        for (m, p) in space.iter() {
            let len = self.encode(m)?.len();
            total = total + p.clone() * P::from_usize(len).expect("codeword length fits");
        }
        Ok(total)
    }

    /// True iff the code has exactly the messages of `space`.
    pub fn covers_exactly<P: Probability>(&self, space: &MessageSpace<P>) -> bool {
        self.len() == space.len() && space.messages().iter().all(|m| self.index_of(m).is_some())
    }

    /// SHA-256 over the canonical record listing; identifies the code in
    /// codebook files and session headers.
    pub fn fingerprint(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        for (i, (m, w)) in self.entries.iter().enumerate() {
            h.update(format!("{i} {} {w}\n", hex::encode(m)).as_bytes());
        }
        h.finalize().into()
    }
}

/// Outcome of feeding one bit to a [`PrefixDecoder`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Continue,
    Done { index: usize, consumed: usize },
    /// The bits so far are not a prefix of any codeword.
    Dead,
}

pub struct PrefixDecoder<'a> {
    code: &'a PrefixCode,
    node: Option<usize>,
    consumed: usize,
}

impl PrefixDecoder<'_> {
    pub fn push(&mut self, bit: bool) -> Step {
        let Some(at) = self.node else {
            return Step::Dead;
        };
        self.consumed += 1;
        match self.code.trie[at].child[usize::from(bit)] {
            None => {
                self.node = None;
                Step::Dead
            }
            Some(next) => {
                let next = next as usize;
                self.node = Some(next);
                match self.code.trie[next].leaf {
                    Some(index) => Step::Done {
                        index: index as usize,
                        consumed: self.consumed,
                    },
                    None => Step::Continue,
                }
            }
        }
    }
}

/// True iff the codewords are pairwise distinct and none is a prefix of
/// another. Sorted-scan: after dictionary sorting, a prefix relation can
/// only hold between neighbours.
pub fn verify_prefix_free<'a, I>(codewords: I) -> bool
where
    I: IntoIterator<Item = &'a BitString>,
{
    let mut words: Vec<&BitString> = codewords.into_iter().collect();
    words.sort_by(|a, b| lexicographic(a, b));
    words.windows(2).all(|w| !w[1].starts_with(w[0]))
}

/// Longest codeword length; errors on an empty codebook.
pub fn max_codeword_length<'a, I>(codewords: I) -> Result<usize>
where
    I: IntoIterator<Item = &'a BitString>,
{
    codewords
        .into_iter()
        .map(BitString::len)
        .max()
        .ok_or_else(|| Error::InvalidCode("empty codebook".into()))
}

/// `⌈log₂ n⌉` for `n ≥ 1`.
pub fn ceil_log2(n: usize) -> usize {
    assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Kraft sum of a length profile.
pub fn kraft_sum_of(lengths: &[usize]) -> BigRational {
    lengths.iter().fold(BigRational::zero(), |acc, &l| {
        acc + BigRational::new(BigInt::one(), BigInt::one() << l)
    })
}
