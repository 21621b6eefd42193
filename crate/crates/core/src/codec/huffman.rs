//! Deterministic canonical Huffman codes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::bits::BitString;
use crate::codec::code::PrefixCode;
use crate::codec::space::MessageSpace;
use crate::error::{Error, Result};
use crate::scalar::Probability;

struct Subtree<P> {
    weight: P,
    /// Smallest message index in the subtree; breaks weight ties.
    min_index: usize,
    members: Vec<usize>,
}

impl<P: PartialOrd> PartialEq for Subtree<P> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<P: PartialOrd> Eq for Subtree<P> {}

impl<P: PartialOrd> PartialOrd for Subtree<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Reversed so that `BinaryHeap` pops the lightest subtree first.
impl<P: PartialOrd> Ord for Subtree<P> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .partial_cmp(&self.weight)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.min_index.cmp(&self.min_index))
    }
}

/// Huffman codeword lengths for `weights`, in input order.
///
/// Merges the two lightest subtrees until one remains; ties go to the subtree
/// holding the smallest message index. A single weight gets length 1.
pub fn huffman_lengths<P: Probability>(weights: &[P]) -> Vec<usize> {
    let n = weights.len();
    if n <= 1 {
        return vec![1; n];
    }
    let mut lengths = vec![0usize; n];
    let mut heap: BinaryHeap<Subtree<P>> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| Subtree {
            weight: w.clone(),
            min_index: i,
            members: vec![i],
        })
        .collect();
    while heap.len() > 1 {
        let a = heap.pop().expect("heap has two entries");
        let b = heap.pop().expect("heap has two entries");
        let mut members = a.members;
        members.extend(b.members);
        for &m in &members {
            lengths[m] += 1;
        }
        heap.push(Subtree {
            weight: a.weight + b.weight,
            min_index: a.min_index.min(b.min_index),
            members,
        });
    }
    lengths
}

/// Assigns canonical codewords to a length profile: messages sorted by
/// (length, index) receive consecutive codewords in lexicographic order.
///
/// The profile must satisfy Kraft's inequality.
pub fn canonical_codewords(lengths: &[usize]) -> Result<Vec<BitString>> {
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by_key(|&i| (lengths[i], i));

    let mut out = vec![BitString::new(); lengths.len()];
    // running codeword as a big-endian bit vector
    let mut next: Vec<bool> = Vec::new();
    let mut first = true;
    for &i in &order {
        let len = lengths[i];
        if len == 0 {
            return Err(Error::InvalidCode("zero codeword length".into()));
        }
        if !first && !increment(&mut next) {
            return Err(Error::InvalidCode("length profile violates Kraft".into()));
        }
        first = false;
        next.resize(len, false);
        out[i] = next.iter().copied().collect();
    }
    Ok(out)
}

/// Adds one in place; false on overflow.
fn increment(bits: &mut [bool]) -> bool {
    for b in bits.iter_mut().rev() {
        if *b {
            *b = false;
        } else {
            *b = true;
            return true;
        }
    }
    false
}

/// Builds the canonical Huffman code of `space`.
pub fn build_huffman<P: Probability>(space: &MessageSpace<P>) -> Result<PrefixCode> {
    if space.is_empty() {
        return Err(Error::InvalidSpace("no messages".into()));
    }
    let lengths = huffman_lengths(space.probs());
    let words = canonical_codewords(&lengths)?;
    PrefixCode::for_space(space, words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::One;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn words(code: &PrefixCode) -> Vec<String> {
        code.codewords().map(ToString::to_string).collect()
    }

    #[test]
    fn uniform_four_is_balanced() {
        let s = MessageSpace::indexed(vec![q(1, 4), q(1, 4), q(1, 4), q(1, 4)]).unwrap();
        let c = build_huffman(&s).unwrap();
        assert_eq!(words(&c), ["00", "01", "10", "11"]);
        assert_eq!(c.max_len(), 2);
    }

    #[test]
    fn half_quarter_quarter() {
        let s = MessageSpace::indexed(vec![0.5, 0.25, 0.25]).unwrap();
        let c = build_huffman(&s).unwrap();
        assert_eq!(words(&c), ["0", "10", "11"]);
    }

    #[test]
    fn single_message_gets_one_bit() {
        let s = MessageSpace::indexed(vec![1.0f64]).unwrap();
        let c = build_huffman(&s).unwrap();
        assert_eq!(words(&c), ["0"]);
        assert_eq!(c.max_len(), 1);
    }

    #[test]
    fn ties_are_deterministic() {
        // five equal weights: the two lowest indices merge first
        let s = MessageSpace::<BigRational>::uniform((0..5u8).map(|i| vec![i]).collect()).unwrap();
        let a = build_huffman(&s).unwrap();
        let b = build_huffman(&s).unwrap();
        assert_eq!(words(&a), words(&b));
        assert_eq!(huffman_lengths(s.probs()), vec![3, 3, 2, 2, 2]);
        assert_eq!(words(&a), ["110", "111", "00", "01", "10"]);
    }

    #[test]
    fn zero_probabilities_still_get_codewords() {
        let s = MessageSpace::indexed(vec![q(1, 1), q(0, 1), q(0, 1)]).unwrap();
        let c = build_huffman(&s).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.verify_prefix_free());
        assert!(c.kraft_sum().is_one());
    }

    #[test]
    fn kraft_violation_detected() {
        assert!(canonical_codewords(&[1, 1, 1]).is_err());
        assert!(canonical_codewords(&[1, 0]).is_err());
        let w = canonical_codewords(&[2, 1, 3, 3]).unwrap();
        let w: Vec<_> = w.iter().map(ToString::to_string).collect();
        assert_eq!(w, ["10", "0", "110", "111"]);
    }

    #[test]
    fn long_skewed_codes_exceed_word_size() {
        // dyadic tail 1/2, 1/4, ... forces lengths up to n-1 = 79
        let n = 80;
        let mut probs: Vec<BigRational> = (1..n).map(|i| crate::scalar::dyadic(i as u32)).collect();
        probs.push(crate::scalar::dyadic((n - 1) as u32));
        let s = MessageSpace::indexed(probs).unwrap();
        let c = build_huffman(&s).unwrap();
        assert_eq!(c.max_len(), n - 1);
        assert!(c.kraft_sum().is_one());
    }
}
