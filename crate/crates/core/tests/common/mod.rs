//! Fixtures and independent reference computations shared by the
//! integration tests. Nothing here calls into the code under test except to
//! build inputs.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use cnr_core::{BigRational, ExactSpace, MessageSpace};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// A distribution over `l` indexed messages with integer weights in
/// `1..=max_weight`, normalised exactly.
pub fn random_rational_space(rng: &mut impl Rng, l: usize, max_weight: i64) -> ExactSpace {
    let weights: Vec<i64> = (0..l).map(|_| rng.gen_range(1..=max_weight)).collect();
    let total: i64 = weights.iter().sum();
    let probs = weights.iter().map(|&w| q(w, total)).collect();
    MessageSpace::new(index_messages(l), probs).unwrap()
}

/// Messages `[0]`, `[1]`, … for small spaces, two-byte indices beyond 256.
pub fn index_messages(l: usize) -> Vec<Vec<u8>> {
    (0..l)
        .map(|i| if l <= 256 { vec![i as u8] } else { (i as u16).to_be_bytes().to_vec() })
        .collect()
}

/// `-Σ p log₂ p` straight from the definition.
pub fn entropy_bits(probs: &[BigRational]) -> f64 {
    let total: f64 = probs.iter().map(to_f64).sum();
    probs
        .iter()
        .map(|p| to_f64(p) / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

pub fn to_f64(r: &BigRational) -> f64 {
    let (n, d) = (r.numer().to_string(), r.denom().to_string());
    n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap()
}

/// Minimum of `Σ pᵢ lᵢ` over all length profiles with `lᵢ ≥ 1` and
/// `Σ 2^-lᵢ ≤ 1`, by exhaustive search. Lengths above `L − 1` are never
/// needed for an optimum.
pub fn brute_force_optimal_average(probs: &[BigRational]) -> BigRational {
    let n = probs.len();
    if n == 1 {
        return probs[0].clone();
    }
    let max_len = n - 1;
    let mut lengths = vec![1usize; n];
    let mut best: Option<BigRational> = None;
    loop {
        let kraft: BigRational = lengths
            .iter()
            .map(|&k| BigRational::new(BigInt::one(), BigInt::one() << k))
            .sum();
        if kraft <= BigRational::one() {
            let avg: BigRational = probs
                .iter()
                .zip(&lengths)
                .map(|(p, &k)| p * BigRational::from_integer(BigInt::from(k)))
                .sum();
            if best.as_ref().is_none_or(|b| avg < *b) {
                best = Some(avg);
            }
        }
        // odometer over {1..=max_len}^n
        let mut i = 0;
        loop {
            if i == n {
                return best.expect("the all-max profile satisfies Kraft");
            }
            if lengths[i] < max_len {
                lengths[i] += 1;
                break;
            }
            lengths[i] = 1;
            i += 1;
        }
    }
}

/// `I(M; |E|)` for the unpadded scheme by enumerating every (message, key)
/// pair with its probability `P(m) 2^-s` and tallying the joint table of
/// `(m, ciphertext length)`.
pub fn brute_force_length_leak(probs: &[BigRational], codeword_lengths: &[usize]) -> f64 {
    use std::collections::BTreeMap;
    let mut joint: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
    for (m, (p, &s)) in probs.iter().zip(codeword_lengths).enumerate() {
        let per_key = p / BigRational::from_integer(BigInt::one() << s);
        for _key in 0u64..1 << s {
            // XOR with an s-bit key preserves the length
            let observed = s;
            *joint.entry((m, observed)).or_insert_with(BigRational::zero) += &per_key;
        }
    }
    let mut p_o: BTreeMap<usize, BigRational> = BTreeMap::new();
    for ((_, o), p) in &joint {
        *p_o.entry(*o).or_insert_with(BigRational::zero) += p;
    }
    joint
        .iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|((m, o), p)| {
            let ratio = p / (&probs[*m] * &p_o[o]);
            to_f64(p) * to_f64(&ratio).log2()
        })
        .sum()
}

pub fn ceil_log2(n: usize) -> usize {
    let mut k = 0;
    while (1usize << k) < n {
        k += 1;
    }
    k
}
