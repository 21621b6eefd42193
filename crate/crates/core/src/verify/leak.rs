//! Mutual information between the message and what an eavesdropper sees.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Zero;

use crate::codec::{MessageSpace, PrefixCode};
use crate::error::Result;
use crate::scalar::{format_rational, ratio_to_f64, Probability};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    /// Length of the unpadded ciphertext, i.e. the codeword length.
    UnpaddedLength,
    /// Length of the padded ciphertext, always `l`.
    CiphertextLength,
}

impl Observable {
    pub fn label(&self) -> &'static str {
        match self {
            Observable::UnpaddedLength => "unpadded-ciphertext-length",
            Observable::CiphertextLength => "ciphertext-length",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LeakReport {
    pub observable: Observable,
    /// `I(M; O)` in bits, never negative.
    pub mutual_information: f64,
    /// Exact `P(O = o)`.
    pub observable_dist: BTreeMap<usize, BigRational>,
}

impl LeakReport {
    pub fn to_structured_text(&self) -> String {
        let mut out = String::from("report leak\n");
        let _ = writeln!(out, "observable {}", self.observable.label());
        let _ = writeln!(out, "mutual_information {:.12}", self.mutual_information);
        for (o, p) in &self.observable_dist {
            let _ = writeln!(out, "observed {o} {}", format_rational(p));
        }
        out
    }
}

/// `I(M; O) = Σ P(m, o) log₂ (P(m, o) / (P(m) P(o)))` over the exact joint
/// distribution; only the final logarithms are taken in floating point.
pub fn leak_mutual_information<P: Probability>(
    space: &MessageSpace<P>,
    code: &PrefixCode,
    observable: Observable,
) -> Result<LeakReport> {
    let exact = space.to_exact();
    // float spaces sum to one only within tolerance
    let total: BigRational = exact.probs().iter().cloned().sum();
    let mut joint = Vec::with_capacity(space.len());
    for (m, p) in exact.iter() {
        let p = p / &total;
        let o = match observable {
            Observable::UnpaddedLength => code.encode(m)?.len(),
            Observable::CiphertextLength => code.max_len(),
        };
        joint.push((p, o));
    }
    let mut observable_dist: BTreeMap<usize, BigRational> = BTreeMap::new();
    for (p, o) in &joint {
        *observable_dist.entry(*o).or_insert_with(BigRational::zero) += p;
    }
    let mi: f64 = joint
        .iter()
        .filter(|(p, _)| !p.is_zero())
        .map(|(p, o)| {
            // the observable is a function of m, so P(m, o) = P(m)
            let ratio = p / (p * &observable_dist[o]);
            ratio_to_f64(p) * ratio_to_f64(&ratio).log2()
        })
        .sum();
    Ok(LeakReport {
        observable,
        mutual_information: mi.max(0.0) + 0.0,
        observable_dist,
    })
}
