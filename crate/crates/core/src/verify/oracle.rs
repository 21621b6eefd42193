//! Exhaustive, exact computation of ciphertext distributions.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::bits::BitString;
use crate::cipher::{naive, seal};
use crate::codec::{MessageSpace, PrefixCode};
use crate::error::{Error, Result};
use crate::scalar::{dyadic, format_rational, Probability};

/// Largest `l` the enumerators will ever accept.
pub const HARD_MAX_L: usize = 20;

/// Limits on exhaustive enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_l: usize,
    pub max_messages: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_l: 12,
            max_messages: 64,
        }
    }
}

impl Budget {
    pub fn check(&self, l: usize, messages: usize) -> Result<()> {
        let cap = self.max_l.min(HARD_MAX_L);
        if l > cap {
            return Err(Error::EnumerationTooLarge(format!(
                "l = {l} exceeds the enumeration budget of {cap}"
            )));
        }
        if messages > self.max_messages {
            return Err(Error::EnumerationTooLarge(format!(
                "{messages} messages exceed the budget of {}",
                self.max_messages
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Codeword XOR key, then random padding to `l` bits.
    Padded,
    /// Codeword XOR key only. Insecure; used to exhibit the length leak.
    Unpadded,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Padded => "padded",
            Scheme::Unpadded => "unpadded",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Perfect,
    Leaky,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Perfect => "PERFECT",
            Verdict::Leaky => "LEAKY",
        })
    }
}

pub type Distribution = BTreeMap<BitString, BigRational>;

/// Exact conditional and marginal ciphertext distributions.
#[derive(Clone, Debug)]
pub struct SecrecyReport {
    pub scheme: Scheme,
    pub l: usize,
    pub messages: Vec<Vec<u8>>,
    pub priors: Vec<BigRational>,
    /// `P(e | m)` for each message, in message order.
    pub per_message: Vec<Distribution>,
    /// `P(e)`.
    pub marginal: Distribution,
    /// `max |P(e|m) − P(e)|` over all messages and ciphertexts.
    pub max_deviation: BigRational,
    /// Whether every `P(e)` equals `2^-l`.
    pub marginal_uniform: bool,
    pub verdict: Verdict,
}

impl SecrecyReport {
    pub fn is_perfect(&self) -> bool {
        self.verdict == Verdict::Perfect
    }

    pub fn conditional(&self, message: usize, e: &BitString) -> BigRational {
        self.per_message[message].get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `P(m | e)` by Bayes' rule; `None` when `P(e) = 0`.
    pub fn posterior(&self, message: usize, e: &BitString) -> Option<BigRational> {
        let pe = self.marginal.get(e)?;
        if pe.is_zero() {
            return None;
        }
        Some(&self.priors[message] * self.conditional(message, e) / pe)
    }

    /// Key/value lines followed by the distribution tables, probabilities
    /// written exactly as `num/den`.
    pub fn to_structured_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "report secrecy");
        let _ = writeln!(out, "scheme {}", self.scheme);
        let _ = writeln!(out, "l {}", self.l);
        let _ = writeln!(out, "messages {}", self.messages.len());
        let _ = writeln!(out, "ciphertexts {}", self.marginal.len());
        let _ = writeln!(out, "verdict {}", self.verdict);
        let _ = writeln!(out, "marginal_uniform {}", self.marginal_uniform);
        let _ = writeln!(out, "max_deviation {}", format_rational(&self.max_deviation));
        for (i, (m, p)) in self.messages.iter().zip(&self.priors).enumerate() {
            let _ = writeln!(out, "prior {i} {} {}", hex_or_dash(m), format_rational(p));
        }
        for (e, p) in &self.marginal {
            let _ = writeln!(out, "marginal {} {}", bits_or_dash(e), format_rational(p));
        }
        for (i, dist) in self.per_message.iter().enumerate() {
            for (e, p) in dist {
                let _ = writeln!(out, "conditional {i} {} {}", bits_or_dash(e), format_rational(p));
            }
        }
        out
    }
}

fn hex_or_dash(m: &[u8]) -> String {
    if m.is_empty() {
        "-".into()
    } else {
        hex::encode(m)
    }
}

fn bits_or_dash(b: &BitString) -> String {
    if b.is_empty() {
        "-".into()
    } else {
        b.to_string()
    }
}

impl fmt::Display for SecrecyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scheme      {}", self.scheme)?;
        writeln!(f, "l           {} bits", self.l)?;
        writeln!(f, "messages    {}", self.messages.len())?;
        writeln!(f, "ciphertexts {}", self.marginal.len())?;
        writeln!(f, "max |P(e|m) - P(e)| = {}", format_rational(&self.max_deviation))?;
        writeln!(f, "{:<6} {:<20} {:>12} {:>10}", "index", "message", "P(m)", "support")?;
        for (i, m) in self.messages.iter().enumerate() {
            let name = hex_or_dash(m);
            let name = if name.len() > 20 { format!("{}..", &name[..18]) } else { name };
            writeln!(
                f,
                "{:<6} {:<20} {:>12.6} {:>10}",
                i,
                name,
                crate::scalar::ratio_to_f64(&self.priors[i]),
                self.per_message[i].len()
            )?;
        }
        write!(f, "verdict     {}", self.verdict)
    }
}

/// Exact priors of a space, renormalized to unit mass (float spaces are only
/// required to sum to one within a tolerance).
fn exact_priors<P: Probability>(space: &MessageSpace<P>) -> Vec<BigRational> {
    let exact = space.to_exact();
    let total: BigRational = exact.probs().iter().cloned().sum();
    exact.probs().iter().map(|p| p / &total).collect()
}

fn enumerate(width: usize) -> impl Iterator<Item = BitString> {
    (0..1u64 << width).map(move |v| BitString::from_uint(v, width))
}

/// Enumerates every key and every pad for each message and accumulates the
/// exact ciphertext distributions, then compares `P(e|m)` with `P(e)`.
pub fn exact_secrecy_oracle<P: Probability>(
    space: &MessageSpace<P>,
    code: &PrefixCode,
    scheme: Scheme,
    budget: Budget,
) -> Result<SecrecyReport> {
    let l = code.max_len();
    budget.check(l, space.len())?;
    let priors = exact_priors(space);
    let codewords = space
        .messages()
        .iter()
        .map(|m| code.encode(m).cloned())
        .collect::<Result<Vec<_>>>()?;

    let per_message = codewords
        .par_iter()
        .map(|x| conditional_distribution(x, l, scheme))
        .collect::<Result<Vec<_>>>()?;

    let mut marginal = Distribution::new();
    for (prior, dist) in priors.iter().zip(&per_message) {
        for (e, p) in dist {
            *marginal.entry(e.clone()).or_insert_with(BigRational::zero) += prior * p;
        }
    }

    let mut max_deviation = BigRational::zero();
    for dist in &per_message {
        for (e, pe) in &marginal {
            let pem = dist.get(e).cloned().unwrap_or_else(BigRational::zero);
            let dev = (pem - pe).abs();
            if dev > max_deviation {
                max_deviation = dev;
            }
        }
    }
    let uniform = dyadic(l as u32);
    let marginal_uniform = marginal.len() == 1usize << l && marginal.values().all(|p| *p == uniform);
    let verdict = if max_deviation.is_zero() && (scheme == Scheme::Unpadded || marginal_uniform) {
        Verdict::Perfect
    } else {
        Verdict::Leaky
    };

    Ok(SecrecyReport {
        scheme,
        l,
        messages: space.messages().to_vec(),
        priors,
        per_message,
        marginal,
        max_deviation,
        marginal_uniform,
        verdict,
    })
}

fn conditional_distribution(x: &BitString, l: usize, scheme: Scheme) -> Result<Distribution> {
    let s = x.len();
    let pad_width = match scheme {
        Scheme::Padded => l - s,
        Scheme::Unpadded => 0,
    };
    let mut counts: HashMap<BitString, u64> = HashMap::new();
    for key in enumerate(s) {
        for pad in enumerate(pad_width) {
            let e = match scheme {
                Scheme::Padded => seal(x, &key, &pad)?.bits().clone(),
                Scheme::Unpadded => naive::seal_unpadded(x, &key)?,
            };
            *counts.entry(e).or_default() += 1;
        }
    }
    let total = BigInt::one() << (s + pad_width);
    Ok(counts
        .into_iter()
        .map(|(e, c)| (e, BigRational::new(BigInt::from(c), total.clone())))
        .collect())
}

/// Checks, message by message, that a fresh `l`-bit key of which only the
/// first `s` bits are used yields exactly the same ciphertext distribution as
/// taking `s` bits from a running pool.
pub fn key_discipline_equivalence<P: Probability>(
    space: &MessageSpace<P>,
    code: &PrefixCode,
    budget: Budget,
) -> Result<bool> {
    budget.check(code.max_len(), space.len())?;
    key_discipline_equivalence_for(code, space.messages().iter().map(Vec::as_slice), budget)
}

/// As [`key_discipline_equivalence`] over an arbitrary message list; an
/// empty list is vacuously equivalent.
pub fn key_discipline_equivalence_for<'a, I>(code: &PrefixCode, messages: I, budget: Budget) -> Result<bool>
where
    I: IntoIterator<Item = &'a [u8]>,
{
    let l = code.max_len();
    budget.check(l, 0)?;
    for m in messages {
        let x = code.encode(m)?;
        let s = x.len();
        let xv = x.to_uint().expect("l is within the enumeration budget");
        let pad_width = l - s;

        // s bits from a pool: every key segment of length s, every pad,
        // through the real sealing routine
        let mut pooled = vec![0u64; 1 << l];
        for key in enumerate(s) {
            for pad in enumerate(pad_width) {
                let e = seal(x, &key, &pad)?;
                pooled[e.bits().to_uint().expect("l bits") as usize] += 1;
            }
        }

        // fresh l-bit key, trailing l − s bits discarded, modelled on integers
        let mut fresh = vec![0u64; 1 << l];
        for key in 0u64..1 << l {
            let used = key >> pad_width;
            for pad in 0u64..1 << pad_width {
                let e = ((xv ^ used) << pad_width) | pad;
                fresh[e as usize] += 1;
            }
        }

        // pooled counts are over 2^l outcomes, fresh over 2^(2l−s)
        let scale = 1u64 << pad_width;
        if pooled.iter().zip(&fresh).any(|(p, f)| p * scale != *f) {
            return Ok(false);
        }
    }
    Ok(true)
}
