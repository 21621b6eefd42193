//! Chi-square test of ciphertext uniformity over `{0,1}^l`, for code
//! lengths too large to enumerate.

use std::cell::RefCell;
use std::fmt::Write as _;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::RngCore;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::bits::BitString;
use crate::cipher::encrypt;
use crate::codec::{MessageSpace, PrefixCode};
use crate::error::{Error, Result};
use crate::keystore::{KeySource, PoolId};
use crate::scalar::Probability;

/// Largest `l` for which a histogram is kept.
pub const MAX_EMPIRICAL_L: usize = 24;

/// Trials per histogram cell below which the chi-square approximation is
/// flagged as unreliable.
pub const MIN_TRIALS_PER_CELL: u64 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MessageChoice {
    /// Encrypt the message with this index every time.
    Fixed(usize),
    /// Draw each message from the space's distribution.
    Drawn,
}

#[derive(Clone, Debug)]
pub struct UniformityReport {
    pub l: usize,
    pub trials: u64,
    pub histogram: Vec<u64>,
    pub statistic: Option<f64>,
    pub degrees_of_freedom: u64,
    pub p_value: Option<f64>,
    /// Fewer than [`MIN_TRIALS_PER_CELL`] trials per cell.
    pub insufficient: bool,
}

impl UniformityReport {
    /// True when the test rejects uniformity at `alpha`.
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value.is_some_and(|p| p < alpha)
    }

    pub fn to_structured_text(&self) -> String {
        let mut out = String::from("report uniformity\n");
        let _ = writeln!(out, "l {}", self.l);
        let _ = writeln!(out, "trials {}", self.trials);
        let _ = writeln!(out, "degrees_of_freedom {}", self.degrees_of_freedom);
        match (self.statistic, self.p_value) {
            (Some(x), Some(p)) => {
                let _ = writeln!(out, "chi_square {x:.6}");
                let _ = writeln!(out, "p_value {p:.6e}");
            }
            _ => {
                let _ = writeln!(out, "chi_square none");
                let _ = writeln!(out, "p_value none");
            }
        }
        if self.insufficient {
            let _ = writeln!(out, "warning insufficient_trials");
        }
        out
    }
}

/// An endless key stream drawn from an RNG; each encryption gets fresh bits.
struct StreamKey<'r, R: ?Sized> {
    rng: RefCell<&'r mut R>,
    buffer: RefCell<BitString>,
    cursor: u64,
}

impl<R: RngCore + ?Sized> StreamKey<'_, R> {
    fn fill(&self, n: usize) {
        let mut buf = self.buffer.borrow_mut();
        if buf.len() < n {
            let extra = BitString::random(&mut **self.rng.borrow_mut(), n - buf.len());
            buf.extend_from(&extra);
        }
    }
}

impl<R: RngCore + ?Sized> KeySource for StreamKey<'_, R> {
    fn pool_id(&self) -> PoolId {
        PoolId([0; 16])
    }

    fn cursor(&self) -> u64 {
        self.cursor
    }

    fn remaining(&self) -> u64 {
        u64::MAX
    }

    fn peek(&self, n: usize) -> Result<BitString> {
        self.fill(n);
        Ok(self.buffer.borrow().slice(0, n))
    }

    fn take(&mut self, n: usize) -> Result<BitString> {
        let bits = self.peek(n)?;
        let buf = self.buffer.get_mut();
        *buf = buf.slice(n, buf.len());
        self.cursor += n as u64;
        Ok(bits)
    }
}

/// Encrypts `trials` messages with fresh key bits from `key_rng` and padding
/// from `pad_rng`, and tests the ciphertext histogram against uniform.
pub fn empirical_uniformity<P, K, R>(
    space: &MessageSpace<P>,
    code: &PrefixCode,
    choice: MessageChoice,
    trials: u64,
    key_rng: &mut K,
    pad_rng: &mut R,
) -> Result<UniformityReport>
where
    P: Probability,
    K: RngCore + ?Sized,
    R: RngCore + ?Sized,
{
    let l = code.max_len();
    if l > MAX_EMPIRICAL_L {
        return Err(Error::EnumerationTooLarge(format!(
            "l = {l} exceeds the histogram limit of {MAX_EMPIRICAL_L}"
        )));
    }
    let cells = 1u64 << l;
    let mut histogram = vec![0u64; cells as usize];

    let weights = match choice {
        MessageChoice::Fixed(i) => {
            if i >= space.len() {
                return Err(Error::NotInCodebook);
            }
            None
        }
        MessageChoice::Drawn => Some(
            WeightedIndex::new(space.probs().iter().map(Probability::to_f64))
                .map_err(|e| Error::InvalidSpace(e.to_string()))?,
        ),
    };

    // message indices are drawn from a stream separate from both key and pad
    let mut chooser = crate::keystore::SeededRandom::insecure_from_seed(key_rng.next_u64());
    let mut key = StreamKey {
        rng: RefCell::new(key_rng),
        buffer: RefCell::new(BitString::new()),
        cursor: 0,
    };
    for _ in 0..trials {
        let index = match (&weights, choice) {
            (Some(w), _) => w.sample(&mut chooser),
            (None, MessageChoice::Fixed(i)) => i,
            (None, MessageChoice::Drawn) => unreachable!(),
        };
        let rec = encrypt(space.message(index), code, &mut key, pad_rng)?;
        let cell = rec.ciphertext.bits().to_uint().expect("l <= 24");
        histogram[cell as usize] += 1;
    }

    let degrees_of_freedom = cells - 1;
    let insufficient = trials < MIN_TRIALS_PER_CELL.saturating_mul(cells);
    let (statistic, p_value) = if trials == 0 {
        (None, None)
    } else {
        let expected = trials as f64 / cells as f64;
        let x: f64 = histogram
            .iter()
            .map(|&o| {
                let d = o as f64 - expected;
                d * d / expected
            })
            .sum();
        let p = if degrees_of_freedom == 0 {
            1.0
        } else {
            ChiSquared::new(degrees_of_freedom as f64)
                .expect("positive degrees of freedom")
                .sf(x)
        };
        (Some(x), Some(p))
    };

    Ok(UniformityReport {
        l,
        trials,
        histogram,
        statistic,
        degrees_of_freedom,
        p_value,
        insufficient,
    })
}
