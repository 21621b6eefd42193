use std::fmt::{self, Write as _};

use num_rational::BigRational;
use num_traits::One;

use crate::codec::{ceil_log2, MessageSpace, PrefixCode};
use crate::error::Result;
use crate::scalar::{format_rational, ratio_to_f64, Probability};

/// Slack allowed when comparing a float entropy against an exact average.
pub const ENTROPY_TOLERANCE: f64 = 1e-9;

/// `h(p) = −Σ p log₂ p` in bits; zero-probability messages contribute 0.
pub fn shannon_entropy<P: Probability>(space: &MessageSpace<P>) -> f64 {
    let h: f64 = space
        .probs()
        .iter()
        .map(Probability::to_f64)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    // keeps a point mass at +0.0
    h.max(0.0) + 0.0
}

/// How a code was built, which decides which bounds apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeKind {
    Huffman,
    Trimmed,
    Other,
}

impl CodeKind {
    /// Maps a codebook codec label to a kind.
    pub fn from_label(label: &str) -> Self {
        match label {
            "huffman" => CodeKind::Huffman,
            "trimmed-huffman" => CodeKind::Trimmed,
            _ => CodeKind::Other,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub kind: CodeKind,
    pub messages: usize,
    pub entropy: f64,
    pub average_length: BigRational,
    pub max_len: usize,
    pub kraft_sum: BigRational,
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn average_length_f64(&self) -> f64 {
        ratio_to_f64(&self.average_length)
    }

    pub fn violations(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn to_structured_text(&self) -> String {
        let mut out = String::from("report bounds\n");
        let _ = writeln!(out, "kind {:?}", self.kind);
        let _ = writeln!(out, "messages {}", self.messages);
        let _ = writeln!(out, "entropy {:.12}", self.entropy);
        let _ = writeln!(out, "average_length {}", format_rational(&self.average_length));
        let _ = writeln!(out, "max_len {}", self.max_len);
        let _ = writeln!(out, "kraft_sum {}", format_rational(&self.kraft_sum));
        for c in &self.checks {
            let _ = writeln!(out, "check {} {}", c.name, if c.holds { "ok" } else { "VIOLATED" });
        }
        out
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "messages        {}", self.messages)?;
        writeln!(f, "entropy h(p)    {:.6} bits", self.entropy)?;
        writeln!(f, "average length  {:.6} bits", self.average_length_f64())?;
        writeln!(f, "max length l    {} bits", self.max_len)?;
        writeln!(f, "Kraft sum       {}", format_rational(&self.kraft_sum))?;
        for c in &self.checks {
            writeln!(f, "[{}] {:<22} {}", if c.holds { " ok " } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Entropy, average and maximum length, and the bounds that apply to `kind`:
/// every prefix code has Kraft sum ≤ 1 and average ≥ h; a Huffman code has
/// average < h + 1; a trimmed code has average ≤ h + 2 and maximum length
/// ≤ ⌈log₂ L⌉ + 1.
pub fn bound_report<P: Probability>(
    space: &MessageSpace<P>,
    code: &PrefixCode,
    kind: CodeKind,
) -> Result<BoundReport> {
    let entropy = shannon_entropy(space);
    let average_length = code.average_length(&space.to_exact())?;
    let avg = ratio_to_f64(&average_length);
    let kraft_sum = code.kraft_sum();
    let max_len = code.max_len();
    let mut checks = vec![
        BoundCheck {
            name: "kraft<=1",
            holds: kraft_sum <= BigRational::one(),
            detail: format_rational(&kraft_sum),
        },
        BoundCheck {
            name: "average>=entropy",
            holds: avg >= entropy - ENTROPY_TOLERANCE,
            detail: format!("{avg:.6} >= {entropy:.6}"),
        },
    ];
    match kind {
        CodeKind::Huffman => checks.push(BoundCheck {
            name: "average<entropy+1",
            holds: avg < entropy + 1.0,
            detail: format!("{avg:.6} < {:.6}", entropy + 1.0),
        }),
        CodeKind::Trimmed => {
            checks.push(BoundCheck {
                name: "average<=entropy+2",
                holds: avg <= entropy + 2.0 + ENTROPY_TOLERANCE,
                detail: format!("{avg:.6} <= {:.6}", entropy + 2.0),
            });
            let cap = ceil_log2(space.len()) + 1;
            checks.push(BoundCheck {
                name: "max_len<=ceil_log2_L+1",
                holds: max_len <= cap,
                detail: format!("{max_len} <= {cap}"),
            });
        }
        CodeKind::Other => {}
    }
    Ok(BoundReport {
        kind,
        messages: space.len(),
        entropy,
        average_length,
        max_len,
        kraft_sum,
        checks,
    })
}
