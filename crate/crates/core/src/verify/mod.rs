//! Evidence that the cipher behaves as claimed: exact secrecy by enumeration,
//! statistical uniformity at scale, entropy bounds, and the length leak of
//! the unpadded variant.

pub mod bounds;
pub mod leak;
pub mod oracle;
pub mod uniformity;

pub use bounds::{bound_report, shannon_entropy, BoundCheck, BoundReport, CodeKind};
pub use leak::{leak_mutual_information, LeakReport, Observable};
pub use oracle::{
    exact_secrecy_oracle, key_discipline_equivalence, key_discipline_equivalence_for, Budget,
    Distribution, Scheme, SecrecyReport, Verdict, HARD_MAX_L,
};
pub use uniformity::{empirical_uniformity, MessageChoice, UniformityReport};
