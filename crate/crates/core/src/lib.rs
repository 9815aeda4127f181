//! Exact arithmetic on quantile triples, Horn index sets and the composition functional,
//! with a Hermitian random-matrix oracle and self-characterising subsets of finite relations.

pub mod approx;
pub mod error;
pub mod functional;
pub mod horncomb;
pub mod oracle;
pub mod quantile;
pub mod rational;
pub mod screl;

pub use approx::{approximate_in_tnr, ApproxReport};
pub use error::{Error, Result};
pub use functional::{
    energy, horn_margin, is_member_h_desk, is_member_hn, Margin, MembershipVerdict, Verdict, Witness,
    WitnessPolicy,
};
pub use horncomb::{enumerate_t, enumerate_u, HornTriple, MembershipPath};
pub use quantile::{QuantileTriple, StepQuantile};
pub use rational::Rational;
pub use screl::{FiniteRelation, ScMode};
