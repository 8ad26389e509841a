//! Fuzzy p-values and fuzzy confidence sets for the difference of two
//! binomial proportions.
//!
//! The library computes the membership function `μ(θ)`, the supremum over
//! the nuisance success probability of the exact unconditional tail
//! probability of `|Y/n − X/m − θ|`. Its strong α-cuts are confidence sets,
//! its supremum over a hypothesis set is an extended p-value, and an
//! exhaustive verifier checks validity and coverage for small samples.
//!
//! The runnable examples are the quickest way in:
//!
//! ```text
//! cargo run --release --example about_ten          # two fuzzy sets for "about 10"
//! cargo run --release --example membership_curve   # μ(θ) for x = 4/10, y = 17/20
//! cargo run --release --example extended_pvalue    # p-value of an interval hypothesis
//! cargo run --release --example confidence_set     # α-cuts as confidence intervals
//! cargo run --release --example berger_boos        # restricted-nuisance refinement
//! cargo run --release --example validity_check     # exhaustive validity and coverage
//! cargo run --release --example tail_supremum      # exact tail and nuisance supremum
//! ```
//!
//! A minimal session:
//!
//! ```
//! use fuzzy_pvalue::inference::{mu_at, InferenceConfig};
//! use fuzzy_pvalue::tail::{ThetaPoint, TwoSampleData};
//!
//! let data = TwoSampleData::new(4, 10, 17, 20).unwrap();
//! let mu = mu_at(&data, ThetaPoint::new(0.0).unwrap(), &InferenceConfig::default()).unwrap();
//! assert!((mu - 0.026460416615009308).abs() < 1e-9);
//! ```

// `!(a < b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binom;
pub mod cli;
pub mod error;
pub mod format;
pub mod fuzzy;
pub mod inference;
pub mod normal;
pub mod nuisance;
pub mod svg;
pub mod tail;
pub mod verify;

pub use error::{Error, Result};
