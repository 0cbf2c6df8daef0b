//! Numerical laboratory for the difference `|gamma_2| - |gamma_1|` of the first
//! two logarithmic coefficients over the Bazilevič-type class `B_1(alpha)`.
//!
//! - [`series`]: truncated complex power series.
//! - [`classb1`]: Carathéodory/Schwarz data, candidate construction, membership checks.
//! - [`extremal`]: bounds, extremal functions, sharpness analysis, critical alphas.
//! - [`optimizer`]: search over Schwarz 2-jets and realization of optimal jets.
//! - [`cli`]: report types and command implementations behind the `bazlab` binary.

pub mod classb1;
pub mod cli;
pub mod error;
pub mod extremal;
pub mod optimizer;
pub mod series;

pub use classb1::{
    bazilevic_from_h, caratheodory_series, gamma_diff, jet_from_schwarz, log_coeffs,
    log_coeffs_series, schwarz_to_caratheodory, validate_membership, BazilevicCandidate,
    CaratheodoryMeasure, FunctionJet, LogCoeffPair, MembershipCheck, SchwarzJet, Validity,
};
pub use error::{Error, Result};
pub use extremal::{
    critical_alphas, extremal_lower, extremal_upper, lower_bound, psi, psi_minimum,
    sharpness_verdict, upper_bound, CriticalAlphas, SharpnessAnalysis,
};
pub use optimizer::{
    empirical_range, objective, optimize, realize, Direction, GridBudget, JetSearchPoint,
    OptResult,
};
pub use series::TruncatedSeries;
