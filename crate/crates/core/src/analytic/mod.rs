//! Closed-form throughput model for SPS in fully and partially connected
//! vehicular networks.
//!
//! Everything here is a pure function of its arguments.

mod config;
mod fcn;
mod pcn;
mod sweep;

pub use config::{FcnParams, PcnParams, SpsConfig};
pub use fcn::{
    available_rbgs, fcn_rhs, hd_probability, num_rbgs, p_rs_binomial_sum, p_rs_closed_form,
    prr_fcn, solve_prr_fcn, throughput, FixedPoint, FIXED_POINT_DAMPING,
    FIXED_POINT_MAX_ITERATIONS, FIXED_POINT_TOLERANCE,
};
pub use pcn::{hidden_miss_probability, prr_pcn, prr_pcn_with_base, prr_rsc};
pub use sweep::{sweep, AnalyticCurvePoint, SweepError, SweepKind, SweepTemplate};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// Expected number of free RBGs is not positive; the model no longer applies.
    #[error("network overloaded: {available} RBGs available")]
    Overload { available: f64 },
    #[error("outside model domain: {0}")]
    Domain(String),
    #[error("fixed point did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}
