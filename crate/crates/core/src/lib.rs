//! Throughput workbench for NR-V2X Mode 2 semi-persistent scheduling.
//!
//! - [`analytic`]: closed-form PRR and throughput for fully and partially
//!   connected networks.
//! - [`simcore`]: Monte Carlo simulator of the same MAC.
//! - [`metrics`]: reduction of simulated trials into PRR/throughput estimates.
//! - [`harness`]: experiment specs, figure reproduction and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod harness;
pub mod metrics;
pub mod simcore;
