//! Fully connected network: half-duplex loss, reselection collisions, and the
//! self-consistent PRR.

use super::{ModelError, SpsConfig};

/// Damping applied to each fixed-point step.
pub const FIXED_POINT_DAMPING: f64 = 0.5;
/// Absolute step size at which the fixed-point iteration stops.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-10;
pub const FIXED_POINT_MAX_ITERATIONS: usize = 10_000;

/// Probability that a receiver is transmitting in the tagged vehicle's slot.
pub fn hd_probability(cfg: &SpsConfig) -> f64 {
    cfg.tau() / 1000.0
}

/// RBGs available in one selection window.
pub fn num_rbgs(cfg: &SpsConfig) -> u32 {
    cfg.n_r()
}

/// Expected RBGs left for selection, `N_r - (1 + prr) * n_sen / 2`.
///
/// Kept real-valued: it is an expectation, and rounding would break the
/// equivalence between the binomial sum and its closed form.
pub fn available_rbgs(n_r: f64, n_sen: f64, prr: f64) -> Result<f64, ModelError> {
    check_probability("prr", prr)?;
    check_count("n_sen", n_sen)?;
    let n_a = n_r - (1.0 + prr) * n_sen / 2.0;
    if n_a <= 0.0 {
        return Err(ModelError::Overload { available: n_a });
    }
    Ok(n_a)
}

/// Per-vehicle probability of reselecting in the same window as the tagged vehicle.
fn reselect_probability(cfg: &SpsConfig) -> f64 {
    (1.0 - cfg.p_k()) / (10.0 * cfg.alpha())
}

/// Collision probability given that the tagged vehicle reselects,
/// `1 - [1 - (1 - p_k) / (10 alpha N_a)]^n_sen`.
pub fn p_rs_closed_form(cfg: &SpsConfig, n_sen: f64, n_a: f64) -> Result<f64, ModelError> {
    check_count("n_sen", n_sen)?;
    if !(n_a > 0.0) {
        return Err(ModelError::Overload { available: n_a });
    }
    let per_vehicle = reselect_probability(cfg) / n_a;
    if per_vehicle > 1.0 {
        return Err(ModelError::Domain(format!(
            "per-vehicle collision probability {per_vehicle} exceeds 1 (N_a = {n_a})"
        )));
    }
    if n_sen == 0.0 {
        return Ok(0.0);
    }
    Ok(-(n_sen * (-per_vehicle).ln_1p()).exp_m1())
}

/// The same probability assembled term by term from the binomial law of how
/// many sensed vehicles reselect, and the chance that at least one of them
/// lands on the tagged vehicle's RBG.
///
/// Terms are evaluated in log space, so `n_sen` in the thousands is fine.
pub fn p_rs_binomial_sum(cfg: &SpsConfig, n_sen: u32, n_a: f64) -> Result<f64, ModelError> {
    if !(n_a >= 1.0) {
        return Err(ModelError::Domain(format!(
            "binomial expansion needs N_a >= 1, got {n_a}"
        )));
    }
    let q = reselect_probability(cfg);
    if q > 1.0 {
        return Err(ModelError::Domain(format!(
            "reselection probability {q} exceeds 1"
        )));
    }
    if n_sen == 0 || q == 0.0 {
        return Ok(0.0);
    }

    let n = f64::from(n_sen);
    let ln_q = q.ln();
    let ln_not_q = (-q).ln_1p();
    let ln_miss = (-1.0 / n_a).ln_1p();

    let mut ln_binom = 0.0;
    let mut sum = 0.0;
    for k in 1..=n_sen {
        let kf = f64::from(k);
        ln_binom += (n - kf + 1.0).ln() - kf.ln();
        let rest = n - kf;
        // 0 * ln(0) is 0 here, not NaN
        let ln_tail = if rest == 0.0 { 0.0 } else { rest * ln_not_q };
        let pmf = (ln_binom + kf * ln_q + ln_tail).exp();
        let hit = -(kf * ln_miss).exp_m1();
        sum += pmf * hit;
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// Right-hand side of the self-consistent PRR equation, evaluated at a trial
/// PRR value. The fixed point of this map is [`prr_fcn`].
pub fn fcn_rhs(cfg: &SpsConfig, n_sen: f64, prr: f64) -> Result<f64, ModelError> {
    let n_a = available_rbgs(f64::from(cfg.n_r()), n_sen, prr)?;
    let p_k = cfg.p_k();
    let no_hit = 1.0 - p_rs_closed_form(cfg, n_sen, n_a)?;
    Ok((p_k + no_hit) / (1.0 + p_k))
}

/// Outcome of the fixed-point solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub prr: f64,
    pub iterations: usize,
    /// `|prr - rhs(prr)|` at the returned value.
    pub residual: f64,
}

/// Solves for the PRR of a fully connected network by damped fixed-point
/// iteration started at PRR = 1.
pub fn solve_prr_fcn(cfg: &SpsConfig, n_sen: f64) -> Result<FixedPoint, ModelError> {
    check_count("n_sen", n_sen)?;
    let mut x = 1.0;
    let mut step = f64::INFINITY;
    for iteration in 1..=FIXED_POINT_MAX_ITERATIONS {
        let next = x + FIXED_POINT_DAMPING * (fcn_rhs(cfg, n_sen, x)? - x);
        step = (next - x).abs();
        x = next.clamp(0.0, 1.0);
        if step <= FIXED_POINT_TOLERANCE {
            let residual = (x - fcn_rhs(cfg, n_sen, x)?).abs();
            return Ok(FixedPoint {
                prr: x,
                iterations: iteration,
                residual,
            });
        }
    }
    Err(ModelError::NoConvergence {
        iterations: FIXED_POINT_MAX_ITERATIONS,
        residual: step / FIXED_POINT_DAMPING,
    })
}

/// PRR of a fully connected network where the tagged vehicle senses `n_sen` others.
pub fn prr_fcn(cfg: &SpsConfig, n_sen: f64) -> Result<f64, ModelError> {
    solve_prr_fcn(cfg, n_sen).map(|fp| fp.prr)
}

/// Average per-vehicle throughput in packets/sec, `tau * prr * (1 - P_HD)`.
pub fn throughput(cfg: &SpsConfig, prr: f64) -> Result<f64, ModelError> {
    check_probability("prr", prr)?;
    Ok(cfg.tau() * prr * (1.0 - hd_probability(cfg)))
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<(), ModelError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ModelError::Domain(format!("{name} = {p} outside [0, 1]")))
    }
}

fn check_count(name: &str, n: f64) -> Result<(), ModelError> {
    if n.is_finite() && n >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::Domain(format!(
            "{name} = {n} must be a finite non-negative count"
        )))
    }
}
