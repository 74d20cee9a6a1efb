//! Partially connected linear road: distance-dependent PRR with hidden terminals.

use super::fcn::{check_probability, prr_fcn};
use super::{ModelError, PcnParams, SpsConfig};

/// PRR from resource selection collisions alone for a receiver `d_m` meters
/// away. Only the share of the tagged vehicle's sensing range that the
/// receiver also senses contributes collisions.
pub fn prr_rsc(d_m: f64, r_sen_m: f64, prr_fcn: f64) -> Result<f64, ModelError> {
    check_probability("prr_fcn", prr_fcn)?;
    check_distance(d_m, r_sen_m)?;
    let share = (2.0 * r_sen_m - d_m) / (2.0 * r_sen_m);
    Ok(1.0 - share * (1.0 - prr_fcn))
}

/// Probability that one hidden vehicle misses the tagged vehicle's RBG,
/// `1 - 1 / (N_r - n_sen / 2)`.
pub fn hidden_miss_probability(cfg: &SpsConfig, n_sen: f64) -> Result<f64, ModelError> {
    let pool = f64::from(cfg.n_r()) - n_sen / 2.0;
    if pool <= 1.0 {
        return Err(ModelError::Overload { available: pool });
    }
    Ok(1.0 - 1.0 / pool)
}

/// PRR at distance `d_m` (meters) on the road, combining selection collisions
/// and hidden terminals. The hidden vehicle count `d * rho` stays real-valued.
pub fn prr_pcn(cfg: &SpsConfig, pcn: &PcnParams, d_m: f64) -> Result<f64, ModelError> {
    let n_sen = pcn.n_sen();
    let base = prr_fcn(cfg, n_sen)?;
    prr_pcn_with_base(cfg, pcn, d_m, base)
}

/// [`prr_pcn`] with the fully connected PRR supplied by the caller, for
/// curves that share one fixed-point solve.
pub fn prr_pcn_with_base(
    cfg: &SpsConfig,
    pcn: &PcnParams,
    d_m: f64,
    prr_fcn: f64,
) -> Result<f64, ModelError> {
    let rsc = prr_rsc(d_m, pcn.r_sen_m(), prr_fcn)?;
    let miss = hidden_miss_probability(cfg, pcn.n_sen())?;
    Ok(rsc * miss.powf(pcn.hidden_vehicles(d_m)))
}

fn check_distance(d_m: f64, r_sen_m: f64) -> Result<(), ModelError> {
    if !(r_sen_m > 0.0) {
        return Err(ModelError::Domain(format!(
            "sensing range {r_sen_m} m must be positive"
        )));
    }
    if !(0.0..=r_sen_m).contains(&d_m) {
        return Err(ModelError::Domain(format!(
            "distance {d_m} m outside [0, {r_sen_m}] m"
        )));
    }
    Ok(())
}
