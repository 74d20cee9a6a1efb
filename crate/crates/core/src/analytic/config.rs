use serde::{Deserialize, Serialize};

use super::ModelError;

/// Integer-valued quantities derived from real-valued rates are accepted when
/// they sit this close to an integer.
const INTEGER_SLACK: f64 = 1e-9;

/// Scheduler parameters shared by the analytic model and the simulator.
///
/// Construct through [`SpsConfig::new`]; the derived quantities are computed
/// once and cached so every consumer agrees on them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpsConfig {
    p_k: f64,
    n_s: u32,
    t_s: f64,
    tau: f64,
    alpha: f64,
    rc_init: u32,
    n_r: u32,
    slots_per_period: u32,
}

impl SpsConfig {
    /// `p_k` keep probability, `n_s` subchannels, `t_s` slot duration in ms,
    /// `tau` packet generation rate in packets per second.
    pub fn new(p_k: f64, n_s: u32, t_s: f64, tau: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&p_k) {
            return Err(ModelError::InvalidConfig(format!(
                "keep probability {p_k} outside [0, 1]"
            )));
        }
        if n_s == 0 {
            return Err(ModelError::InvalidConfig("n_s must be at least 1".into()));
        }
        if !(t_s.is_finite() && t_s > 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "slot duration {t_s} ms must be positive"
            )));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "packet rate {tau} must be positive"
            )));
        }

        let n_r = exact_count(1000.0 * f64::from(n_s) / (tau * t_s)).ok_or_else(|| {
            ModelError::InvalidConfig(format!(
                "N_r = 1000*{n_s}/({tau}*{t_s}) is not a positive integer"
            ))
        })?;
        // The simulator lays the selection window out slot by slot, so the
        // slot count has to be whole as well.
        let slots_per_period = exact_count(1000.0 / (tau * t_s)).ok_or_else(|| {
            ModelError::InvalidConfig(format!(
                "slots per period 1000/({tau}*{t_s}) is not a positive integer"
            ))
        })?;

        let alpha = 100.0 / f64::max(20.0, 1000.0 / tau);
        let rc_rounded = (10.0 * alpha).round();
        if rc_rounded < 1.0 {
            return Err(ModelError::InvalidConfig(format!(
                "initial re-selection counter 10*alpha = {} rounds below 1",
                10.0 * alpha
            )));
        }

        Ok(Self {
            p_k,
            n_s,
            t_s,
            tau,
            alpha,
            rc_init: rc_rounded as u32,
            n_r,
            slots_per_period,
        })
    }

    /// Same configuration with a different keep probability.
    pub fn with_keep_probability(&self, p_k: f64) -> Result<Self, ModelError> {
        Self::new(p_k, self.n_s, self.t_s, self.tau)
    }

    /// Same configuration with a different subchannel count.
    pub fn with_subchannels(&self, n_s: u32) -> Result<Self, ModelError> {
        Self::new(self.p_k, n_s, self.t_s, self.tau)
    }

    pub fn p_k(&self) -> f64 {
        self.p_k
    }

    pub fn n_s(&self) -> u32 {
        self.n_s
    }

    pub fn t_s(&self) -> f64 {
        self.t_s
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `100 / max(20, 1000/tau)`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Initial re-selection counter, the mean `10 * alpha` of the standard interval.
    pub fn rc_init(&self) -> u32 {
        self.rc_init
    }

    /// RBGs per selection window.
    pub fn n_r(&self) -> u32 {
        self.n_r
    }

    pub fn slots_per_period(&self) -> u32 {
        self.slots_per_period
    }
}

fn exact_count(x: f64) -> Option<u32> {
    let r = x.round();
    if (x - r).abs() <= INTEGER_SLACK * x.max(1.0) && r >= 1.0 && r <= f64::from(u32::MAX) {
        Some(r as u32)
    } else {
        None
    }
}

/// Fully connected network: the tagged vehicle senses every other vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FcnParams {
    pub n_sen: u32,
}

/// Partially connected linear road.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcnParams {
    rho: f64,
    r_sen_km: f64,
}

impl PcnParams {
    /// `rho` in vehicles/km, `r_sen_km` sensing range in km.
    pub fn new(rho: f64, r_sen_km: f64) -> Result<Self, ModelError> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "vehicle density {rho} must be positive"
            )));
        }
        if !(r_sen_km.is_finite() && r_sen_km > 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "sensing range {r_sen_km} km must be positive"
            )));
        }
        if 2.0 * r_sen_km * rho < 1.0 {
            return Err(ModelError::InvalidConfig(format!(
                "2*R_sen*rho = {} must be at least 1",
                2.0 * r_sen_km * rho
            )));
        }
        Ok(Self { rho, r_sen_km })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn r_sen_km(&self) -> f64 {
        self.r_sen_km
    }

    pub fn r_sen_m(&self) -> f64 {
        self.r_sen_km * 1000.0
    }

    /// Vehicles sensed by the tagged vehicle, `2 * R_sen * rho - 1`.
    pub fn n_sen(&self) -> f64 {
        2.0 * self.r_sen_km * self.rho - 1.0
    }

    /// Hidden vehicles for a receiver at `d_m` meters: `d * rho`.
    pub fn hidden_vehicles(&self, d_m: f64) -> f64 {
        d_m / 1000.0 * self.rho
    }
}
