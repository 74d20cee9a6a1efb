use rand::Rng;
use serde::{Deserialize, Serialize};

use super::grid::Cell;
use super::SimError;
use crate::analytic::SpsConfig;

/// Distances are compared with this much slack so that uniformly spaced
/// vehicles exactly `R_sen` apart count as in range.
const RANGE_SLACK_M: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scenario {
    /// Every vehicle senses every other; `n_vehicles = N_sen + 1`.
    FullyConnected { n_vehicles: u32 },
    /// Vehicles spaced `1/rho` apart along a straight road.
    PartiallyConnected {
        road_length_km: f64,
        rho: f64,
        r_sen_km: f64,
    },
}

impl Scenario {
    pub fn fully_connected(n_sen: u32) -> Self {
        Scenario::FullyConnected {
            n_vehicles: n_sen + 1,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        match *self {
            Scenario::FullyConnected { n_vehicles } => {
                if n_vehicles < 2 {
                    return Err(SimError::InvalidScenario(format!(
                        "need at least 2 vehicles, got {n_vehicles}"
                    )));
                }
            }
            Scenario::PartiallyConnected {
                road_length_km,
                rho,
                r_sen_km,
            } => {
                if !(rho.is_finite() && rho > 0.0 && r_sen_km.is_finite() && r_sen_km > 0.0) {
                    return Err(SimError::InvalidScenario(format!(
                        "density {rho} and sensing range {r_sen_km} must be positive"
                    )));
                }
                if !(road_length_km >= 4.0 * r_sen_km) {
                    return Err(SimError::InvalidScenario(format!(
                        "road of {road_length_km} km is shorter than 4 * R_sen = {} km",
                        4.0 * r_sen_km
                    )));
                }
                self.vehicle_count()?;
            }
        }
        Ok(())
    }

    pub fn vehicle_count(&self) -> Result<u32, SimError> {
        match *self {
            Scenario::FullyConnected { n_vehicles } => Ok(n_vehicles),
            Scenario::PartiallyConnected {
                road_length_km,
                rho,
                ..
            } => {
                let n = rho * road_length_km;
                let r = n.round();
                if (n - r).abs() > 1e-9 * n.max(1.0) || r < 2.0 || r > f64::from(u32::MAX) {
                    return Err(SimError::InvalidScenario(format!(
                        "rho * road length = {n} is not a whole vehicle count of at least 2"
                    )));
                }
                Ok(r as u32)
            }
        }
    }

    /// Sensing range in meters; `None` means unlimited.
    pub fn sensing_range_m(&self) -> Option<f64> {
        match *self {
            Scenario::FullyConnected { .. } => None,
            Scenario::PartiallyConnected { r_sen_km, .. } => Some(r_sen_km * 1000.0),
        }
    }

    /// Transmitters whose counts are free of road-end effects: positions in
    /// `[2 R_sen, L - 2 R_sen]`. Every vehicle in a fully connected network.
    pub fn is_measured_tx(&self, position_m: f64) -> bool {
        match *self {
            Scenario::FullyConnected { .. } => true,
            Scenario::PartiallyConnected {
                road_length_km,
                r_sen_km,
                ..
            } => {
                let margin = 2000.0 * r_sen_km;
                position_m >= margin - RANGE_SLACK_M
                    && position_m <= road_length_km * 1000.0 - margin + RANGE_SLACK_M
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub id: u32,
    pub position_m: f64,
    pub reserved: Cell,
    /// Transmissions left on `reserved` before the keep/reselect decision.
    pub rc: u32,
}

/// Vehicles sorted by position, with the index range each one senses.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub vehicles: Vec<VehicleState>,
    sensing_range_m: Option<f64>,
    /// Inclusive index range `[lo, hi]` of vehicles within range, self included.
    neighborhoods: Vec<(u32, u32)>,
}

impl Population {
    /// Wraps vehicles that must already be sorted by position.
    pub fn new(vehicles: Vec<VehicleState>, sensing_range_m: Option<f64>) -> Self {
        debug_assert!(vehicles
            .windows(2)
            .all(|w| w[0].position_m <= w[1].position_m));
        let n = vehicles.len();
        let neighborhoods = match sensing_range_m {
            None => vec![(0, n.saturating_sub(1) as u32); n],
            Some(range) => vehicles
                .iter()
                .map(|v| {
                    let lo = vehicles
                        .partition_point(|u| u.position_m < v.position_m - range - RANGE_SLACK_M);
                    let hi = vehicles
                        .partition_point(|u| u.position_m <= v.position_m + range + RANGE_SLACK_M);
                    (lo as u32, (hi - 1) as u32)
                })
                .collect(),
        };
        Self {
            vehicles,
            sensing_range_m,
            neighborhoods,
        }
    }

    pub fn len(&self) -> usize {
        self.vehicles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vehicles.is_empty()
    }

    pub fn sensing_range_m(&self) -> Option<f64> {
        self.sensing_range_m
    }

    /// Inclusive index range of vehicles within sensing range of `v` (including `v`).
    #[inline]
    pub fn neighborhood(&self, v: u32) -> (u32, u32) {
        self.neighborhoods[v as usize]
    }

    #[inline]
    pub fn in_range(&self, a: u32, b: u32) -> bool {
        let (lo, hi) = self.neighborhoods[a as usize];
        lo <= b && b <= hi
    }

    /// Number of other vehicles `v` senses.
    pub fn sensed_count(&self, v: u32) -> u32 {
        let (lo, hi) = self.neighborhood(v);
        hi - lo
    }

    pub fn distance_m(&self, a: u32, b: u32) -> f64 {
        (self.vehicles[a as usize].position_m - self.vehicles[b as usize].position_m).abs()
    }
}

/// Places vehicles and draws their initial reservations from `rng`.
///
/// Each vehicle starts on a uniformly random RBG with a uniformly random
/// residual counter in `1..=rc_init`, so reselection epochs are spread out.
pub fn build_scenario<R: Rng + ?Sized>(
    scn: &Scenario,
    cfg: &SpsConfig,
    rng: &mut R,
) -> Result<Population, SimError> {
    scn.validate()?;
    let n = scn.vehicle_count()?;
    let spacing_m = match *scn {
        Scenario::FullyConnected { .. } => 0.0,
        Scenario::PartiallyConnected { rho, .. } => 1000.0 / rho,
    };
    let n_r = cfg.n_r();
    let vehicles = (0..n)
        .map(|id| VehicleState {
            id,
            position_m: f64::from(id) * spacing_m,
            reserved: Cell::from_index(rng.gen_range(0..n_r), cfg.n_s()),
            rc: rng.gen_range(1..=cfg.rc_init()),
        })
        .collect();
    Ok(Population::new(vehicles, scn.sensing_range_m()))
}
