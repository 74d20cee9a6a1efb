use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::analytic::{PcnParams, SpsConfig};
use crate::metrics::{ScenarioKind, DEFAULT_BIN_WIDTH_M};
use crate::simcore::Scenario;

/// What a partially connected experiment reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PcnOutput {
    /// One row per distance bin.
    #[default]
    Distance,
    /// One row per grid point, averaged over distance bins.
    Network,
}

/// A parameter grid plus Monte Carlo settings, loadable from a flat TOML file.
///
/// List-valued keys (`p_k`, `n_s`, `n_sen`, `rho`) are crossed; everything
/// else is a scalar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    /// Value of the `figure` CSV column; defaults to `name`.
    #[serde(default)]
    pub figure: Option<String>,
    pub scenario: ScenarioKind,
    pub p_k: Vec<f64>,
    pub n_s: Vec<u32>,
    #[serde(default = "defaults::tau")]
    pub tau: f64,
    #[serde(default = "defaults::t_s")]
    pub t_s: f64,
    /// Fully connected only.
    #[serde(default)]
    pub n_sen: Vec<u32>,
    /// Partially connected only, vehicles/km.
    #[serde(default)]
    pub rho: Vec<f64>,
    #[serde(default = "defaults::r_sen_km")]
    pub r_sen_km: f64,
    #[serde(default = "defaults::road_length_km")]
    pub road_length_km: f64,
    #[serde(default)]
    pub pcn_output: PcnOutput,
    #[serde(default = "defaults::trials")]
    pub trials: u32,
    #[serde(default = "defaults::duration_s")]
    pub duration_s: f64,
    /// Capped at a tenth of `duration_s` when the run is shorter than ten warmups.
    #[serde(default = "defaults::warmup_s")]
    pub warmup_s: f64,
    #[serde(default = "defaults::base_seed")]
    pub base_seed: u64,
    #[serde(default = "defaults::bin_width_m")]
    pub bin_width_m: f64,
    /// File name inside the output directory; defaults to `<name>.csv`.
    #[serde(default)]
    pub output: Option<String>,
}

mod defaults {
    pub fn tau() -> f64 {
        10.0
    }
    pub fn t_s() -> f64 {
        1.0
    }
    pub fn r_sen_km() -> f64 {
        0.4
    }
    pub fn road_length_km() -> f64 {
        5.0
    }
    pub fn trials() -> u32 {
        40
    }
    pub fn duration_s() -> f64 {
        300.0
    }
    pub fn warmup_s() -> f64 {
        10.0
    }
    pub fn base_seed() -> u64 {
        1
    }
    pub fn bin_width_m() -> f64 {
        super::DEFAULT_BIN_WIDTH_M
    }
}

/// One point of the crossed grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub cfg: SpsConfig,
    pub scenario: Scenario,
    /// Present for partially connected points.
    pub pcn: Option<PcnParams>,
}

impl GridPoint {
    pub fn n_sen(&self) -> f64 {
        match (self.scenario, self.pcn) {
            (Scenario::FullyConnected { n_vehicles }, _) => f64::from(n_vehicles - 1),
            (_, Some(pcn)) => pcn.n_sen(),
            (Scenario::PartiallyConnected { rho, r_sen_km, .. }, None) => {
                2.0 * r_sen_km * rho - 1.0
            }
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let spec: Self =
            toml::from_str(text).map_err(|e| HarnessError::Config(format!("spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn figure_label(&self) -> &str {
        self.figure.as_deref().unwrap_or(&self.name)
    }

    pub fn output_file(&self) -> String {
        self.output
            .clone()
            .unwrap_or_else(|| format!("{}.csv", self.name))
    }

    pub fn effective_warmup_s(&self) -> f64 {
        self.warmup_s.min(self.duration_s / 10.0)
    }

    /// Checks that every grid point is a valid configuration and scenario.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(format!("{}: {msg}", self.name)));
        if self.trials < 1 {
            return bad("trials must be at least 1".into());
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return bad(format!("duration_s = {} must be positive", self.duration_s));
        }
        if !(self.warmup_s >= 0.0) {
            return bad(format!("warmup_s = {} must be non-negative", self.warmup_s));
        }
        if !(self.bin_width_m > 0.0) {
            return bad(format!(
                "bin_width_m = {} must be positive",
                self.bin_width_m
            ));
        }
        if self.p_k.is_empty() || self.n_s.is_empty() {
            return bad("p_k and n_s need at least one value".into());
        }
        match self.scenario {
            ScenarioKind::FullyConnected if self.n_sen.is_empty() => {
                return bad("fully connected specs need n_sen values".into())
            }
            ScenarioKind::PartiallyConnected if self.rho.is_empty() => {
                return bad("partially connected specs need rho values".into())
            }
            _ => {}
        }
        for point in self.grid_points() {
            point.map_err(|e| HarnessError::Config(format!("{}: {e}", self.name)))?;
        }
        Ok(())
    }

    /// Grid points in `p_k`, `n_s`, `n_sen`/`rho` order (last varies fastest).
    pub fn grid_points(&self) -> Vec<Result<GridPoint, String>> {
        let mut out = Vec::new();
        for &p_k in &self.p_k {
            for &n_s in &self.n_s {
                let cfg = SpsConfig::new(p_k, n_s, self.t_s, self.tau);
                match self.scenario {
                    ScenarioKind::FullyConnected => {
                        for &n_sen in &self.n_sen {
                            out.push(cfg.clone().map_err(|e| e.to_string()).and_then(|cfg| {
                                let scenario = Scenario::fully_connected(n_sen);
                                scenario.validate().map_err(|e| e.to_string())?;
                                Ok(GridPoint {
                                    cfg,
                                    scenario,
                                    pcn: None,
                                })
                            }));
                        }
                    }
                    ScenarioKind::PartiallyConnected => {
                        for &rho in &self.rho {
                            out.push(cfg.clone().map_err(|e| e.to_string()).and_then(|cfg| {
                                let pcn = PcnParams::new(rho, self.r_sen_km)
                                    .map_err(|e| e.to_string())?;
                                let scenario = Scenario::PartiallyConnected {
                                    road_length_km: self.road_length_km,
                                    rho,
                                    r_sen_km: self.r_sen_km,
                                };
                                scenario.validate().map_err(|e| e.to_string())?;
                                Ok(GridPoint {
                                    cfg,
                                    scenario,
                                    pcn: Some(pcn),
                                })
                            }));
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FCN: &str = r#"
name = "probe"
scenario = "fully_connected"
p_k = [0.0, 0.8]
n_s = [5]
n_sen = [100, 200]
trials = 3
duration_s = 20
"#;

    #[test]
    fn parses_flat_toml_with_defaults() {
        let spec = ExperimentSpec::from_toml_str(FCN).unwrap();
        assert_eq!(spec.tau, 10.0);
        assert_eq!(spec.t_s, 1.0);
        assert_eq!(spec.warmup_s, 10.0);
        assert_eq!(spec.effective_warmup_s(), 2.0);
        assert_eq!(spec.bin_width_m, 25.0);
        assert_eq!(spec.figure_label(), "probe");
        assert_eq!(spec.output_file(), "probe.csv");
        let points: Vec<_> = spec.grid_points().into_iter().map(Result::unwrap).collect();
        assert_eq!(points.len(), 4);
        assert_eq!(points[1].n_sen(), 200.0);
        assert_eq!(points[2].cfg.p_k(), 0.8);
    }

    #[test]
    fn rejects_invalid_specs() {
        let bad_pk = FCN.replace("[0.0, 0.8]", "[0.0, 1.8]");
        assert!(matches!(
            ExperimentSpec::from_toml_str(&bad_pk),
            Err(HarnessError::Config(_))
        ));
        let no_trials = format!("{FCN}\ntrials = 0").replace("trials = 3\n", "");
        assert!(ExperimentSpec::from_toml_str(&no_trials).is_err());
        let unknown = format!("{FCN}\ncolour = 3");
        assert!(ExperimentSpec::from_toml_str(&unknown).is_err());
        let pcn_without_rho = FCN.replace("fully_connected", "partially_connected");
        assert!(ExperimentSpec::from_toml_str(&pcn_without_rho).is_err());
    }

    #[test]
    fn bundled_example_parses() {
        let spec = ExperimentSpec::from_toml_str(include_str!("../../specs/example.toml")).unwrap();
        assert_eq!(spec.grid_points().len(), 4);
        assert_eq!(spec.output_file(), "example.csv");
    }

    #[test]
    fn partially_connected_grid() {
        let spec = ExperimentSpec::from_toml_str(
            r#"
name = "road"
scenario = "partially_connected"
p_k = [0.0]
n_s = [5, 10]
rho = [200]
pcn_output = "network"
"#,
        )
        .unwrap();
        assert_eq!(spec.pcn_output, PcnOutput::Network);
        let points: Vec<_> = spec.grid_points().into_iter().map(Result::unwrap).collect();
        assert_eq!(points.len(), 2);
        assert!((points[0].n_sen() - 159.0).abs() < 1e-9);
    }
}
