use super::spec::{ExperimentSpec, PcnOutput};
use super::HarnessError;
use crate::metrics::{ScenarioKind, DEFAULT_BIN_WIDTH_M};

pub const FIGURE_IDS: [&str; 6] = ["4a", "4b", "4c", "5a", "5b", "5c"];

fn base(id: &str, scenario: ScenarioKind) -> ExperimentSpec {
    ExperimentSpec {
        name: format!("fig{id}"),
        figure: Some(id.to_string()),
        scenario,
        p_k: vec![0.0, 0.8],
        n_s: vec![5],
        tau: 10.0,
        t_s: 1.0,
        n_sen: Vec::new(),
        rho: Vec::new(),
        r_sen_km: 0.4,
        road_length_km: 5.0,
        pcn_output: PcnOutput::Distance,
        trials: 40,
        duration_s: 300.0,
        warmup_s: 10.0,
        base_seed: 1,
        bin_width_m: DEFAULT_BIN_WIDTH_M,
        output: None,
    }
}

fn fully_connected(id: &str) -> ExperimentSpec {
    ExperimentSpec {
        n_sen: vec![100, 200, 300, 400],
        ..base(id, ScenarioKind::FullyConnected)
    }
}

fn road(id: &str) -> ExperimentSpec {
    ExperimentSpec {
        rho: vec![200.0],
        duration_s: 500.0,
        ..base(id, ScenarioKind::PartiallyConnected)
    }
}

/// The built-in experiment for a figure id.
pub fn figure_spec(id: &str) -> Result<ExperimentSpec, HarnessError> {
    let spec = match id {
        "4a" => fully_connected(id),
        "4b" => ExperimentSpec {
            p_k: (0..10).map(|i| f64::from(i) / 10.0).collect(),
            ..fully_connected(id)
        },
        "4c" => ExperimentSpec {
            n_s: vec![5, 10, 15],
            n_sen: vec![50, 100, 200, 400],
            ..fully_connected(id)
        },
        "5a" => road(id),
        "5b" => ExperimentSpec {
            p_k: vec![0.0],
            n_s: vec![5, 10, 15],
            ..road(id)
        },
        "5c" => ExperimentSpec {
            n_s: vec![5, 10, 15],
            pcn_output: PcnOutput::Network,
            ..road(id)
        },
        other => {
            return Err(HarnessError::Config(format!(
                "unknown figure id {other:?}; valid ids: {}",
                FIGURE_IDS.join(", ")
            )))
        }
    };
    Ok(spec)
}
