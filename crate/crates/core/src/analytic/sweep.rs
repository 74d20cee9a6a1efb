use serde::{Deserialize, Serialize};

use super::fcn::{prr_fcn, throughput};
use super::pcn::prr_pcn_with_base;
use super::{ModelError, PcnParams, SpsConfig};

/// One point of an analytic curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticCurvePoint {
    /// Swept value: `n_sen`, `p_k`, `n_s`, or distance in meters.
    pub abscissa: f64,
    pub prr: f64,
    /// Packets/sec.
    pub throughput: f64,
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepKind {
    /// Sensed vehicle count in a fully connected network.
    SensedVehicles,
    KeepProbability,
    Subchannels,
    /// Distance in meters on a partially connected road.
    Distance(PcnParams),
}

/// Fixed parameters that a sweep varies one of.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepTemplate {
    pub cfg: SpsConfig,
    /// Ignored by distance sweeps, which derive it from the road parameters.
    pub n_sen: f64,
}

#[derive(Debug, thiserror::Error)]
#[error("sweep point {index} (value {value}): {source}")]
pub struct SweepError {
    pub index: usize,
    pub value: f64,
    #[source]
    pub source: ModelError,
}

pub fn sweep(
    template: &SweepTemplate,
    kind: SweepKind,
    grid: &[f64],
) -> Result<Vec<AnalyticCurvePoint>, SweepError> {
    // distance sweeps share one fixed-point solve
    let pcn_base = match kind {
        SweepKind::Distance(pcn) if !grid.is_empty() => Some(
            prr_fcn(&template.cfg, pcn.n_sen()).map_err(|source| SweepError {
                index: 0,
                value: grid[0],
                source,
            })?,
        ),
        _ => None,
    };

    grid.iter()
        .enumerate()
        .map(|(index, &value)| {
            point(template, kind, value, pcn_base).map_err(|source| SweepError {
                index,
                value,
                source,
            })
        })
        .collect()
}

fn point(
    template: &SweepTemplate,
    kind: SweepKind,
    value: f64,
    pcn_base: Option<f64>,
) -> Result<AnalyticCurvePoint, ModelError> {
    let (cfg, prr) = match kind {
        SweepKind::SensedVehicles => (template.cfg, prr_fcn(&template.cfg, value)?),
        SweepKind::KeepProbability => {
            let cfg = template.cfg.with_keep_probability(value)?;
            (cfg, prr_fcn(&cfg, template.n_sen)?)
        }
        SweepKind::Subchannels => {
            if value.fract() != 0.0 || value < 1.0 || value > f64::from(u32::MAX) {
                return Err(ModelError::InvalidConfig(format!(
                    "subchannel count {value} is not a positive integer"
                )));
            }
            let cfg = template.cfg.with_subchannels(value as u32)?;
            (cfg, prr_fcn(&cfg, template.n_sen)?)
        }
        SweepKind::Distance(pcn) => {
            let base = match pcn_base {
                Some(b) => b,
                None => prr_fcn(&template.cfg, pcn.n_sen())?,
            };
            (
                template.cfg,
                prr_pcn_with_base(&template.cfg, &pcn, value, base)?,
            )
        }
    };
    Ok(AnalyticCurvePoint {
        abscissa: value,
        prr,
        throughput: throughput(&cfg, prr)?,
    })
}
