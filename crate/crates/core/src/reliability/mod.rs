//! Fuzzy reliability of the opaque estimate.
//!
//! Each tooth's σ is mapped to a reliability in `[0, 1]` by a linear ramp
//! anchored on the population mean ± std of that tooth's uncertainties. The
//! per-tooth reliabilities are combined with a Zadeh relative quantifier and
//! labelled low / normal / high. The most predictive teeth are the cluster of
//! lowest σ found by DBSCAN with a minimum cluster size of one.

pub mod dbscan;
pub mod fuzzy;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{days_to_years, CoefficientsTable, ToothId, ToothPrediction};
use crate::error::{Error, Result};
use dbscan::{dbscan_1d, Assignment};
use fuzzy::{LabelCutpoints, PiecewiseLinear};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToothUncertainty {
    pub mean_days: f64,
    pub std_days: f64,
}

/// Population mean and standard deviation of σ per tooth, in days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PopulationUncertaintyStats {
    pub per_tooth: BTreeMap<ToothId, ToothUncertainty>,
}

impl Default for PopulationUncertaintyStats {
    fn default() -> Self {
        let table: [(u8, f64, f64); 10] = [
            (48, 508.965, 70.659),
            (47, 467.895, 122.504),
            (46, 568.075, 125.822),
            (45, 532.535, 209.011),
            (44, 536.188, 234.078),
            (34, 586.497, 254.705),
            (35, 542.237, 214.401),
            (36, 558.984, 128.960),
            (37, 450.168, 132.235),
            (38, 500.103, 61.807),
        ];
        let per_tooth = table
            .into_iter()
            .map(|(t, mean_days, std_days)| {
                (
                    ToothId::new(t).expect("valid FDI code"),
                    ToothUncertainty {
                        mean_days,
                        std_days,
                    },
                )
            })
            .collect();
        PopulationUncertaintyStats { per_tooth }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReliabilityLabel {
    Low,
    Normal,
    High,
}

/// Outcome of the most-predictive-teeth clustering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictiveTeeth {
    /// Members of the lowest-σ cluster, ascending by σ then FDI code.
    pub most_predictive: Vec<ToothId>,
    /// All clusters, ordered by their smallest σ.
    pub partition: Vec<Vec<ToothId>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityAssessment {
    pub per_tooth_reliability: BTreeMap<ToothId, f64>,
    pub aggregate: f64,
    pub label: ReliabilityLabel,
    pub most_predictive: Vec<ToothId>,
    pub cluster_partition: Vec<Vec<ToothId>>,
}

/// Reliability `a_t` of one tooth's prediction.
///
/// 1 at or below `mean - std`, 0 at or above `mean + std`, linear between.
pub fn tooth_reliability(
    tooth: ToothId,
    sigma_days: f64,
    stats: &PopulationUncertaintyStats,
) -> Result<f64> {
    let u = stats
        .per_tooth
        .get(&tooth)
        .ok_or(Error::NoPopulationStats(tooth))?;
    let lower = u.mean_days - u.std_days;
    let upper = u.mean_days + u.std_days;
    let a = if sigma_days <= lower {
        1.0
    } else if sigma_days >= upper {
        0.0
    } else {
        (upper - sigma_days) / (2.0 * u.std_days)
    };
    Ok(a.clamp(0.0, 1.0))
}

/// Zadeh's relative quantification `μ_Q(Σ a_t / n)`.
pub fn zadeh_aggregate(
    reliabilities: &BTreeMap<ToothId, f64>,
    quantifier: &PiecewiseLinear,
) -> Result<f64> {
    if reliabilities.is_empty() {
        return Err(Error::NoPredictions);
    }
    let mean = reliabilities.values().sum::<f64>() / reliabilities.len() as f64;
    Ok(quantifier.eval(mean).clamp(0.0, 1.0))
}

pub fn reliability_label(aggregate: f64, cutpoints: &LabelCutpoints) -> ReliabilityLabel {
    if aggregate < cutpoints.low_below {
        ReliabilityLabel::Low
    } else if aggregate > cutpoints.high_above {
        ReliabilityLabel::High
    } else {
        ReliabilityLabel::Normal
    }
}

/// Absolute slack, in years, added to eps so that gaps equal to eps survive
/// the round trip through days.
pub const EPS_SLACK_YEARS: f64 = 1e-9;

/// Clusters the σ values (in years) and returns the cluster holding the
/// smallest σ.
pub fn most_predictive_teeth(
    predictions: &BTreeMap<ToothId, ToothPrediction>,
    eps_years: f64,
) -> Result<PredictiveTeeth> {
    if predictions.is_empty() {
        return Err(Error::NoPredictions);
    }
    let mut teeth: Vec<(ToothId, f64)> = predictions
        .iter()
        .map(|(t, p)| (*t, days_to_years(p.sigma_days)))
        .collect();
    teeth.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let values: Vec<f64> = teeth.iter().map(|(_, s)| *s).collect();
    let labels = dbscan_1d(&values, eps_years + EPS_SLACK_YEARS, 1);

    let mut partition: Vec<Vec<ToothId>> = Vec::new();
    for ((tooth, _), label) in teeth.iter().zip(labels) {
        let cluster = match label {
            Assignment::Cluster(c) => c,
            Assignment::Noise => unreachable!("every point is core when min_pts is 1"),
        };
        if partition.len() <= cluster {
            partition.resize_with(cluster + 1, Vec::new);
        }
        partition[cluster].push(*tooth);
    }
    Ok(PredictiveTeeth {
        most_predictive: partition[0].clone(),
        partition,
    })
}

/// Full reliability assessment of a patient's opaque predictions.
pub fn assess_reliability(
    predictions: &BTreeMap<ToothId, ToothPrediction>,
    table: &CoefficientsTable,
) -> Result<ReliabilityAssessment> {
    let per_tooth_reliability = predictions
        .iter()
        .map(|(t, p)| Ok((*t, tooth_reliability(*t, p.sigma_days, &table.reliability_fuzzy)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let aggregate = zadeh_aggregate(&per_tooth_reliability, &table.quantifiers.reliability)?;
    let predictive = most_predictive_teeth(predictions, table.dbscan_eps_years)?;
    Ok(ReliabilityAssessment {
        per_tooth_reliability,
        aggregate,
        label: reliability_label(aggregate, &table.reliability_labels),
        most_predictive: predictive.most_predictive,
        cluster_partition: predictive.partition,
    })
}
