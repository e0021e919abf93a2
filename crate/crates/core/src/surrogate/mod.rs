//! Statistical validation of the transparent/opaque relationship: Pearson
//! correlations, a least-squares CSM surrogate and its evaluation metrics.

pub mod cohort;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::domain::{days_to_years, PatientRecord, Sex, ToothId};
use crate::error::{Error, Result};

pub use cohort::{DEFAULT_SEED, generate_cohort, AffineCsmRule, DevelopmentCurve, SyntheticCohort, SyntheticParams};

/// Minimum number of complete samples for a surrogate fit.
pub const MIN_FIT_SAMPLES: usize = 4;
/// Pivot tolerance on the unit-diagonal Gram matrix.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateSeries("zero variance"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// One complete observation of a tooth: features and CSM target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToothSample {
    pub sex: Sex,
    pub ratio: f64,
    pub csm: f64,
    pub mu_days: f64,
    pub sigma_days: f64,
}

/// Samples of `tooth` over the records that carry both a measurement and a
/// prediction for it.
pub fn tooth_samples(records: &[PatientRecord], tooth: ToothId) -> Vec<ToothSample> {
    records
        .iter()
        .filter_map(|r| {
            let m = r.measurements.get(&tooth)?;
            let p = r.predictions.get(&tooth)?;
            Some(ToothSample {
                sex: r.sex,
                ratio: m.ratio,
                csm: m.csm,
                mu_days: p.mu_days,
                sigma_days: p.sigma_days,
            })
        })
        .collect()
}

/// A correlation value, or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCell {
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl CorrelationCell {
    fn from_result(r: Result<f64>) -> Self {
        match r {
            Ok(v) => CorrelationCell {
                value: Some(v),
                reason: None,
            },
            Err(e) => CorrelationCell {
                value: None,
                reason: Some(format!("{}: {}", e.code(), e)),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub samples: usize,
    pub ratio_vs_mu: CorrelationCell,
    pub ratio_vs_sigma: CorrelationCell,
    pub csm_vs_mu: CorrelationCell,
    pub csm_vs_sigma: CorrelationCell,
}

/// Per-tooth correlations of the manual measurements against the opaque
/// predictions. Every tooth seen in at least one record gets a row.
pub fn correlation_table(records: &[PatientRecord]) -> BTreeMap<ToothId, CorrelationRow> {
    let mut teeth: Vec<ToothId> = records
        .iter()
        .flat_map(|r| r.measurements.keys().filter(|t| r.predictions.contains_key(t)))
        .copied()
        .collect();
    teeth.sort();
    teeth.dedup();
    teeth
        .into_iter()
        .map(|tooth| {
            let s = tooth_samples(records, tooth);
            let col = |f: fn(&ToothSample) -> f64| s.iter().map(f).collect::<Vec<f64>>();
            let (ratio, csm, mu, sigma) = (
                col(|x| x.ratio),
                col(|x| x.csm),
                col(|x| x.mu_days),
                col(|x| x.sigma_days),
            );
            let cell = |a: &[f64], b: &[f64]| CorrelationCell::from_result(pearson(a, b));
            (
                tooth,
                CorrelationRow {
                    samples: s.len(),
                    ratio_vs_mu: cell(&ratio, &mu),
                    ratio_vs_sigma: cell(&ratio, &sigma),
                    csm_vs_mu: cell(&csm, &mu),
                    csm_vs_sigma: cell(&csm, &sigma),
                },
            )
        })
        .collect()
}

/// Anything that predicts a tooth's CSM from sex, ratio and the opaque μ.
pub trait CsmPredictor {
    fn predict_csm(&self, sex: Sex, ratio: f64, mu_days: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateWeights {
    pub intercept: f64,
    pub w_sex: f64,
    pub w_ratio: f64,
    /// Per year of opaque μ.
    pub w_mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortDescriptor {
    pub samples: usize,
    pub patients: usize,
}

/// Linear surrogate `csm ≈ intercept + w_sex·g + w_ratio·ratio + w_mu·μ_years`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    pub weights: SurrogateWeights,
    pub target_tooth: ToothId,
    pub fitted_on: CohortDescriptor,
}

impl CsmPredictor for RegressionModel {
    fn predict_csm(&self, sex: Sex, ratio: f64, mu_days: f64) -> f64 {
        let w = &self.weights;
        w.intercept + w.w_sex * sex.indicator() + w.w_ratio * ratio + w.w_mu * days_to_years(mu_days)
    }
}

fn design_row(s: &ToothSample) -> [f64; 4] {
    [1.0, s.sex.indicator(), s.ratio, days_to_years(s.mu_days)]
}

/// Solves `G x = b` for a symmetric positive definite 4×4 Gram matrix.
///
/// The system is Jacobi-scaled to a unit diagonal and factorised with
/// Cholesky; a squared pivot below [`RANK_TOLERANCE`] means rank deficiency.
fn solve_normal_equations(gram: [[f64; 4]; 4], rhs: [f64; 4]) -> Result<[f64; 4]> {
    let mut d = [0.0; 4];
    for i in 0..4 {
        if !(gram[i][i] > 0.0) {
            return Err(Error::SingularDesign);
        }
        d[i] = gram[i][i].sqrt();
    }
    let mut a = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] = gram[i][j] / (d[i] * d[j]);
        }
    }
    let mut l = [[0.0; 4]; 4];
    for j in 0..4 {
        let mut diag = a[j][j];
        for k in 0..j {
            diag -= l[j][k] * l[j][k];
        }
        if diag <= RANK_TOLERANCE {
            return Err(Error::SingularDesign);
        }
        l[j][j] = diag.sqrt();
        for i in (j + 1)..4 {
            let mut v = a[i][j];
            for k in 0..j {
                v -= l[i][k] * l[j][k];
            }
            l[i][j] = v / l[j][j];
        }
    }
    let mut z = [0.0; 4];
    for i in 0..4 {
        let mut v = rhs[i] / d[i];
        for k in 0..i {
            v -= l[i][k] * z[k];
        }
        z[i] = v / l[i][i];
    }
    let mut x = [0.0; 4];
    for i in (0..4).rev() {
        let mut v = z[i];
        for k in (i + 1)..4 {
            v -= l[k][i] * x[k];
        }
        x[i] = v / l[i][i];
    }
    Ok([x[0] / d[0], x[1] / d[1], x[2] / d[2], x[3] / d[3]])
}

/// Ordinary least squares fit of the CSM surrogate for one tooth.
pub fn fit_surrogate(records: &[PatientRecord], target_tooth: ToothId) -> Result<RegressionModel> {
    let samples = tooth_samples(records, target_tooth);
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            got: samples.len(),
        });
    }
    let mut gram = [[0.0; 4]; 4];
    let mut rhs = [0.0; 4];
    for s in &samples {
        let row = design_row(s);
        for i in 0..4 {
            rhs[i] += row[i] * s.csm;
            for j in 0..4 {
                gram[i][j] += row[i] * row[j];
            }
        }
    }
    let [intercept, w_sex, w_ratio, w_mu] = solve_normal_equations(gram, rhs)?;
    Ok(RegressionModel {
        weights: SurrogateWeights {
            intercept,
            w_sex,
            w_ratio,
            w_mu,
        },
        target_tooth,
        fitted_on: CohortDescriptor {
            samples: samples.len(),
            patients: records.len(),
        },
    })
}

/// The seven regression quality metrics, plus the signed mean residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub samples: usize,
    pub explained_variance: f64,
    pub mean_squared_error: f64,
    /// Absolute value of the mean residual.
    pub mean_error: f64,
    pub signed_mean_error: f64,
    pub max_error: f64,
    pub mean_absolute_error: f64,
    pub r2: f64,
    /// `None` when the predictions are constant.
    pub pearson: Option<f64>,
}

impl MetricsReport {
    /// Flat `key=value` lines, one metric per line.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "samples={}", self.samples);
        let _ = writeln!(out, "explained_variance={}", self.explained_variance);
        let _ = writeln!(out, "mean_squared_error={}", self.mean_squared_error);
        let _ = writeln!(out, "mean_error={}", self.mean_error);
        let _ = writeln!(out, "signed_mean_error={}", self.signed_mean_error);
        let _ = writeln!(out, "max_error={}", self.max_error);
        let _ = writeln!(out, "mean_absolute_error={}", self.mean_absolute_error);
        let _ = writeln!(out, "r2={}", self.r2);
        match self.pearson {
            Some(p) => {
                let _ = writeln!(out, "pearson={p}");
            }
            None => out.push_str("pearson=absent\n"),
        }
        out
    }
}

/// Metrics from paired targets and predictions.
pub fn regression_metrics(y: &[f64], y_hat: &[f64]) -> Result<MetricsReport> {
    if y.len() != y_hat.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: y_hat.len(),
        });
    }
    if y.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: y.len(),
        });
    }
    let n = y.len() as f64;
    let y_mean = y.iter().sum::<f64>() / n;
    let ss_tot: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::DegenerateSeries("target has zero variance"));
    }
    let residuals: Vec<f64> = y.iter().zip(y_hat).map(|(a, b)| a - b).collect();
    let ss_res: f64 = residuals.iter().map(|e| e * e).sum();
    let e_mean = residuals.iter().sum::<f64>() / n;
    let e_var = residuals.iter().map(|e| (e - e_mean).powi(2)).sum::<f64>() / n;
    let pearson = match pearson(y, y_hat) {
        Ok(r) => Some(r),
        Err(Error::DegenerateSeries(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(MetricsReport {
        samples: y.len(),
        explained_variance: 1.0 - e_var / (ss_tot / n),
        mean_squared_error: ss_res / n,
        mean_error: e_mean.abs(),
        signed_mean_error: e_mean,
        max_error: residuals.iter().fold(0.0, |m, e| m.max(e.abs())),
        mean_absolute_error: residuals.iter().map(|e| e.abs()).sum::<f64>() / n,
        r2: 1.0 - ss_res / ss_tot,
        pearson,
    })
}

/// Evaluates any CSM predictor on the complete samples of `tooth`.
pub fn evaluate_predictor<P: CsmPredictor + ?Sized>(
    predictor: &P,
    tooth: ToothId,
    records: &[PatientRecord],
) -> Result<MetricsReport> {
    let samples = tooth_samples(records, tooth);
    let y: Vec<f64> = samples.iter().map(|s| s.csm).collect();
    let y_hat: Vec<f64> = samples
        .iter()
        .map(|s| predictor.predict_csm(s.sex, s.ratio, s.mu_days))
        .collect();
    regression_metrics(&y, &y_hat)
}

pub fn evaluate_regressor(model: &RegressionModel, records: &[PatientRecord]) -> Result<MetricsReport> {
    evaluate_predictor(model, model.target_tooth, records)
}
