//! Seeded synthetic cohorts standing in for private patient data.
//!
//! Development curves here are plumbing for reproducible experiments, not a
//! model of human dentition.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::domain::{
    days_to_years, years_to_days, PatientRecord, Sex, ToothId, ToothMeasurement, ToothPrediction,
};
use crate::error::{Error, Result};
use crate::reliability::PopulationUncertaintyStats;

/// Seed of the reference synthetic cohort.
pub const DEFAULT_SEED: u64 = 2024;

/// Ages at which mineralisation begins and the root completes, in years.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DevelopmentCurve {
    pub onset_years: f64,
    pub completion_years: f64,
}

impl DevelopmentCurve {
    /// Development progress in `[0, 1]`.
    pub fn progress(&self, age_years: f64) -> f64 {
        ((age_years - self.onset_years) / (self.completion_years - self.onset_years)).clamp(0.0, 1.0)
    }
}

/// Exact affine CSM rule for one tooth, overriding its development curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineCsmRule {
    pub tooth: ToothId,
    pub intercept: f64,
    pub w_sex: f64,
    pub w_ratio: f64,
    pub w_mu: f64,
}

impl AffineCsmRule {
    pub fn eval(&self, sex: Sex, ratio: f64, mu_years: f64) -> f64 {
        self.intercept + self.w_sex * sex.indicator() + self.w_ratio * ratio + self.w_mu * mu_years
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticParams {
    pub min_age_years: f64,
    pub max_age_years: f64,
    pub curves: BTreeMap<ToothId, DevelopmentCurve>,
    /// Ratio of an undeveloped tooth.
    pub ratio_immature: f64,
    /// Ratio of a fully developed tooth.
    pub ratio_mature: f64,
    /// CSM of an undeveloped tooth.
    pub csm_open: f64,
    pub csm_exponent: f64,
    pub width_px_min: f64,
    pub width_px_max: f64,
    pub ratio_noise_sd: f64,
    pub csm_noise_sd: f64,
    /// Standard deviation of μ around the true age, truncated at ±3 sd.
    pub mu_noise_sd_days: f64,
    /// Correlation between standardised age and standardised σ.
    pub sigma_age_coupling: f64,
    pub detection_rate: f64,
    pub measurement_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine_csm_rule: Option<AffineCsmRule>,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        let curve = |onset_years, completion_years| DevelopmentCurve {
            onset_years,
            completion_years,
        };
        let by_position = [
            (4, curve(1.5, 13.0)),
            (5, curve(2.0, 14.0)),
            (6, curve(0.5, 10.0)),
            (7, curve(2.5, 15.0)),
            (8, curve(8.0, 25.0)),
        ];
        let curves = by_position
            .iter()
            .flat_map(|&(pos, c)| {
                [3u8, 4].map(|q| (ToothId::new(q * 10 + pos).expect("valid FDI code"), c))
            })
            .collect();
        SyntheticParams {
            min_age_years: 5.0,
            max_age_years: 16.0,
            curves,
            ratio_immature: 1.6,
            ratio_mature: 0.9,
            csm_open: 0.9,
            csm_exponent: 1.0,
            width_px_min: 80.0,
            width_px_max: 120.0,
            ratio_noise_sd: 0.03,
            csm_noise_sd: 0.03,
            mu_noise_sd_days: 120.0,
            sigma_age_coupling: 0.8,
            detection_rate: 0.95,
            measurement_rate: 0.95,
            affine_csm_rule: None,
        }
    }
}

impl SyntheticParams {
    pub(crate) fn check(&self) -> Result<()> {
        let bad = |field: &str, message: &str| {
            Err(Error::ConstraintViolation {
                field: format!("synthetic_cohort.{field}"),
                message: message.to_string(),
            })
        };
        if !(self.min_age_years > 0.0 && self.min_age_years < self.max_age_years) {
            return bad("min_age_years", "must satisfy 0 < min < max");
        }
        if !(self.width_px_min > 0.0 && self.width_px_min <= self.width_px_max) {
            return bad("width_px_min", "must satisfy 0 < min <= max");
        }
        if !(self.ratio_mature > 0.0 && self.ratio_immature > 0.0) {
            return bad("ratio_mature", "ratios must be > 0");
        }
        for (name, rate) in [
            ("detection_rate", self.detection_rate),
            ("measurement_rate", self.measurement_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return bad(name, "must lie in [0, 1]");
            }
        }
        if !(-1.0..=1.0).contains(&self.sigma_age_coupling) {
            return bad("sigma_age_coupling", "must lie in [-1, 1]");
        }
        if [self.ratio_noise_sd, self.csm_noise_sd, self.mu_noise_sd_days]
            .iter()
            .any(|v| !(*v >= 0.0))
        {
            return bad("ratio_noise_sd", "noise scales must be >= 0");
        }
        for (tooth, c) in &self.curves {
            if !tooth.is_posterior_mandibular() || !(c.onset_years < c.completion_years) {
                return bad("curves", "curves need posterior teeth and onset < completion");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticCohort {
    pub seed: u64,
    pub records: Vec<PatientRecord>,
    pub ground_truth: SyntheticParams,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample::<f64, _>(StandardNormal)
}

/// Generates `n` patients deterministically from `seed`.
///
/// σ for each tooth is drawn around the population statistics in `stats`.
/// Every record satisfies the measurement invariants by construction.
pub fn generate_cohort(
    n: usize,
    seed: u64,
    params: &SyntheticParams,
    stats: &PopulationUncertaintyStats,
) -> SyntheticCohort {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = params.max_age_years - params.min_age_years;
    // standard deviation of a uniform age, for standardising
    let age_sd = span / 12f64.sqrt();
    let age_mid = params.min_age_years + span / 2.0;
    let coupling = params.sigma_age_coupling;
    let residual = (1.0 - coupling * coupling).max(0.0).sqrt();

    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let age_years = params.min_age_years + span * rng.random::<f64>();
        let age_days = years_to_days(age_years).round().max(1.0) as u32;
        let age_years = days_to_years(f64::from(age_days));
        let sex = if rng.random_bool(0.5) {
            Sex::Male
        } else {
            Sex::Female
        };
        let id = format!("S{seed}-{i:04}");
        let mut measurements = BTreeMap::new();
        let mut predictions = BTreeMap::new();

        for (&tooth, curve) in &params.curves {
            // fixed draw order per tooth keeps cohorts stable under param tweaks
            let detected = rng.random::<f64>() < params.detection_rate;
            let measured = rng.random::<f64>() < params.measurement_rate;
            let z_mu = normal(&mut rng).clamp(-3.0, 3.0);
            let z_sigma = normal(&mut rng);
            let z_ratio = normal(&mut rng);
            let z_csm = normal(&mut rng);
            let width_px = params.width_px_min
                + (params.width_px_max - params.width_px_min) * rng.random::<f64>();

            let mu_days = f64::from(age_days) + params.mu_noise_sd_days * z_mu;
            let sigma_days = stats.per_tooth.get(&tooth).map(|u| {
                let age_z = (age_years - age_mid) / age_sd;
                let z = coupling * age_z + residual * z_sigma;
                (u.mean_days + u.std_days * z).max(0.2 * u.mean_days)
            });

            let progress = curve.progress(age_years);
            let ratio_target = (params.ratio_mature
                + (params.ratio_immature - params.ratio_mature) * (1.0 - progress)
                + params.ratio_noise_sd * z_ratio)
                .max(0.05);
            let height_px = ratio_target * width_px;
            let ratio = height_px / width_px;
            let csm_target = match params.affine_csm_rule {
                Some(rule) if rule.tooth == tooth => {
                    rule.eval(sex, ratio, days_to_years(mu_days)) + params.csm_noise_sd * z_csm
                }
                _ if progress >= 1.0 => 0.0,
                _ => {
                    params.csm_open * (1.0 - progress).powf(params.csm_exponent)
                        + params.csm_noise_sd * z_csm
                }
            }
            .max(0.0);
            let aperture = csm_target * height_px;
            let (came1, came2) = if tooth.is_molar() {
                (0.6 * aperture, Some(0.4 * aperture))
            } else {
                (aperture, None)
            };

            if measured {
                measurements.insert(tooth, ToothMeasurement::from_pixels(height_px, width_px, came1, came2));
            }
            if let (true, Some(sigma_days)) = (detected, sigma_days) {
                predictions.insert(tooth, ToothPrediction { mu_days, sigma_days });
            }
        }

        records.push(PatientRecord {
            opg_path: format!("synthetic/{id}.png"),
            heatmap_path: Some(format!("synthetic/{id}_heatmap.png")),
            id,
            age_days,
            sex,
            measurements,
            predictions,
        });
    }

    SyntheticCohort {
        seed,
        records,
        ground_truth: params.clone(),
    }
}
