//! Age-estimation arithmetic: the transparent Cameriere model, the
//! uncertainty-weighted aggregation of opaque per-tooth predictions, and the
//! classification of the real-versus-estimated error.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{
    years_to_days, CameriereCoefficients, Sex, ToothId, ToothMeasurement, ToothPrediction,
};
use crate::error::{Error, Result};

/// Errors at or below this percentage are reported as accurate.
pub const ACCURATE_ERROR_PERCENT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Cameriere,
    OpaqueAggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgeEstimate {
    pub age_days: f64,
    pub method: EstimateMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_tooth_weights: Option<BTreeMap<ToothId, f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorDirection {
    Overestimation,
    Underestimation,
    Accurate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorClassification {
    pub error_percent: f64,
    pub direction: ErrorDirection,
    pub magnitude_days: f64,
}

/// Regressors of the Cameriere model, gathered from a set of measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameriereInputs {
    /// 1 for male, 0 for female.
    pub g: f64,
    pub csm45: f64,
    /// Teeth of the right mandibular quadrant with all apices closed.
    pub n0: u32,
    /// Sum of CSM over the provided teeth 41 to 47.
    pub s: f64,
}

impl CameriereInputs {
    /// Collects the regressors from quadrant-4 measurements.
    ///
    /// Only the teeth actually provided among 41–47 contribute: a missing tooth
    /// adds nothing to `s` and is not counted as closed.
    pub fn from_measurements(
        sex: Sex,
        measurements: &BTreeMap<ToothId, ToothMeasurement>,
    ) -> Result<Self> {
        let csm45 = measurements
            .get(&ToothId::T45)
            .ok_or(Error::MissingTooth45)?
            .csm;
        let mut n0 = 0;
        let mut s = 0.0;
        for (tooth, m) in measurements {
            if tooth.quadrant() != 4 || tooth.position() > 7 {
                continue;
            }
            if !m.csm.is_finite() || m.csm < 0.0 {
                return Err(Error::InvalidCsm(m.csm));
            }
            s += m.csm;
            if m.csm == 0.0 {
                n0 += 1;
            }
        }
        Ok(CameriereInputs {
            g: sex.indicator(),
            csm45,
            n0,
            s,
        })
    }
}

impl CameriereCoefficients {
    /// Evaluates the linear model, in years.
    pub fn evaluate(&self, inputs: &CameriereInputs) -> f64 {
        let n0 = f64::from(inputs.n0);
        self.intercept
            + self.coef_g * inputs.g
            + self.coef_csm45 * inputs.csm45
            + self.coef_n0 * n0
            + self.coef_s * inputs.s
            + self.coef_s_n0 * inputs.s * n0
    }
}

/// Transparent age estimate from right-quadrant measurements.
pub fn cameriere_age(
    sex: Sex,
    measurements: &BTreeMap<ToothId, ToothMeasurement>,
    coeffs: &CameriereCoefficients,
) -> Result<AgeEstimate> {
    let inputs = CameriereInputs::from_measurements(sex, measurements)?;
    let years = coeffs.evaluate(&inputs);
    if !(years > 0.0) {
        return Err(Error::NonpositiveAge(years));
    }
    Ok(AgeEstimate {
        age_days: years_to_days(years),
        method: EstimateMethod::Cameriere,
        per_tooth_weights: None,
    })
}

/// Normalised weights `1/(σ²)^p`, computed in log space so that large
/// penalties do not underflow.
pub fn aggregation_weights(
    predictions: &BTreeMap<ToothId, ToothPrediction>,
    p: f64,
) -> Result<BTreeMap<ToothId, f64>> {
    if predictions.is_empty() {
        return Err(Error::NoPredictions);
    }
    let log_w: Vec<(ToothId, f64)> = predictions
        .iter()
        .map(|(t, pred)| (*t, -2.0 * p * pred.sigma_days.ln()))
        .collect();
    let max = log_w
        .iter()
        .map(|(_, l)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<(ToothId, f64)> = log_w.into_iter().map(|(t, l)| (t, (l - max).exp())).collect();
    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    Ok(raw.into_iter().map(|(t, w)| (t, w / total)).collect())
}

/// Uncertainty-weighted mean of the per-tooth opaque predictions.
pub fn aggregate_opaque(
    predictions: &BTreeMap<ToothId, ToothPrediction>,
    p: f64,
) -> Result<AgeEstimate> {
    let weights = aggregation_weights(predictions, p)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut age = 0.0;
    for (tooth, pred) in predictions {
        age += pred.mu_days * weights[tooth];
        lo = lo.min(pred.mu_days);
        hi = hi.max(pred.mu_days);
    }
    Ok(AgeEstimate {
        // a convex combination; clamp away rounding past the extremes
        age_days: age.clamp(lo, hi),
        method: EstimateMethod::OpaqueAggregate,
        per_tooth_weights: Some(weights),
    })
}

/// Relative error of the opaque estimate against the real age, in percent.
pub fn classify_error(age_real_days: f64, age_opaque_days: f64) -> Result<ErrorClassification> {
    if !(age_real_days > 0.0) || !age_real_days.is_finite() {
        return Err(Error::InvalidAge(age_real_days));
    }
    let diff = age_real_days - age_opaque_days;
    let error_percent = (diff / age_real_days).abs() * 100.0;
    let direction = if error_percent <= ACCURATE_ERROR_PERCENT {
        ErrorDirection::Accurate
    } else if age_opaque_days > age_real_days {
        ErrorDirection::Overestimation
    } else {
        ErrorDirection::Underestimation
    };
    Ok(ErrorClassification {
        error_percent,
        direction,
        magnitude_days: diff.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pred(mu: f64, sigma: f64) -> ToothPrediction {
        ToothPrediction {
            mu_days: mu,
            sigma_days: sigma,
        }
    }

    fn tooth(code: u8) -> ToothId {
        ToothId::new(code).unwrap()
    }

    fn quadrant(csms: &[(u8, f64)]) -> BTreeMap<ToothId, ToothMeasurement> {
        csms.iter()
            .map(|&(t, csm)| {
                let height = 100.0;
                (tooth(t), ToothMeasurement::from_pixels(height, 50.0, csm * height, None))
            })
            .collect()
    }

    #[test]
    fn cameriere_intercept_only() {
        let c = CameriereCoefficients::default();
        let inputs = CameriereInputs {
            g: 0.0,
            csm45: 0.0,
            n0: 0,
            s: 0.0,
        };
        assert_eq!(c.evaluate(&inputs), 8.971);
        let male = CameriereInputs { g: 1.0, ..inputs };
        assert!((c.evaluate(&male) - 9.328).abs() < 1e-12);
    }

    #[test]
    fn cameriere_single_closed_tooth45() {
        // only tooth 45 provided with csm 0: N0 = 1, s = 0 -> 8.971 + 0.674
        let est = cameriere_age(
            Sex::Female,
            &quadrant(&[(45, 0.0)]),
            &CameriereCoefficients::default(),
        )
        .unwrap();
        assert!((est.age_days / 365.25 - 9.645).abs() < 1e-12);
        assert_eq!(est.method, EstimateMethod::Cameriere);
        assert!(est.per_tooth_weights.is_none());
    }

    #[test]
    fn cameriere_ignores_other_quadrants_and_48() {
        let mut m = quadrant(&[(45, 0.2), (46, 0.1), (48, 0.0), (35, 0.0)]);
        m.insert(tooth(44), ToothMeasurement::from_pixels(100.0, 50.0, 0.0, None));
        let inputs = CameriereInputs::from_measurements(Sex::Male, &m).unwrap();
        assert_eq!(inputs.n0, 1);
        assert!((inputs.s - 0.3).abs() < 1e-12);
        assert_eq!(inputs.csm45, 0.2);
        assert_eq!(inputs.g, 1.0);
    }

    #[test]
    fn cameriere_requires_tooth45() {
        let err = cameriere_age(
            Sex::Female,
            &quadrant(&[(44, 0.1)]),
            &CameriereCoefficients::default(),
        )
        .unwrap_err();
        assert_eq!(err.code(), "MISSING_TOOTH_45");
    }

    #[test]
    fn cameriere_nonpositive_age() {
        let coeffs = CameriereCoefficients {
            intercept: -20.0,
            ..Default::default()
        };
        let err = cameriere_age(Sex::Female, &quadrant(&[(45, 0.1)]), &coeffs).unwrap_err();
        assert_eq!(err.code(), "NONPOSITIVE_AGE");
    }

    #[test]
    fn aggregate_single_tooth() {
        let preds: BTreeMap<_, _> = [(tooth(45), pred(2831.0, 500.0))].into();
        let est = aggregate_opaque(&preds, 1.0).unwrap();
        assert_eq!(est.age_days, 2831.0);
        assert_eq!(est.per_tooth_weights.unwrap()[&tooth(45)], 1.0);
    }

    #[test]
    fn aggregate_equal_sigma_is_mean() {
        let preds: BTreeMap<_, _> =
            [(tooth(44), pred(2000.0, 100.0)), (tooth(45), pred(4000.0, 100.0))].into();
        assert!((aggregate_opaque(&preds, 1.0).unwrap().age_days - 3000.0).abs() < 1e-9);
    }

    #[test]
    fn aggregate_inverse_variance() {
        // 1/100^2 = 1e-4, 1/200^2 = 2.5e-5 -> weights 0.8, 0.2
        let preds: BTreeMap<_, _> =
            [(tooth(44), pred(2000.0, 100.0)), (tooth(45), pred(4000.0, 200.0))].into();
        let est = aggregate_opaque(&preds, 1.0).unwrap();
        let w = est.per_tooth_weights.unwrap();
        assert!((w[&tooth(44)] - 0.8).abs() < 1e-12);
        assert!((w[&tooth(45)] - 0.2).abs() < 1e-12);
        assert!((est.age_days - 2400.0).abs() < 1e-9);
    }

    #[test]
    fn aggregate_empty() {
        assert_eq!(
            aggregate_opaque(&BTreeMap::new(), 1.0).unwrap_err().code(),
            "NO_PREDICTIONS"
        );
    }

    #[test]
    fn error_examples() {
        let e = classify_error(2618.0, 2831.0).unwrap();
        assert_eq!(e.direction, ErrorDirection::Overestimation);
        assert_eq!(e.magnitude_days, 213.0);
        let e = classify_error(3000.0, 3000.0).unwrap();
        assert_eq!(e.direction, ErrorDirection::Accurate);
        assert_eq!(e.error_percent, 0.0);
        let e = classify_error(3652.0, 3670.0).unwrap();
        assert!((e.error_percent - 18.0 / 3652.0 * 100.0).abs() < 1e-12);
        assert_eq!(e.direction, ErrorDirection::Accurate);
        let e = classify_error(3000.0, 2900.0).unwrap();
        assert_eq!(e.direction, ErrorDirection::Underestimation);
        assert_eq!(classify_error(0.0, 10.0).unwrap_err().code(), "INVALID_AGE");
    }

    #[test]
    fn error_exactly_one_percent_is_accurate() {
        let e = classify_error(1000.0, 1010.0).unwrap();
        assert!((e.error_percent - 1.0).abs() < 1e-12);
        assert_eq!(e.direction, ErrorDirection::Accurate);
    }

    fn predictions_strategy() -> impl Strategy<Value = BTreeMap<ToothId, ToothPrediction>> {
        proptest::collection::btree_map(
            proptest::sample::select(ToothId::POSTERIOR_MANDIBULAR.to_vec()),
            (1500.0f64..6000.0, 50.0f64..900.0).prop_map(|(m, s)| pred(m, s)),
            1..=10,
        )
    }

    proptest! {
        #[test]
        fn weights_sum_to_one(preds in predictions_strategy(), p in 0.01f64..8.0) {
            let est = aggregate_opaque(&preds, p).unwrap();
            let w = est.per_tooth_weights.unwrap();
            let sum: f64 = w.values().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(w.values().all(|&x| x > 0.0 && x <= 1.0));
            let lo = preds.values().map(|p| p.mu_days).fold(f64::INFINITY, f64::min);
            let hi = preds.values().map(|p| p.mu_days).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(est.age_days >= lo && est.age_days <= hi);
        }

        #[test]
        fn sigma_scale_invariance(preds in predictions_strategy(), p in 0.1f64..4.0, c in 0.1f64..10.0) {
            let scaled: BTreeMap<_, _> = preds
                .iter()
                .map(|(t, q)| (*t, pred(q.mu_days, q.sigma_days * c)))
                .collect();
            let a = aggregate_opaque(&preds, p).unwrap();
            let b = aggregate_opaque(&scaled, p).unwrap();
            prop_assert!((a.age_days - b.age_days).abs() <= 1e-12 * a.age_days);
        }

        #[test]
        fn cameriere_decreases_with_s(s in 0.0f64..3.0, ds in 0.001f64..1.0) {
            let c = CameriereCoefficients::default();
            let base = CameriereInputs { g: 0.0, csm45: 0.3, n0: 0, s };
            let more = CameriereInputs { s: s + ds, ..base };
            prop_assert!(c.evaluate(&more) < c.evaluate(&base));
        }

        #[test]
        fn accurate_iff_within_one_percent(real in 100.0f64..8000.0, rel in -0.5f64..0.5) {
            let e = classify_error(real, real * (1.0 + rel)).unwrap();
            if e.error_percent > 1.0 + 1e-12 {
                prop_assert_ne!(e.direction, ErrorDirection::Accurate);
            }
            if e.error_percent < 1.0 - 1e-12 {
                prop_assert_eq!(e.direction, ErrorDirection::Accurate);
            }
        }
    }
}
