//! Patient data model, FDI tooth nomenclature and unit conventions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reliability::fuzzy::{LabelCutpoints, QuantifierConfig};
use crate::reliability::PopulationUncertaintyStats;

/// Calendar-independent year length used for every days/years conversion.
pub const DAYS_PER_YEAR: f64 = 365.25;
/// One twelfth of [`DAYS_PER_YEAR`].
pub const DAYS_PER_MONTH: f64 = 30.4375;

const REAL_TOLERANCE: f64 = 1e-9;

/// Permanent tooth in FDI two-digit notation (quadrant × 10 + position).
///
/// Any permanent code is representable so that records naming e.g. tooth 11
/// can be loaded and reported by [`validate_record`]. Only the posterior
/// mandibular teeth (34–38, 44–48) pass validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ToothId(u8);

impl ToothId {
    /// The ten teeth annotated and predicted: left then right posterior mandibular.
    pub const POSTERIOR_MANDIBULAR: [ToothId; 10] = [
        ToothId(34),
        ToothId(35),
        ToothId(36),
        ToothId(37),
        ToothId(38),
        ToothId(44),
        ToothId(45),
        ToothId(46),
        ToothId(47),
        ToothId(48),
    ];

    /// Posterior teeth of the right mandibular quadrant, 44 to 48.
    pub const RIGHT_POSTERIOR: [ToothId; 5] = [
        ToothId(44),
        ToothId(45),
        ToothId(46),
        ToothId(47),
        ToothId(48),
    ];

    /// Right mandibular second premolar.
    pub const T45: ToothId = ToothId(45);

    pub fn new(fdi_code: u8) -> Result<Self> {
        let quadrant = fdi_code / 10;
        let position = fdi_code % 10;
        if (1..=4).contains(&quadrant) && (1..=8).contains(&position) {
            Ok(ToothId(fdi_code))
        } else {
            Err(Error::InvalidTooth(fdi_code.to_string()))
        }
    }

    pub fn fdi_code(self) -> u8 {
        self.0
    }

    pub fn quadrant(self) -> u8 {
        self.0 / 10
    }

    pub fn position(self) -> u8 {
        self.0 % 10
    }

    pub fn is_mandibular(self) -> bool {
        matches!(self.quadrant(), 3 | 4)
    }

    pub fn is_posterior_mandibular(self) -> bool {
        self.is_mandibular() && (4..=8).contains(&self.position())
    }

    /// Molars (positions 6–8) are multi-radicular and may carry a second aperture.
    pub fn is_molar(self) -> bool {
        (6..=8).contains(&self.position())
    }
}

impl fmt::Display for ToothId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for ToothId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let code: u8 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidTooth(s.to_string()))?;
        ToothId::new(code)
    }
}

impl TryFrom<String> for ToothId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ToothId> for String {
    fn from(t: ToothId) -> String {
        t.to_string()
    }
}

/// Biological sex; `g` in the Cameriere model is 1 for male and 0 for female.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sex {
    #[serde(rename = "M")]
    Male,
    #[serde(rename = "F")]
    Female,
}

impl Sex {
    pub fn indicator(self) -> f64 {
        match self {
            Sex::Male => 1.0,
            Sex::Female => 0.0,
        }
    }
}

/// Manual per-tooth annotation, all lengths in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToothMeasurement {
    pub height_px: f64,
    pub width_px: f64,
    pub ratio: f64,
    pub came1_px: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub came2_px: Option<f64>,
    pub csm: f64,
}

impl ToothMeasurement {
    /// Builds a measurement whose derived fields are consistent by construction.
    pub fn from_pixels(height_px: f64, width_px: f64, came1_px: f64, came2_px: Option<f64>) -> Self {
        ToothMeasurement {
            height_px,
            width_px,
            ratio: height_px / width_px,
            came1_px,
            came2_px,
            csm: (came1_px + came2_px.unwrap_or(0.0)) / height_px,
        }
    }

    /// Total apex aperture over every root.
    pub fn total_aperture_px(&self) -> f64 {
        self.came1_px + self.came2_px.unwrap_or(0.0)
    }

    /// All apices closed.
    pub fn is_fully_developed(&self) -> bool {
        self.csm == 0.0
    }
}

/// Opaque-model output for one tooth: mean and standard deviation of the age
/// distribution, both in days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToothPrediction {
    pub mu_days: f64,
    pub sigma_days: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatientRecord {
    pub id: String,
    pub age_days: u32,
    pub sex: Sex,
    pub opg_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heatmap_path: Option<String>,
    #[serde(rename = "teeth", default)]
    pub measurements: BTreeMap<ToothId, ToothMeasurement>,
    #[serde(default)]
    pub predictions: BTreeMap<ToothId, ToothPrediction>,
}

impl PatientRecord {
    pub fn age_days_f64(&self) -> f64 {
        f64::from(self.age_days)
    }
}

/// Age broken into whole years and remaining whole months.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct YearsMonths {
    pub years: u32,
    pub months: u32,
}

impl YearsMonths {
    pub fn total_months(self) -> u32 {
        self.years * 12 + self.months
    }

    pub fn from_total_months(months: u32) -> Self {
        YearsMonths {
            years: months / 12,
            months: months % 12,
        }
    }
}

/// Converts an age in days into whole years and months.
///
/// Years are floored at 365.25 days, and the remaining days are floored at
/// 30.4375 days per month, clamped to 11.
pub fn age_to_years_months(age_days: f64) -> Result<YearsMonths> {
    if !age_days.is_finite() || age_days < 0.0 {
        return Err(Error::InvalidAge(age_days));
    }
    let mut years = (age_days / DAYS_PER_YEAR).floor();
    // correct for rounding of the division right at a year boundary
    while years > 0.0 && years * DAYS_PER_YEAR > age_days {
        years -= 1.0;
    }
    while (years + 1.0) * DAYS_PER_YEAR <= age_days {
        years += 1.0;
    }
    let remainder = (age_days - years * DAYS_PER_YEAR).max(0.0);
    let months = (remainder / DAYS_PER_MONTH).floor().min(11.0);
    Ok(YearsMonths {
        years: years as u32,
        months: months as u32,
    })
}

pub fn days_to_years(days: f64) -> f64 {
    days / DAYS_PER_YEAR
}

pub fn years_to_days(years: f64) -> f64 {
    years * DAYS_PER_YEAR
}

/// Coefficients of the Cameriere linear age model; the result is in years.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameriereCoefficients {
    pub intercept: f64,
    pub coef_g: f64,
    pub coef_csm45: f64,
    pub coef_n0: f64,
    pub coef_s: f64,
    pub coef_s_n0: f64,
}

impl Default for CameriereCoefficients {
    fn default() -> Self {
        CameriereCoefficients {
            intercept: 8.971,
            coef_g: 0.357,
            coef_csm45: 1.631,
            coef_n0: 0.674,
            coef_s: -1.034,
            coef_s_n0: -0.176,
        }
    }
}

/// Age thresholds, in years, for dentition type and person category.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgeBands {
    pub mixed_from_years: f64,
    pub permanent_from_years: f64,
    pub adolescent_from_years: f64,
    pub adult_from_years: f64,
}

impl Default for AgeBands {
    fn default() -> Self {
        AgeBands {
            mixed_from_years: 6.0,
            permanent_from_years: 12.0,
            adolescent_from_years: 12.0,
            adult_from_years: 18.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dentition {
    Deciduous,
    Mixed,
    Permanent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PersonCategory {
    Child,
    Adolescent,
    Adult,
}

impl AgeBands {
    pub fn dentition(&self, age_years: f64) -> Dentition {
        if age_years < self.mixed_from_years {
            Dentition::Deciduous
        } else if age_years < self.permanent_from_years {
            Dentition::Mixed
        } else {
            Dentition::Permanent
        }
    }

    pub fn person_category(&self, age_years: f64) -> PersonCategory {
        if age_years < self.adolescent_from_years {
            PersonCategory::Child
        } else if age_years < self.adult_from_years {
            PersonCategory::Adolescent
        } else {
            PersonCategory::Adult
        }
    }
}

/// Every population-adjustable constant the engine consumes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoefficientsTable {
    pub cameriere: CameriereCoefficients,
    pub penalty_p: f64,
    pub dbscan_eps_years: f64,
    pub quantifiers: QuantifierConfig,
    pub reliability_labels: LabelCutpoints,
    pub reliability_fuzzy: PopulationUncertaintyStats,
    pub age_bands: AgeBands,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    EmptyId,
    NonpositiveAge,
    NonPosteriorTooth,
    NonFinite,
    NonpositiveLength,
    NegativeAperture,
    Came2OnNonMolar,
    RatioMismatch,
    CsmMismatch,
    NonpositiveMu,
    NonpositiveSigma,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::EmptyId => "EMPTY_ID",
            ViolationCode::NonpositiveAge => "NONPOSITIVE_AGE",
            ViolationCode::NonPosteriorTooth => "NON_POSTERIOR_TOOTH",
            ViolationCode::NonFinite => "NON_FINITE",
            ViolationCode::NonpositiveLength => "NONPOSITIVE_LENGTH",
            ViolationCode::NegativeAperture => "NEGATIVE_APERTURE",
            ViolationCode::Came2OnNonMolar => "CAME2_ON_NON_MOLAR",
            ViolationCode::RatioMismatch => "RATIO_MISMATCH",
            ViolationCode::CsmMismatch => "CSM_MISMATCH",
            ViolationCode::NonpositiveMu => "NONPOSITIVE_MU",
            ViolationCode::NonpositiveSigma => "NONPOSITIVE_SIGMA",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single broken invariant, located at a tooth when applicable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub tooth: Option<ToothId>,
    pub code: ViolationCode,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tooth {
            Some(t) => write!(f, "{} on tooth {}: {}", self.code, t, self.detail),
            None => write!(f, "{}: {}", self.code, self.detail),
        }
    }
}

fn push(out: &mut Vec<Violation>, tooth: Option<ToothId>, code: ViolationCode, detail: String) {
    out.push(Violation { tooth, code, detail });
}

fn check_measurement(tooth: ToothId, m: &ToothMeasurement, out: &mut Vec<Violation>) {
    let t = Some(tooth);
    let fields = [
        m.height_px,
        m.width_px,
        m.ratio,
        m.came1_px,
        m.came2_px.unwrap_or(0.0),
        m.csm,
    ];
    if fields.iter().any(|v| !v.is_finite()) {
        push(out, t, ViolationCode::NonFinite, "measurement contains a non-finite value".into());
        return;
    }
    if m.height_px <= 0.0 || m.width_px <= 0.0 {
        push(
            out,
            t,
            ViolationCode::NonpositiveLength,
            format!("height {} and width {} must be > 0", m.height_px, m.width_px),
        );
    }
    if m.came1_px < 0.0 || m.came2_px.is_some_and(|c| c < 0.0) || m.csm < 0.0 {
        push(out, t, ViolationCode::NegativeAperture, "apertures and csm must be >= 0".into());
    }
    if m.came2_px.is_some() && !tooth.is_molar() {
        push(
            out,
            t,
            ViolationCode::Came2OnNonMolar,
            "came2 is only defined for molars".into(),
        );
    }
    if m.height_px > 0.0 && m.width_px > 0.0 {
        let expected = m.height_px / m.width_px;
        if (m.ratio - expected).abs() > REAL_TOLERANCE {
            push(
                out,
                t,
                ViolationCode::RatioMismatch,
                format!("ratio {} but height/width = {}", m.ratio, expected),
            );
        }
        let expected = m.total_aperture_px() / m.height_px;
        if (m.csm - expected).abs() > REAL_TOLERANCE {
            push(
                out,
                t,
                ViolationCode::CsmMismatch,
                format!("csm {} but aperture/height = {}", m.csm, expected),
            );
        }
    }
}

fn check_prediction(tooth: ToothId, p: &ToothPrediction, out: &mut Vec<Violation>) {
    let t = Some(tooth);
    if !p.mu_days.is_finite() || !p.sigma_days.is_finite() {
        push(out, t, ViolationCode::NonFinite, "prediction contains a non-finite value".into());
        return;
    }
    if p.mu_days <= 0.0 {
        push(out, t, ViolationCode::NonpositiveMu, format!("mu {} must be > 0", p.mu_days));
    }
    if p.sigma_days <= 0.0 {
        push(
            out,
            t,
            ViolationCode::NonpositiveSigma,
            format!("sigma {} must be > 0", p.sigma_days),
        );
    }
}

/// Lists every invariant violation of a record; an empty list means valid.
///
/// The result is sorted by tooth then code, so it does not depend on the
/// order in which teeth were inserted.
pub fn validate_record(record: &PatientRecord) -> Vec<Violation> {
    let mut out = Vec::new();
    if record.id.trim().is_empty() {
        push(&mut out, None, ViolationCode::EmptyId, "id must not be empty".into());
    }
    if record.age_days == 0 {
        push(&mut out, None, ViolationCode::NonpositiveAge, "age_days must be > 0".into());
    }
    let mut non_posterior: Vec<ToothId> = record
        .measurements
        .keys()
        .chain(record.predictions.keys())
        .copied()
        .filter(|t| !t.is_posterior_mandibular())
        .collect();
    non_posterior.sort();
    non_posterior.dedup();
    for tooth in non_posterior {
        push(
            &mut out,
            Some(tooth),
            ViolationCode::NonPosteriorTooth,
            "only teeth 34-38 and 44-48 are accepted".into(),
        );
    }
    for (tooth, m) in &record.measurements {
        check_measurement(*tooth, m, &mut out);
    }
    for (tooth, p) in &record.predictions {
        check_prediction(*tooth, p, &mut out);
    }
    out.sort();
    out
}
