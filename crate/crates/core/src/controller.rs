//! End-to-end operations shared by the CLI and the service.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::domain::{validate_record, PatientRecord, ToothId};
use crate::error::{Error, RecordViolations, Result};
use crate::estimate::{aggregate_opaque, classify_error};
use crate::nlg::{plan_document, realize, Language, RealizedSentence, ReportKind};
use crate::reliability::assess_reliability;
use crate::store::{CoefficientsStore, PatientStore};
use crate::surrogate::{correlation_table, evaluate_regressor, fit_surrogate, CorrelationRow, MetricsReport, RegressionModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRequest {
    pub patient_id: String,
    pub language: Language,
    pub detail: ReportKind,
}

/// A generated report together with the image references it accompanies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub introduction: String,
    pub body: String,
    pub sentences: Vec<RealizedSentence>,
    pub disclaimer: String,
    pub opg_path: String,
    pub heatmap_path: Option<String>,
}

impl ReportDocument {
    /// Plain-text rendering: introduction, body and disclaimer separated by
    /// blank lines.
    pub fn to_text(&self) -> String {
        format!("{}\n\n{}\n\n{}\n", self.introduction, self.body, self.disclaimer)
    }

    /// [`Self::to_text`] followed by the image references.
    pub fn to_text_with_paths(&self) -> String {
        format!(
            "{}\nopg_path: {}\nheatmap_path: {}\n",
            self.to_text(),
            self.opg_path,
            self.heatmap_path.as_deref().unwrap_or("-")
        )
    }
}

pub fn generate_report(
    record: &PatientRecord,
    coefficients: &CoefficientsStore,
    kind: ReportKind,
    language: Language,
) -> Result<ReportDocument> {
    let violations = validate_record(record);
    if !violations.is_empty() {
        return Err(Error::SchemaViolation(vec![RecordViolations {
            record_id: record.id.clone(),
            violations,
        }]));
    }
    let table = &coefficients.table;
    let opaque = aggregate_opaque(&record.predictions, table.penalty_p)?;
    let error = classify_error(record.age_days_f64(), opaque.age_days)?;
    let reliability = assess_reliability(&record.predictions, table)?;
    let plan = plan_document(record, &opaque, &error, &reliability, table, kind, language)?;
    let report = realize(&plan, &coefficients.nlg)?;
    Ok(ReportDocument {
        introduction: report.introduction,
        body: report.body,
        sentences: report.sentences,
        disclaimer: report.disclaimer,
        opg_path: record.opg_path.clone(),
        heatmap_path: record.heatmap_path.clone(),
    })
}

pub fn report_for(
    patients: &PatientStore,
    coefficients: &CoefficientsStore,
    request: &ReportRequest,
) -> Result<ReportDocument> {
    let record = patients
        .get(&request.patient_id)
        .ok_or_else(|| Error::UnknownPatient(request.patient_id.clone()))?;
    generate_report(record, coefficients, request.detail, request.language)
}

/// σ summary of one tooth over a cohort, in days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyRow {
    pub samples: usize,
    pub mean_sigma_days: f64,
    /// Sample standard deviation; absent below two samples.
    pub std_sigma_days: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortStats {
    pub patients: usize,
    pub uncertainty: BTreeMap<ToothId, UncertaintyRow>,
    pub correlations: BTreeMap<ToothId, CorrelationRow>,
}

pub fn uncertainty_table(records: &[PatientRecord]) -> BTreeMap<ToothId, UncertaintyRow> {
    let mut sigmas: BTreeMap<ToothId, Vec<f64>> = BTreeMap::new();
    for r in records {
        for (t, p) in &r.predictions {
            sigmas.entry(*t).or_default().push(p.sigma_days);
        }
    }
    sigmas
        .into_iter()
        .map(|(t, v)| {
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let std = (v.len() >= 2)
                .then(|| (v.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
            (
                t,
                UncertaintyRow {
                    samples: v.len(),
                    mean_sigma_days: mean,
                    std_sigma_days: std,
                },
            )
        })
        .collect()
}

pub fn cohort_stats(records: &[PatientRecord]) -> Result<CohortStats> {
    if records.is_empty() {
        return Err(Error::NoData);
    }
    Ok(CohortStats {
        patients: records.len(),
        uncertainty: uncertainty_table(records),
        correlations: correlation_table(records),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"))
}

impl CohortStats {
    pub fn uncertainty_text(&self) -> String {
        let mut out = String::from("tooth  n     mean_sigma_days  std_sigma_days\n");
        for (t, row) in &self.uncertainty {
            let _ = writeln!(
                out,
                "{:<6} {:<5} {:<16.3} {}",
                t.to_string(),
                row.samples,
                row.mean_sigma_days,
                opt(row.std_sigma_days)
            );
        }
        out
    }

    pub fn correlation_text(&self) -> String {
        let mut out = String::from("tooth  n     ratio~mu  ratio~sigma  csm~mu    csm~sigma\n");
        for (t, row) in &self.correlations {
            let _ = writeln!(
                out,
                "{:<6} {:<5} {:<9} {:<12} {:<9} {}",
                t.to_string(),
                row.samples,
                opt(row.ratio_vs_mu.value),
                opt(row.ratio_vs_sigma.value),
                opt(row.csm_vs_mu.value),
                opt(row.csm_vs_sigma.value)
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateReport {
    pub model: RegressionModel,
    pub metrics: MetricsReport,
}

impl SurrogateReport {
    pub fn to_text(&self) -> String {
        let w = &self.model.weights;
        let mut out = String::new();
        let _ = writeln!(out, "target_tooth={}", self.model.target_tooth);
        let _ = writeln!(out, "patients={}", self.model.fitted_on.patients);
        let _ = writeln!(out, "intercept={}", w.intercept);
        let _ = writeln!(out, "w_sex={}", w.w_sex);
        let _ = writeln!(out, "w_ratio={}", w.w_ratio);
        let _ = writeln!(out, "w_mu={}", w.w_mu);
        out.push_str(&self.metrics.to_key_value());
        out
    }
}

/// Fits the surrogate for one tooth and scores it on the training samples.
pub fn fit_surrogate_report(records: &[PatientRecord], tooth: ToothId) -> Result<SurrogateReport> {
    let model = fit_surrogate(records, tooth)?;
    let metrics = evaluate_regressor(&model, records)?;
    Ok(SurrogateReport { model, metrics })
}
