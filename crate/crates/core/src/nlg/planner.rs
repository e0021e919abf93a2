//! Content selection: which messages a report carries and with which slots.

use std::collections::BTreeMap;

use super::quantify::{quantify_apex, quantify_count};
use super::{DocumentPlan, Language, Magnitude, Message, MessageKind, Provenance, ReportKind, RuleId, SlotValue};
use crate::domain::{age_to_years_months, days_to_years, CoefficientsTable, PatientRecord, ToothId};
use crate::error::{Error, Result};
use crate::estimate::{AgeEstimate, ErrorClassification, ErrorDirection};
use crate::reliability::{ReliabilityAssessment, ReliabilityLabel};

fn message(kind: MessageKind, paragraph: usize, rule: RuleId, slots: Vec<(&str, SlotValue)>) -> Message {
    Message {
        kind,
        paragraph,
        provenance: Provenance::of(rule),
        slots: slots.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
    }
}

/// Fully developed right-quadrant teeth and the quadrant size.
pub fn developed_count(record: &PatientRecord) -> (u32, u32) {
    let developed = ToothId::RIGHT_POSTERIOR
        .iter()
        .filter(|t| record.measurements.get(t).is_some_and(|m| m.is_fully_developed()))
        .count() as u32;
    (developed, ToothId::RIGHT_POSTERIOR.len() as u32)
}

/// Error size shown in the report: the distance between the two rendered
/// ages in months, or days when both render to the same month.
pub fn error_magnitude(real_days: f64, estimated_days: f64) -> Result<Magnitude> {
    let real = age_to_years_months(real_days)?.total_months();
    let est = age_to_years_months(estimated_days)?.total_months();
    Ok(if real == est {
        Magnitude::Days((real_days - estimated_days).abs().round() as u32)
    } else {
        Magnitude::Months(real.abs_diff(est))
    })
}

pub fn plan_document(
    record: &PatientRecord,
    opaque: &AgeEstimate,
    error: &ErrorClassification,
    reliability: &ReliabilityAssessment,
    table: &CoefficientsTable,
    kind: ReportKind,
    language: Language,
) -> Result<DocumentPlan> {
    if record.predictions.is_empty() {
        return Err(Error::NoPredictions);
    }
    let real_days = record.age_days_f64();
    let real_years = days_to_years(real_days);
    let real_age = age_to_years_months(real_days)?;
    let estimated_age = age_to_years_months(opaque.age_days)?;

    let mut messages = vec![message(
        MessageKind::Intro,
        0,
        RuleId::Intro,
        vec![
            (
                "subject",
                SlotValue::Subject {
                    sex: record.sex,
                    category: table.age_bands.person_category(real_years),
                },
            ),
            ("real_age", SlotValue::Age(real_age)),
            ("dentition", SlotValue::Dentition(table.age_bands.dentition(real_years))),
        ],
    )];

    let csm45 = record
        .measurements
        .get(&ToothId::T45)
        .ok_or(Error::MissingTooth45)?
        .csm;
    let apex = quantify_apex(csm45, &table.quantifiers.apex)?;
    let (developed, total) = developed_count(record);
    let count = quantify_count(developed, total, &table.quantifiers.count)?;

    match kind {
        ReportKind::Short => messages.push(message(
            MessageKind::EstimateExplanation,
            1,
            RuleId::ShortEstimate,
            vec![
                ("estimated_age", SlotValue::Age(estimated_age)),
                ("pronoun", SlotValue::Pronoun(record.sex)),
                ("count", SlotValue::Count(count)),
                ("apex", SlotValue::Apex(apex)),
            ],
        )),
        ReportKind::Detailed => {
            messages.push(message(
                MessageKind::EstimateExplanation,
                1,
                RuleId::DetailedEstimate,
                vec![
                    ("estimated_age", SlotValue::Age(estimated_age)),
                    ("pronoun", SlotValue::Pronoun(record.sex)),
                    ("count", SlotValue::Count(count)),
                    ("developed", SlotValue::Integer(developed)),
                    ("total", SlotValue::Integer(total)),
                    ("apex", SlotValue::Apex(apex)),
                    ("apex_tooth", SlotValue::Tooth(ToothId::T45)),
                ],
            ));
            messages.push(message(
                MessageKind::ErrorAnalysis,
                2,
                RuleId::RealAge,
                vec![("real_age", SlotValue::Age(real_age))],
            ));
            messages.push(match error.direction {
                ErrorDirection::Accurate => {
                    message(MessageKind::ErrorAnalysis, 2, RuleId::ErrorAccurate, vec![])
                }
                direction => message(
                    MessageKind::ErrorAnalysis,
                    2,
                    RuleId::ErrorDirectional,
                    vec![
                        ("direction", SlotValue::Direction(direction)),
                        ("magnitude", SlotValue::Magnitude(error_magnitude(real_days, opaque.age_days)?)),
                    ],
                ),
            });
            let teeth = SlotValue::Teeth(reliability.most_predictive.clone());
            messages.push(match reliability.label {
                ReliabilityLabel::Normal => message(
                    MessageKind::ReliabilityStatement,
                    2,
                    RuleId::PredictiveTeeth,
                    vec![("teeth", teeth)],
                ),
                label => message(
                    MessageKind::ReliabilityStatement,
                    2,
                    RuleId::ReliabilityLevel,
                    vec![("reliability", SlotValue::Reliability(label)), ("teeth", teeth)],
                ),
            });
            for rule in RuleId::METHOD_PARAGRAPH {
                messages.push(Message {
                    kind: MessageKind::MethodParagraph,
                    paragraph: 3,
                    provenance: Provenance::of(rule),
                    slots: BTreeMap::new(),
                });
            }
        }
    }

    Ok(DocumentPlan {
        report_kind: kind,
        language,
        messages,
    })
}
