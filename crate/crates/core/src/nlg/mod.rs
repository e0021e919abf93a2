//! Report generation: document planning, lexicalisation and surface
//! realisation in English and Spanish.

pub mod lexicon;
pub mod planner;
pub mod quantify;
pub mod realizer;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{Dentition, PersonCategory, Sex, ToothId, YearsMonths};
use crate::error::Error;
use crate::estimate::ErrorDirection;
use crate::reliability::ReliabilityLabel;

pub use lexicon::{LanguageLexicon, RuleId, Template};
pub use planner::plan_document;
pub use quantify::{quantify_apex, quantify_count, ApexLabel, CountLabel};
pub use realizer::{realize, render_sentence, NlgResources};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    En,
    Es,
}

impl Language {
    pub const ALL: [Language; 2] = [Language::En, Language::Es];

    pub fn as_str(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::Es => "es",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "en" => Ok(Language::En),
            "es" => Ok(Language::Es),
            other => Err(Error::UnsupportedLanguage(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Short,
    Detailed,
}

impl ReportKind {
    pub const ALL: [ReportKind; 2] = [ReportKind::Short, ReportKind::Detailed];

    pub fn as_str(self) -> &'static str {
        match self {
            ReportKind::Short => "short",
            ReportKind::Detailed => "detailed",
        }
    }
}

impl fmt::Display for ReportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReportKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "short" => Ok(ReportKind::Short),
            "detailed" => Ok(ReportKind::Detailed),
            other => Err(Error::ConstraintViolation {
                field: "detail".into(),
                message: format!("expected short or detailed, got {other:?}"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    Intro,
    EstimateExplanation,
    ErrorAnalysis,
    ReliabilityStatement,
    MethodParagraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nature {
    Static,
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub rule_id: RuleId,
    pub nature: Nature,
}

impl Provenance {
    pub fn of(rule_id: RuleId) -> Self {
        Provenance {
            rule_id,
            nature: if rule_id.is_static() {
                Nature::Static
            } else {
                Nature::Dynamic
            },
        }
    }
}

/// Size of an estimation error as shown in a report.
///
/// Whole months when at least one month apart, otherwise days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Magnitude {
    Months(u32),
    Days(u32),
}

/// Typed slot content; language-specific words are chosen at realisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum SlotValue {
    Subject { sex: Sex, category: PersonCategory },
    Pronoun(Sex),
    Age(YearsMonths),
    Magnitude(Magnitude),
    Dentition(Dentition),
    Count(CountLabel),
    Apex(ApexLabel),
    Reliability(ReliabilityLabel),
    Direction(ErrorDirection),
    Integer(u32),
    Tooth(ToothId),
    Teeth(Vec<ToothId>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub kind: MessageKind,
    /// 0 is the introduction; body paragraphs count from 1.
    pub paragraph: usize,
    pub provenance: Provenance,
    pub slots: BTreeMap<String, SlotValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentPlan {
    pub report_kind: ReportKind,
    pub language: Language,
    pub messages: Vec<Message>,
}

impl DocumentPlan {
    pub fn body_paragraphs(&self) -> usize {
        self.messages.iter().map(|m| m.paragraph).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizedSentence {
    pub text: String,
    pub paragraph: usize,
    pub provenance: Provenance,
    pub slots: BTreeMap<String, SlotValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub language: Language,
    pub kind: ReportKind,
    pub introduction: String,
    /// Body paragraphs separated by a blank line.
    pub body: String,
    pub disclaimer: String,
    pub sentences: Vec<RealizedSentence>,
}
