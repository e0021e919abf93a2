//! Surface realisation of a document plan into text.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::lexicon::{placeholders, LanguageLexicon, NumberForms};
use super::{DocumentPlan, Language, Magnitude, Message, RealizedSentence, Report, RuleId, SlotValue};
use crate::domain::{ToothId, YearsMonths};
use crate::error::{Error, Result};
use crate::estimate::ErrorDirection;

/// Lexicons and disclaimers for every language a deployment supports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NlgResources {
    pub lexicons: BTreeMap<Language, LanguageLexicon>,
    pub disclaimers: BTreeMap<Language, String>,
}

impl NlgResources {
    pub fn lexicon(&self, language: Language) -> Result<&LanguageLexicon> {
        self.lexicons
            .get(&language)
            .ok_or_else(|| Error::UnsupportedLanguage(language.to_string()))
    }

    pub fn disclaimer(&self, language: Language) -> Result<&str> {
        self.disclaimers
            .get(&language)
            .map(String::as_str)
            .ok_or_else(|| Error::UnsupportedLanguage(language.to_string()))
    }
}

fn quantity(n: u32, forms: &NumberForms) -> String {
    format!("{n} {}", forms.get(n))
}

/// "7 years and 2 months"; zero parts are left out.
pub fn render_age(age: YearsMonths, lex: &LanguageLexicon) -> String {
    match (age.years, age.months) {
        (0, m) => quantity(m, &lex.month),
        (y, 0) => quantity(y, &lex.year),
        (y, m) => format!(
            "{} {} {}",
            quantity(y, &lex.year),
            lex.unit_conjunction,
            quantity(m, &lex.month)
        ),
    }
}

pub fn render_teeth(teeth: &[ToothId], lex: &LanguageLexicon) -> String {
    let items: Vec<String> = teeth
        .iter()
        .map(|t| lex.tooth_item.replace("{tooth}", &t.to_string()))
        .collect();
    match items.as_slice() {
        [] => String::new(),
        [only] => only.clone(),
        [init @ .., last] => format!("{}{}{last}", init.join(&lex.list_separator), lex.list_conjunction),
    }
}

fn missing_word(what: &str) -> Error {
    Error::ConstraintViolation {
        field: format!("lexicons.{what}"),
        message: "no word form".into(),
    }
}

fn render_slot(rule: RuleId, value: &SlotValue, lex: &LanguageLexicon) -> Result<String> {
    Ok(match value {
        SlotValue::Subject { sex, category } => lex
            .subject
            .get(category)
            .ok_or_else(|| missing_word("subject"))?
            .get(*sex)
            .to_string(),
        SlotValue::Pronoun(sex) => lex.pronoun.get(*sex).to_string(),
        SlotValue::Age(age) => render_age(*age, lex),
        SlotValue::Magnitude(Magnitude::Months(m)) => render_age(YearsMonths::from_total_months(*m), lex),
        SlotValue::Magnitude(Magnitude::Days(d)) => quantity(*d, &lex.day),
        SlotValue::Dentition(d) => lex.dentition.get(d).ok_or_else(|| missing_word("dentition"))?.clone(),
        SlotValue::Count(c) => {
            let words = if rule == RuleId::ShortEstimate {
                &lex.count_short
            } else {
                &lex.count_detailed
            };
            words.get(c).ok_or_else(|| missing_word("count"))?.clone()
        }
        SlotValue::Apex(a) => lex.apex.get(a).ok_or_else(|| missing_word("apex"))?.clone(),
        SlotValue::Reliability(r) => lex
            .reliability
            .get(r)
            .ok_or_else(|| missing_word("reliability"))?
            .clone(),
        SlotValue::Direction(ErrorDirection::Overestimation) => lex.direction.overestimation.clone(),
        SlotValue::Direction(ErrorDirection::Underestimation) => lex.direction.underestimation.clone(),
        SlotValue::Direction(ErrorDirection::Accurate) => return Err(missing_word("direction.accurate")),
        SlotValue::Integer(n) => n.to_string(),
        SlotValue::Tooth(t) => t.to_string(),
        SlotValue::Teeth(teeth) => render_teeth(teeth, lex),
    })
}

/// Realises one message with the lexicon of a single language.
pub fn render_sentence(message: &Message, lex: &LanguageLexicon) -> Result<String> {
    let rule = message.provenance.rule_id;
    let teeth = match message.slots.get("teeth") {
        Some(SlotValue::Teeth(t)) => t.len(),
        _ => 0,
    };
    let template = lex.template(rule)?.select(teeth);
    let mut text = template.to_string();
    for name in placeholders(template) {
        let value = message.slots.get(name).ok_or_else(|| Error::ConstraintViolation {
            field: format!("templates.{rule}"),
            message: format!("plan has no value for slot {{{name}}}"),
        })?;
        text = text.replacen(&format!("{{{name}}}"), &render_slot(rule, value, lex)?, 1);
    }
    Ok(text)
}

/// Deterministic realisation of a plan, disclaimer included.
pub fn realize(plan: &DocumentPlan, resources: &NlgResources) -> Result<Report> {
    let lex = resources.lexicon(plan.language)?;
    let disclaimer = resources.disclaimer(plan.language)?.to_string();
    let sentences = plan
        .messages
        .iter()
        .map(|m| {
            Ok(RealizedSentence {
                text: render_sentence(m, lex)?,
                paragraph: m.paragraph,
                provenance: m.provenance,
                slots: m.slots.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let paragraph = |p: usize| {
        sentences
            .iter()
            .filter(|s| s.paragraph == p)
            .map(|s| s.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let body = (1..=plan.body_paragraphs())
        .map(paragraph)
        .filter(|p| !p.is_empty())
        .collect::<Vec<_>>()
        .join("\n\n");

    Ok(Report {
        language: plan.language,
        kind: plan.report_kind,
        introduction: paragraph(0),
        body,
        disclaimer,
        sentences,
    })
}
