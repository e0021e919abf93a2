//! Word forms and sentence templates for each supported language.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::quantify::{ApexLabel, CountLabel};
use super::Language;
use crate::domain::{Dentition, PersonCategory, Sex};
use crate::error::{Error, Result};
use crate::reliability::ReliabilityLabel;

/// Identifier of a sentence rule; each maps to exactly one template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    #[serde(rename = "intro")]
    Intro,
    #[serde(rename = "short_estimate")]
    ShortEstimate,
    #[serde(rename = "detailed_estimate")]
    DetailedEstimate,
    #[serde(rename = "real_age")]
    RealAge,
    #[serde(rename = "error_directional")]
    ErrorDirectional,
    #[serde(rename = "error_accurate")]
    ErrorAccurate,
    #[serde(rename = "reliability_level")]
    ReliabilityLevel,
    #[serde(rename = "predictive_teeth")]
    PredictiveTeeth,
    #[serde(rename = "method_1")]
    Method1,
    #[serde(rename = "method_2")]
    Method2,
    #[serde(rename = "method_3")]
    Method3,
    #[serde(rename = "method_4")]
    Method4,
    #[serde(rename = "method_5")]
    Method5,
}

impl RuleId {
    pub const ALL: [RuleId; 13] = [
        RuleId::Intro,
        RuleId::ShortEstimate,
        RuleId::DetailedEstimate,
        RuleId::RealAge,
        RuleId::ErrorDirectional,
        RuleId::ErrorAccurate,
        RuleId::ReliabilityLevel,
        RuleId::PredictiveTeeth,
        RuleId::Method1,
        RuleId::Method2,
        RuleId::Method3,
        RuleId::Method4,
        RuleId::Method5,
    ];

    pub const METHOD_PARAGRAPH: [RuleId; 5] = [
        RuleId::Method1,
        RuleId::Method2,
        RuleId::Method3,
        RuleId::Method4,
        RuleId::Method5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::Intro => "intro",
            RuleId::ShortEstimate => "short_estimate",
            RuleId::DetailedEstimate => "detailed_estimate",
            RuleId::RealAge => "real_age",
            RuleId::ErrorDirectional => "error_directional",
            RuleId::ErrorAccurate => "error_accurate",
            RuleId::ReliabilityLevel => "reliability_level",
            RuleId::PredictiveTeeth => "predictive_teeth",
            RuleId::Method1 => "method_1",
            RuleId::Method2 => "method_2",
            RuleId::Method3 => "method_3",
            RuleId::Method4 => "method_4",
            RuleId::Method5 => "method_5",
        }
    }

    pub fn is_static(self) -> bool {
        Self::METHOD_PARAGRAPH.contains(&self)
    }

    /// Slots a template for this rule may reference.
    pub fn slot_names(self) -> &'static [&'static str] {
        match self {
            RuleId::Intro => &["subject", "real_age", "dentition"],
            RuleId::ShortEstimate => &["estimated_age", "pronoun", "count", "apex"],
            RuleId::DetailedEstimate => &[
                "estimated_age",
                "pronoun",
                "count",
                "developed",
                "total",
                "apex",
                "apex_tooth",
            ],
            RuleId::RealAge => &["real_age"],
            RuleId::ErrorDirectional => &["direction", "magnitude"],
            RuleId::ReliabilityLevel => &["reliability", "teeth"],
            RuleId::PredictiveTeeth => &["teeth"],
            RuleId::ErrorAccurate
            | RuleId::Method1
            | RuleId::Method2
            | RuleId::Method3
            | RuleId::Method4
            | RuleId::Method5 => &[],
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A sentence template with `{slot}` placeholders, optionally with a singular
/// variant chosen when the `teeth` slot holds a single tooth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Template {
    Plain(String),
    Counted { one: String, other: String },
}

impl Template {
    pub fn variants(&self) -> Vec<&str> {
        match self {
            Template::Plain(s) => vec![s],
            Template::Counted { one, other } => vec![one, other],
        }
    }

    pub fn select(&self, count: usize) -> &str {
        match self {
            Template::Plain(s) => s,
            Template::Counted { one, other } => {
                if count == 1 {
                    one
                } else {
                    other
                }
            }
        }
    }
}

/// Names of the `{slot}` placeholders in a template string.
pub fn placeholders(template: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        let Some(len) = rest[start..].find('}') else {
            break;
        };
        out.push(&rest[start + 1..start + len]);
        rest = &rest[start + len + 1..];
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BySex {
    pub female: String,
    pub male: String,
}

impl BySex {
    pub fn get(&self, sex: Sex) -> &str {
        match sex {
            Sex::Female => &self.female,
            Sex::Male => &self.male,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumberForms {
    pub one: String,
    pub other: String,
}

impl NumberForms {
    pub fn get(&self, n: u32) -> &str {
        if n == 1 {
            &self.one
        } else {
            &self.other
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionWords {
    pub overestimation: String,
    pub underestimation: String,
}

/// Everything needed to realise sentences in one language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageLexicon {
    /// Article, sex and person category, e.g. "A female child" / "Una niña".
    pub subject: BTreeMap<PersonCategory, BySex>,
    pub pronoun: BySex,
    pub dentition: BTreeMap<Dentition, String>,
    pub count_short: BTreeMap<CountLabel, String>,
    pub count_detailed: BTreeMap<CountLabel, String>,
    pub apex: BTreeMap<ApexLabel, String>,
    pub reliability: BTreeMap<ReliabilityLabel, String>,
    pub direction: DirectionWords,
    pub year: NumberForms,
    pub month: NumberForms,
    pub day: NumberForms,
    /// Joins the years and months of an age.
    pub unit_conjunction: String,
    /// How one tooth is named inside a list, `{tooth}` being its FDI code.
    pub tooth_item: String,
    pub list_separator: String,
    pub list_conjunction: String,
    pub templates: BTreeMap<RuleId, Template>,
}

impl LanguageLexicon {
    pub fn template(&self, rule: RuleId) -> Result<&Template> {
        self.templates.get(&rule).ok_or_else(|| Error::ConstraintViolation {
            field: format!("lexicons.templates.{rule}"),
            message: "missing template".into(),
        })
    }

    pub(crate) fn check(&self, lang: Language) -> Result<()> {
        let field = |name: &str| format!("lexicons.{lang}.{name}");
        let missing = |name: &str, what: String| {
            Err(Error::ConstraintViolation {
                field: field(name),
                message: format!("missing entry for {what}"),
            })
        };
        for c in [PersonCategory::Child, PersonCategory::Adolescent, PersonCategory::Adult] {
            if !self.subject.contains_key(&c) {
                return missing("subject", format!("{c:?}"));
            }
        }
        for d in [Dentition::Deciduous, Dentition::Mixed, Dentition::Permanent] {
            if !self.dentition.contains_key(&d) {
                return missing("dentition", format!("{d:?}"));
            }
        }
        for c in [CountLabel::None, CountLabel::Few, CountLabel::Most, CountLabel::All] {
            if !self.count_short.contains_key(&c) {
                return missing("count_short", format!("{c:?}"));
            }
            if !self.count_detailed.contains_key(&c) {
                return missing("count_detailed", format!("{c:?}"));
            }
        }
        for a in [
            ApexLabel::CompletelyClosed,
            ApexLabel::FairlyClosed,
            ApexLabel::FairlyOpen,
            ApexLabel::QuiteOpen,
        ] {
            if !self.apex.contains_key(&a) {
                return missing("apex", format!("{a:?}"));
            }
        }
        for r in [ReliabilityLabel::Low, ReliabilityLabel::High] {
            if !self.reliability.contains_key(&r) {
                return missing("reliability", format!("{r:?}"));
            }
        }
        if placeholders(&self.tooth_item) != ["tooth"] {
            return Err(Error::ConstraintViolation {
                field: field("tooth_item"),
                message: "must contain exactly one {tooth} placeholder".into(),
            });
        }
        for rule in RuleId::ALL {
            let template = self.template(rule)?;
            let allowed: BTreeSet<&str> = rule.slot_names().iter().copied().collect();
            for variant in template.variants() {
                if variant.matches('{').count() != variant.matches('}').count() {
                    return Err(Error::ConstraintViolation {
                        field: field(&format!("templates.{rule}")),
                        message: "unbalanced braces".into(),
                    });
                }
                if let Some(bad) = placeholders(variant).into_iter().find(|p| !allowed.contains(p)) {
                    return Err(Error::ConstraintViolation {
                        field: field(&format!("templates.{rule}")),
                        message: format!("unknown slot {{{bad}}}"),
                    });
                }
            }
        }
        Ok(())
    }
}

fn s(v: &str) -> String {
    v.to_string()
}

fn by_sex(female: &str, male: &str) -> BySex {
    BySex {
        female: s(female),
        male: s(male),
    }
}

fn forms(one: &str, other: &str) -> NumberForms {
    NumberForms {
        one: s(one),
        other: s(other),
    }
}

fn plain(t: &str) -> Template {
    Template::Plain(s(t))
}

fn counted(one: &str, other: &str) -> Template {
    Template::Counted {
        one: s(one),
        other: s(other),
    }
}

pub fn default_english() -> LanguageLexicon {
    LanguageLexicon {
        subject: BTreeMap::from([
            (PersonCategory::Child, by_sex("A female child", "A male child")),
            (PersonCategory::Adolescent, by_sex("A female adolescent", "A male adolescent")),
            (PersonCategory::Adult, by_sex("A female adult", "A male adult")),
        ]),
        pronoun: by_sex("she", "he"),
        dentition: BTreeMap::from([
            (Dentition::Deciduous, s("deciduous")),
            (Dentition::Mixed, s("mixed")),
            (Dentition::Permanent, s("permanent")),
        ]),
        count_short: BTreeMap::from([
            (CountLabel::None, s("no")),
            (CountLabel::Few, s("few")),
            (CountLabel::Most, s("most")),
            (CountLabel::All, s("all")),
        ]),
        count_detailed: BTreeMap::from([
            (CountLabel::None, s("none")),
            (CountLabel::Few, s("few")),
            (CountLabel::Most, s("most")),
            (CountLabel::All, s("all")),
        ]),
        apex: BTreeMap::from([
            (ApexLabel::CompletelyClosed, s("completely closed")),
            (ApexLabel::FairlyClosed, s("fairly closed")),
            (ApexLabel::FairlyOpen, s("fairly open")),
            (ApexLabel::QuiteOpen, s("quite open")),
        ]),
        reliability: BTreeMap::from([
            (ReliabilityLabel::Low, s("low")),
            (ReliabilityLabel::Normal, s("normal")),
            (ReliabilityLabel::High, s("high")),
        ]),
        direction: DirectionWords {
            overestimation: s("overestimation"),
            underestimation: s("underestimation"),
        },
        year: forms("year", "years"),
        month: forms("month", "months"),
        day: forms("day", "days"),
        unit_conjunction: s("and"),
        tooth_item: s("{tooth}"),
        list_separator: s(", "),
        list_conjunction: s(" and "),
        templates: BTreeMap::from([
            (
                RuleId::Intro,
                plain("{subject} with a real chronological age of {real_age} should present {dentition} dentition."),
            ),
            (
                RuleId::ShortEstimate,
                plain("The dental age estimate is {estimated_age} because {pronoun} has {count} fully formed teeth in the right mandibular quadrant and the apex of the right mandibular second premolar is {apex}."),
            ),
            (
                RuleId::DetailedEstimate,
                plain("The dental age estimate, according to the Vila-Blanco et al. method, is {estimated_age} because {pronoun} has {count} fully formed teeth ({developed} of {total}) in the right mandibular quadrant and the apex of the right mandibular second premolar ({apex_tooth}) is {apex}."),
            ),
            (RuleId::RealAge, plain("The real chronological age is {real_age}.")),
            (
                RuleId::ErrorDirectional,
                plain("Therefore, there is an {direction} ({magnitude}) with respect to the real age."),
            ),
            (RuleId::ErrorAccurate, plain("Therefore, the estimate is accurate.")),
            (
                RuleId::ReliabilityLevel,
                counted(
                    "The reliability of this estimate is {reliability}, with the most predictive tooth being {teeth}.",
                    "The reliability of this estimate is {reliability}, with the most predictive teeth being {teeth}.",
                ),
            ),
            (
                RuleId::PredictiveTeeth,
                counted(
                    "The most predictive tooth is {teeth}.",
                    "The most predictive teeth are {teeth}.",
                ),
            ),
            (
                RuleId::Method1,
                plain("The patient's age was estimated using the Vila-Blanco method, an automated approach based on deep learning."),
            ),
            (
                RuleId::Method2,
                plain("This method detects the patient's teeth in their OPG and calculates the probabilistic distributions associated with the chronological age of each tooth."),
            ),
            (
                RuleId::Method3,
                plain("The patient's age is estimated by aggregating the dental age estimates for each of the patient's teeth."),
            ),
            (
                RuleId::Method4,
                plain("With the information inferred by the automatic method, the heat-map of the corresponding OPG is shown in the figure."),
            ),
            (
                RuleId::Method5,
                plain("For this purpose, each pixel of each mandibular tooth is assigned a color according to its importance for the chronological age estimation."),
            ),
        ]),
    }
}

pub fn default_spanish() -> LanguageLexicon {
    LanguageLexicon {
        subject: BTreeMap::from([
            (PersonCategory::Child, by_sex("Una niña", "Un niño")),
            (PersonCategory::Adolescent, by_sex("Una adolescente", "Un adolescente")),
            (PersonCategory::Adult, by_sex("Una mujer adulta", "Un hombre adulto")),
        ]),
        pronoun: by_sex("ella", "él"),
        dentition: BTreeMap::from([
            (Dentition::Deciduous, s("temporal")),
            (Dentition::Mixed, s("mixta")),
            (Dentition::Permanent, s("permanente")),
        ]),
        count_short: BTreeMap::from([
            (CountLabel::None, s("no tiene ningún diente completamente formado")),
            (CountLabel::Few, s("tiene pocos dientes completamente formados")),
            (CountLabel::Most, s("tiene la mayoría de los dientes completamente formados")),
            (CountLabel::All, s("tiene todos los dientes completamente formados")),
        ]),
        count_detailed: BTreeMap::from([
            (CountLabel::None, s("no tiene ningún diente completamente formado")),
            (CountLabel::Few, s("tiene pocos dientes completamente formados")),
            (CountLabel::Most, s("tiene la mayoría de los dientes completamente formados")),
            (CountLabel::All, s("tiene todos los dientes completamente formados")),
        ]),
        apex: BTreeMap::from([
            (ApexLabel::CompletelyClosed, s("completamente cerrado")),
            (ApexLabel::FairlyClosed, s("bastante cerrado")),
            (ApexLabel::FairlyOpen, s("algo abierto")),
            (ApexLabel::QuiteOpen, s("bastante abierto")),
        ]),
        reliability: BTreeMap::from([
            (ReliabilityLabel::Low, s("baja")),
            (ReliabilityLabel::Normal, s("normal")),
            (ReliabilityLabel::High, s("alta")),
        ]),
        direction: DirectionWords {
            overestimation: s("sobreestimación"),
            underestimation: s("subestimación"),
        },
        year: forms("año", "años"),
        month: forms("mes", "meses"),
        day: forms("día", "días"),
        unit_conjunction: s("y"),
        tooth_item: s("la {tooth}"),
        list_separator: s(", "),
        list_conjunction: s(" y "),
        templates: BTreeMap::from([
            (
                RuleId::Intro,
                plain("{subject} con una edad cronológica real de {real_age} debería presentar dentición {dentition}."),
            ),
            (
                RuleId::ShortEstimate,
                plain("La edad cronológica estimada es de {estimated_age} porque {count} en el cuadrante mandibular derecho y el ápice del segundo premolar mandibular derecho está {apex}."),
            ),
            (
                RuleId::DetailedEstimate,
                plain("La edad cronológica estimada, de acuerdo con el método de Vila-Blanco et al., es de {estimated_age} porque {count} ({developed} de {total}) en el cuadrante mandibular derecho y el ápice del segundo premolar mandibular derecho ({apex_tooth}) está {apex}."),
            ),
            (RuleId::RealAge, plain("La edad cronológica real es {real_age}.")),
            (
                RuleId::ErrorDirectional,
                plain("Por tanto, existe una {direction} ({magnitude}) con respecto a la edad real."),
            ),
            (RuleId::ErrorAccurate, plain("Por tanto, la estimación es precisa.")),
            (
                RuleId::ReliabilityLevel,
                counted(
                    "La fiabilidad de esta estimación es {reliability}, siendo la pieza dental más predictiva {teeth}.",
                    "La fiabilidad de esta estimación es {reliability}, siendo las piezas dentales más predictivas {teeth}.",
                ),
            ),
            (
                RuleId::PredictiveTeeth,
                counted(
                    "La pieza dental más predictiva es {teeth}.",
                    "Las piezas dentales más predictivas son {teeth}.",
                ),
            ),
            (
                RuleId::Method1,
                plain("La estimación de la edad del paciente se ha realizado utilizando el método de Vila-Blanco et al., una aproximación automática basada en aprendizaje profundo."),
            ),
            (
                RuleId::Method2,
                plain("Esta metodología detecta los dientes del paciente en su OPG y calcula las distribuciones probabilísticas asociadas a la edad cronológica de cada diente."),
            ),
            (
                RuleId::Method3,
                plain("La edad del paciente se estima mediante la agregación de las edades de sus piezas dentales."),
            ),
            (
                RuleId::Method4,
                plain("Con la información inferida por el método automático se puede construir un mapa de calor sobre la OPG correspondiente, tal y como se ve en la figura mostrada."),
            ),
            (
                RuleId::Method5,
                plain("Para ello, se le otorga un color a cada píxel de cada diente mandibular dependiendo de su importancia para la estimación de la edad cronológica."),
            ),
        ]),
    }
}

/// Lexicons of every supported language.
pub fn default_lexicons() -> BTreeMap<Language, LanguageLexicon> {
    BTreeMap::from([(Language::En, default_english()), (Language::Es, default_spanish())])
}
