//! Patient and coefficients files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::{validate_record, AgeBands, CameriereCoefficients, CoefficientsTable, PatientRecord};
use crate::error::{Error, RecordViolations, Result};
use crate::nlg::lexicon::{default_lexicons, LanguageLexicon};
use crate::nlg::{Language, NlgResources};
use crate::reliability::fuzzy::{LabelCutpoints, QuantifierConfig};
use crate::reliability::PopulationUncertaintyStats;
use crate::surrogate::SyntheticParams;

/// The coefficients file shipped with the crate.
pub const DEFAULT_COEFFICIENTS_JSON: &str = include_str!("../data/coefficients.json");
/// Four worked patients used by the report fixtures.
pub const FIXTURE_PATIENTS_JSON: &str = include_str!("../data/patients.json");

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_error(path: &Path, e: serde_json::Error) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// SHA-256 of a file's bytes.
pub fn file_checksum(path: &Path) -> Result<String> {
    fs::read(path).map(|b| sha256_hex(&b)).map_err(|e| io_error(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatientStore {
    pub records: BTreeMap<String, PatientRecord>,
    pub source_path: PathBuf,
}

impl PatientStore {
    /// `None` for an unknown id.
    pub fn get(&self, id: &str) -> Option<&PatientRecord> {
        self.records.get(id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_vec(&self) -> Vec<PatientRecord> {
        self.records.values().cloned().collect()
    }

    pub fn to_json(&self) -> String {
        let records: Vec<&PatientRecord> = self.records.values().collect();
        let mut s = serde_json::to_string_pretty(&records).expect("records serialise");
        s.push('\n');
        s
    }

    /// SHA-256 of the canonical serialisation of the loaded records.
    pub fn checksum(&self) -> String {
        sha256_hex(self.to_json().as_bytes())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| io_error(path, e))
    }

    /// Builds a store from records, enforcing unique ids and valid records.
    pub fn from_records(records: Vec<PatientRecord>, source_path: PathBuf) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut invalid = Vec::new();
        for record in records {
            let violations = validate_record(&record);
            if !violations.is_empty() {
                invalid.push(RecordViolations {
                    record_id: record.id.clone(),
                    violations,
                });
            }
            if map.contains_key(&record.id) {
                return Err(Error::DuplicateId(record.id));
            }
            map.insert(record.id.clone(), record);
        }
        if !invalid.is_empty() {
            return Err(Error::SchemaViolation(invalid));
        }
        Ok(PatientStore {
            records: map,
            source_path,
        })
    }
}

/// Parses a patients document without validating the records.
pub fn parse_patients(text: &str, path: &Path) -> Result<Vec<PatientRecord>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    serde_json::from_str(text).map_err(|e| parse_error(path, e))
}

pub fn load_patients(path: &Path) -> Result<PatientStore> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    PatientStore::from_records(parse_patients(&text, path)?, path.to_path_buf())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AggregationSection {
    penalty_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClusteringSection {
    eps_years: f64,
}

/// On-disk layout of the coefficients file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientsFile {
    cameriere: CameriereCoefficients,
    aggregation: AggregationSection,
    clustering: ClusteringSection,
    population_stats: PopulationUncertaintyStats,
    quantifiers: QuantifierConfig,
    reliability_labels: LabelCutpoints,
    age_bands: AgeBands,
    lexicons: BTreeMap<Language, LanguageLexicon>,
    disclaimer: BTreeMap<Language, String>,
    synthetic_cohort: SyntheticParams,
}

/// Every constant, word and template the engine reads at run time.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientsStore {
    pub table: CoefficientsTable,
    pub nlg: NlgResources,
    pub synthetic: SyntheticParams,
}

fn default_disclaimers() -> BTreeMap<Language, String> {
    BTreeMap::from([
        (
            Language::En,
            "This report was automatically generated by an AI system.".to_string(),
        ),
        (
            Language::Es,
            "Este informe ha sido generado automáticamente por un sistema de inteligencia artificial."
                .to_string(),
        ),
    ])
}

impl Default for CoefficientsStore {
    fn default() -> Self {
        CoefficientsStore {
            table: CoefficientsTable {
                penalty_p: 1.0,
                dbscan_eps_years: 0.03,
                ..CoefficientsTable::default()
            },
            nlg: NlgResources {
                lexicons: default_lexicons(),
                disclaimers: default_disclaimers(),
            },
            synthetic: SyntheticParams::default(),
        }
    }
}

fn constraint(field: &str, message: &str) -> Error {
    Error::ConstraintViolation {
        field: field.to_string(),
        message: message.to_string(),
    }
}

impl CoefficientsStore {
    /// The shipped defaults, read from the embedded coefficients file.
    pub fn shipped() -> Self {
        parse_coefficients(DEFAULT_COEFFICIENTS_JSON, Path::new("<shipped coefficients>"))
            .expect("shipped coefficients file is valid")
    }

    fn to_file(&self) -> CoefficientsFile {
        let t = &self.table;
        CoefficientsFile {
            cameriere: t.cameriere,
            aggregation: AggregationSection {
                penalty_p: t.penalty_p,
            },
            clustering: ClusteringSection {
                eps_years: t.dbscan_eps_years,
            },
            population_stats: t.reliability_fuzzy.clone(),
            quantifiers: t.quantifiers.clone(),
            reliability_labels: t.reliability_labels,
            age_bands: t.age_bands,
            lexicons: self.nlg.lexicons.clone(),
            disclaimer: self.nlg.disclaimers.clone(),
            synthetic_cohort: self.synthetic.clone(),
        }
    }

    fn from_file(f: CoefficientsFile) -> Self {
        CoefficientsStore {
            table: CoefficientsTable {
                cameriere: f.cameriere,
                penalty_p: f.aggregation.penalty_p,
                dbscan_eps_years: f.clustering.eps_years,
                quantifiers: f.quantifiers,
                reliability_labels: f.reliability_labels,
                reliability_fuzzy: f.population_stats,
                age_bands: f.age_bands,
            },
            nlg: NlgResources {
                lexicons: f.lexicons,
                disclaimers: f.disclaimer,
            },
            synthetic: f.synthetic_cohort,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("coefficients serialise");
        s.push('\n');
        s
    }

    pub fn checksum(&self) -> String {
        sha256_hex(self.to_json().as_bytes())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| io_error(path, e))
    }

    /// Checks every numeric and structural constraint, naming the first
    /// offending field.
    pub fn check(&self) -> Result<()> {
        let t = &self.table;
        let c = &t.cameriere;
        if [c.intercept, c.coef_g, c.coef_csm45, c.coef_n0, c.coef_s, c.coef_s_n0]
            .iter()
            .any(|v| !v.is_finite())
        {
            return Err(constraint("cameriere", "coefficients must be finite"));
        }
        if !(t.penalty_p.is_finite() && t.penalty_p > 0.0) {
            return Err(constraint("aggregation.penalty_p", "must be finite and > 0"));
        }
        if !(t.dbscan_eps_years.is_finite() && t.dbscan_eps_years > 0.0) {
            return Err(constraint("clustering.eps_years", "must be finite and > 0"));
        }
        if t.reliability_fuzzy.per_tooth.is_empty() {
            return Err(constraint("population_stats", "needs at least one tooth"));
        }
        for (tooth, u) in &t.reliability_fuzzy.per_tooth {
            if !tooth.is_posterior_mandibular() {
                return Err(constraint(
                    &format!("population_stats.{tooth}"),
                    "only posterior mandibular teeth",
                ));
            }
            if !(u.mean_days.is_finite() && u.mean_days > 0.0 && u.std_days.is_finite() && u.std_days > 0.0)
            {
                return Err(constraint(
                    &format!("population_stats.{tooth}"),
                    "mean_days and std_days must be > 0",
                ));
            }
        }
        t.quantifiers.reliability.check("quantifiers.reliability")?;
        t.quantifiers.count.check()?;
        t.quantifiers.apex.check()?;
        let l = t.reliability_labels;
        if !(0.0 <= l.low_below && l.low_below <= l.high_above && l.high_above <= 1.0) {
            return Err(constraint(
                "reliability_labels",
                "need 0 <= low_below <= high_above <= 1",
            ));
        }
        let b = t.age_bands;
        if !(b.mixed_from_years > 0.0
            && b.mixed_from_years <= b.permanent_from_years
            && b.adolescent_from_years > 0.0
            && b.adolescent_from_years <= b.adult_from_years)
        {
            return Err(constraint("age_bands", "thresholds must be positive and ordered"));
        }
        for lang in Language::ALL {
            let lex = self
                .nlg
                .lexicons
                .get(&lang)
                .ok_or_else(|| constraint(&format!("lexicons.{lang}"), "missing language"))?;
            lex.check(lang)?;
            if self.nlg.disclaimers.get(&lang).is_none_or(|d| d.trim().is_empty()) {
                return Err(constraint(&format!("disclaimer.{lang}"), "missing disclaimer"));
            }
        }
        self.synthetic.check()
    }
}

pub fn parse_coefficients(text: &str, path: &Path) -> Result<CoefficientsStore> {
    let file: CoefficientsFile = serde_json::from_str(text).map_err(|e| parse_error(path, e))?;
    let store = CoefficientsStore::from_file(file);
    store.check()?;
    Ok(store)
}

pub fn load_coefficients(path: &Path) -> Result<CoefficientsStore> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_coefficients(&text, path)
}

/// The shipped fixture patients.
pub fn fixture_patients() -> PatientStore {
    let path = PathBuf::from("<fixture patients>");
    let records = parse_patients(FIXTURE_PATIENTS_JSON, &path).expect("fixture file parses");
    PatientStore::from_records(records, path).expect("fixture file is valid")
}
