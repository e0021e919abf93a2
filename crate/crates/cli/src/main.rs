use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use dentalage_client::{Client, ClientError};
use dentalage_core::controller::{cohort_stats, fit_surrogate_report, report_for, ReportDocument, ReportRequest};
use dentalage_core::domain::ToothId;
use dentalage_core::nlg::{Language, ReportKind};
use dentalage_core::store::{fixture_patients, load_coefficients, load_patients, CoefficientsStore, PatientStore};
use dentalage_core::surrogate::{generate_cohort, DEFAULT_SEED};
use dentalage_core::Error;
use dentalage_service::AppState;

#[derive(Parser)]
#[command(name = "dentalage", version, about = "Dental age estimation reports")]
struct Cli {
    /// Patients file; the four bundled fixture patients when omitted.
    #[arg(long, global = true)]
    patients: Option<PathBuf>,
    /// Coefficients file; the shipped defaults when omitted.
    #[arg(long, global = true)]
    coefficients: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a patient report.
    Report {
        #[arg(long)]
        id: String,
        #[arg(long, default_value = "en")]
        lang: String,
        #[arg(long, default_value = "detailed")]
        detail: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Fetch the report from a running service instead of computing it.
        #[arg(long)]
        server: Option<String>,
    },
    /// Per-tooth σ summary and correlation table over the cohort.
    Stats {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Correlations of ratio and CSM against μ and σ.
    Correlate {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Fit the linear CSM surrogate for one tooth.
    FitSurrogate {
        #[arg(long, default_value = "45")]
        tooth: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check every record of the patients file.
    Validate,
    /// Generate a seeded synthetic cohort in the patients file format.
    Synth {
        #[arg(long, default_value_t = 125)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve reports over HTTP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
    },
}

enum Failure {
    Core(Error),
    Client(ClientError),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn report(&self) -> i32 {
        match self {
            Failure::Core(e) => {
                eprintln!("error[{}]: {e}", e.qualified_code());
                if let Error::SchemaViolation(records) = e {
                    for r in records {
                        for v in &r.violations {
                            eprintln!("  record {}: {v}", r.record_id);
                        }
                    }
                }
                e.exit_code()
            }
            Failure::Client(e) => {
                eprintln!("error[{}]: {e}", e.code().unwrap_or("TRANSPORT"));
                match e {
                    ClientError::Api { status, .. } if (400..500).contains(status) => 2,
                    _ => 1,
                }
            }
            Failure::Io(msg) => {
                eprintln!("error[IO_ERROR]: {msg}");
                1
            }
        }
    }
}

fn patients(path: Option<&Path>) -> Result<PatientStore, Error> {
    match path {
        Some(p) => load_patients(p),
        None => Ok(fixture_patients()),
    }
}

fn coefficients(path: Option<&Path>) -> Result<CoefficientsStore, Error> {
    match path {
        Some(p) => load_coefficients(p),
        None => Ok(CoefficientsStore::shipped()),
    }
}

fn report_text(doc: &ReportDocument) -> String {
    doc.to_text_with_paths()
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serialisable output");
    s.push('\n');
    s
}

fn runtime() -> Result<tokio::runtime::Runtime, Failure> {
    tokio::runtime::Runtime::new().map_err(|e| Failure::Io(e.to_string()))
}

fn run(cli: Cli) -> Result<String, Failure> {
    let patients_path = cli.patients.as_deref();
    let coefficients_path = cli.coefficients.as_deref();
    match cli.command {
        Command::Report {
            id,
            lang,
            detail,
            format,
            server,
        } => {
            let language: Language = lang.parse()?;
            let detail: ReportKind = detail.parse()?;
            if let Some(url) = server {
                let client = Client::new(url);
                let rt = runtime()?;
                let body = rt
                    .block_on(client.report_bytes(&id, language, detail))
                    .map_err(Failure::Client)?;
                return match format {
                    Format::Structured => Ok(String::from_utf8_lossy(&body).into_owned() + "\n"),
                    Format::Text => {
                        let doc: ReportDocument = serde_json::from_slice(&body)
                            .map_err(|e| Failure::Io(format!("malformed service response: {e}")))?;
                        Ok(report_text(&doc))
                    }
                };
            }
            let store = patients(patients_path)?;
            let coeffs = coefficients(coefficients_path)?;
            let request = ReportRequest {
                patient_id: id,
                language,
                detail,
            };
            let doc = report_for(&store, &coeffs, &request)?;
            Ok(match format {
                Format::Text => report_text(&doc),
                Format::Structured => json(&doc),
            })
        }
        Command::Stats { format } => {
            let stats = cohort_stats(&patients(patients_path)?.to_vec())?;
            Ok(match format {
                Format::Text => format!(
                    "patients: {}\n\nuncertainty (days)\n{}\ncorrelations\n{}",
                    stats.patients,
                    stats.uncertainty_text(),
                    stats.correlation_text()
                ),
                Format::Structured => json(&stats),
            })
        }
        Command::Correlate { format } => {
            let stats = cohort_stats(&patients(patients_path)?.to_vec())?;
            Ok(match format {
                Format::Text => stats.correlation_text(),
                Format::Structured => json(&stats.correlations),
            })
        }
        Command::FitSurrogate { tooth, format } => {
            let tooth: ToothId = tooth.parse()?;
            let report = fit_surrogate_report(&patients(patients_path)?.to_vec(), tooth)?;
            Ok(match format {
                Format::Text => report.to_text(),
                Format::Structured => json(&report),
            })
        }
        Command::Validate => {
            let store = patients(patients_path)?;
            coefficients(coefficients_path)?;
            Ok(format!("ok: {} records valid\n", store.len()))
        }
        Command::Synth { n, seed, out } => {
            let coeffs = coefficients(coefficients_path)?;
            let cohort = generate_cohort(n, seed, &coeffs.synthetic, &coeffs.table.reliability_fuzzy);
            let store = PatientStore::from_records(cohort.records, out.clone().unwrap_or_default())?;
            match out {
                Some(path) => {
                    store.save(&path)?;
                    Ok(format!("wrote {} records to {}\n", store.len(), path.display()))
                }
                None => Ok(store.to_json()),
            }
        }
        Command::Serve { bind } => {
            let state = Arc::new(AppState {
                patients: patients(patients_path)?,
                coefficients: coefficients(coefficients_path)?,
            });
            tracing_subscriber::fmt().with_writer(std::io::stderr).init();
            let rt = runtime()?;
            rt.block_on(async {
                let listener = dentalage_service::bind(&bind)
                    .await
                    .map_err(|e| Failure::Io(format!("cannot bind {bind}: {e}")))?;
                if let Ok(addr) = listener.local_addr() {
                    eprintln!("listening on http://{addr}");
                }
                dentalage_service::serve(listener, state)
                    .await
                    .map_err(|e| Failure::Io(e.to_string()))
            })?;
            Ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(f) => ExitCode::from(f.report() as u8),
    }
}
