//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;

use dentalage_core::controller::{generate_report, ReportDocument};
use dentalage_core::domain::{
    age_to_years_months, CameriereCoefficients, Sex, ToothId, ToothMeasurement, ToothPrediction, DAYS_PER_YEAR,
};
use dentalage_core::estimate::{aggregate_opaque, aggregation_weights, cameriere_age, classify_error, CameriereInputs, ErrorDirection};
use dentalage_core::nlg::planner::{developed_count, error_magnitude};
use dentalage_core::nlg::{Language, Magnitude, ReportKind, SlotValue};
use dentalage_core::reliability::{assess_reliability, most_predictive_teeth};
use dentalage_core::store::{file_checksum, load_coefficients, load_patients, CoefficientsStore};
use dentalage_core::surrogate::{
    correlation_table, fit_surrogate, evaluate_regressor, generate_cohort, AffineCsmRule, SyntheticParams, DEFAULT_SEED,
};
use dentalage_service::AppState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

const IDS: [&str; 4] = ["2102", "2324", "3117", "4050"];

fn core_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core")
}

fn patients_path() -> PathBuf {
    core_dir().join("data/patients.json")
}

fn coefficients_path() -> PathBuf {
    core_dir().join("data/coefficients.json")
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(core_dir().join("tests/golden/reference").join(name)).unwrap()
}

/// Whitespace collapsed per paragraph, every paragraph ending in a full stop.
fn normalize(text: &str) -> String {
    text.split("\n\n")
        .map(|p| p.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|p| !p.is_empty())
        .map(|p| if p.ends_with(['.', '!', '?']) { p } else { p + "." })
        .collect::<Vec<_>>()
        .join("\n\n")
}

fn cli(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_dentalage"))
        .arg("--patients")
        .arg(patients_path())
        .arg("--coefficients")
        .arg(coefficients_path())
        .args(args)
        .output()
        .map_err(|e| e.to_string())
}

fn cli_report(id: &str, lang: Language, kind: ReportKind) -> Result<ReportDocument, String> {
    let o = cli(&["report", "--id", id, "--lang", lang.as_str(), "--detail", kind.as_str(), "--format", "structured"])?;
    ensure!(o.status.success(), "cli exited {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())
}

fn compare(label: &str, got: &str, want: &str) -> Result<(), String> {
    let (g, w) = (normalize(got), normalize(want));
    if g == w {
        Ok(())
    } else {
        Err(format!("{label} differs:\n  got:  {g:?}\n  want: {w:?}"))
    }
}

fn criterion_1() -> Outcome {
    let doc = cli_report("2324", Language::En, ReportKind::Detailed)?;
    compare("introduction", &doc.introduction, &golden("en_intro.txt"))?;
    compare("body", &doc.body, &golden("en_detailed.txt"))?;
    for needle in [
        "overestimation (7 months)",
        "reliability of this estimate is high",
        "most predictive teeth being 44 and 37",
    ] {
        ensure!(doc.body.contains(needle), "missing {needle:?}");
    }
    Ok("intro and three body paragraphs equal after normalization".into())
}

fn criterion_2() -> Outcome {
    let doc = cli_report("2324", Language::Es, ReportKind::Detailed)?;
    compare("introduction", &doc.introduction, &golden("es_intro.txt"))?;
    compare("body", &doc.body, &golden("es_detailed.txt"))?;
    ensure!(doc.body.contains("existe una sobreestimación (7 meses)"), "missing sobreestimación");
    Ok("intro and three body paragraphs equal after normalization".into())
}

fn criterion_3() -> Outcome {
    let en = cli_report("2324", Language::En, ReportKind::Short)?;
    compare("en intro", &en.introduction, &golden("en_intro.txt"))?;
    compare("en short", &en.body, &golden("en_short.txt"))?;
    let es = cli_report("2324", Language::Es, ReportKind::Short)?;
    compare("es intro", &es.introduction, &golden("es_intro.txt"))?;
    compare("es short", &es.body, &golden("es_short.txt"))?;
    ensure!(es.body.contains("bastante abierto"), "missing bastante abierto");
    Ok("en and es short descriptions equal".into())
}

fn random_predictions(rng: &mut ChaCha8Rng) -> BTreeMap<ToothId, ToothPrediction> {
    let n = rng.random_range(1..=10);
    let mut teeth = ToothId::POSTERIOR_MANDIBULAR.to_vec();
    let mut out = BTreeMap::new();
    for _ in 0..n {
        let t = teeth.swap_remove(rng.random_range(0..teeth.len()));
        out.insert(
            t,
            ToothPrediction {
                mu_days: rng.random_range(500.0..7000.0),
                sigma_days: rng.random_range(20.0..1000.0),
            },
        );
    }
    out
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut convergence_cases = 0;
    for case in 0..10_000 {
        let preds = random_predictions(&mut rng);
        let p = [0.5, 1.0, 2.0, 3.0][case % 4];
        let w = aggregation_weights(&preds, p).map_err(|e| e.to_string())?;
        let sum: f64 = w.values().sum();
        ensure!((sum - 1.0).abs() <= 1e-12, "case {case}: weights sum to {sum}");

        let y = aggregate_opaque(&preds, p).map_err(|e| e.to_string())?.age_days;
        let lo = preds.values().map(|q| q.mu_days).fold(f64::INFINITY, f64::min);
        let hi = preds.values().map(|q| q.mu_days).fold(f64::NEG_INFINITY, f64::max);
        ensure!(lo <= y && y <= hi, "case {case}: {y} outside [{lo}, {hi}]");

        let c: f64 = rng.random_range(0.1..10.0);
        let scaled: BTreeMap<_, _> = preds
            .iter()
            .map(|(t, q)| (*t, ToothPrediction { mu_days: q.mu_days, sigma_days: q.sigma_days * c }))
            .collect();
        let ws = aggregation_weights(&scaled, p).map_err(|e| e.to_string())?;
        for (t, v) in &w {
            ensure!((v - ws[t]).abs() <= 1e-12, "case {case}: weight of {t} not scale invariant");
        }
        let ys = aggregate_opaque(&scaled, p).map_err(|e| e.to_string())?.age_days;
        ensure!((y - ys).abs() <= 1e-12 * hi, "case {case}: estimate moved by {}", (y - ys).abs());

        for (a, pa) in &preds {
            for (b, pb) in &preds {
                if pa.sigma_days < pb.sigma_days {
                    ensure!(w[a] >= w[b], "case {case}: weight not monotone in sigma");
                }
            }
        }

        let mut sigmas: Vec<(f64, f64)> = preds.values().map(|q| (q.sigma_days, q.mu_days)).collect();
        sigmas.sort_by(|a, b| a.0.total_cmp(&b.0));
        if sigmas.len() >= 2 && sigmas[1].0 >= 2.0 * sigmas[0].0 {
            convergence_cases += 1;
            let y = aggregate_opaque(&preds, 60.0).map_err(|e| e.to_string())?.age_days;
            ensure!((y - sigmas[0].1).abs() <= 1.0, "case {case}: large p gives {y}, want {}", sigmas[0].1);
        }
    }
    ensure!(convergence_cases >= 100, "only {convergence_cases} convergence cases");
    Ok(format!("10000 instances, {convergence_cases} with sigma ratio >= 2"))
}

fn criterion_5() -> Outcome {
    let coeffs = CameriereCoefficients::default();
    let direct = |g: f64, csm45: f64, n0: f64, s: f64| {
        8.971 + 0.357 * g + 1.631 * csm45 + 0.674 * n0 - 1.034 * s - 0.176 * s * n0
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut evaluated = 0;
    while evaluated < 1000 {
        let sex = if rng.random_bool(0.5) { Sex::Male } else { Sex::Female };
        let mut teeth = BTreeMap::new();
        for pos in 1..=7u8 {
            if pos != 5 && !rng.random_bool(0.8) {
                continue;
            }
            let height = rng.random_range(80.0..220.0);
            let width = rng.random_range(60.0..130.0);
            let aperture = if rng.random_bool(0.4) { 0.0 } else { rng.random_range(0.0..0.6) * height };
            teeth.insert(
                ToothId::new(40 + pos).unwrap(),
                ToothMeasurement::from_pixels(height, width, aperture, None),
            );
        }
        let csm45 = teeth[&ToothId::T45].csm;
        let n0 = teeth.values().filter(|m| m.csm == 0.0).count() as f64;
        let s: f64 = teeth.values().map(|m| m.csm).sum();
        let want = direct(sex.indicator(), csm45, n0, s);
        match cameriere_age(sex, &teeth, &coeffs) {
            Ok(est) => {
                let got = est.age_days / DAYS_PER_YEAR;
                ensure!((got - want).abs() <= 1e-9, "engine {got} vs formula {want}");
                evaluated += 1;
            }
            Err(e) => ensure!(want <= 0.0, "engine failed ({e}) on a positive age {want}"),
        }
    }
    let eval = |g, csm45, n0, s| {
        coeffs.evaluate(&CameriereInputs { g, csm45, n0, s })
    };
    for (got, want) in [
        (eval(0.0, 0.0, 0, 0.0), 8.971),
        (eval(1.0, 0.0, 0, 0.0), 9.328),
        (eval(0.0, 0.0, 1, 0.0), 9.645),
    ] {
        ensure!((got - want).abs() <= 1e-12, "worked example {got} vs {want}");
    }
    Ok("1000 random tuples within 1e-9; worked examples 8.971 / 9.328 / 9.645".into())
}

fn criterion_6() -> Outcome {
    let real = 36525.0;
    let cases = [
        (real * (1.0 + 0.01 + 1e-11), ErrorDirection::Overestimation),
        (real * (1.0 + 0.01 - 1e-11), ErrorDirection::Accurate),
        (real * (1.0 - 0.01 - 1e-11), ErrorDirection::Underestimation),
        (real * (1.0 - 0.01 + 1e-11), ErrorDirection::Accurate),
    ];
    for (opaque, want) in cases {
        let c = classify_error(real, opaque).map_err(|e| e.to_string())?;
        let expect = if c.error_percent <= 1.0 { ErrorDirection::Accurate } else { want };
        ensure!(
            c.direction == want && c.direction == expect,
            "{opaque}: {:?} at {}%",
            c.direction,
            c.error_percent
        );
    }
    let store = load_patients(&patients_path()).map_err(|e| e.to_string())?;
    let r = store.get("2324").ok_or("fixture missing")?;
    let opaque = aggregate_opaque(&r.predictions, 1.0).map_err(|e| e.to_string())?;
    let c = classify_error(r.age_days_f64(), opaque.age_days).map_err(|e| e.to_string())?;
    ensure!(c.direction == ErrorDirection::Overestimation, "fixture is {:?}", c.direction);
    let m = error_magnitude(r.age_days_f64(), opaque.age_days).map_err(|e| e.to_string())?;
    ensure!(m == Magnitude::Months(7), "fixture magnitude {m:?}");
    Ok(format!("threshold sides hold; fixture overestimates by {:.2}% rendered as 7 months", c.error_percent))
}

/// Sorted-gap partition on integer grid indices.
fn brute_force(values: &[(ToothId, u32)], eps_steps: u32) -> Vec<Vec<ToothId>> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut out: Vec<Vec<ToothId>> = vec![vec![sorted[0].0]];
    for w in sorted.windows(2) {
        if w[1].1 - w[0].1 > eps_steps {
            out.push(Vec::new());
        }
        out.last_mut().unwrap().push(w[1].0);
    }
    out
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases = 0;
    for (eps, steps) in [(0.02, 2u32), (0.03, 3), (0.05, 5)] {
        for _ in 0..4000 {
            let n = rng.random_range(1..=8);
            let mut teeth = ToothId::POSTERIOR_MANDIBULAR.to_vec();
            let mut values = Vec::new();
            for _ in 0..n {
                let t = teeth.swap_remove(rng.random_range(0..teeth.len()));
                values.push((t, rng.random_range(100u32..=180)));
            }
            let preds: BTreeMap<_, _> = values
                .iter()
                .map(|&(t, k)| {
                    let years = f64::from(k) / 100.0;
                    (t, ToothPrediction { mu_days: 3000.0, sigma_days: years * DAYS_PER_YEAR })
                })
                .collect();
            let got = most_predictive_teeth(&preds, eps).map_err(|e| e.to_string())?;
            let want = brute_force(&values, steps);
            ensure!(got.partition == want, "eps {eps}, {values:?}: {:?} vs {want:?}", got.partition);
            ensure!(got.most_predictive == want[0], "eps {eps}: most predictive differs");
            cases += 1;
        }
    }
    Ok(format!("{cases} cases, zero mismatches"))
}

fn criterion_8() -> Outcome {
    let rule = AffineCsmRule { tooth: ToothId::T45, intercept: 0.9, w_sex: -0.05, w_ratio: -0.1, w_mu: -0.04 };
    let store = load_coefficients(&coefficients_path()).map_err(|e| e.to_string())?;
    let params = SyntheticParams { csm_noise_sd: 0.0, affine_csm_rule: Some(rule), ..store.synthetic.clone() };
    let cohort = generate_cohort(125, DEFAULT_SEED, &params, &store.table.reliability_fuzzy);
    let model = fit_surrogate(&cohort.records, ToothId::T45).map_err(|e| e.to_string())?;
    let w = model.weights;
    for (got, want) in [(w.intercept, rule.intercept), (w.w_sex, rule.w_sex), (w.w_ratio, rule.w_ratio), (w.w_mu, rule.w_mu)] {
        ensure!((got - want).abs() <= 1e-9, "weight {got} vs {want}");
    }
    let exact = evaluate_regressor(&model, &cohort.records).map_err(|e| e.to_string())?;
    ensure!(exact.r2 >= 1.0 - 1e-9, "zero-noise r2 {}", exact.r2);

    let cohort = generate_cohort(125, DEFAULT_SEED, &store.synthetic, &store.table.reliability_fuzzy);
    let model = fit_surrogate(&cohort.records, ToothId::T45).map_err(|e| e.to_string())?;
    let m = evaluate_regressor(&model, &cohort.records).map_err(|e| e.to_string())?;
    let pearson = m.pearson.ok_or("pearson absent")?;
    ensure!(m.r2 >= 0.9 && pearson >= 0.95, "mild-noise r2 {} pearson {pearson}", m.r2);
    Ok(format!("zero-noise r2 {:.12}; mild-noise r2 {:.4}, pearson {pearson:.4}", exact.r2, m.r2))
}

fn criterion_9() -> Outcome {
    let store = load_coefficients(&coefficients_path()).map_err(|e| e.to_string())?;
    let cohort = generate_cohort(125, DEFAULT_SEED, &store.synthetic, &store.table.reliability_fuzzy);
    let table = correlation_table(&cohort.records);
    let mut checked = 0;
    for (tooth, row) in &table {
        if row.samples < 10 {
            continue;
        }
        for cell in [&row.ratio_vs_mu, &row.ratio_vs_sigma, &row.csm_vs_mu, &row.csm_vs_sigma] {
            let v = cell.value.ok_or_else(|| format!("tooth {tooth}: cell absent"))?;
            ensure!(v < 0.0, "tooth {tooth}: correlation {v}");
            checked += 1;
        }
    }
    ensure!(checked == 40, "only {checked} cells checked");
    Ok("40 cells over 10 teeth, all negative".into())
}

fn criterion_10() -> Outcome {
    let s = load_coefficients(&coefficients_path()).map_err(|e| e.to_string())?;
    let c = s.table.cameriere;
    ensure!(
        [c.intercept, c.coef_g, c.coef_csm45, c.coef_n0, c.coef_s, c.coef_s_n0]
            == [8.971, 0.357, 1.631, 0.674, -1.034, -0.176],
        "cameriere constants {c:?}"
    );
    let table3 = [
        (48, 508.965, 70.659),
        (47, 467.895, 122.504),
        (46, 568.075, 125.822),
        (45, 532.535, 209.011),
        (44, 536.188, 234.078),
        (34, 586.497, 254.705),
        (35, 542.237, 214.401),
        (36, 558.984, 128.960),
        (37, 450.168, 132.235),
        (38, 500.103, 61.807),
    ];
    ensure!(s.table.reliability_fuzzy.per_tooth.len() == 10, "expected 10 teeth");
    for (code, mean, std) in table3 {
        let u = s.table.reliability_fuzzy.per_tooth.get(&ToothId::new(code).unwrap()).ok_or("tooth missing")?;
        ensure!(u.mean_days == mean && u.std_days == std, "tooth {code}: {u:?}");
    }
    ensure!(s.table.penalty_p == 1.0 && s.table.dbscan_eps_years == 0.03, "p or eps differ");
    ensure!(s == CoefficientsStore::default(), "file differs from code defaults");
    Ok("six constants and ten (mean, std) pairs exact; p = 1, eps = 0.03".into())
}

fn numbers(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_ascii_digit() || (ch == '.' && !cur.is_empty()) {
            cur.push(ch);
        } else if !cur.is_empty() {
            out.push(cur.trim_end_matches('.').to_string());
            cur.clear();
        }
    }
    if !cur.is_empty() {
        out.push(cur.trim_end_matches('.').to_string());
    }
    out
}

fn slot_numbers(value: &SlotValue) -> Vec<u32> {
    match value {
        SlotValue::Age(a) => vec![a.years, a.months],
        SlotValue::Magnitude(Magnitude::Months(m)) => vec![m / 12, m % 12],
        SlotValue::Magnitude(Magnitude::Days(d)) | SlotValue::Integer(d) => vec![*d],
        SlotValue::Tooth(t) => vec![u32::from(t.fdi_code())],
        SlotValue::Teeth(ts) => ts.iter().map(|t| u32::from(t.fdi_code())).collect(),
        _ => vec![],
    }
}

fn criterion_11() -> Outcome {
    let patients = load_patients(&patients_path()).map_err(|e| e.to_string())?;
    let coeffs = load_coefficients(&coefficients_path()).map_err(|e| e.to_string())?;
    let mut tokens = 0;
    for id in IDS {
        let record = patients.get(id).ok_or("fixture missing")?;
        let opaque = aggregate_opaque(&record.predictions, coeffs.table.penalty_p).map_err(|e| e.to_string())?;
        let reliability = assess_reliability(&record.predictions, &coeffs.table).map_err(|e| e.to_string())?;
        let (developed, total) = developed_count(record);
        let real = age_to_years_months(record.age_days_f64()).map_err(|e| e.to_string())?;
        let estimated = age_to_years_months(opaque.age_days).map_err(|e| e.to_string())?;
        let magnitude = error_magnitude(record.age_days_f64(), opaque.age_days).map_err(|e| e.to_string())?;
        for lang in Language::ALL {
            for kind in ReportKind::ALL {
                let first = generate_report(record, &coeffs, kind, lang).map_err(|e| e.to_string())?;
                for _ in 1..100 {
                    let again = generate_report(record, &coeffs, kind, lang).map_err(|e| e.to_string())?;
                    ensure!(again.to_text() == first.to_text(), "{id} {lang} {kind}: nondeterministic");
                    ensure!(again == first, "{id} {lang} {kind}: structured output differs");
                }
                ensure!(numbers(&first.disclaimer).is_empty(), "digits in disclaimer");
                for s in &first.sentences {
                    for (name, value) in &s.slots {
                        let ok = match (name.as_str(), value) {
                            ("real_age", SlotValue::Age(a)) => *a == real,
                            ("estimated_age", SlotValue::Age(a)) => *a == estimated,
                            ("magnitude", SlotValue::Magnitude(m)) => *m == magnitude,
                            ("developed", SlotValue::Integer(n)) => *n == developed,
                            ("total", SlotValue::Integer(n)) => *n == total,
                            ("apex_tooth", SlotValue::Tooth(t)) => *t == ToothId::T45,
                            ("teeth", SlotValue::Teeth(ts)) => *ts == reliability.most_predictive,
                            (_, v) => slot_numbers(v).is_empty(),
                        };
                        ensure!(ok, "{id}: slot {name} = {value:?} not traceable to inputs");
                    }
                    let template = &coeffs.nlg.lexicons[&lang].templates[&s.provenance.rule_id];
                    let mut allowed: BTreeSet<String> =
                        s.slots.values().flat_map(slot_numbers).map(|n| n.to_string()).collect();
                    allowed.extend(template.variants().into_iter().flat_map(|v| numbers(v)));
                    for token in numbers(&s.text) {
                        ensure!(allowed.contains(&token), "{id} {lang}: token {token} in {:?}", s.text);
                        tokens += 1;
                    }
                }
            }
        }
    }
    Ok(format!("1600 regenerations identical; {tokens} numeric tokens all traced"))
}

async fn criterion_12() -> Outcome {
    let patients = load_patients(&patients_path()).map_err(|e| e.to_string())?;
    let coefficients = load_coefficients(&coefficients_path()).map_err(|e| e.to_string())?;
    let before = (
        patients.checksum(),
        coefficients.checksum(),
        file_checksum(&patients_path()).map_err(|e| e.to_string())?,
        file_checksum(&coefficients_path()).map_err(|e| e.to_string())?,
    );
    let state = Arc::new(AppState { patients, coefficients });
    let addr = dentalage_service::spawn(state.clone(), "127.0.0.1:0").await.map_err(|e| e.to_string())?;
    let base = format!("http://{addr}");
    let http = reqwest::Client::new();

    for id in IDS {
        for lang in Language::ALL {
            for kind in ReportKind::ALL {
                let url = format!("{base}/patients/{id}/report?lang={lang}&detail={kind}");
                let resp = http.get(&url).send().await.map_err(|e| e.to_string())?;
                ensure!(resp.status() == 200, "{url}: {}", resp.status());
                let body = resp.bytes().await.map_err(|e| e.to_string())?;
                let doc: ReportDocument = serde_json::from_slice(&body).map_err(|e| e.to_string())?;

                let args = ["report", "--id", id, "--lang", lang.as_str(), "--detail", kind.as_str()];
                let structured = cli(&[&args[..], &["--format", "structured"]].concat())?;
                ensure!(structured.stdout == [&body[..], b"\n"].concat(), "{id} {lang} {kind}: structured bytes differ");
                let text = cli(&args)?;
                ensure!(text.stdout == doc.to_text_with_paths().into_bytes(), "{id} {lang} {kind}: text differs");
                let remote = cli(&[&args[..], &["--server", base.as_str()]].concat())?;
                ensure!(remote.stdout == text.stdout, "{id} {lang} {kind}: --server output differs");
            }
        }
    }

    let status = |url: String| {
        let http = http.clone();
        async move { http.get(url).send().await.map(|r| r.status().as_u16()).map_err(|e| e.to_string()) }
    };
    let s = status(format!("{base}/patients/0000/report")).await?;
    ensure!(s == 404, "unknown patient gave {s}");
    for q in ["detail=bogus", "lang=fr", "lang=en&extra=1"] {
        let s = status(format!("{base}/patients/2324/report?{q}")).await?;
        ensure!(s == 400, "{q} gave {s}");
    }

    let requests = (0..1000).map(|i| {
        let id = IDS[i % 4];
        let lang = Language::ALL[(i / 4) % 2];
        let kind = ReportKind::ALL[(i / 8) % 2];
        status(format!("{base}/patients/{id}/report?lang={lang}&detail={kind}"))
    });
    let results = futures::future::join_all(requests).await;
    let ok = results.iter().filter(|r| matches!(r, Ok(200))).count();
    ensure!(ok == 1000, "{ok} of 1000 concurrent requests succeeded");

    let after = (
        state.patients.checksum(),
        state.coefficients.checksum(),
        file_checksum(&patients_path()).map_err(|e| e.to_string())?,
        file_checksum(&coefficients_path()).map_err(|e| e.to_string())?,
    );
    ensure!(before == after, "store checksums changed");
    Ok("16 CLI/endpoint pairs byte-equal; 404/400 as specified; 1000 concurrent requests, checksums unchanged".into())
}

fn main() {
    let started = std::time::Instant::now();
    let rt = tokio::runtime::Runtime::new().unwrap();
    let criteria: Vec<(&str, Box<dyn FnOnce() -> Outcome>)> = vec![
        ("report fixture, English detailed", Box::new(criterion_1)),
        ("report fixture, Spanish detailed", Box::new(criterion_2)),
        ("report fixture, short in both languages", Box::new(criterion_3)),
        ("aggregation properties", Box::new(criterion_4)),
        ("Cameriere oracle", Box::new(criterion_5)),
        ("relative error threshold", Box::new(criterion_6)),
        ("clustering oracle", Box::new(criterion_7)),
        ("surrogate recovery", Box::new(criterion_8)),
        ("correlation signs", Box::new(criterion_9)),
        ("defaults fidelity", Box::new(criterion_10)),
        ("determinism and faithfulness", Box::new(criterion_11)),
        ("service conformance", Box::new(move || rt.block_on(criterion_12()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed in {:.1?}", 12 - failed, started.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
