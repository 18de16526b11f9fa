use std::io::Write;
use std::path::Path;

use chrono::Duration;
use needfinder_core::evaluate::PvScoreSeries;
use needfinder_core::io;
use needfinder_core::learn::{default_baseline, derive_stopwords, score_day, Hyperparams, ReportStatus, StopwordSet};
use needfinder_core::pipeline::{
    evaluate_reports, read_reports_dir, report_file_name, run_demo, write_series, write_sidecar, MetricsDocument,
};
use needfinder_core::prepare::{prepare_counts, PrepareOptions, RegionSpec};
use needfinder_core::provenance::Provenance;
use needfinder_core::render::render_report;
use needfinder_core::scenario::{generate_scenario, presets, GroundTruth, ScenarioConfig};
use needfinder_core::time::{parse_offset, DateInterval};
use needfinder_core::Error;
use serde::Serialize;

use crate::config::*;
use crate::CliError;

fn load_scenario(path: Option<&Path>) -> Result<ScenarioConfig, CliError> {
    let cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            ScenarioConfig::from_json(&text).map_err(|e| match e {
                Error::Malformed { message, .. } => Error::malformed(p.display().to_string(), message),
                other => other,
            })?
        }
        None => presets::demo(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let mut w = io::create(path)?;
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn hyper(lambda: f64, seed: u64) -> Hyperparams {
    Hyperparams { l2_lambda: lambda, seed, ..Hyperparams::default() }
}

pub fn generate(p: GenerateParams) -> Result<(), CliError> {
    let out = required(p.out.clone(), "generate", "out")?;
    let mut cfg = load_scenario(p.scenario.as_deref())?;
    if let Some(seed) = p.seed {
        cfg.seed = seed;
    }
    #[derive(Serialize)]
    struct Effective<'a> {
        #[serde(flatten)]
        params: &'a GenerateParams,
        effective_scenario: &'a ScenarioConfig,
    }
    let provenance = Provenance::new("generate", &Effective { params: &p, effective_scenario: &cfg });
    let world = generate_scenario(&cfg)?;

    io::write_json(&out.join("scenario.json"), &cfg)?;
    io::write_json(&out.join("region.json"), &cfg.region)?;
    io::write_pings(&out.join("pings.csv"), &world.logs)?;
    io::write_searches(&out.join("searches.csv"), &world.logs)?;
    io::write_pv(&out.join("pv.csv"), &world.pv)?;
    for name in ["pings.csv", "searches.csv", "pv.csv"] {
        write_sidecar(&out.join(name), &provenance)?;
    }
    #[derive(Serialize)]
    struct TruthDoc<'a> {
        #[serde(flatten)]
        truth: &'a GroundTruth,
        provenance: &'a Provenance,
    }
    io::write_json(&out.join("truth.json"), &TruthDoc { truth: &world.truth, provenance: &provenance })?;
    eprintln!(
        "generated {} pings and {} searches for {} users into {}",
        world.logs.pings.len(),
        world.logs.searches.len(),
        world.logs.n_users_in + world.logs.n_users_out,
        out.display()
    );
    Ok(())
}

pub fn prepare(p: PrepareParams) -> Result<(), CliError> {
    let pings_path = required(p.pings.clone(), "prepare", "pings")?;
    let searches_path = required(p.searches.clone(), "prepare", "searches")?;
    let region_path = required(p.region.clone(), "prepare", "region")?;
    if p.k == 0 {
        return Err(Error::config("k", "must be >= 1").into());
    }
    if p.window_min <= 0 {
        return Err(Error::config("window_min", "must be > 0").into());
    }
    let tz = parse_offset(&p.tz)?;
    let region: RegionSpec = io::read_json(&region_path)?;
    region.validate()?;
    let pings = io::read_pings(&pings_path)?;
    let searches = io::read_searches(&searches_path)?;

    let opts = PrepareOptions { k: p.k, window: Duration::minutes(p.window_min), tz };
    let (rows, stats) = prepare_counts(&pings, &searches, &region, &opts);
    io::write_counts(&p.out, &rows)?;
    write_sidecar(&p.out, &Provenance::new("prepare", &p))?;
    eprintln!("{}", serde_json::to_string(&stats).expect("stats serialize"));
    Ok(())
}

pub fn stopwords(p: StopwordsParams) -> Result<(), CliError> {
    let counts = required(p.counts.clone(), "stopwords", "counts")?;
    let baseline = match (p.baseline_start, p.baseline_end, p.event_day) {
        (Some(start), Some(end), _) => DateInterval::new(start, end),
        (None, None, Some(event)) => default_baseline(event)?,
        _ => {
            return Err(CliError::Usage(
                "stopwords: give both --baseline-start and --baseline-end, or --event-day".into(),
            ))
        }
    };
    let rows = io::read_counts(&counts)?;
    let mut set = derive_stopwords(&rows, baseline, p.event_day, &hyper(p.lambda, p.seed), p.top_m, p.floor)?;
    set.provenance = Some(Provenance::new("stopwords", &p));
    io::write_json(&p.out, &set)?;
    eprintln!("{} stopwords from {} to {}", set.len(), baseline.start, baseline.end);
    Ok(())
}

pub fn score(p: ScoreParams) -> Result<(), CliError> {
    let counts = required(p.counts.clone(), "score", "counts")?;
    let date = required(p.date, "score", "date")?;
    let stopwords = match &p.stopwords {
        Some(path) => io::read_json(path)?,
        None => StopwordSet::empty(),
    };
    let rows = io::read_counts(&counts)?;
    let mut report = score_day(date, &rows, &stopwords, &hyper(p.lambda, p.seed), p.top)?;
    report.provenance = Some(Provenance::new("score", &p));
    let out = p.out.clone().unwrap_or_else(|| report_file_name(date).into());
    io::write_json(&out, &report)?;
    match report.status {
        ReportStatus::Ok => Ok(()),
        ReportStatus::Untrainable => Err(CliError::Untrainable(date)),
    }
}

pub fn eval(p: EvalParams) -> Result<(), CliError> {
    let reports_dir = required(p.reports.clone(), "eval", "reports")?;
    let truth_path = required(p.truth.clone(), "eval", "truth")?;
    let pv_path = required(p.pv.clone(), "eval", "pv")?;
    if p.n == 0 {
        return Err(Error::config("n", "must be >= 1").into());
    }
    let reports = read_reports_dir(&reports_dir)?;
    let truth: GroundTruth = io::read_json(&truth_path)?;
    let pv = io::read_pv(&pv_path)?;
    let eval = evaluate_reports(&reports, &truth, &pv, p.n)?;
    let doc = MetricsDocument {
        recovery: eval.recovery,
        pv_series: eval.pv.points,
        provenance: Some(Provenance::new("eval", &p)),
    };
    io::write_json(&p.out, &doc)?;
    if p.out.as_os_str() != "-" {
        let series = p.out.with_file_name("series.csv");
        write_series(&series, &reports, &truth, &PvScoreSeries { points: doc.pv_series.clone() })?;
        write_sidecar(&series, doc.provenance.as_ref().expect("set above"))?;
    }
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3}"));
    eprintln!(
        "precision@{n} {} recall@{n} {} over {} days",
        fmt(doc.recovery.mean_precision),
        fmt(doc.recovery.mean_recall),
        doc.recovery.days.len(),
        n = doc.recovery.n,
    );
    Ok(())
}

pub fn report(p: ReportParams) -> Result<(), CliError> {
    let path = required(p.report.clone(), "report", "report")?;
    let report: needfinder_core::learn::NeedReport = io::read_json(&path)?;
    let text = render_report(&report);
    match &p.out {
        Some(out) => write_text(out, &text),
        None => write_text(Path::new("-"), &text),
    }
}

pub fn demo(p: DemoParams) -> Result<(), CliError> {
    let cfg = load_scenario(p.scenario.as_deref())?;
    let summary = run_demo(&cfg, &p.out, &p.options)?;
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3}"));
    let untrainable = summary.reports.iter().filter(|r| r.status == ReportStatus::Untrainable).count();
    eprintln!("wrote {}", summary.out_dir.display());
    eprintln!("  count rows       {}", summary.prepare.rows_after_k);
    eprintln!("  stopwords        {}", summary.stopwords.len());
    eprintln!("  reports          {} ({} untrainable)", summary.reports.len(), untrainable);
    eprintln!("  precision@{:<6} {}", summary.recovery.n, fmt(summary.recovery.mean_precision));
    eprintln!("  recall@{:<9} {}", summary.recovery.n, fmt(summary.recovery.mean_recall));
    Ok(())
}
