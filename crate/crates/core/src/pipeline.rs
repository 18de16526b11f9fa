//! Stage composition: evaluation over a report directory and the end-to-end
//! demo run.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::{evaluate_recovery, pv_score, PvPoint, PvScoreSeries, RecoveryMetrics};
use crate::io;
use crate::learn::{
    default_baseline, derive_stopwords, score_day, Hyperparams, NeedReport, StopwordSet, DEFAULT_TOP_M, DEFAULT_TOP_N,
    DEFAULT_WEIGHT_FLOOR,
};
use crate::prepare::{prepare_counts, PrepareOptions, PrepareStats, DEFAULT_K, DEFAULT_WINDOW_MINUTES};
use crate::provenance::Provenance;
use crate::render::render_board;
use crate::scenario::{generate_scenario, GroundTruth, ScenarioConfig};
use crate::time::{parse_offset, DateInterval};

/// Sidecar written next to CSV artifacts, which cannot embed provenance.
pub fn provenance_sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".provenance.json");
    path.with_file_name(name)
}

pub fn write_sidecar(path: &Path, provenance: &Provenance) -> Result<()> {
    if path.as_os_str() == "-" {
        return Ok(());
    }
    io::write_json(&provenance_sidecar(path), provenance)
}

pub fn report_file_name(date: NaiveDate) -> String {
    format!("report_{date}.json")
}

/// Loads every `report_*.json` in `dir`, ordered by date.
pub fn read_reports_dir(dir: &Path) -> Result<Vec<NeedReport>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if name.starts_with("report_") && name.ends_with(".json") {
            paths.push(path);
        }
    }
    let mut reports = paths.iter().map(|p| io::read_json::<NeedReport>(p)).collect::<Result<Vec<_>>>()?;
    reports.sort_by_key(|r| r.date);
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsDocument {
    pub recovery: RecoveryMetrics,
    pub pv_series: Vec<PvPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

pub struct Evaluation {
    pub recovery: RecoveryMetrics,
    pub pv: PvScoreSeries,
}

pub fn evaluate_reports(
    reports: &[NeedReport],
    truth: &GroundTruth,
    pv: &BTreeMap<NaiveDate, u64>,
    n: usize,
) -> Result<Evaluation> {
    let recovery = evaluate_recovery(reports, truth, n)?;
    let range = match (reports.first(), reports.last()) {
        (Some(a), Some(b)) => DateInterval::new(a.date, b.date),
        _ => return Err(Error::DateMismatch("no reports".into())),
    };
    Ok(Evaluation { recovery, pv: pv_score(pv, range) })
}

/// `date, dnf:<need>..., pv_ratio, pv_ma` with empty cells for undefined values.
pub fn write_series(path: &Path, reports: &[NeedReport], truth: &GroundTruth, pv: &PvScoreSeries) -> Result<()> {
    let needs: Vec<&str> = truth.need_queries().into_iter().collect();
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(io::create(path)?);
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    let res = (|| -> csv::Result<()> {
        let mut header = vec!["date".to_string()];
        header.extend(needs.iter().map(|q| format!("dnf:{q}")));
        header.extend(["pv_ratio".into(), "pv_ma".into()]);
        w.write_record(&header)?;
        for r in reports {
            let mut rec = vec![r.date.to_string()];
            rec.extend(needs.iter().map(|q| format!("{:.6}", r.score_of(q))));
            let point = pv.get(r.date);
            rec.push(opt(point.and_then(|p| p.ratio)));
            rec.push(opt(point.and_then(|p| p.moving_average)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    })();
    res.map_err(|e| Error::malformed(path.display().to_string(), e))
}

/// Parameters of the end-to-end demo, besides the scenario itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DemoOptions {
    pub seed: u64,
    pub k: u64,
    pub window_min: i64,
    pub top: usize,
    pub lambda: f64,
    pub top_m: usize,
    pub floor: f64,
    pub n: usize,
}

impl Default for DemoOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            k: DEFAULT_K,
            window_min: DEFAULT_WINDOW_MINUTES,
            top: DEFAULT_TOP_N,
            lambda: Hyperparams::default().l2_lambda,
            top_m: DEFAULT_TOP_M,
            floor: DEFAULT_WEIGHT_FLOOR,
            n: DEFAULT_TOP_N,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct DemoConfig<'a> {
    scenario: &'a ScenarioConfig,
    options: &'a DemoOptions,
}

#[derive(Debug, Clone)]
pub struct DemoSummary {
    pub out_dir: PathBuf,
    pub prepare: PrepareStats,
    pub stopwords: StopwordSet,
    pub reports: Vec<NeedReport>,
    pub recovery: RecoveryMetrics,
    pub truth: GroundTruth,
    pub pv: PvScoreSeries,
}

/// Generates the scenario, then runs prepare, stopwords, per-day scoring and
/// evaluation, writing every artifact under `out`.
///
/// Days are scored in parallel; each uses its own date-derived RNG stream.
pub fn run_demo(scenario: &ScenarioConfig, out: &Path, opts: &DemoOptions) -> Result<DemoSummary> {
    scenario.validate()?;
    if opts.k == 0 {
        return Err(Error::config("k", "must be >= 1"));
    }
    if opts.window_min <= 0 {
        return Err(Error::config("window_min", "must be > 0"));
    }
    let provenance = Provenance::new("demo", &DemoConfig { scenario, options: opts });
    let csv_out = |name: &str| -> PathBuf { out.join(name) };
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    io::write_json(&out.join("scenario.json"), scenario)?;
    io::write_json(&out.join("region.json"), &scenario.region)?;

    let world = generate_scenario(scenario)?;
    for (name, write) in [
        ("pings.csv", io::write_pings as fn(&Path, &crate::scenario::GeneratedLogs) -> Result<()>),
        ("searches.csv", io::write_searches),
    ] {
        write(&csv_out(name), &world.logs)?;
        write_sidecar(&csv_out(name), &provenance)?;
    }
    io::write_pv(&csv_out("pv.csv"), &world.pv)?;
    write_sidecar(&csv_out("pv.csv"), &provenance)?;
    #[derive(Serialize)]
    struct TruthDoc<'a> {
        #[serde(flatten)]
        truth: &'a GroundTruth,
        provenance: &'a Provenance,
    }
    io::write_json(&out.join("truth.json"), &TruthDoc { truth: &world.truth, provenance: &provenance })?;
    let truth = world.truth;
    let pv_log = world.pv;
    drop(world.logs);

    // Re-read the files so the demo exercises the same path as `prepare`.
    let pings = io::read_pings(&csv_out("pings.csv"))?;
    let searches = io::read_searches(&csv_out("searches.csv"))?;
    let prep_opts =
        PrepareOptions { k: opts.k, window: Duration::minutes(opts.window_min), tz: parse_offset(&scenario.timezone)? };
    let (rows, prepare) = prepare_counts(&pings, &searches, &scenario.region, &prep_opts);
    drop((pings, searches));
    io::write_counts(&csv_out("counts.csv"), &rows)?;
    write_sidecar(&csv_out("counts.csv"), &provenance)?;

    let hyper = Hyperparams { l2_lambda: opts.lambda, seed: opts.seed, ..Hyperparams::default() };
    let mut baseline = default_baseline(scenario.event_day)?;
    baseline.start = baseline.start.max(scenario.date_range.start);
    let mut stopwords = if baseline.is_empty() {
        StopwordSet::empty()
    } else {
        derive_stopwords(&rows, baseline, Some(scenario.event_day), &hyper, opts.top_m, opts.floor)?
    };
    stopwords.provenance = Some(provenance.clone());
    io::write_json(&out.join("stopwords.json"), &stopwords)?;

    let dates: Vec<NaiveDate> = scenario.date_range.days().collect();
    let mut reports =
        dates.par_iter().map(|&d| score_day(d, &rows, &stopwords, &hyper, opts.top)).collect::<Result<Vec<_>>>()?;
    let report_dir = out.join("reports");
    for r in &mut reports {
        r.provenance = Some(provenance.clone());
        io::write_json(&report_dir.join(report_file_name(r.date)), r)?;
    }

    let eval = evaluate_reports(&reports, &truth, &pv_log, opts.n)?;
    let doc = MetricsDocument {
        recovery: eval.recovery.clone(),
        pv_series: eval.pv.points.clone(),
        provenance: Some(provenance.clone()),
    };
    io::write_json(&out.join("metrics.json"), &doc)?;
    write_series(&csv_out("series.csv"), &reports, &truth, &eval.pv)?;
    write_sidecar(&csv_out("series.csv"), &provenance)?;

    let board_path = out.join("board.txt");
    let mut board = io::create(&board_path)?;
    board
        .write_all(render_board(&reports, opts.top).as_bytes())
        .and_then(|_| board.flush())
        .map_err(|e| Error::io(&board_path, e))?;

    Ok(DemoSummary {
        out_dir: out.to_path_buf(),
        prepare,
        stopwords,
        reports,
        recovery: eval.recovery,
        truth,
        pv: eval.pv,
    })
}
