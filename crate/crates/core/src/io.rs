//! File formats: CSV logs and counts, JSON documents. A path of `-` means
//! standard output (writers) or standard input (readers).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::prepare::{DailyCountRow, LocationPing, SearchEvent};
use crate::scenario::{user_id, GeneratedLogs};
use crate::time::{format_timestamp, parse_date, parse_timestamp};

pub const PINGS_HEADER: [&str; 4] = ["user_id", "timestamp", "lat", "lon"];
pub const SEARCHES_HEADER: [&str; 3] = ["user_id", "timestamp", "query"];
pub const COUNTS_HEADER: [&str; 4] = ["date", "region_flag", "query", "user_count"];
pub const PV_HEADER: [&str; 2] = ["date", "pv_count"];

fn is_stdio(path: &Path) -> bool {
    path.as_os_str() == "-"
}

pub fn create(path: &Path) -> Result<Box<dyn Write>> {
    if is_stdio(path) {
        return Ok(Box::new(BufWriter::new(std::io::stdout())));
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(Box::new(BufWriter::new(f)))
}

pub fn open(path: &Path) -> Result<Box<dyn Read>> {
    if is_stdio(path) {
        return Ok(Box::new(BufReader::new(std::io::stdin())));
    }
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(Box::new(BufReader::new(f)))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::malformed(path.display().to_string(), e))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::malformed(path.display().to_string(), e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::WriterBuilder::new().has_headers(false).from_writer(create(path)?))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::malformed(path.display().to_string(), format!("{other:?}")),
    }
}

fn finish(path: &Path, mut w: csv::Writer<Box<dyn Write>>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a CSV whose header must equal `header`, handing each record to `row`.
fn read_csv(path: &Path, header: &[&str], mut row: impl FnMut(&csv::StringRecord) -> Result<(), String>) -> Result<()> {
    let ctx = path.display().to_string();
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(open(path)?);
    let found = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(Error::malformed(
            ctx,
            format!("expected header {}, found {}", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut rec = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut rec) {
            Ok(false) => return Ok(()),
            Ok(true) => {
                let line = rec.position().map_or(0, |p| p.line());
                if rec.len() != header.len() {
                    return Err(Error::malformed(format!("{ctx}:{line}"), format!("expected {} fields", header.len())));
                }
                row(&rec).map_err(|m| Error::malformed(format!("{ctx}:{line}"), m))?;
            }
            Err(e) => return Err(csv_err(path, e)),
        }
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("bad {what} {s:?}"))
}

pub fn write_pings(path: &Path, logs: &GeneratedLogs) -> Result<()> {
    let mut w = csv_writer(path)?;
    let res = (|| -> csv::Result<()> {
        w.write_record(PINGS_HEADER)?;
        for p in &logs.pings {
            let ts = chrono::DateTime::from_timestamp(p.ts, 0).expect("in range");
            w.write_record([user_id(p.user), format_timestamp(ts), format!("{:.6}", p.lat), format!("{:.6}", p.lon)])?;
        }
        Ok(())
    })();
    res.map_err(|e| csv_err(path, e))?;
    finish(path, w)
}

pub fn write_searches(path: &Path, logs: &GeneratedLogs) -> Result<()> {
    let mut w = csv_writer(path)?;
    let res = (|| -> csv::Result<()> {
        w.write_record(SEARCHES_HEADER)?;
        for s in &logs.searches {
            let ts = chrono::DateTime::from_timestamp(s.ts, 0).expect("in range");
            w.write_record([user_id(s.user).as_str(), &format_timestamp(ts), &logs.queries[s.query as usize]])?;
        }
        Ok(())
    })();
    res.map_err(|e| csv_err(path, e))?;
    finish(path, w)
}

pub fn read_pings(path: &Path) -> Result<Vec<LocationPing>> {
    let mut out = Vec::new();
    read_csv(path, &PINGS_HEADER, |r| {
        let lat = parse_f64(&r[2], "lat")?;
        let lon = parse_f64(&r[3], "lon")?;
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(format!("coordinates out of range ({lat}, {lon})"));
        }
        out.push(LocationPing {
            user_id: r[0].to_owned(),
            timestamp: parse_timestamp(&r[1]).map_err(|e| e.to_string())?,
            lat,
            lon,
        });
        Ok(())
    })?;
    Ok(out)
}

pub fn read_searches(path: &Path) -> Result<Vec<SearchEvent>> {
    let mut out = Vec::new();
    read_csv(path, &SEARCHES_HEADER, |r| {
        out.push(SearchEvent {
            user_id: r[0].to_owned(),
            timestamp: parse_timestamp(&r[1]).map_err(|e| e.to_string())?,
            query: r[2].to_owned(),
        });
        Ok(())
    })?;
    Ok(out)
}

pub fn write_counts(path: &Path, rows: &[DailyCountRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let res = (|| -> csv::Result<()> {
        w.write_record(COUNTS_HEADER)?;
        for r in rows {
            w.write_record([r.date.to_string().as_str(), r.region_flag.as_str(), &r.query, &r.user_count.to_string()])?;
        }
        Ok(())
    })();
    res.map_err(|e| csv_err(path, e))?;
    finish(path, w)
}

pub fn read_counts(path: &Path) -> Result<Vec<DailyCountRow>> {
    let mut out = Vec::new();
    read_csv(path, &COUNTS_HEADER, |r| {
        let user_count: u64 = r[3].trim().parse().map_err(|_| format!("bad user_count {:?}", &r[3]))?;
        if user_count == 0 {
            return Err("user_count must be positive".into());
        }
        out.push(DailyCountRow {
            date: parse_date(&r[0]).map_err(|e| e.to_string())?,
            region_flag: r[1].parse()?,
            query: r[2].to_owned(),
            user_count,
        });
        Ok(())
    })?;
    let mut keys: Vec<_> = out.iter().map(DailyCountRow::key).collect();
    keys.sort_unstable();
    if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::malformed(path.display().to_string(), format!("duplicate row {:?}", w[0])));
    }
    Ok(out)
}

pub fn write_pv(path: &Path, pv: &BTreeMap<NaiveDate, u64>) -> Result<()> {
    let mut w = csv_writer(path)?;
    let res = (|| -> csv::Result<()> {
        w.write_record(PV_HEADER)?;
        for (d, c) in pv {
            w.write_record([d.to_string(), c.to_string()])?;
        }
        Ok(())
    })();
    res.map_err(|e| csv_err(path, e))?;
    finish(path, w)
}

pub fn read_pv(path: &Path) -> Result<BTreeMap<NaiveDate, u64>> {
    let mut out = BTreeMap::new();
    read_csv(path, &PV_HEADER, |r| {
        let date = parse_date(&r[0]).map_err(|e| e.to_string())?;
        let count: u64 = r[1].trim().parse().map_err(|_| format!("bad pv_count {:?}", &r[1]))?;
        if out.insert(date, count).is_some() {
            return Err(format!("duplicate date {date}"));
        }
        Ok(())
    })?;
    Ok(out)
}
