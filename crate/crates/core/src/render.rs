//! Plain-text views of reports.

use std::fmt::Write as _;

use crate::learn::{NeedReport, ReportStatus};

/// Aligned rank / query / score table of a report's top entries.
pub fn render_report(report: &NeedReport) -> String {
    let mut out = String::new();
    let status = match report.status {
        ReportStatus::Ok => "ok",
        ReportStatus::Untrainable => "untrainable",
    };
    writeln!(out, "date: {}  status: {status}  stopwords: {}", report.date, report.stopword_set_id).unwrap();
    if let Some(reason) = &report.reason {
        writeln!(out, "reason: {reason}").unwrap();
    }
    let width = report.top.iter().map(|e| e.query.chars().count()).max().unwrap_or(0).max("query".len());
    writeln!(out, "{:>4}  {:<width$}  {:>8}", "rank", "query", "score").unwrap();
    for e in &report.top {
        let pad = width - e.query.chars().count();
        writeln!(out, "{:>4}  {}{}  {:>8.4}", e.rank, e.query, " ".repeat(pad), e.score).unwrap();
    }
    writeln!(out, "({} of {} positive-weight queries shown)", report.top.len(), report.all_positive.len()).unwrap();
    out
}

/// One row per date, one column per rank.
pub fn render_board(reports: &[NeedReport], top_n: usize) -> String {
    let cell = |r: &NeedReport, i: usize| -> String {
        match r.status {
            ReportStatus::Untrainable if i == 0 => "(untrainable)".into(),
            _ => r.top.get(i).map(|e| e.query.clone()).unwrap_or_default(),
        }
    };
    let widths: Vec<usize> = (0..top_n)
        .map(|i| reports.iter().map(|r| cell(r, i).chars().count()).max().unwrap_or(0).max(format!("#{}", i + 1).len()))
        .collect();
    let mut out = String::new();
    let mut line = format!("{:<10}", "date");
    for (i, w) in widths.iter().enumerate() {
        line.push_str(&format!(" | {:<w$}", format!("#{}", i + 1)));
    }
    out.push_str(line.trim_end());
    out.push('\n');
    for r in reports {
        let mut line = r.date.to_string();
        for (i, w) in widths.iter().enumerate() {
            let c = cell(r, i);
            let pad = w - c.chars().count();
            line.push_str(&format!(" | {c}{}", " ".repeat(pad)));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::{rank_entries, ReportCounts, ReportDiagnostics};
    use chrono::NaiveDate;

    fn report(day: u32, qs: &[&str]) -> NeedReport {
        let all = rank_entries(qs.iter().enumerate().map(|(i, q)| (*q, 3.0 - i as f64 * 0.1)));
        NeedReport {
            date: NaiveDate::from_ymd_opt(2024, 1, day).unwrap(),
            status: ReportStatus::Ok,
            reason: None,
            top_n: 15,
            top: all.iter().take(15).cloned().collect(),
            all_positive: all,
            stopword_set_id: "abc".into(),
            diagnostics: ReportDiagnostics { pos_instances: 1, neg_instances: 1, epochs: 3, final_loss: Some(0.5) },
            counts: ReportCounts::default(),
            provenance: None,
        }
    }

    #[test]
    fn report_table_has_one_line_per_entry() {
        let qs: Vec<String> = (0..20).map(|i| format!("query {i}")).collect();
        let refs: Vec<&str> = qs.iter().map(String::as_str).collect();
        let text = render_report(&report(1, &refs));
        let body: Vec<&str> = text.lines().skip(2).take_while(|l| !l.starts_with('(')).collect();
        assert_eq!(body.len(), 15);
        assert!(body[0].trim_start().starts_with("1  query 0"));
        assert!(text.contains("(15 of 20"));
    }

    #[test]
    fn board_columns_align() {
        let text = render_board(&[report(1, &["a", "longer query"]), report(2, &["water outage"])], 2);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        let bar = |l: &str| l.match_indices('|').map(|(i, _)| i).collect::<Vec<_>>();
        assert_eq!(bar(lines[1])[..2], bar(lines[2])[..2]);
    }
}
