//! Aggregate a directory of experiment artifacts into one JSON summary:
//! per-file pass/fail counts plus fitted scaling slopes for the sweep
//! outputs. Missing or corrupt files are listed, never fatal.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;
use serde_json::{json, Value};

use crate::experiments::loglog_slope;

struct ParsedCsv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn parse_csv(text: &str) -> Option<ParsedCsv> {
    let mut header = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|s| s.to_string()).collect();
        match &header {
            None => header = Some(fields),
            Some(h) => {
                if fields.len() != h.len() {
                    return None;
                }
                rows.push(fields);
            }
        }
    }
    header.map(|header| ParsedCsv { header, rows })
}

impl ParsedCsv {
    fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    fn floats(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.column(name)?;
        self.rows
            .iter()
            .map(|r| r[idx].parse::<f64>().ok())
            .collect()
    }
}

/// Build the summary for one directory.
pub fn summarize(dir: &Path) -> Result<Value> {
    let mut files = Vec::new();
    let mut slopes = BTreeMap::<String, f64>::new();
    let mut problems = Vec::new();

    let mut entries: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .collect();
    entries.sort();

    for path in entries {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if ext != "csv" {
            continue;
        }
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                problems.push(json!({ "file": name, "error": e.to_string() }));
                continue;
            }
        };
        let Some(parsed) = parse_csv(&text) else {
            problems.push(json!({ "file": name, "error": "malformed csv" }));
            continue;
        };

        let (mut passes, mut fails) = (0usize, 0usize);
        if let Some(idx) = parsed.column("pass") {
            for row in &parsed.rows {
                if row[idx] == "true" {
                    passes += 1;
                } else {
                    fails += 1;
                }
            }
        }
        files.push(json!({
            "file": name.clone(),
            "rows": parsed.rows.len(),
            "passes": passes,
            "fails": fails,
        }));

        if name == "trotter_sweep.csv" {
            trotter_slopes(&parsed, &mut slopes);
        }
        if name == "mix_hitting.csv" {
            if let Some(slope) = hitting_slope(&parsed) {
                slopes.insert("mix_hitting_vs_M".into(), slope);
            }
        }
        if name == "trotter_calls.csv" {
            if let (Some(l), Some(t), Some(calls)) = (
                parsed.floats("L"),
                parsed.floats("t"),
                parsed.floats("calls"),
            ) {
                let pts: Vec<(f64, f64)> = l
                    .iter()
                    .zip(&t)
                    .zip(&calls)
                    .map(|((&l, &t), &c)| (l * t, c))
                    .collect();
                if let Some(slope) = loglog_slope(&pts) {
                    slopes.insert("trotter_calls_vs_Lt".into(), slope);
                }
            }
        }
    }

    let total_pass: u64 = files.iter().map(|f| f["passes"].as_u64().unwrap_or(0)).sum();
    let total_fail: u64 = files.iter().map(|f| f["fails"].as_u64().unwrap_or(0)).sum();
    Ok(json!({
        "files": files,
        "passes": total_pass,
        "fails": total_fail,
        "slopes": slopes,
        "problems": problems,
    }))
}

fn trotter_slopes(parsed: &ParsedCsv, slopes: &mut BTreeMap<String, f64>) {
    let (Some(t), Some(order), Some(steps), Some(err)) = (
        parsed.floats("t"),
        parsed.floats("order"),
        parsed.floats("steps"),
        parsed.floats("error_norm"),
    ) else {
        return;
    };
    let mut groups: BTreeMap<(String, String), Vec<(f64, f64)>> = BTreeMap::new();
    for i in 0..t.len() {
        if err[i] > 0.0 {
            groups
                .entry((format!("{}", t[i]), format!("{}", order[i])))
                .or_default()
                .push((steps[i], err[i]));
        }
    }
    for ((tv, ov), pts) in groups {
        if let Some(slope) = loglog_slope(&pts) {
            slopes.insert(format!("trotter_error_t{tv}_order{ov}"), slope);
        }
    }
}

fn hitting_slope(parsed: &ParsedCsv) -> Option<f64> {
    let m_idx = parsed.column("M")?;
    let h_idx = parsed.column("hitting_time")?;
    let mut per_m: BTreeMap<u64, Vec<Option<u64>>> = BTreeMap::new();
    for row in &parsed.rows {
        let m: u64 = row[m_idx].parse().ok()?;
        per_m.entry(m).or_default().push(row[h_idx].parse().ok());
    }
    let mut pts = Vec::new();
    for (m, mut hits) in per_m {
        hits.sort_by_key(|h| h.unwrap_or(u64::MAX));
        let median = hits[hits.len() / 2]?;
        pts.push((m as f64, median.max(1) as f64));
    }
    loglog_slope(&pts)
}
