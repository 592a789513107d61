//! Result output: per-trial CSV, a per-case summary table, and an SVG
//! overlay of the executed paths on the map.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::map::{LocalPoint, ProjectedMap};

use super::executor::TrialResult;
use super::SimError;

pub const CSV_HEADER: &str = "trial,traveled_m,restricted_entries,replans,reached";

/// `results/<case>/<config>.csv` body. Byte-deterministic.
pub fn trials_csv(results: &[TrialResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (i, r) in results.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{:.3},{},{},{}",
            i + 1,
            r.traveled_length,
            r.restricted_entries,
            r.replans,
            r.reached
        );
    }
    out
}

/// Per-configuration aggregate over one case.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigSummary {
    pub case: String,
    pub config: String,
    pub trials: usize,
    pub mean_traveled_m: f64,
    pub total_traveled_m: f64,
    pub total_restricted_entries: usize,
    pub total_replans: usize,
    pub reached: usize,
}

pub fn summarize(case: &str, per_config: &BTreeMap<String, Vec<TrialResult>>) -> Vec<ConfigSummary> {
    let mut out = Vec::new();
    for (config, results) in per_config {
        let total: f64 = results.iter().map(|r| r.traveled_length).sum();
        out.push(ConfigSummary {
            case: case.to_string(),
            config: config.clone(),
            trials: results.len(),
            mean_traveled_m: if results.is_empty() { 0.0 } else { total / results.len() as f64 },
            total_traveled_m: total,
            total_restricted_entries: results.iter().map(|r| r.restricted_entries).sum(),
            total_replans: results.iter().map(|r| r.replans).sum(),
            reached: results.iter().filter(|r| r.reached).count(),
        });
    }
    out
}

pub fn summary_csv(rows: &[ConfigSummary]) -> String {
    let mut out = String::from(
        "case,config,trials,mean_traveled_m,total_traveled_m,total_restricted_entries,total_replans,reached\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.3},{:.3},{},{},{}",
            r.case,
            r.config,
            r.trials,
            r.mean_traveled_m,
            r.total_traveled_m,
            r.total_restricted_entries,
            r.total_replans,
            r.reached
        );
    }
    out
}

/// Fixed-width console table, one row per configuration.
pub fn summary_table(rows: &[ConfigSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<18} {:<18} {:>7} {:>12} {:>12} {:>10} {:>8} {:>8}",
        "case", "config", "trials", "mean_m", "total_m", "restricted", "replans", "reached"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<18} {:<18} {:>7} {:>12.1} {:>12.1} {:>10} {:>8} {:>8}",
            r.case,
            r.config,
            r.trials,
            r.mean_traveled_m,
            r.total_traveled_m,
            r.total_restricted_entries,
            r.total_replans,
            r.reached
        );
    }
    out
}

const CONFIG_COLORS: [(&str, &str); 5] = [
    ("full", "#7a31d1"),
    ("no_monitor", "#e07b00"),
    ("no_evaluator", "#0a8f3c"),
    ("baseline_clearing", "#c02020"),
    ("baseline_memory", "#1763c4"),
];

/// Map outline (areas blue, passages red) with each configuration's last
/// trial path overlaid.
pub fn overlay_svg(
    map: &ProjectedMap,
    level: i32,
    per_config: &BTreeMap<String, Vec<TrialResult>>,
) -> String {
    let mut min = LocalPoint::new(f64::INFINITY, f64::INFINITY);
    let mut max = LocalPoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for area in map.areas.values().filter(|a| a.level == level) {
        let (lo, hi) = area.bbox();
        min.x = min.x.min(lo.x);
        min.y = min.y.min(lo.y);
        max.x = max.x.max(hi.x);
        max.y = max.y.max(hi.y);
    }
    let pad = 2.0;
    let scale = 12.0;
    let w = (max.x - min.x + 2.0 * pad) * scale;
    let h = (max.y - min.y + 2.0 * pad) * scale;
    // svg y grows downward
    let tx = |p: &LocalPoint| (p.x - min.x + pad) * scale;
    let ty = |p: &LocalPoint| h - (p.y - min.y + pad) * scale;

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );

    for area in map.areas.values().filter(|a| a.level == level) {
        let pts: Vec<String> = area
            .ring
            .iter()
            .map(|p| format!("{:.1},{:.1}", tx(p), ty(p)))
            .collect();
        let _ = writeln!(
            svg,
            "<polygon points=\"{}\" fill=\"none\" stroke=\"#2b6cb0\" stroke-width=\"1.5\"/>",
            pts.join(" ")
        );
        let c = area.centroid();
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" fill=\"#555\" text-anchor=\"middle\">{}</text>",
            tx(&c),
            ty(&c),
            xml_escape(&area.name)
        );
    }
    for p in map.passages.values().filter(|p| p.level_a == level || p.level_b == level) {
        let _ = writeln!(
            svg,
            "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#d33\" stroke-width=\"3\"/>",
            tx(&p.a),
            ty(&p.a),
            tx(&p.b),
            ty(&p.b)
        );
    }

    for (config, results) in per_config {
        let color = CONFIG_COLORS
            .iter()
            .find(|(name, _)| name == config)
            .map(|(_, c)| *c)
            .unwrap_or("#888");
        if let Some(last) = results.last() {
            for seg in &last.executed {
                if seg.cells.len() < 2 {
                    continue;
                }
                let pts: Vec<String> = seg
                    .cells
                    .iter()
                    .map(|p| format!("{:.1},{:.1}", tx(p), ty(p)))
                    .collect();
                let _ = writeln!(
                    svg,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" opacity=\"0.8\"/>",
                    pts.join(" ")
                );
            }
        }
    }

    // legend
    let mut ly = 16.0;
    for (config, _) in per_config {
        let color = CONFIG_COLORS
            .iter()
            .find(|(name, _)| name == config)
            .map(|(_, c)| *c)
            .unwrap_or("#888");
        let _ = writeln!(
            svg,
            "<rect x=\"8\" y=\"{:.0}\" width=\"14\" height=\"4\" fill=\"{color}\"/><text x=\"26\" y=\"{:.0}\" font-size=\"11\" fill=\"#222\">{config}</text>",
            ly,
            ly + 5.0
        );
        ly += 16.0;
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_case_outputs(
    out_dir: &Path,
    case: &str,
    map: &ProjectedMap,
    level: i32,
    per_config: &BTreeMap<String, Vec<TrialResult>>,
) -> Result<Vec<ConfigSummary>, SimError> {
    let case_dir = out_dir.join(case);
    std::fs::create_dir_all(&case_dir)?;
    for (config, results) in per_config {
        std::fs::write(case_dir.join(format!("{config}.csv")), trials_csv(results))?;
    }
    std::fs::write(case_dir.join("overlay.svg"), overlay_svg(map, level, per_config))?;
    Ok(summarize(case, per_config))
}
