//! Deterministic rule backend.
//!
//! Implements the [`ChatBackend`] contract without any model: it parses the
//! structured sections of the rendered prompt (the same text a live model
//! would see) and answers with fixed rules. This keeps the whole stack
//! runnable offline and makes simulator runs reproducible.
//!
//! Pricing rules: base cost by door type (open/automatic 0, handle 5,
//! elevator door 10 meters-equivalent), plus an experience penalty of
//! `100 * failures / (successes + failures + 1)`, overridden to 1000 when
//! the last three recorded outcomes are all failures.

use std::collections::BTreeMap;


use chrono::{DateTime, Duration, NaiveTime, Utc};
use serde_json::json;

use super::backend::ChatBackend;
use super::resolve::parse_sector_phrase;
use super::CopilotError;

pub const BASE_COST_OPEN: f64 = 0.0;
pub const BASE_COST_AUTOMATIC: f64 = 0.0;
pub const BASE_COST_HANDLE: f64 = 5.0;
pub const BASE_COST_ELEVATOR: f64 = 10.0;
/// Cost override for a passage whose last 3 outcomes were all failures.
pub const STUBBORN_COST: f64 = 1000.0;

/// Words that mark a notification as affecting physical access.
const IMPACT_KEYWORDS: [&str; 18] = [
    "closed", "closure", "maintenance", "repair", "renovation", "drill",
    "blocked", "inaccessible", "restricted", "party", "ceremony", "upgrade",
    "construction", "out of service", "evacuated", "crowded", "avoid",
    "do not enter",
];

#[derive(Debug, Default)]
pub struct RuleBackend;

impl RuleBackend {
    pub fn new() -> Self {
        RuleBackend
    }
}

impl ChatBackend for RuleBackend {
    fn complete(&self, _system_prompt: &str, user_prompt: &str) -> Result<String, CopilotError> {
        let sections = split_sections(user_prompt);
        if sections.contains_key("PASSAGES") {
            Ok(answer_costs(&sections))
        } else if sections.contains_key("NOTIFICATION") {
            Ok(answer_ingest(&sections))
        } else if sections.contains_key("PATH") {
            Ok(answer_approval(&sections))
        } else {
            Err(CopilotError::Backend("rule backend: unrecognized prompt shape".into()))
        }
    }

    fn identity(&self) -> String {
        "rule".into()
    }
}

fn split_sections(prompt: &str) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let mut name: Option<String> = None;
    let mut body = String::new();
    for line in prompt.lines() {
        if let Some(header) = line.strip_prefix("## ") {
            if let Some(n) = name.take() {
                out.insert(n, body.trim().to_string());
            }
            name = Some(header.trim().to_string());
            body = String::new();
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    if let Some(n) = name {
        out.insert(n, body.trim().to_string());
    }
    out
}

/// One area line of the map summary.
#[derive(Debug, Clone)]
struct SummaryArea {
    name: String,
    area_type: String,
    neighbors: Vec<String>,
}

impl SummaryArea {
    fn sector(&self) -> Option<char> {
        super::resolve::sector_token(&self.name)
    }
}

/// Parses "Room B101 (room, L1): connects to Corridor B via handle door".
fn parse_summary(map_section: &str) -> Vec<SummaryArea> {
    let mut out = Vec::new();
    for line in map_section.lines() {
        let line = line.trim();
        let Some((head, tail)) = line.split_once(": ") else { continue };
        let Some(paren) = head.rfind(" (") else { continue };
        let labeled = &head[..paren];
        let attrs = &head[paren + 2..head.len() - 1];
        let area_type = attrs.split(',').next().unwrap_or("").trim().to_string();
        let name = match labeled.split_once(' ') {
            Some((_, rest)) => rest.to_string(),
            None => labeled.to_string(),
        };
        let neighbors = if let Some(list) = tail.strip_prefix("connects to ") {
            list.split(", ")
                .filter_map(|entry| entry.split(" via ").next())
                .map(|n| n.split(" (L").next().unwrap_or(n).to_string())
                .collect()
        } else {
            Vec::new()
        };
        out.push(SummaryArea { name, area_type, neighbors });
    }
    out
}

fn answer_costs(sections: &BTreeMap<String, String>) -> String {
    let instruction = sections.get("INSTRUCTION").cloned().unwrap_or_default();
    let areas = parse_summary(sections.get("MAP").map(String::as_str).unwrap_or(""));

    // destination: longest area name appearing in the instruction
    let lower = instruction.to_lowercase();
    let mut destination = String::new();
    for a in &areas {
        if contains_name(&lower, &a.name) && a.name.len() > destination.len() {
            destination = a.name.clone();
        }
    }

    let mut costs = serde_json::Map::new();
    for line in sections.get("PASSAGES").map(String::as_str).unwrap_or("").lines() {
        let cols: Vec<&str> = line.split('|').map(str::trim).collect();
        if cols.len() < 4 || cols[0] == "id" {
            continue;
        }
        let id = cols[0];
        let door = cols[2];
        let exp = cols[3];
        let base = match door {
            "open" => BASE_COST_OPEN,
            "automatic" => BASE_COST_AUTOMATIC,
            "handle" => BASE_COST_HANDLE,
            "elevator_door" => BASE_COST_ELEVATOR,
            _ => 0.0,
        };
        let successes = field_u64(exp, "successes=");
        let failures = field_u64(exp, "failures=");
        let recent = field_str(exp, "recent=");
        let cost = if recent.len() >= 3 && recent.chars().rev().take(3).all(|c| c == 'F') {
            STUBBORN_COST
        } else {
            base + 100.0 * failures as f64 / (successes + failures + 1) as f64
        };
        costs.insert(id.to_string(), json!(cost));
    }

    json!({
        "destination_area": destination,
        "costs": costs,
        "rationale": "base door cost plus failure-rate penalty",
    })
    .to_string()
}

fn answer_ingest(sections: &BTreeMap<String, String>) -> String {
    let text = sections.get("NOTIFICATION").cloned().unwrap_or_default();
    let now: DateTime<Utc> = sections
        .get("NOW")
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(Utc::now);
    let areas = parse_summary(sections.get("MAP").map(String::as_str).unwrap_or(""));
    let lower = text.to_lowercase();

    let named: Vec<&SummaryArea> = areas.iter().filter(|a| contains_name(&lower, &a.name)).collect();
    let sector = parse_sector_phrase(&text);
    let mentions_area = !named.is_empty()
        || sector.map_or(false, |s| areas.iter().any(|a| a.sector() == Some(s)));
    let impact = IMPACT_KEYWORDS.iter().any(|k| lower.contains(k));
    if !mentions_area || !impact {
        return json!({
            "relevant": false,
            "areas_to_avoid": [],
            "areas_try_to_avoid": [],
            "start": "",
            "end": "",
            "reason": "no mapped area is affected",
        })
        .to_string();
    }

    let mut avoid: Vec<String> = named.iter().map(|a| a.name.clone()).collect();
    let mut try_avoid: Vec<String> = Vec::new();
    if let Some(letter) = sector {
        let rooms: Vec<&SummaryArea> = areas
            .iter()
            .filter(|a| a.sector() == Some(letter) && a.area_type != "corridor")
            .collect();
        for r in &rooms {
            avoid.push(r.name.clone());
        }
        for a in &areas {
            if a.area_type != "corridor" {
                continue;
            }
            let in_sector = a.sector() == Some(letter);
            let adjacent = a.neighbors.iter().any(|n| rooms.iter().any(|r| &r.name == n));
            if in_sector || adjacent {
                try_avoid.push(a.name.clone());
            }
        }
    }
    avoid.sort();
    avoid.dedup();
    try_avoid.retain(|n| !avoid.contains(n));
    try_avoid.sort();
    try_avoid.dedup();

    let (start, end) = window_from_text(&text, now);
    json!({
        "relevant": true,
        "areas_to_avoid": avoid,
        "areas_try_to_avoid": try_avoid,
        "start": start.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        "end": end.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        "reason": text.trim(),
    })
    .to_string()
}

fn answer_approval(sections: &BTreeMap<String, String>) -> String {
    let path: Vec<String> = sections
        .get("PATH")
        .map(String::as_str)
        .unwrap_or("")
        .lines()
        .filter_map(|l| l.trim().split_once(". ").map(|(_, n)| n.trim().to_string()))
        .collect();
    let areas = parse_summary(sections.get("MAP").map(String::as_str).unwrap_or(""));
    let robot = sections.get("ROBOT").cloned().unwrap_or_default();
    let vertical_line = robot
        .lines()
        .find(|l| l.starts_with("usable_vertical_connectors:"))
        .unwrap_or("");
    let can_stairs = vertical_line.contains("stairs");
    let can_elevator = vertical_line.contains("elevator");

    let mut event_avoid: Vec<String> = Vec::new();
    let mut event_try: Vec<String> = Vec::new();
    for line in sections.get("ACTIVE EVENTS").map(String::as_str).unwrap_or("").lines() {
        if let Some(list) = bracket_list(line, "avoid=[") {
            event_avoid.extend(list);
        }
        if let Some(list) = bracket_list(line, "try=[") {
            event_try.extend(list);
        }
    }

    let mut blocking: Vec<String> = Vec::new();
    for step in &path {
        if event_avoid.contains(step) {
            blocking.push(step.clone());
        }
        if let Some(info) = areas.iter().find(|a| &a.name == step) {
            if (info.area_type == "stairs" && !can_stairs)
                || (info.area_type == "elevator" && !can_elevator)
            {
                blocking.push(step.clone());
            }
        }
    }
    blocking.sort();
    blocking.dedup();
    event_try.sort();
    event_try.dedup();

    let is_valid = blocking.is_empty();
    json!({
        "is_valid": is_valid,
        "areas_to_avoid": blocking,
        "areas_try_to_avoid": event_try,
        "rationale": if is_valid { "no active event or capability limit touches the path" } else { "path crosses blocked or unusable areas" },
    })
    .to_string()
}

/// `avoid=[A; B]` -> ["A", "B"]
fn bracket_list(line: &str, key: &str) -> Option<Vec<String>> {
    let start = line.find(key)? + key.len();
    let end = line[start..].find(']')? + start;
    Some(
        line[start..end]
            .split(';')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect(),
    )
}

/// Case-insensitive whole-phrase containment ("D101" must not match "D1012").
fn contains_name(lower_text: &str, name: &str) -> bool {
    let needle = name.to_lowercase();
    let mut from = 0;
    while let Some(pos) = lower_text[from..].find(&needle) {
        let start = from + pos;
        let end = start + needle.len();
        let before_ok = start == 0
            || !lower_text[..start].chars().next_back().map_or(false, |c| c.is_alphanumeric());
        let after_ok = end == lower_text.len()
            || !lower_text[end..].chars().next().map_or(false, |c| c.is_alphanumeric());
        if before_ok && after_ok {
            return true;
        }
        from = end;
    }
    false
}

fn field_u64(s: &str, key: &str) -> u64 {
    field_str(s, key).parse().unwrap_or(0)
}

fn field_str(s: &str, key: &str) -> String {
    s.split_whitespace()
        .find_map(|tok| tok.strip_prefix(key))
        .unwrap_or("")
        .to_string()
}

/// First two HH:MM tokens in the text become the event window on the
/// current date; a window that ends before it starts rolls past midnight.
/// Without any times the event covers the next 24 hours.
fn window_from_text(text: &str, now: DateTime<Utc>) -> (DateTime<Utc>, DateTime<Utc>) {
    let times = scan_times(text);
    let date = now.date_naive();
    match times.as_slice() {
        [] => (now, now + Duration::hours(24)),
        [t] => {
            let start = date.and_time(*t).and_utc();
            (start, start + Duration::hours(6))
        }
        [t1, t2, ..] => {
            let start = date.and_time(*t1).and_utc();
            let mut end = date.and_time(*t2).and_utc();
            if end <= start {
                end += Duration::hours(24);
            }
            (start, end)
        }
    }
}

fn scan_times(text: &str) -> Vec<NaiveTime> {
    let bytes: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let hours: String = bytes[start..i].iter().collect();
            if i < bytes.len() && bytes[i] == ':' && hours.len() <= 2 {
                let mstart = i + 1;
                let mut j = mstart;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j - mstart == 2 {
                    let minutes: String = bytes[mstart..j].iter().collect();
                    if let (Ok(h), Ok(m)) = (hours.parse::<u32>(), minutes.parse::<u32>()) {
                        if let Some(t) = NaiveTime::from_hms_opt(h, m, 0) {
                            out.push(t);
                        }
                    }
                    i = j;
                    continue;
                }
            }
        } else {
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_scanner_finds_ranges() {
        let t = scan_times("drill 14:00-15:00 today");
        assert_eq!(t.len(), 2);
        assert_eq!(t[0], NaiveTime::from_hms_opt(14, 0, 0).unwrap());
        assert_eq!(t[1], NaiveTime::from_hms_opt(15, 0, 0).unwrap());
        assert!(scan_times("no numbers here").is_empty());
        assert!(scan_times("room 101 only").is_empty());
    }

    #[test]
    fn overnight_windows_roll_forward() {
        let now: DateTime<Utc> = "2026-03-02T12:00:00Z".parse().unwrap();
        let (s, e) = window_from_text("painting 22:00-06:00 overnight", now);
        assert!(e > s);
        assert_eq!((e - s).num_hours(), 8);
    }

    #[test]
    fn whole_phrase_matching_respects_boundaries() {
        assert!(contains_name("renovation in d101 today", "D101"));
        assert!(!contains_name("renovation in d1012 today", "D101"));
        assert!(contains_name("the lobby is closed", "Lobby"));
    }
}
