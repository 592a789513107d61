//! Declarative case files: map, door states, notifications, the task, the
//! trial start poses, and the ground-truth restricted areas.
//!
//! ```text
//! name = lobby_party
//! map = campus_floor1.osm
//!
//! [world]
//! closed = 207
//!
//! [notifications]
//! 2026-03-02T08:00:00Z | Graduation party in the Lobby ...
//!
//! [task]
//! instruction = Deliver this parcel to D101.
//! destination = D101
//! now = 2026-03-02T10:00:00Z
//!
//! [trials]
//! start = B102 @ 15.5, 9
//!
//! [restricted]
//! area = Lobby
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};

use super::SimError;

#[derive(Debug, Clone)]
pub struct TrialStart {
    pub area_name: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone)]
pub struct CaseSpec {
    pub name: String,
    pub map_file: PathBuf,
    pub closed_doors: BTreeSet<i64>,
    pub notifications: Vec<(DateTime<Utc>, String)>,
    pub instruction: String,
    pub destination_name: String,
    pub now: DateTime<Utc>,
    pub trials: Vec<TrialStart>,
    pub restricted_names: Vec<String>,
}

impl CaseSpec {
    pub fn load(path: &Path) -> Result<CaseSpec, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::Case(format!("{}: {e}", path.display())))?;
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, dir).map_err(|e| SimError::Case(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<CaseSpec, String> {
        let mut name = String::new();
        let mut map_file = None;
        let mut closed_doors = BTreeSet::new();
        let mut notifications = Vec::new();
        let mut instruction = String::new();
        let mut destination_name = String::new();
        let mut now = None;
        let mut trials = Vec::new();
        let mut restricted_names = Vec::new();

        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(s) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = s.trim().to_lowercase();
                continue;
            }
            let err = |msg: &str| format!("line {}: {msg}", lineno + 1);

            if section == "notifications" {
                let (ts, text) = line
                    .split_once('|')
                    .ok_or_else(|| err("expected `<timestamp> | <text>`"))?;
                let ts: DateTime<Utc> =
                    ts.trim().parse().map_err(|_| err("bad notification timestamp"))?;
                notifications.push((ts, text.trim().to_string()));
                continue;
            }

            let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            match (section.as_str(), key) {
                ("", "name") => name = value.to_string(),
                ("", "map") => map_file = Some(base_dir.join(value)),
                ("world", "closed") => {
                    closed_doors.insert(value.parse().map_err(|_| err("bad passage id"))?);
                }
                ("task", "instruction") => instruction = value.to_string(),
                ("task", "destination") => destination_name = value.to_string(),
                ("task", "now") => {
                    now = Some(value.parse().map_err(|_| err("bad task timestamp"))?)
                }
                ("trials", "start") => {
                    let (area, xy) = value
                        .split_once('@')
                        .ok_or_else(|| err("expected `start = <area> @ x, y`"))?;
                    let (x, y) = xy
                        .split_once(',')
                        .ok_or_else(|| err("expected `x, y` coordinates"))?;
                    trials.push(TrialStart {
                        area_name: area.trim().to_string(),
                        x: x.trim().parse().map_err(|_| err("bad x"))?,
                        y: y.trim().parse().map_err(|_| err("bad y"))?,
                    });
                }
                ("restricted", "area") => restricted_names.push(value.to_string()),
                (sec, key) => return Err(err(&format!("unknown key `{key}` in section `[{sec}]`"))),
            }
        }

        if trials.is_empty() {
            return Err("a case needs at least one trial".to_string());
        }
        Ok(CaseSpec {
            name: if name.is_empty() { "unnamed".into() } else { name },
            map_file: map_file.ok_or("missing `map =` entry")?,
            closed_doors,
            notifications,
            instruction,
            destination_name,
            now: now.ok_or("missing `now =` entry in [task]")?,
            trials,
            restricted_names,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_complete_case() {
        let text = "\
name = demo
map = campus_floor1.osm

[world]
closed = 207

[notifications]
2026-03-02T08:00:00Z | Party in the Lobby 10:00-18:00.

[task]
instruction = Deliver this to D101.
destination = D101
now = 2026-03-02T10:30:00Z

[trials]
start = B102 @ 15.5, 9
start = B101 @ 8, 9

[restricted]
area = Lobby
";
        let case = CaseSpec::parse(text, Path::new("/tmp")).unwrap();
        assert_eq!(case.name, "demo");
        assert_eq!(case.closed_doors, BTreeSet::from([207]));
        assert_eq!(case.notifications.len(), 1);
        assert_eq!(case.destination_name, "D101");
        assert_eq!(case.trials.len(), 2);
        assert_eq!(case.restricted_names, vec!["Lobby"]);
    }

    #[test]
    fn missing_trials_and_bad_lines_are_rejected() {
        assert!(CaseSpec::parse("map = m.osm", Path::new(".")).is_err());
        let bad = "map = m.osm\n[trials]\nstart = nowhere\n";
        assert!(CaseSpec::parse(bad, Path::new(".")).is_err());
    }
}
