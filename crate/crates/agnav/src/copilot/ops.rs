//! The two copilot operations groups: passage cost evaluation and
//! navigation event monitoring (notification ingest + path approval).
//!
//! Each operation renders a versioned prompt template, asks the backend,
//! and normalizes the response. A format failure earns exactly one
//! reprompt (with the parse error quoted back); path approval falls back
//! to the rule backend after that, the other operations give up.

use chrono::{DateTime, Duration, Utc};
use serde_json::Value;

use crate::map::{map_summary, AreaType, MapDocument};

use super::backend::ChatBackend;
use super::events::{EventRecord, EventStore};
use super::resolve::{AreaCatalog, Resolution};
use super::rule::RuleBackend;
use super::schema::{normalize_llm_json, SchemaId};
use super::types::*;
use super::CopilotError;

const PASSAGE_COST_TEMPLATE: &str = include_str!("prompts/passage_cost_v1.txt");
const EVENT_INGEST_TEMPLATE: &str = include_str!("prompts/event_ingest_v1.txt");
const PATH_APPROVAL_TEMPLATE: &str = include_str!("prompts/path_approval_v1.txt");

const SYSTEM_EVALUATOR: &str = "You are the passage cost evaluator of an indoor service robot. \
You price how costly each door passage is for the robot from its type and traversal history. \
Answer with exactly one JSON object.";
const SYSTEM_MONITOR: &str = "You are the navigation event monitor of an indoor service robot. \
You track notifications that affect where the robot may drive and you validate planned paths. \
Answer with exactly one JSON object.";

/// Asks the backend once, retries once on a format failure, then errors.
fn complete_normalized(
    backend: &dyn ChatBackend,
    system: &str,
    user: &str,
    schema: SchemaId,
    catalog: &AreaCatalog,
) -> Result<Value, CopilotError> {
    let first = backend
        .complete(system, user)
        .and_then(|raw| normalize_llm_json(&raw, schema, catalog));
    let err = match first {
        Ok(v) => return Ok(v),
        Err(e @ CopilotError::Unrepairable { .. }) => e,
        Err(other) => return Err(other),
    };
    let retry_user = format!(
        "{user}\n\n## RETRY\nYour previous answer could not be used ({err}). \
Respond again with exactly one JSON object matching the OUTPUT FORMAT section."
    );
    backend
        .complete(system, &retry_user)
        .and_then(|raw| normalize_llm_json(&raw, schema, catalog))
}

fn passage_table(doc: &MapDocument, stats: &ExperienceStats) -> String {
    let mut rows = Vec::new();
    for p in doc.passages.values() {
        let name_a = doc.area(p.area_a).map(|a| a.name.as_str()).unwrap_or("?");
        let name_b = doc.area(p.area_b).map(|a| a.name.as_str()).unwrap_or("?");
        let (s, f, recent) = match stats.get(p.id) {
            Some(ps) => {
                let recent: String = ps
                    .recent
                    .iter()
                    .map(|o| if *o == Outcome::Success { 'S' } else { 'F' })
                    .collect();
                (ps.successes, ps.failures, if recent.is_empty() { "-".into() } else { recent })
            }
            None => (0, 0, "-".to_string()),
        };
        rows.push(format!(
            "{} | {} <-> {} | {} | successes={} failures={} recent={}",
            p.id,
            name_a,
            name_b,
            p.door_type.as_str(),
            s,
            f,
            recent
        ));
    }
    rows.join("\n")
}

/// Resolves the instruction's destination and prices every passage.
pub fn evaluate_passages(
    backend: &dyn ChatBackend,
    instruction: &str,
    doc: &MapDocument,
    stats: &ExperienceStats,
    caps: &RobotCapabilities,
) -> Result<PassageCostMap, CopilotError> {
    let catalog = AreaCatalog::build(doc);
    let summary = map_summary(doc, None).map_err(|e| CopilotError::Backend(e.to_string()))?;
    let user = PASSAGE_COST_TEMPLATE
        .replace("{instruction}", instruction)
        .replace("{capabilities}", &caps.describe())
        .replace("{map_summary}", summary.trim_end())
        .replace("{passage_table}", &passage_table(doc, stats));

    let value = complete_normalized(backend, SYSTEM_EVALUATOR, &user, SchemaId::PassageCosts, &catalog)?;

    let dest_raw = value["destination_area"].as_str().unwrap_or_default().to_string();
    let destination_area = match catalog.resolve(&dest_raw) {
        Resolution::Areas(ids) if ids.len() == 1 => ids[0],
        Resolution::Areas(ids) => {
            let candidates = ids
                .iter()
                .filter_map(|id| catalog.entry(*id))
                .map(|e| format!("{} (L{})", e.name, e.level))
                .collect();
            return Err(CopilotError::DestinationUnresolvable { query: dest_raw, candidates });
        }
        _ => {
            return Err(CopilotError::DestinationUnresolvable {
                query: dest_raw,
                candidates: catalog.names().iter().map(|s| s.to_string()).collect(),
            })
        }
    };

    let mut costs = std::collections::BTreeMap::new();
    if let Some(map) = value["costs"].as_object() {
        for (k, v) in map {
            if let (Ok(id), Some(c)) = (k.parse::<i64>(), v.as_f64()) {
                if doc.passage(id).is_some() {
                    costs.insert(id, c);
                }
            }
        }
    }

    Ok(PassageCostMap {
        costs,
        destination_area,
        rationale: value["rationale"].as_str().unwrap_or_default().to_string(),
    })
}

/// Feeds one notification to the monitor. Irrelevant notifications return
/// `None`; relevant ones become an [`EventRecord`] appended to the store.
pub fn ingest_notification(
    backend: &dyn ChatBackend,
    text: &str,
    now: DateTime<Utc>,
    doc: &MapDocument,
    store: &mut EventStore,
) -> Result<Option<EventRecord>, CopilotError> {
    let catalog = AreaCatalog::build(doc);
    let summary = map_summary(doc, None).map_err(|e| CopilotError::Backend(e.to_string()))?;
    let user = EVENT_INGEST_TEMPLATE
        .replace("{text}", text.trim())
        .replace("{now}", &now.to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
        .replace("{map_summary}", summary.trim_end());

    let value = complete_normalized(backend, SYSTEM_MONITOR, &user, SchemaId::EventIngest, &catalog)?;
    if !value["relevant"].as_bool().unwrap_or(false) {
        return Ok(None);
    }

    let list = |key: &str| -> Vec<String> {
        value[key]
            .as_array()
            .map(|a| a.iter().filter_map(|v| v.as_str()).map(str::to_string).collect())
            .unwrap_or_default()
    };
    let mut areas_to_avoid = list("areas_to_avoid");
    let areas_try_to_avoid = list("areas_try_to_avoid");
    let unresolved = list("unresolved");
    if areas_to_avoid.is_empty() && areas_try_to_avoid.is_empty() {
        // nothing resolved: keep the raw names so the record is explicit
        areas_to_avoid = unresolved.clone();
    }

    let parse_ts = |key: &str| -> Option<DateTime<Utc>> {
        value[key].as_str().and_then(|s| s.parse().ok())
    };
    let mut start = parse_ts("start").unwrap_or(now);
    let mut end = parse_ts("end").unwrap_or(now + Duration::hours(24));
    if end < start {
        std::mem::swap(&mut start, &mut end);
    }

    let record = EventRecord {
        id: store.next_id(),
        source_text: text.trim().to_string(),
        areas_to_avoid,
        areas_try_to_avoid,
        start,
        end,
        reason: value["reason"].as_str().unwrap_or_default().to_string(),
        unresolved,
    };
    store.push(record.clone());
    Ok(Some(record))
}

fn render_events(store: &EventStore, now: DateTime<Utc>) -> String {
    let active = store.active(now);
    if active.is_empty() {
        return "none".into();
    }
    active
        .iter()
        .map(|r| {
            format!(
                "- id={} avoid=[{}] try=[{}] window={}..{} reason={}",
                r.id,
                r.areas_to_avoid.join("; "),
                r.areas_try_to_avoid.join("; "),
                r.start.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                r.end.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                r.reason
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Validates a planned path against the active events and the robot's
/// capabilities.
///
/// Whatever the backend answers, a deterministic wrapper re-checks the
/// verdict: a "valid" answer for a path that crosses an actively avoided
/// area or an area the robot cannot use is overridden to invalid. The
/// soft-avoid areas of all active events are always forwarded.
pub fn approve_path(
    backend: &dyn ChatBackend,
    path_areas: &[i64],
    store: &EventStore,
    now: DateTime<Utc>,
    caps: &RobotCapabilities,
    doc: &MapDocument,
) -> Result<ApprovalVerdict, CopilotError> {
    let catalog = AreaCatalog::build(doc);
    let summary = map_summary(doc, None).map_err(|e| CopilotError::Backend(e.to_string()))?;
    let path_lines: Vec<String> = path_areas
        .iter()
        .enumerate()
        .map(|(i, id)| {
            format!("{}. {}", i + 1, doc.area(*id).map(|a| a.name.as_str()).unwrap_or("?"))
        })
        .collect();
    let user = PATH_APPROVAL_TEMPLATE
        .replace("{path_areas}", &path_lines.join("\n"))
        .replace("{now}", &now.to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
        .replace("{capabilities}", &caps.describe())
        .replace("{events}", &render_events(store, now))
        .replace("{map_summary}", summary.trim_end());

    let value = match complete_normalized(backend, SYSTEM_MONITOR, &user, SchemaId::PathApproval, &catalog) {
        Ok(v) => v,
        Err(CopilotError::Unrepairable { .. }) => {
            // last resort: the deterministic monitor answers instead
            let raw = RuleBackend::new().complete(SYSTEM_MONITOR, &user)?;
            normalize_llm_json(&raw, SchemaId::PathApproval, &catalog)?
        }
        Err(other) => return Err(other),
    };

    let resolve_ids = |names: &[String]| -> Vec<i64> {
        let mut ids = Vec::new();
        for name in names {
            match catalog.resolve(name) {
                Resolution::Areas(v) => ids.extend(v),
                Resolution::Sector(exp) => ids.extend(exp.members()),
                Resolution::Unresolved { .. } => {}
            }
        }
        ids.sort_unstable();
        ids.dedup();
        ids
    };
    let names_of = |v: &Value| -> Vec<String> {
        v.as_array()
            .map(|a| a.iter().filter_map(|x| x.as_str()).map(str::to_string).collect())
            .unwrap_or_default()
    };

    // ground truth the verdict must respect
    let active = store.active(now);
    let mut active_hard: Vec<String> = active.iter().flat_map(|r| r.areas_to_avoid.clone()).collect();
    active_hard.sort();
    active_hard.dedup();
    let hard_ids = resolve_ids(&active_hard);
    let mut must_block: Vec<i64> = path_areas.iter().copied().filter(|id| hard_ids.contains(id)).collect();
    for id in path_areas {
        if let Some(area) = doc.area(*id) {
            let usable = match area.area_type {
                AreaType::Stairs => caps.can_use(VerticalConnector::Stairs),
                AreaType::Elevator => caps.can_use(VerticalConnector::Elevator),
                _ => true,
            };
            if !usable {
                must_block.push(*id);
            }
        }
    }
    must_block.sort_unstable();
    must_block.dedup();

    let mut active_try: Vec<String> = active.iter().flat_map(|r| r.areas_try_to_avoid.clone()).collect();
    active_try.sort();
    active_try.dedup();
    let mut try_ids = resolve_ids(&active_try);
    try_ids.extend(resolve_ids(&names_of(&value["areas_try_to_avoid"])));
    try_ids.sort_unstable();
    try_ids.dedup();

    let backend_valid = value["is_valid"].as_bool().unwrap_or(false);
    let backend_avoid = resolve_ids(&names_of(&value["areas_to_avoid"]));

    let verdict = if !must_block.is_empty() {
        ApprovalVerdict {
            is_valid: false,
            areas_to_avoid: must_block,
            areas_try_to_avoid: try_ids,
            rationale: if backend_valid {
                "overridden: path crosses actively avoided or unusable areas".into()
            } else {
                value["rationale"].as_str().unwrap_or_default().to_string()
            },
        }
    } else if !backend_valid {
        // cautious backend: respect the veto if it names real areas
        ApprovalVerdict {
            is_valid: false,
            areas_to_avoid: backend_avoid,
            areas_try_to_avoid: try_ids,
            rationale: value["rationale"].as_str().unwrap_or_default().to_string(),
        }
    } else {
        ApprovalVerdict {
            is_valid: true,
            areas_to_avoid: Vec::new(),
            areas_try_to_avoid: try_ids,
            rationale: value["rationale"].as_str().unwrap_or_default().to_string(),
        }
    };
    Ok(verdict)
}
