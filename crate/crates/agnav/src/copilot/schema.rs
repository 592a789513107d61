//! Normalization of backend output against the three JSON contracts.
//!
//! Live models wrap JSON in prose or code fences, rename keys, quote
//! booleans, answer with a scalar where a list is expected, and name areas
//! loosely ("B sector", a bare room number). The normalizer repairs all of
//! that deterministically; anything else is unrepairable and the caller
//! may retry exactly once before giving up.

use serde_json::{json, Map, Value};

use super::resolve::{AreaCatalog, Resolution};
use super::CopilotError;

/// The output contract a response must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaId {
    PassageCosts,
    EventIngest,
    PathApproval,
}

impl SchemaId {
    pub fn name(&self) -> &'static str {
        match self {
            SchemaId::PassageCosts => "passage-costs",
            SchemaId::EventIngest => "event-ingest",
            SchemaId::PathApproval => "path-approval",
        }
    }
}

/// Strips prose and fences, parses, canonicalizes keys, coerces near-miss
/// values, resolves loose area references, and validates required fields.
/// The result uses canonical key names and canonical area names; running
/// the normalizer on its own output is the identity.
pub fn normalize_llm_json(
    raw: &str,
    schema: SchemaId,
    catalog: &AreaCatalog,
) -> Result<Value, CopilotError> {
    let body = extract_json(raw).ok_or_else(|| unrepairable(schema, "no JSON object found"))?;
    let value: Value = serde_json::from_str(&body)
        .map_err(|e| unrepairable(schema, &format!("JSON parse failed: {e}")))?;
    let Value::Object(fields) = value else {
        return Err(unrepairable(schema, "top level is not an object"));
    };

    let mut canon: Map<String, Value> = Map::new();
    for (k, v) in fields {
        canon.insert(canonical_key(&k), v);
    }

    match schema {
        SchemaId::PassageCosts => normalize_costs(canon, catalog),
        SchemaId::EventIngest => normalize_ingest(canon, catalog),
        SchemaId::PathApproval => normalize_approval(canon, catalog),
    }
}

fn unrepairable(schema: SchemaId, reason: &str) -> CopilotError {
    CopilotError::Unrepairable { schema: schema.name(), reason: reason.to_string() }
}

/// The JSON object inside the raw text: a ```fenced``` block if present,
/// otherwise the first balanced `{...}` span.
fn extract_json(raw: &str) -> Option<String> {
    let mut text = raw.trim();
    if let Some(fence) = text.find("```") {
        let after = &text[fence + 3..];
        let after = after.strip_prefix("json").unwrap_or(after);
        if let Some(end) = after.find("```") {
            text = after[..end].trim();
        }
    }
    let start = text.find('{')?;
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, c) in text[start..].char_indices() {
        if in_string {
            match c {
                '\\' if !escaped => escaped = true,
                '"' if !escaped => in_string = false,
                _ => escaped = false,
            }
            continue;
        }
        match c {
            '"' => in_string = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(text[start..start + i + 1].to_string());
                }
            }
            _ => {}
        }
    }
    None
}

/// `"areas to avoid"`, `"areasToAvoid"`, `"Areas_To_Avoid"` all map to
/// `areas_to_avoid`.
fn canonical_key(key: &str) -> String {
    let mut out = String::with_capacity(key.len() + 4);
    let mut prev_lower = false;
    for c in key.chars() {
        if c.is_alphanumeric() {
            if c.is_uppercase() && prev_lower {
                out.push('_');
            }
            out.push(c.to_ascii_lowercase());
            prev_lower = c.is_lowercase() || c.is_ascii_digit();
        } else {
            if !out.ends_with('_') && !out.is_empty() {
                out.push('_');
            }
            prev_lower = false;
        }
    }
    out.trim_matches('_').to_string()
}

fn coerce_bool(v: &Value) -> Option<bool> {
    match v {
        Value::Bool(b) => Some(*b),
        Value::String(s) => match s.trim().to_lowercase().as_str() {
            "true" | "yes" => Some(true),
            "false" | "no" => Some(false),
            _ => None,
        },
        Value::Number(n) => n.as_i64().map(|i| i != 0),
        _ => None,
    }
}

fn coerce_number(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

fn coerce_string(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// A list field: accepts an array, a scalar (wrapped), a comma/semicolon
/// separated string, or null (empty).
fn coerce_string_list(v: Option<&Value>) -> Vec<String> {
    match v {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(items)) => items.iter().map(coerce_string).filter(|s| !s.is_empty()).collect(),
        Some(Value::String(s)) => {
            if s.contains(',') || s.contains(';') {
                s.split([',', ';']).map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
            } else if s.trim().is_empty() {
                Vec::new()
            } else {
                vec![s.trim().to_string()]
            }
        }
        Some(other) => vec![coerce_string(other)],
    }
}

/// Resolves a list of loose area references to canonical names. Sector
/// phrases expand to every member area; unresolvable entries are returned
/// separately.
fn resolve_area_list(entries: &[String], catalog: &AreaCatalog) -> (Vec<String>, Vec<String>) {
    let mut resolved = Vec::new();
    let mut unresolved = Vec::new();
    for entry in entries {
        match catalog.resolve(entry) {
            Resolution::Areas(ids) => {
                for id in ids {
                    if let Some(name) = catalog.name_of(id) {
                        resolved.push(name.to_string());
                    }
                }
            }
            Resolution::Sector(exp) => {
                for id in exp.members() {
                    if let Some(name) = catalog.name_of(id) {
                        resolved.push(name.to_string());
                    }
                }
            }
            Resolution::Unresolved { .. } => unresolved.push(entry.clone()),
        }
    }
    resolved.sort();
    resolved.dedup();
    unresolved.sort();
    unresolved.dedup();
    (resolved, unresolved)
}

fn normalize_costs(fields: Map<String, Value>, _catalog: &AreaCatalog) -> Result<Value, CopilotError> {
    let schema = SchemaId::PassageCosts;
    let destination = fields
        .get("destination_area")
        .or_else(|| fields.get("destination"))
        .map(coerce_string)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| unrepairable(schema, "missing destination_area"))?;

    let mut costs = Map::new();
    match fields.get("costs").or_else(|| fields.get("passage_costs")) {
        Some(Value::Object(map)) => {
            for (k, v) in map {
                let Some(cost) = coerce_number(v) else {
                    return Err(unrepairable(schema, &format!("cost for {k} is not a number")));
                };
                if !cost.is_finite() {
                    return Err(unrepairable(schema, &format!("cost for {k} is not finite")));
                }
                costs.insert(k.trim().to_string(), json!(cost.max(0.0)));
            }
        }
        Some(Value::Null) | None => {}
        Some(_) => return Err(unrepairable(schema, "costs is not an object")),
    }

    Ok(json!({
        "destination_area": destination,
        "costs": costs,
        "rationale": fields.get("rationale").map(coerce_string).unwrap_or_default(),
    }))
}

fn normalize_ingest(fields: Map<String, Value>, catalog: &AreaCatalog) -> Result<Value, CopilotError> {
    let schema = SchemaId::EventIngest;
    let relevant = fields
        .get("relevant")
        .or_else(|| fields.get("is_relevant"))
        .and_then(coerce_bool)
        .ok_or_else(|| unrepairable(schema, "missing relevant flag"))?;

    let (avoid, mut unresolved) =
        resolve_area_list(&coerce_string_list(fields.get("areas_to_avoid")), catalog);
    let (try_avoid, unresolved2) =
        resolve_area_list(&coerce_string_list(fields.get("areas_try_to_avoid")), catalog);
    unresolved.extend(unresolved2);
    unresolved.sort();
    unresolved.dedup();

    if relevant && avoid.is_empty() && try_avoid.is_empty() && unresolved.is_empty() {
        return Err(unrepairable(schema, "relevant event names no areas"));
    }

    Ok(json!({
        "relevant": relevant,
        "areas_to_avoid": avoid,
        "areas_try_to_avoid": try_avoid,
        "start": fields.get("start").map(coerce_string).unwrap_or_default(),
        "end": fields.get("end").map(coerce_string).unwrap_or_default(),
        "reason": fields.get("reason").map(coerce_string).unwrap_or_default(),
        "unresolved": unresolved,
    }))
}

fn normalize_approval(fields: Map<String, Value>, catalog: &AreaCatalog) -> Result<Value, CopilotError> {
    let schema = SchemaId::PathApproval;
    let is_valid = fields
        .get("is_valid")
        .or_else(|| fields.get("valid"))
        .and_then(coerce_bool)
        .ok_or_else(|| unrepairable(schema, "missing is_valid flag"))?;

    let (avoid, mut unresolved) =
        resolve_area_list(&coerce_string_list(fields.get("areas_to_avoid")), catalog);
    let (try_avoid, unresolved2) =
        resolve_area_list(&coerce_string_list(fields.get("areas_try_to_avoid")), catalog);
    unresolved.extend(unresolved2);
    unresolved.sort();
    unresolved.dedup();

    if !is_valid && avoid.is_empty() {
        return Err(unrepairable(schema, "invalid verdict names no blocking areas"));
    }

    Ok(json!({
        "is_valid": is_valid,
        "areas_to_avoid": avoid,
        "areas_try_to_avoid": try_avoid,
        "rationale": fields.get("rationale").map(coerce_string).unwrap_or_default(),
        "unresolved": unresolved,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_osmag;

    fn catalog() -> AreaCatalog {
        let xml = std::fs::read_to_string(format!(
            "{}/../../fixtures/campus_floor1.osm",
            env!("CARGO_MANIFEST_DIR")
        ))
        .unwrap();
        AreaCatalog::build(&parse_osmag(&xml).unwrap())
    }

    #[test]
    fn fenced_json_parses() {
        let raw = "Sure, here is the verdict:\n```json\n{\"is_valid\": true, \"areas_to_avoid\": [], \"areas_try_to_avoid\": [], \"rationale\": \"ok\"}\n```";
        let v = normalize_llm_json(raw, SchemaId::PathApproval, &catalog()).unwrap();
        assert_eq!(v["is_valid"], json!(true));
    }

    #[test]
    fn sector_and_string_bool_repair() {
        let raw = r#"{"is_valid": "false", "areas to avoid": "B sector"}"#;
        let v = normalize_llm_json(raw, SchemaId::PathApproval, &catalog()).unwrap();
        assert_eq!(v["is_valid"], json!(false));
        let avoid: Vec<String> = v["areas_to_avoid"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_str().unwrap().to_string())
            .collect();
        assert_eq!(avoid, vec!["B101", "B102", "Corridor B"]);
    }

    #[test]
    fn room_number_repair() {
        let raw = r#"{"is_valid": false, "areasToAvoid": ["D102"], "areas_try_to_avoid": null}"#;
        let v = normalize_llm_json(raw, SchemaId::PathApproval, &catalog()).unwrap();
        assert_eq!(v["areas_to_avoid"], json!(["D102"]));
    }

    #[test]
    fn prose_is_unrepairable() {
        let err = normalize_llm_json("I cannot determine", SchemaId::PathApproval, &catalog());
        assert!(matches!(err, Err(CopilotError::Unrepairable { .. })));
    }

    #[test]
    fn normalizer_is_idempotent() {
        let raw = r#"{"relevant": "yes", "areas_to_avoid": "Lobby; D101", "start": "2026-03-02T14:00:00Z", "end": "2026-03-02T15:00:00Z", "reason": "drill"}"#;
        let once = normalize_llm_json(raw, SchemaId::EventIngest, &catalog()).unwrap();
        let twice = normalize_llm_json(&once.to_string(), SchemaId::EventIngest, &catalog()).unwrap();
        assert_eq!(once, twice);
    }
}
