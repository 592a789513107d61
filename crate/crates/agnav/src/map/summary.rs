//! Compact textual map summary for LLM prompts: per level, each area with
//! its type and neighbors reachable through passages. No coordinates, so
//! equal documents summarize byte-identically regardless of XML ordering.

use crate::map::model::*;
use crate::map::MapError;

pub fn map_summary(doc: &MapDocument, level: Option<i32>) -> Result<String, MapError> {
    let levels = doc.levels();
    let selected: Vec<i32> = match level {
        Some(l) if levels.contains(&l) => vec![l],
        Some(l) => return Err(MapError::UnknownLevel { level: l }),
        None => levels,
    };

    let mut out = String::new();
    for l in selected {
        for area in doc.areas_on_level(l) {
            let mut links: Vec<String> = doc
                .passages
                .values()
                .filter(|p| p.borders(area.id))
                .filter_map(|p| {
                    let other = p.other_area(area.id)?;
                    let other = doc.area(other)?;
                    let cross_level = if other.level != area.level {
                        format!(" (L{})", other.level)
                    } else {
                        String::new()
                    };
                    Some(format!("{}{} via {}", other.name, cross_level, p.door_type.phrase()))
                })
                .collect();
            links.sort();
            let line = if links.is_empty() {
                format!("{} {} ({}, L{}): no connections", area.area_type.label(), area.name, area.area_type.as_str(), l)
            } else {
                format!(
                    "{} {} ({}, L{}): connects to {}",
                    area.area_type.label(),
                    area.name,
                    area.area_type.as_str(),
                    l,
                    links.join(", ")
                )
            };
            out.push_str(&line);
            out.push('\n');
        }
    }
    Ok(out)
}
