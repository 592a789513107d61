//! Area name resolution: exact match, case folding, sector expansion,
//! room-number lookup, then bounded fuzzy matching. Backends frequently
//! answer with "B sector" or a bare room number instead of the exact area
//! name; this pipeline absorbs those without silently misbinding.

use std::collections::BTreeMap;

use crate::map::{AreaType, MapDocument};

/// Minimum normalized edit similarity for a fuzzy hit.
pub const FUZZY_THRESHOLD: f64 = 0.85;

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: i64,
    pub name: String,
    pub level: i32,
    pub area_type: AreaType,
    pub sector: Option<char>,
    /// Ids of areas reachable through one passage.
    pub neighbors: Vec<i64>,
}

/// Name-lookup view of a map document.
#[derive(Debug, Clone)]
pub struct AreaCatalog {
    entries: BTreeMap<i64, CatalogEntry>,
}

/// Expansion of a sector phrase like "B sector".
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SectorExpansion {
    /// Non-corridor areas carrying the sector token (rooms, lobbies, ...).
    pub rooms: Vec<i64>,
    /// Corridors carrying the sector token.
    pub corridors: Vec<i64>,
    /// Corridors adjacent to a sector room but not themselves in the sector.
    pub fringe: Vec<i64>,
}

impl SectorExpansion {
    /// Every area actually in the sector (rooms and corridors).
    pub fn members(&self) -> Vec<i64> {
        let mut v = self.rooms.clone();
        v.extend(&self.corridors);
        v.sort_unstable();
        v
    }

    pub fn is_empty(&self) -> bool {
        self.rooms.is_empty() && self.corridors.is_empty()
    }
}

/// How a name bound to map areas.
#[derive(Debug, Clone, PartialEq)]
pub enum Resolution {
    /// Direct (exact/case-insensitive/fuzzy/room-number) hit; one id per level.
    Areas(Vec<i64>),
    /// Sector phrase expanded to its member areas.
    Sector(SectorExpansion),
    Unresolved { candidates: Vec<String> },
}

impl AreaCatalog {
    pub fn build(doc: &MapDocument) -> Self {
        let mut entries = BTreeMap::new();
        for area in doc.areas.values() {
            let neighbors = doc
                .passages
                .values()
                .filter_map(|p| p.other_area(area.id))
                .collect();
            entries.insert(
                area.id,
                CatalogEntry {
                    id: area.id,
                    name: area.name.clone(),
                    level: area.level,
                    area_type: area.area_type,
                    sector: sector_token(&area.name),
                    neighbors,
                },
            );
        }
        AreaCatalog { entries }
    }

    pub fn entry(&self, id: i64) -> Option<&CatalogEntry> {
        self.entries.get(&id)
    }

    pub fn names(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.entries.values().map(|e| e.name.as_str()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn name_of(&self, id: i64) -> Option<&str> {
        self.entries.get(&id).map(|e| e.name.as_str())
    }

    /// Ids whose canonical name equals `name` exactly (may span levels).
    fn exact(&self, name: &str) -> Vec<i64> {
        self.entries.values().filter(|e| e.name == name).map(|e| e.id).collect()
    }

    fn case_insensitive(&self, name: &str) -> Vec<i64> {
        let lower = name.to_lowercase();
        self.entries
            .values()
            .filter(|e| e.name.to_lowercase() == lower)
            .map(|e| e.id)
            .collect()
    }

    /// Expands a lettered sector into member rooms, member corridors, and
    /// the adjacent-corridor fringe.
    pub fn sector_members(&self, letter: char) -> SectorExpansion {
        let letter = letter.to_ascii_uppercase();
        let mut exp = SectorExpansion::default();
        for e in self.entries.values() {
            if e.sector == Some(letter) {
                if e.area_type == AreaType::Corridor {
                    exp.corridors.push(e.id);
                } else {
                    exp.rooms.push(e.id);
                }
            }
        }
        for e in self.entries.values() {
            if e.area_type == AreaType::Corridor
                && e.sector != Some(letter)
                && e.neighbors.iter().any(|n| exp.rooms.contains(n))
            {
                exp.fringe.push(e.id);
            }
        }
        exp.rooms.sort_unstable();
        exp.corridors.sort_unstable();
        exp.fringe.sort_unstable();
        exp
    }

    /// Areas whose name contains `token` as a whole word (room numbers).
    fn by_room_token(&self, token: &str) -> Vec<i64> {
        let token = token.to_lowercase();
        self.entries
            .values()
            .filter(|e| {
                e.name
                    .split(|c: char| !c.is_alphanumeric())
                    .any(|w| w.to_lowercase() == token)
            })
            .map(|e| e.id)
            .collect()
    }

    /// Full pipeline for one name-ish string.
    pub fn resolve(&self, raw: &str) -> Resolution {
        let name = raw.trim();
        if name.is_empty() {
            return Resolution::Unresolved { candidates: vec![] };
        }

        let ids = self.exact(name);
        if !ids.is_empty() {
            return Resolution::Areas(ids);
        }
        let ids = self.case_insensitive(name);
        if !ids.is_empty() {
            return Resolution::Areas(ids);
        }

        if let Some(letter) = parse_sector_phrase(name) {
            let exp = self.sector_members(letter);
            if !exp.is_empty() {
                return Resolution::Sector(exp);
            }
        }

        // bare room number or room code ("101", "B101", "room 101")
        if let Some(token) = room_token(name) {
            let ids = self.by_room_token(&token);
            if ids.len() == 1 {
                return Resolution::Areas(ids);
            }
        }

        // bounded fuzzy match
        let lower = name.to_lowercase();
        let mut best: Option<(f64, Vec<i64>)> = None;
        for candidate in self.names() {
            let sim = similarity(&lower, &candidate.to_lowercase());
            if sim >= FUZZY_THRESHOLD {
                match &mut best {
                    Some((s, ids)) if (sim - *s).abs() < 1e-12 => ids.extend(self.exact(candidate)),
                    Some((s, _)) if sim > *s => best = Some((sim, self.exact(candidate))),
                    None => best = Some((sim, self.exact(candidate))),
                    _ => {}
                }
            }
        }
        if let Some((_, mut ids)) = best {
            ids.sort_unstable();
            ids.dedup();
            return Resolution::Areas(ids);
        }

        Resolution::Unresolved {
            candidates: self.names().iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Sector letter of an area name: a standalone single letter token or the
/// alphabetic prefix of a room code ("B101" -> B, "Corridor B" -> B).
pub fn sector_token(name: &str) -> Option<char> {
    for token in name.split(|c: char| !c.is_alphanumeric()) {
        let chars: Vec<char> = token.chars().collect();
        match chars.as_slice() {
            [c] if c.is_ascii_alphabetic() => return Some(c.to_ascii_uppercase()),
            [c, rest @ ..] if c.is_ascii_alphabetic() && !rest.is_empty() && rest.iter().all(|d| d.is_ascii_digit()) => {
                return Some(c.to_ascii_uppercase())
            }
            _ => {}
        }
    }
    None
}

/// "B sector", "sector B", "the D sector" -> the sector letter.
pub fn parse_sector_phrase(text: &str) -> Option<char> {
    let tokens: Vec<String> = text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect();
    for (i, t) in tokens.iter().enumerate() {
        if t == "sector" {
            for j in [i.wrapping_sub(1), i + 1] {
                if let Some(n) = tokens.get(j) {
                    let chars: Vec<char> = n.chars().collect();
                    if let [c] = chars.as_slice() {
                        if c.is_ascii_alphabetic() {
                            return Some(c.to_ascii_uppercase());
                        }
                    }
                }
            }
        }
    }
    None
}

fn room_token(name: &str) -> Option<String> {
    let tokens: Vec<&str> = name
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .collect();
    // prefer code-like tokens; skip filler words
    for t in &tokens {
        let chars: Vec<char> = t.chars().collect();
        let code = matches!(chars.as_slice(),
            [c, rest @ ..] if c.is_ascii_alphabetic() && !rest.is_empty() && rest.iter().all(|d| d.is_ascii_digit()));
        if code || chars.iter().all(|c| c.is_ascii_digit()) {
            return Some((*t).to_string());
        }
    }
    None
}

/// Normalized Levenshtein similarity in [0, 1].
pub fn similarity(a: &str, b: &str) -> f64 {
    let (a, b): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
    let max_len = a.len().max(b.len());
    if max_len == 0 {
        return 1.0;
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    1.0 - prev[b.len()] as f64 / max_len as f64
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
    fn exact_and_case_insensitive_hits() {
        let c = catalog();
        assert_eq!(c.resolve("Lobby"), Resolution::Areas(vec![101]));
        assert_eq!(c.resolve("lobby"), Resolution::Areas(vec![101]));
        assert_eq!(c.resolve("ROBOTICS TRAINING LAB"), Resolution::Areas(vec![112]));
    }

    #[test]
    fn sector_phrase_expands_members_and_fringe() {
        let c = catalog();
        match c.resolve("B sector") {
            Resolution::Sector(exp) => {
                assert_eq!(exp.rooms, vec![106, 107]); // B101, B102
                assert_eq!(exp.corridors, vec![102]); // Corridor B
                assert!(exp.fringe.is_empty()); // only Corridor B touches B rooms
                assert_eq!(exp.members(), vec![102, 106, 107]);
            }
            other => panic!("expected sector expansion, got {other:?}"),
        }
    }

    #[test]
    fn room_numbers_bind_to_their_area() {
        let c = catalog();
        assert_eq!(c.resolve("D101"), Resolution::Areas(vec![108]));
        assert_eq!(c.resolve("room D102"), Resolution::Areas(vec![109]));
    }

    #[test]
    fn fuzzy_catches_typos_but_not_strangers() {
        let c = catalog();
        assert_eq!(c.resolve("Robotics Training Lob"), Resolution::Areas(vec![112]));
        assert!(matches!(c.resolve("Library"), Resolution::Unresolved { .. }));
        assert!(matches!(c.resolve("Cafeteria"), Resolution::Unresolved { .. }));
    }
}
