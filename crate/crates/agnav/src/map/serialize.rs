//! osmAG writer. Emits the same dialect [`parse_osmag`](crate::map::parse_osmag)
//! reads, with canonical attribute order, so parse -> serialize -> parse is
//! structurally lossless.

use crate::map::model::*;

pub fn serialize_osmag(doc: &MapDocument) -> String {
    let mut out = String::with_capacity(4096);
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<osm version=\"0.6\" generator=\"agnav\">\n");

    for node in doc.nodes.values() {
        if node.extra_tags.is_empty() {
            out.push_str(&format!(
                "  <node id=\"{}\" lat=\"{:.9}\" lon=\"{:.9}\"/>\n",
                node.id, node.lat, node.lon
            ));
        } else {
            out.push_str(&format!(
                "  <node id=\"{}\" lat=\"{:.9}\" lon=\"{:.9}\">\n",
                node.id, node.lat, node.lon
            ));
            for (k, v) in &node.extra_tags {
                out.push_str(&format!("    <tag k=\"{}\" v=\"{}\"/>\n", escape(k), escape(v)));
            }
            out.push_str("  </node>\n");
        }
    }

    // areas then passages, each sorted by id via the BTreeMap
    for area in doc.areas.values() {
        out.push_str(&format!("  <way id=\"{}\">\n", area.id));
        for nd in &area.polygon {
            out.push_str(&format!("    <nd ref=\"{}\"/>\n", nd));
        }
        tag(&mut out, "osmAG:type", "area");
        tag(&mut out, "osmAG:areaType", area.area_type.as_str());
        tag(&mut out, "name", &area.name);
        tag(&mut out, "level", &area.level.to_string());
        if let Some(parent) = area.parent {
            tag(&mut out, "osmAG:parent", &parent.to_string());
        }
        for (k, v) in &area.extra_tags {
            tag(&mut out, k, v);
        }
        out.push_str("  </way>\n");
    }

    for p in doc.passages.values() {
        out.push_str(&format!("  <way id=\"{}\">\n", p.id));
        for nd in &p.segment {
            out.push_str(&format!("    <nd ref=\"{}\"/>\n", nd));
        }
        tag(&mut out, "osmAG:type", "passage");
        tag(&mut out, "osmAG:from", &p.area_a.to_string());
        tag(&mut out, "osmAG:to", &p.area_b.to_string());
        tag(&mut out, "osmAG:doorType", p.door_type.as_str());
        let level = if p.level_a == p.level_b {
            p.level_a.to_string()
        } else {
            format!("{};{}", p.level_a, p.level_b)
        };
        tag(&mut out, "level", &level);
        for (k, v) in &p.extra_tags {
            tag(&mut out, k, v);
        }
        out.push_str("  </way>\n");
    }

    out.push_str("</osm>\n");
    out
}

fn tag(out: &mut String, k: &str, v: &str) {
    out.push_str(&format!("    <tag k=\"{}\" v=\"{}\"/>\n", escape(k), escape(v)));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
