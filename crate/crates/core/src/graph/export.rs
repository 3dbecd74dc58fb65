//! Deterministic DOT and JSON serialization of a memory graph.
//!
//! JSON layout (field order fixed):
//!
//! ```text
//! {"nodes": [{"id", "descriptor_bits", "part_grid", "environment"}],
//!  "edges": [{"from", "to", "dir_bin", "ring", "provenance"}]}
//! ```
//!
//! `part_grid` is `null` or `{"iu", "iv", "u", "v"}`; a `ZERO` displacement
//! has `null` for both `dir_bin` and `ring`. Engram patterns are not exported.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::pattern::{Descriptor, Engram};
use super::{EdgeRecord, MemoryGraph, NodeId, NodeRecord, PartLocation, Provenance};
use crate::codes::{DispBin, GridCell, GridPhase};
use crate::error::GraphError;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGraph {
    nodes: Vec<JsonNode>,
    edges: Vec<JsonEdge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNode {
    id: u32,
    descriptor_bits: Vec<u16>,
    part_grid: Option<JsonGrid>,
    environment: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGrid {
    iu: u32,
    iv: u32,
    u: f64,
    v: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEdge {
    from: u32,
    to: u32,
    dir_bin: Option<u32>,
    ring: Option<u32>,
    provenance: Provenance,
}

pub fn export_json(graph: &MemoryGraph) -> String {
    let doc = JsonGraph {
        nodes: graph
            .nodes()
            .map(|n| JsonNode {
                id: n.id.0,
                descriptor_bits: n.descriptor.bits().to_vec(),
                part_grid: n.location.map(|l| JsonGrid {
                    iu: l.cell.iu,
                    iv: l.cell.iv,
                    u: l.phase.u(),
                    v: l.phase.v(),
                }),
                environment: n.environment,
            })
            .collect(),
        edges: graph
            .edges()
            .map(|e| JsonEdge {
                from: e.from.0,
                to: e.to.0,
                dir_bin: e.disp.dir_bin(),
                ring: e.disp.ring(),
                provenance: e.provenance,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
    s.push('\n');
    s
}

pub fn import_json(text: &str) -> Result<MemoryGraph, GraphError> {
    let doc: JsonGraph =
        serde_json::from_str(text).map_err(|e| GraphError::Import(e.to_string()))?;
    let nodes = doc
        .nodes
        .into_iter()
        .map(|n| {
            let descriptor = Descriptor::from_bits(n.descriptor_bits, u16::MAX as u32 + 1)
                .ok_or_else(|| {
                    GraphError::Import(format!(
                        "node {}: descriptor bits must be sorted and non-empty",
                        n.id
                    ))
                })?;
            let location = match n.part_grid {
                None => None,
                Some(g) => {
                    if !((0.0..1.0).contains(&g.u) && (0.0..1.0).contains(&g.v)) {
                        return Err(GraphError::Import(format!(
                            "node {}: phase outside [0, 1)",
                            n.id
                        )));
                    }
                    Some(PartLocation {
                        cell: GridCell { iu: g.iu, iv: g.iv },
                        phase: GridPhase::new(g.u, g.v),
                    })
                }
            };
            Ok(NodeRecord {
                id: NodeId(n.id),
                descriptor,
                engram: Engram::default(),
                location,
                environment: n.environment,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let edges = doc
        .edges
        .into_iter()
        .map(|e| {
            let disp = match (e.dir_bin, e.ring) {
                (None, None) => DispBin::Zero,
                (Some(dir_bin), Some(ring)) => DispBin::Bin { dir_bin, ring },
                _ => {
                    return Err(GraphError::Import(format!(
                        "edge {} -> {}: dir_bin and ring must both be set or both null",
                        e.from, e.to
                    )))
                }
            };
            Ok(EdgeRecord {
                from: NodeId(e.from),
                to: NodeId(e.to),
                disp,
                provenance: e.provenance,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    MemoryGraph::from_parts(nodes, edges)
}

pub fn export_dot(graph: &MemoryGraph) -> String {
    let mut s = String::from("digraph relmap {\n");
    for n in graph.nodes() {
        let grid = match n.part_grid() {
            Some(c) => format!("({},{})", c.iu, c.iv),
            None => "unset".to_string(),
        };
        let _ = writeln!(
            s,
            "  {} [label=\"{} env{} {}\"];",
            n.id, n.id, n.environment, grid
        );
    }
    for e in graph.edges() {
        let style = match e.provenance {
            Provenance::Observed => "",
            Provenance::Consolidated => ", style=dashed",
        };
        let _ = writeln!(
            s,
            "  {} -> {} [label=\"{}\"{}];",
            e.from, e.to, e.disp, style
        );
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{AlloVector, DispCode, GridModule};
    use crate::config::{Config, EngramParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample() -> MemoryGraph {
        let c = Config::default();
        let code = DispCode::new(&c.disp);
        let grid = GridModule::new(&c.grid);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut g = MemoryGraph::new();
        let ids: Vec<NodeId> = (0..3)
            .map(|_| {
                let d = Descriptor::random(&mut rng, 256, 16);
                g.allocate_node(d, 0, &EngramParams::default(), &mut rng)
                    .unwrap()
            })
            .collect();
        g.associate_grid(
            ids[0],
            PartLocation::from_phase(GridPhase::new(0.123456789, 0.987654321), &grid),
        )
        .unwrap();
        g.learn_edge(
            ids[0],
            ids[1],
            code.encode_vector(AlloVector::new(1.0, 2.0)),
        )
        .unwrap();
        g.learn_edge(ids[1], ids[2], DispBin::Zero).unwrap();
        g.consolidate(2, &code);
        g
    }

    #[test]
    fn empty_graph_exports_headers_only() {
        let g = MemoryGraph::new();
        assert_eq!(export_dot(&g), "digraph relmap {\n}\n");
        let json: serde_json::Value = serde_json::from_str(&export_json(&g)).unwrap();
        assert_eq!(json, serde_json::json!({"nodes": [], "edges": []}));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let first = export_json(&sample());
        let again = export_json(&import_json(&first).unwrap());
        assert_eq!(first, again);
    }

    #[test]
    fn json_field_order() {
        let text = export_json(&sample());
        let pos = |k: &str| text.find(k).unwrap();
        assert!(pos("\"nodes\"") < pos("\"edges\""));
        assert!(pos("\"id\"") < pos("\"descriptor_bits\""));
        assert!(pos("\"descriptor_bits\"") < pos("\"part_grid\""));
        assert!(pos("\"part_grid\"") < pos("\"environment\""));
        assert!(pos("\"from\"") < pos("\"to\""));
        assert!(pos("\"to\"") < pos("\"dir_bin\""));
        assert!(pos("\"dir_bin\"") < pos("\"ring\""));
        assert!(pos("\"ring\"") < pos("\"provenance\""));
    }

    #[test]
    fn dot_has_one_labeled_edge() {
        let c = Config::default();
        let code = DispCode::new(&c.disp);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut g = MemoryGraph::new();
        let p = EngramParams::default();
        let a = g
            .allocate_node(Descriptor::random(&mut rng, 256, 16), 0, &p, &mut rng)
            .unwrap();
        let b = g
            .allocate_node(Descriptor::random(&mut rng, 256, 16), 0, &p, &mut rng)
            .unwrap();
        let bin = code.encode_vector(AlloVector::new(0.0, 1.0));
        g.learn_edge(a, b, bin).unwrap();
        let dot = export_dot(&g);
        assert_eq!(dot.matches("->").count(), 1);
        assert!(dot.contains(&format!("n0 -> n1 [label=\"{bin}\"]")));
    }

    #[test]
    fn import_rejects_bad_documents() {
        assert!(import_json("{").is_err());
        let dangling = r#"{"nodes": [], "edges": [{"from": 0, "to": 1, "dir_bin": 1, "ring": 1, "provenance": "OBSERVED"}]}"#;
        assert!(import_json(dangling).is_err());
        let half = r#"{"nodes": [{"id": 0, "descriptor_bits": [1], "part_grid": null, "environment": 0},
                                {"id": 1, "descriptor_bits": [2], "part_grid": null, "environment": 0}],
                      "edges": [{"from": 0, "to": 1, "dir_bin": 1, "ring": null, "provenance": "OBSERVED"}]}"#;
        assert!(import_json(half).is_err());
    }
}
