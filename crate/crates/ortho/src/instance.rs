//! JSON instance documents.
//!
//! ```json
//! {
//!   "vertices": [
//!     {"id": 1, "label": "A", "box": {"width": 40, "height": 38}, "position": {"x": 0, "y": 0}},
//!     {"id": 2}
//!   ],
//!   "edges": [
//!     {"id": 7, "source": 1, "target": 2, "path": [[20, 0], [60, 0]]}
//!   ],
//!   "config": {"mode": "force", "delta_min": 12, "nudge": "full", "passes": "HVH", "seed": 1}
//! }
//! ```
//!
//! `box` gives a vertex's size, `position` its center. A `path` lists the
//! corner points of an edge from its source port to its target port.

use std::collections::BTreeMap;

use ortho_core::geom::{BoxShape, Point};
use ortho_core::graph::{Multigraph, Vertex};
use serde::{Deserialize, Serialize};

use crate::error::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Force,
    GivenPositions,
    GivenRouting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NudgeKind {
    Constrained,
    Full,
}

/// Settings an instance may carry; command line flags take precedence.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nudge: Option<NudgeKind>,
    /// Pass schedule such as `"HVH"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passes: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: Multigraph,
    /// Corner points per edge, in the graph's edge order, when every edge
    /// carries a path.
    pub paths: Option<Vec<Vec<Point>>>,
    pub config: InstanceConfig,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    vertices: Vec<VertexDoc>,
    #[serde(default)]
    edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config: Option<InstanceConfig>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDoc {
    id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    size: Option<SizeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    position: Option<PointDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SizeDoc {
    width: f64,
    height: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    id: u32,
    source: u32,
    target: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    path: Option<Vec<[f64; 2]>>,
}

fn bad(location: impl Into<String>, message: impl Into<String>) -> ParseError {
    ParseError::Invalid { location: location.into(), message: message.into() }
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let doc: Doc = serde_json::from_str(text)
        .map_err(|e| ParseError::Syntax { line: e.line(), column: e.column(), message: e.to_string() })?;

    let mut seen = BTreeMap::new();
    let mut vertices = Vec::with_capacity(doc.vertices.len());
    for (i, v) in doc.vertices.iter().enumerate() {
        let loc = format!("vertices[{i}] (id {})", v.id);
        if seen.insert(v.id, ()).is_some() {
            return Err(bad(loc, format!("duplicate vertex id {}", v.id)));
        }
        let position = v.position.as_ref().map(|p| Point::new(p.x, p.y));
        if position.is_some_and(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(bad(loc, "position is not finite"));
        }
        let shape = match &v.size {
            Some(s) => Some(
                BoxShape::new(position.unwrap_or_default(), s.width, s.height).map_err(|e| bad(&loc, e.to_string()))?,
            ),
            None => None,
        };
        vertices.push(Vertex { id: v.id, label: v.label.clone(), shape, position });
    }

    let mut edge_ids = BTreeMap::new();
    for (i, e) in doc.edges.iter().enumerate() {
        let loc = format!("edges[{i}] (id {})", e.id);
        if edge_ids.insert(e.id, i).is_some() {
            return Err(bad(loc, format!("duplicate edge id {}", e.id)));
        }
        for v in [e.source, e.target] {
            if !seen.contains_key(&v) {
                return Err(bad(loc, format!("unknown vertex id {v}")));
            }
        }
    }
    let graph = Multigraph::new(vertices, doc.edges.iter().map(|e| (e.id, e.source, e.target)))
        .map_err(|e| bad("document", e.to_string()))?;

    let with_path = doc.edges.iter().filter(|e| e.path.is_some()).count();
    let paths = if with_path == 0 {
        None
    } else if with_path < doc.edges.len() {
        return Err(bad("edges", "either every edge or no edge carries a path"));
    } else {
        let mut out = Vec::with_capacity(graph.m());
        for edge in graph.edges() {
            let i = edge_ids[&edge.id];
            let loc = format!("edges[{i}] (id {})", edge.id);
            let pts: Vec<Point> = doc.edges[i].path.as_ref().unwrap().iter().map(|&[x, y]| Point::new(x, y)).collect();
            if pts.len() < 2 {
                return Err(bad(loc, "path needs at least two points"));
            }
            for (k, w) in pts.windows(2).enumerate() {
                if !(w[0].x.is_finite() && w[0].y.is_finite() && w[1].x.is_finite() && w[1].y.is_finite()) {
                    return Err(bad(&loc, format!("path point {k} is not finite")));
                }
                if w[0].x != w[1].x && w[0].y != w[1].y {
                    return Err(bad(&loc, format!("path segment {k} is non-orthogonal")));
                }
            }
            out.push(pts);
        }
        Some(out)
    };

    if graph.vertices().iter().all(|v| v.shape.is_some() && v.position.is_some()) {
        let vs = graph.vertices();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                let (a, b) = (vs[i].shape.unwrap().rect(), vs[j].shape.unwrap().rect());
                if a.overlaps(&b) {
                    return Err(bad(
                        format!("vertices {} and {}", vs[i].id, vs[j].id),
                        "boxes overlap",
                    ));
                }
            }
        }
    }
    Ok(Instance { graph, paths, config: doc.config.unwrap_or_default() })
}

/// Serializes an instance so that [`parse_instance`] gives it back.
pub fn emit_instance(inst: &Instance) -> String {
    let g = &inst.graph;
    let doc = Doc {
        vertices: g
            .vertices()
            .iter()
            .map(|v| VertexDoc {
                id: v.id,
                label: v.label.clone(),
                size: v.shape.map(|s| SizeDoc { width: s.width, height: s.height }),
                position: v.position.map(|p| PointDoc { x: p.x, y: p.y }),
            })
            .collect(),
        edges: g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| EdgeDoc {
                id: e.id,
                source: g.vertices()[e.source].id,
                target: g.vertices()[e.target].id,
                path: inst.paths.as_ref().map(|p| p[i].iter().map(|q| [q.x, q.y]).collect()),
            })
            .collect(),
        config: (inst.config != InstanceConfig::default()).then(|| inst.config.clone()),
    };
    serde_json::to_string_pretty(&doc).expect("instance documents always serialize")
}
