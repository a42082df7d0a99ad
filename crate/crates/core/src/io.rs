//! Graph documents: JSON with exact rational weights, and read-only
//! DIMACS edge lists.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::graph::{VertexId, WeightedGraph};
use crate::weight::Weight;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("line {line}: {msg}")]
    Dimacs { line: usize, msg: String },
    #[error("{0}")]
    Graph(#[from] crate::graph::GraphError),
    #[error("{0}")]
    Read(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: VertexId,
    pub weight: Weight,
}

/// Where a generated document came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub size: usize,
    pub seed: u64,
    pub weights: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub format: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<[VertexId; 2]>,
}

impl GraphDocument {
    pub fn from_graph(g: &WeightedGraph) -> Self {
        GraphDocument {
            format: FORMAT_VERSION,
            provenance: None,
            vertices: (0..g.n())
                .map(|v| VertexRecord {
                    id: g.id(v),
                    weight: g.weight(v).clone(),
                })
                .collect(),
            edges: g.edges().map(|(u, v)| [g.id(u), g.id(v)]).collect(),
        }
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn to_graph(&self) -> Result<WeightedGraph, IoError> {
        if self.format != FORMAT_VERSION {
            return Err(IoError::Version(self.format));
        }
        let ids: Vec<VertexId> = self.vertices.iter().map(|v| v.id).collect();
        let weights: Vec<Weight> = self.vertices.iter().map(|v| v.weight.clone()).collect();
        let mut pos = std::collections::HashMap::new();
        for (i, &id) in ids.iter().enumerate() {
            if pos.insert(id, i).is_some() {
                return Err(crate::graph::GraphError::DuplicateId(id).into());
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|&[a, b]| {
                let u = *pos
                    .get(&a)
                    .ok_or(crate::graph::GraphError::UnknownVertex(a))?;
                let v = *pos
                    .get(&b)
                    .ok_or(crate::graph::GraphError::UnknownVertex(b))?;
                Ok((u, v))
            })
            .collect::<Result<Vec<_>, crate::graph::GraphError>>()?;
        Ok(WeightedGraph::with_ids(ids, weights, &edges)?)
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }
}

/// `p edge n m` header and `e u v` lines (1-based); `c` lines are
/// comments. All weights are 1 and ids are the file's vertex numbers.
pub fn parse_dimacs(text: &str) -> Result<WeightedGraph, IoError> {
    let mut n = None;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: &str| IoError::Dimacs {
            line,
            msg: msg.to_string(),
        };
        let mut it = raw.split_whitespace();
        match it.next() {
            None | Some("c") => continue,
            Some("p") => {
                if n.is_some() {
                    return Err(err("second problem line"));
                }
                let _kind = it.next().ok_or_else(|| err("missing problem kind"))?;
                let count: usize = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("bad vertex count"))?;
                n = Some(count);
            }
            Some("e") => {
                let count = n.ok_or_else(|| err("edge before problem line"))?;
                let mut end = || -> Result<usize, IoError> {
                    let v: usize = it
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err("bad endpoint"))?;
                    if v == 0 || v > count {
                        return Err(err("endpoint out of range"));
                    }
                    Ok(v - 1)
                };
                let (u, v) = (end()?, end()?);
                // duplicate edges are common in these files
                if u != v && seen.insert((u.min(v), u.max(v))) {
                    edges.push((u, v));
                }
            }
            Some(other) => return Err(err(&format!("unknown line type {other:?}"))),
        }
    }
    let n = n.ok_or(IoError::Dimacs {
        line: 0,
        msg: "no problem line".into(),
    })?;
    Ok(WeightedGraph::with_ids(
        (1..=n).collect(),
        vec![Weight::one(); n],
        &edges,
    )?)
}

/// JSON document if the text starts with `{`, DIMACS otherwise.
pub fn parse_graph(text: &str) -> Result<WeightedGraph, IoError> {
    if text.trim_start().starts_with('{') {
        GraphDocument::parse(text)?.to_graph()
    } else {
        parse_dimacs(text)
    }
}
