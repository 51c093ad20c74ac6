//! JSON graph files.
//!
//! ```json
//! {"K": 2,
//!  "nodes": [{"id": "a", "a": ["1/1", "1/2"]}, {"id": "b", "a": ["1/1", "1/2"]}],
//!  "edges": [{"u": "a", "v": "b", "A": [["1/1", "1/1"], ["1/1", "0/1"]]}]}
//! ```
//!
//! Matrix rows are indexed by `u`'s color and `u` must be the
//! lexicographically smaller id. Node indices follow file order.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DecoratedGraph, Graph, Matrix};
use crate::rational::{format_q, parse_q, Q};

#[derive(Clone, Debug, Serialize, Deserialize)]
struct NodeRecord {
    id: String,
    a: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct EdgeRecord {
    u: String,
    v: String,
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GraphFile {
    #[serde(rename = "K")]
    k: usize,
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
}

/// A decorated graph together with the external node ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    pub ids: Vec<String>,
    pub graph: DecoratedGraph,
}

impl LabeledGraph {
    /// Ids `"0"`, `"1"`, ... for a graph built in code.
    pub fn with_index_ids(graph: DecoratedGraph) -> Self {
        LabeledGraph {
            ids: (0..graph.n()).map(|u| u.to_string()).collect(),
            graph,
        }
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }
}

fn parse_row(row: &[String]) -> Result<Vec<Q>> {
    row.iter().map(|s| parse_q(s)).collect()
}

pub fn parse_graph_json(text: &str) -> Result<LabeledGraph> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let k = file.k;
    let mut index = HashMap::new();
    for (i, node) in file.nodes.iter().enumerate() {
        if index.insert(node.id.clone(), i).is_some() {
            return Err(Error::Parse(format!("duplicate node id {:?}", node.id)));
        }
    }
    let node_weights = file
        .nodes
        .iter()
        .map(|node| parse_row(&node.a))
        .collect::<Result<Vec<_>>>()?;
    let lookup = |id: &str| {
        index
            .get(id)
            .copied()
            .ok_or_else(|| Error::Parse(format!("edge refers to unknown node {id:?}")))
    };
    let mut graph = Graph::new(file.nodes.len());
    let mut edge_weights = BTreeMap::new();
    for e in &file.edges {
        if e.u >= e.v {
            return Err(Error::Parse(format!(
                "edge ({:?}, {:?}): u must be the lexicographically smaller id",
                e.u, e.v
            )));
        }
        let (iu, iv) = (lookup(&e.u)?, lookup(&e.v)?);
        graph.add_edge(iu, iv)?;
        if e.a.len() != k {
            return Err(Error::MismatchedColorCount {
                left: e.a.len(),
                right: k,
            });
        }
        let mut entries = Vec::with_capacity(k * k);
        for row in &e.a {
            if row.len() != k {
                return Err(Error::MismatchedColorCount {
                    left: row.len(),
                    right: k,
                });
            }
            entries.extend(parse_row(row)?);
        }
        let m = Matrix::new(k, entries)?;
        let stored = if iu < iv { m } else { m.transpose() };
        edge_weights.insert((iu.min(iv), iu.max(iv)), stored);
    }
    let graph = DecoratedGraph::new(graph, k, node_weights, edge_weights)?;
    Ok(LabeledGraph {
        ids: file.nodes.into_iter().map(|n| n.id).collect(),
        graph,
    })
}

/// Inverse of [`parse_graph_json`]; pins are not part of the format.
pub fn graph_to_json(lg: &LabeledGraph) -> String {
    let g = &lg.graph;
    let nodes = (0..g.n())
        .map(|u| NodeRecord {
            id: lg.ids[u].clone(),
            a: g.node_weight(u).iter().map(format_q).collect(),
        })
        .collect();
    let mut edges: Vec<EdgeRecord> = g
        .edge_matrices()
        .map(|((x, y), m)| {
            let (u, v, m) = if lg.ids[x] < lg.ids[y] {
                (x, y, m.clone())
            } else {
                (y, x, m.transpose())
            };
            EdgeRecord {
                u: lg.ids[u].clone(),
                v: lg.ids[v].clone(),
                a: m.rows().map(|r| r.iter().map(format_q).collect()).collect(),
            }
        })
        .collect();
    edges.sort_by(|a, b| (&a.u, &a.v).cmp(&(&b.u, &b.v)));
    let file = GraphFile { k: g.k(), nodes, edges };
    serde_json::to_string_pretty(&file).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{self, TestGraph};
    use crate::rational::frac;

    #[test]
    fn round_trip_keeps_orientation() {
        let g = models::build_test_graph(TestGraph::Path(3)).unwrap();
        let m = Matrix::from_fn(2, |i, j| frac((2 * i + j + 1) as i64, 3));
        let d = DecoratedGraph::from_fn(g, 2, |_| vec![frac(1, 1), frac(1, 2)], |_, _| m.clone()).unwrap();
        // "10" < "9" lexicographically, so node 2's row index flips on the wire.
        let lg = LabeledGraph {
            ids: vec!["8".into(), "9".into(), "10".into()],
            graph: d,
        };
        let text = graph_to_json(&lg);
        assert_eq!(parse_graph_json(&text).unwrap(), lg);
        assert!(text.contains("\"u\": \"10\""));
    }

    #[test]
    fn rejects_reversed_edges_and_bad_rationals() {
        let base =
            r#"{"K":1,"nodes":[{"id":"a","a":["1"]},{"id":"b","a":["1"]}],"edges":[{"u":"b","v":"a","A":[["1"]]}]}"#;
        assert!(parse_graph_json(base).is_err());
        let bad = r#"{"K":1,"nodes":[{"id":"a","a":["0.5"]}],"edges":[]}"#;
        assert!(parse_graph_json(bad).is_err());
        let neg = r#"{"K":1,"nodes":[{"id":"a","a":["-1/2"]}],"edges":[]}"#;
        assert!(parse_graph_json(neg).is_err());
    }
}
