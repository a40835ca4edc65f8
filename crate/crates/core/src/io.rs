//! JSON and DOT formats for graphs, trees and carvings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_graph::{PlaneEmbedding, Point, VertexId};
use crate::reassembly::{Node, ReassemblyTree, RoutingTree};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Format(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[usize; 2]>,
}

impl GraphJson {
    pub fn from_embedding(g: &PlaneEmbedding) -> Self {
        GraphJson {
            vertices: g.coords().iter().enumerate().map(|(id, p)| VertexJson { id, x: p.x, y: p.y }).collect(),
            edges: g.edges().to_vec(),
        }
    }

    /// Coordinates indexed by id, plus the edge list. Ids must be exactly
    /// `0..n`.
    pub fn into_parts(self) -> Result<(Vec<Point>, Vec<[VertexId; 2]>), IoError> {
        let n = self.vertices.len();
        let mut coords = vec![None; n];
        for v in &self.vertices {
            if v.id >= n || coords[v.id].is_some() {
                return Err(IoError::Format(format!("vertex ids must be 0..{n} without repeats, saw {}", v.id)));
            }
            coords[v.id] = Some(Point::new(v.x, v.y));
        }
        Ok((coords.into_iter().map(|c| c.unwrap()).collect(), self.edges))
    }
}

pub fn parse_graph(text: &str) -> Result<(Vec<Point>, Vec<[VertexId; 2]>), IoError> {
    let gj: GraphJson = serde_json::from_str(text)?;
    gj.into_parts()
}

pub fn graph_to_json(g: &PlaneEmbedding) -> String {
    serde_json::to_string_pretty(&GraphJson::from_embedding(g)).expect("graph serializes")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNodeJson {
    pub id: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub leaf: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub children: Option<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    pub n: usize,
    pub nodes: Vec<TreeNodeJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<usize>,
}

pub fn tree_to_json(t: &ReassemblyTree, alpha: Option<usize>) -> String {
    let nodes = t
        .nodes()
        .iter()
        .enumerate()
        .map(|(id, node)| match *node {
            Node::Leaf(v) => TreeNodeJson { id, leaf: Some(v), children: None },
            Node::Join(a, b) => TreeNodeJson { id, leaf: None, children: Some([a, b]) },
        })
        .collect();
    serde_json::to_string_pretty(&TreeJson { n: t.n(), nodes, alpha }).expect("tree serializes")
}

/// Parse a tree file. Structural problems other than malformed ids are
/// left for validation.
pub fn parse_tree(text: &str) -> Result<ReassemblyTree, IoError> {
    let tj: TreeJson = serde_json::from_str(text)?;
    let len = tj.nodes.len();
    let mut nodes = vec![None; len];
    for nj in &tj.nodes {
        if nj.id >= len || nodes[nj.id].is_some() {
            return Err(IoError::Format(format!("node ids must be 0..{len} without repeats, saw {}", nj.id)));
        }
        let node = match (nj.leaf, nj.children) {
            (Some(v), None) => Node::Leaf(v),
            (None, Some([a, b])) => Node::Join(a, b),
            _ => return Err(IoError::Format(format!("node {} needs exactly one of leaf or children", nj.id))),
        };
        nodes[nj.id] = Some(node);
    }
    Ok(ReassemblyTree::from_raw(tj.n, nodes.into_iter().map(|x| x.unwrap()).collect()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarvingNodeJson {
    pub id: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub leaf: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarvingJson {
    pub n: usize,
    pub nodes: Vec<CarvingNodeJson>,
    pub branches: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub width: Option<usize>,
}

pub fn carving_to_json(rt: &RoutingTree, width: Option<usize>) -> String {
    let nodes = rt.leaf.iter().enumerate().map(|(id, &leaf)| CarvingNodeJson { id, leaf }).collect();
    serde_json::to_string_pretty(&CarvingJson { n: rt.leaf_count(), nodes, branches: rt.branches.clone(), width })
        .expect("carving serializes")
}

pub fn parse_carving(text: &str) -> Result<RoutingTree, IoError> {
    let cj: CarvingJson = serde_json::from_str(text)?;
    let len = cj.nodes.len();
    let mut leaf = vec![None; len];
    let mut seen = vec![false; len];
    for nj in &cj.nodes {
        if nj.id >= len || seen[nj.id] {
            return Err(IoError::Format(format!("node ids must be 0..{len} without repeats, saw {}", nj.id)));
        }
        seen[nj.id] = true;
        leaf[nj.id] = nj.leaf;
    }
    if cj.branches.iter().any(|b| b[0] >= len || b[1] >= len) {
        return Err(IoError::Format("branch references a missing node".into()));
    }
    let rt = RoutingTree { leaf, branches: cj.branches };
    if !rt.is_valid() {
        return Err(IoError::Format("not a carving: needs a tree with leaf degree 1 and internal degree 3".into()));
    }
    Ok(rt)
}

/// Undirected DOT with pinned positions.
pub fn graph_to_dot(g: &PlaneEmbedding) -> String {
    let mut s = String::from("graph G {\n  node [shape=circle, fontsize=10];\n");
    for (v, p) in g.coords().iter().enumerate() {
        let _ = writeln!(s, "  {v} [pos=\"{},{}!\"];", p.x, p.y);
    }
    for &[a, b] in g.edges() {
        let _ = writeln!(s, "  {a} -- {b};");
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::cube;
    use crate::reassembly::TreeBuilder;

    #[test]
    fn graph_round_trip() {
        let g = cube();
        let text = graph_to_json(&g);
        let (coords, edges) = parse_graph(&text).unwrap();
        assert_eq!(coords, g.coords());
        assert_eq!(edges, g.edges());
    }

    #[test]
    fn tree_round_trip() {
        let mut b = TreeBuilder::new(2);
        let (x, y) = (b.leaf(0), b.leaf(1));
        let r = b.join(x, y);
        let t = b.finish(r);
        let text = tree_to_json(&t, Some(1));
        assert_eq!(parse_tree(&text).unwrap(), t);
    }

    #[test]
    fn bad_ids_rejected() {
        let text = r#"{"vertices":[{"id":1,"x":0,"y":0}],"edges":[]}"#;
        assert!(parse_graph(text).is_err());
    }

    #[test]
    fn dot_has_positions() {
        let d = graph_to_dot(&cube());
        assert!(d.contains("pos=\"6,6!\""));
        assert!(d.contains("0 -- 1;"));
    }
}
