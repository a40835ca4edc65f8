//! Graph families, the built-in corpus and the degree expansion transform.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_graph::{build_plane_graph, GraphError, PlaneEmbedding, PlaneGraph, Point, VertexId};
use crate::reassembly::{ReassemblyTree, TreeBuilder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("graph is not a member of the constant-density family")]
    WrongFamily,
    #[error("vertex {vertex} has degree {degree}, expansion needs at least 3")]
    DegreeTooLow { vertex: VertexId, degree: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `k` concentric cycles with `f` inter-cycle edges between each
/// consecutive pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HFamilyParams {
    pub k: usize,
    pub f: usize,
}

impl HFamilyParams {
    pub fn new(k: usize, f: usize) -> Self {
        HFamilyParams { k, f }
    }

    /// `f > (16k − 13) / 6`, compared exactly.
    pub fn is_dense(&self) -> bool {
        6 * self.f as i64 > 16 * self.k as i64 - 13
    }

    pub fn vertex_count(&self) -> usize {
        2 * (self.k - 1) * self.f
    }

    fn check(&self) -> Result<(), GenError> {
        if self.k < 2 {
            return Err(GenError::BadParams(format!("k = {} must be at least 2", self.k)));
        }
        if self.f < 3 {
            return Err(GenError::BadParams(format!("f = {} must be at least 3", self.f)));
        }
        Ok(())
    }
}

/// Names of the H-family vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HVertex {
    /// `x_{i,j}` on cycle `i − 1`, endpoint of edge `e_{i,j}`.
    X(usize, usize),
    /// `y_{i,j}` on cycle `i`, endpoint of edge `e_{i,j}`.
    Y(usize, usize),
}

/// Vertex naming, drawing and edges of an H-family graph, with vertices
/// numbered cycle by cycle from the outside in.
#[derive(Clone, Debug)]
pub struct HLayout {
    pub params: HFamilyParams,
    pub names: Vec<HVertex>,
    pub coords: Vec<Point>,
    pub edges: Vec<[VertexId; 2]>,
}

impl HLayout {
    pub fn new(p: HFamilyParams) -> Result<Self, GenError> {
        p.check()?;
        let (k, f) = (p.k, p.f);
        let mut names = Vec::with_capacity(p.vertex_count());
        // cycle 0
        for j in 1..=f {
            names.push(HVertex::X(1, j));
        }
        for i in 1..k - 1 {
            for j in 1..=f {
                names.push(HVertex::Y(i, j));
                names.push(HVertex::X(i + 1, j));
            }
        }
        for j in 1..=f {
            names.push(HVertex::Y(k - 1, j));
        }
        let id = |v: HVertex| -> VertexId {
            match v {
                HVertex::X(1, j) => j - 1,
                HVertex::X(i, j) => f + 2 * f * (i - 2) + 2 * (j - 1) + 1,
                HVertex::Y(i, j) if i == k - 1 => f + 2 * f * (k - 2) + (j - 1),
                HVertex::Y(i, j) => f + 2 * f * (i - 1) + 2 * (j - 1),
            }
        };
        debug_assert!(names.iter().enumerate().all(|(n, &v)| id(v) == n));

        // radii shrink fast enough that every chord clears the next circle
        let rho = 1.25 / (PI / f as f64).cos();
        let radius = |level: usize| 100.0 / rho.powi(level as i32);
        let angle = |i: usize, j: usize| (2.0 * PI * j as f64 + PI * i as f64) / f as f64;
        let coords = names
            .iter()
            .map(|&v| {
                let (r, t) = match v {
                    HVertex::X(i, j) => (radius(i - 1), angle(i, j)),
                    HVertex::Y(i, j) => (radius(i), angle(i, j)),
                };
                // clockwise from straight up
                Point::new(r * t.sin(), r * t.cos())
            })
            .collect();

        let mut edges = Vec::with_capacity(3 * (k - 1) * f);
        let succ = |j: usize| j % f + 1;
        for j in 1..=f {
            edges.push([id(HVertex::X(1, j)), id(HVertex::X(1, succ(j)))]);
        }
        for i in 1..k - 1 {
            for j in 1..=f {
                edges.push([id(HVertex::Y(i, j)), id(HVertex::X(i + 1, j))]);
                edges.push([id(HVertex::X(i + 1, j)), id(HVertex::Y(i, succ(j)))]);
            }
        }
        for j in 1..=f {
            edges.push([id(HVertex::Y(k - 1, j)), id(HVertex::Y(k - 1, succ(j)))]);
        }
        for i in 1..k {
            for j in 1..=f {
                edges.push([id(HVertex::X(i, j)), id(HVertex::Y(i, j))]);
            }
        }
        Ok(HLayout { params: p, names, coords, edges })
    }

    pub fn id_of(&self, v: HVertex) -> Option<VertexId> {
        self.names.iter().position(|&w| w == v)
    }

    pub fn graph(&self) -> Result<PlaneGraph, GenError> {
        Ok(build_plane_graph(self.coords.clone(), self.edges.clone())?)
    }
}

pub fn gen_hfk(p: HFamilyParams) -> Result<PlaneGraph, GenError> {
    HLayout::new(p)?.graph()
}

/// Inside-out order of the constant-density graph: the innermost cycle
/// clockwise, then each enclosing cycle clockwise from its first vertex
/// with an edge to the inside.
pub fn inside_out_order(k: usize, c: usize) -> Result<Vec<HVertex>, GenError> {
    if c < 3 {
        return Err(GenError::BadParams(format!("c = {c} must be at least 3")));
    }
    if k < 2 {
        return Err(GenError::BadParams(format!("k = {k} must be at least 2")));
    }
    let mut order = Vec::new();
    for j in 1..=c {
        order.push(HVertex::Y(k - 1, j));
    }
    for i in (1..k - 1).rev() {
        for j in 1..=c {
            order.push(HVertex::X(i + 1, j));
            order.push(HVertex::Y(i, j % c + 1));
        }
    }
    for j in 1..=c {
        order.push(HVertex::X(1, j));
    }
    Ok(order)
}

/// The H-family graph with `f = c`, numbered in inside-out order so that
/// vertex `a_i` has id `i − 1`.
pub fn gen_constant_density(k: usize, c: usize) -> Result<PlaneGraph, GenError> {
    let order = inside_out_order(k, c)?;
    let lay = HLayout::new(HFamilyParams::new(k, c))?;
    let mut new_id = vec![0; order.len()];
    for (a, &v) in order.iter().enumerate() {
        new_id[lay.id_of(v).expect("named vertex")] = a;
    }
    let mut coords = vec![Point::new(0.0, 0.0); order.len()];
    for (old, &p) in lay.coords.iter().enumerate() {
        coords[new_id[old]] = p;
    }
    let edges = lay.edges.iter().map(|&[a, b]| [new_id[a], new_id[b]]).collect();
    Ok(build_plane_graph(coords, edges)?)
}

/// Left comb over the inside-out order of a constant-density graph.
pub fn inside_out_reassemble(g: &PlaneGraph) -> Result<ReassemblyTree, GenError> {
    let n = g.n();
    let want: BTreeSet<[VertexId; 2]> = g.edges().iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect();
    let mut found = false;
    for c in 3..=n / 2 {
        if !n.is_multiple_of(2 * c) {
            continue;
        }
        let k = n / (2 * c) + 1;
        let h = gen_constant_density(k, c)?;
        let have: BTreeSet<[VertexId; 2]> = h.edges().iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect();
        if have == want {
            found = true;
            break;
        }
    }
    if !found {
        return Err(GenError::WrongFamily);
    }
    let mut b = TreeBuilder::new(n);
    let mut acc = b.leaf(0);
    for v in 1..n {
        let l = b.leaf(v);
        acc = b.join(acc, l);
    }
    Ok(b.finish(acc))
}

/// Result of expanding high-degree vertices; `origin[v]` is the vertex of
/// the input that `v` came from.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub graph: PlaneGraph,
    pub origin: Vec<VertexId>,
}

/// Replace every vertex of degree `p ≥ 4` by a clockwise `p`-cycle whose
/// vertices carry its edges in rotation order.
pub fn expand_to_three_regular(g: &PlaneEmbedding) -> Result<PlaneGraph, GenError> {
    Ok(expand_with_origin(g)?.graph)
}

pub fn expand_with_origin(g: &PlaneEmbedding) -> Result<Expansion, GenError> {
    for v in 0..g.n() {
        if g.degree(v) < 3 {
            return Err(GenError::DegreeTooLow { vertex: v, degree: g.degree(v) });
        }
    }
    let eps = expansion_radius(g);
    let mut coords = Vec::new();
    let mut origin = Vec::new();
    // id of the copy of v that carries dart position i
    let mut slot: Vec<Vec<VertexId>> = Vec::with_capacity(g.n());
    let mut edges = Vec::new();
    for v in 0..g.n() {
        let p = g.coords()[v];
        if g.degree(v) == 3 {
            slot.push(vec![coords.len(); 3]);
            coords.push(p);
            origin.push(v);
            continue;
        }
        let base = coords.len();
        let ring = g.rotation(v);
        for d in ring {
            let q = g.coords()[g.head(*d)];
            let (dx, dy) = (q.x - p.x, q.y - p.y);
            let len = (dx * dx + dy * dy).sqrt();
            coords.push(Point::new(p.x + eps * dx / len, p.y + eps * dy / len));
            origin.push(v);
        }
        let deg = ring.len();
        for i in 0..deg {
            edges.push([base + i, base + (i + 1) % deg]);
        }
        slot.push((base..base + deg).collect());
    }
    for (e, &[a, b]) in g.edges().iter().enumerate() {
        let pa = g.ring_pos(crate::plane_graph::Dart::new(e, 0));
        let pb = g.ring_pos(crate::plane_graph::Dart::new(e, 1));
        edges.push([slot[a][pa], slot[b][pb]]);
    }
    let graph = build_plane_graph(coords, edges)?;
    Ok(Expansion { graph, origin })
}

// A radius small enough that the new cycles stay clear of every edge not
// incident to the expanded vertex.
fn expansion_radius(g: &PlaneEmbedding) -> f64 {
    let mut best = f64::INFINITY;
    for &[a, b] in g.edges() {
        let (p, q) = (g.coords()[a], g.coords()[b]);
        best = best.min(((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt());
    }
    for v in 0..g.n() {
        let p = g.coords()[v];
        for &[a, b] in g.edges() {
            if a == v || b == v {
                continue;
            }
            best = best.min(point_segment_distance(p, g.coords()[a], g.coords()[b]));
        }
    }
    if best.is_finite() {
        best * 0.25
    } else {
        1.0
    }
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0) };
    let (cx, cy) = (a.x + t * dx, a.y + t * dy);
    ((p.x - cx).powi(2) + (p.y - cy).powi(2)).sqrt()
}

/// Expected values attached to a corpus graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub k: usize,
    pub cycles: usize,
    pub icts: usize,
    /// α of the collapse/merge reassembling, when it is pinned down.
    pub alpha_ks: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub graph: PlaneGraph,
    pub expected: Expected,
}

fn pts(list: &[(f64, f64)]) -> Vec<Point> {
    list.iter().map(|&(x, y)| Point::new(x, y)).collect()
}

/// The 8-vertex cube: outer and inner squares joined by four spokes.
pub fn cube() -> PlaneGraph {
    let coords = pts(&[(0., 0.), (6., 0.), (6., 6.), (0., 6.), (2., 2.), (4., 2.), (4., 4.), (2., 4.)]);
    let edges = vec![[0, 1], [1, 2], [2, 3], [3, 0], [4, 5], [5, 6], [6, 7], [7, 4], [0, 4], [1, 5], [2, 6], [3, 7]];
    build_plane_graph(coords, edges).expect("cube is valid")
}

/// 30-vertex connected 3-regular graph with four blocks joined by bridges
/// and a three-leaf star.
pub fn three_regular_30() -> PlaneGraph {
    // A1..A13, B1..B9, C1..C7, D
    let coords = pts(&[
        (0., 12.),
        (12., 12.),
        (12., 0.),
        (0., 0.),
        (17., 12.),
        (25., 12.),
        (25., 3.),
        (17., 3.),
        (15., 23.),
        (18., 20.),
        (15., 17.),
        (12., 20.),
        (15., 15.),
        (2., 10.),
        (10., 10.),
        (10., 2.),
        (2., 2.),
        (19., 10.),
        (23., 10.),
        (23., 5.),
        (19., 5.),
        (15., 20.),
        (4., 8.),
        (8., 8.),
        (8., 4.),
        (4., 4.),
        (21., 10.),
        (21., 7.),
        (19., 7.),
        (6., 6.),
    ]);
    let a = |i: usize| i - 1;
    let b = |i: usize| 12 + i;
    let c = |i: usize| 21 + i;
    let d = 29;
    let edges = vec![
        [a(1), a(2)],
        [a(2), a(3)],
        [a(3), a(4)],
        [a(4), a(1)],
        [a(5), a(6)],
        [a(6), a(7)],
        [a(7), a(8)],
        [a(8), a(5)],
        [a(9), a(10)],
        [a(10), a(11)],
        [a(11), a(12)],
        [a(12), a(9)],
        [a(2), a(13)],
        [a(5), a(13)],
        [a(11), a(13)],
        [b(1), b(2)],
        [b(2), b(3)],
        [b(3), b(4)],
        [b(4), b(1)],
        [b(5), c(5)],
        [c(5), b(6)],
        [c(7), b(5)],
        [b(6), b(7)],
        [b(7), b(8)],
        [b(8), c(7)],
        [c(1), c(2)],
        [c(2), c(3)],
        [c(3), c(4)],
        [c(4), c(1)],
        [c(5), c(6)],
        [c(6), c(7)],
        [a(1), b(1)],
        [a(3), b(3)],
        [a(4), b(4)],
        [a(6), b(6)],
        [a(7), b(7)],
        [a(8), b(8)],
        [a(12), b(9)],
        [a(9), b(9)],
        [a(10), b(9)],
        [b(2), c(2)],
        [b(5), c(6)],
        [c(1), d],
        [c(3), d],
        [c(4), d],
    ];
    build_plane_graph(coords, edges).expect("30-vertex figure is valid")
}

/// 12-vertex 4-regular plane graph: an outer diamond around a ring of
/// eight vertices with an inner diamond.
pub fn four_regular_12() -> PlaneEmbedding {
    // B D F H I J K L M N O P
    let coords = pts(&[
        (6., -3.),
        (15., 6.),
        (6., 15.),
        (-3., 6.),
        (3., 3.),
        (6., 3.),
        (9., 3.),
        (9., 6.),
        (9., 9.),
        (6., 9.),
        (3., 9.),
        (3., 6.),
    ]);
    let id = |ch: char| "BDFHIJKLMNOP".find(ch).unwrap();
    let names = [
        "BD", "DF", "FH", "HB", "BK", "DM", "FO", "HI", "IJ", "IB", "JK", "JL", "KD", "KL", "LM", "LN", "MF", "MN", "NO",
        "NP", "OH", "OP", "PI", "PJ",
    ];
    let edges = names
        .iter()
        .map(|s| {
            let mut c = s.chars();
            [id(c.next().unwrap()), id(c.next().unwrap())]
        })
        .collect();
    PlaneEmbedding::new(coords, edges).expect("4-regular figure is valid")
}

/// Built-in graphs with their expected decomposition sizes.
pub fn load_corpus() -> Vec<CorpusEntry> {
    let mut out = vec![
        CorpusEntry {
            name: "cube".into(),
            graph: cube(),
            expected: Expected { k: 2, cycles: 2, icts: 4, alpha_ks: Some(4) },
        },
        CorpusEntry {
            name: "fig-3reg-30v".into(),
            graph: three_regular_30(),
            expected: Expected { k: 4, cycles: 6, icts: 11, alpha_ks: None },
        },
        CorpusEntry {
            name: "hfk-4-7".into(),
            graph: gen_hfk(HFamilyParams::new(4, 7)).expect("valid parameters"),
            expected: Expected { k: 4, cycles: 4, icts: 21, alpha_ks: Some(8) },
        },
    ];
    for (k, c) in [(2, 3), (3, 3), (5, 3)] {
        out.push(CorpusEntry {
            name: format!("constant-{k}-{c}"),
            graph: gen_constant_density(k, c).expect("valid parameters"),
            expected: Expected { k, cycles: k, icts: (k - 1) * c, alpha_ks: Some(2 * k) },
        });
    }
    out
}

pub fn corpus_entry(name: &str) -> Option<CorpusEntry> {
    load_corpus().into_iter().find(|e| e.name == name)
}
