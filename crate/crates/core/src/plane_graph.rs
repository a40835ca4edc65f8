//! Plane graphs given by straight-line drawings.
//!
//! A [`PlaneEmbedding`] is any simple graph with coordinates; its rotation
//! system is read off the drawing. [`PlaneGraph`] adds 3-regularity.
//! [`PlaneMultigraph`] is the contractible variant used while reassembling.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet, VecDeque};
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// One half of an edge. Side 0 leaves `ends[0]`, side 1 leaves `ends[1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub edge: EdgeId,
    pub side: u8,
}

impl Dart {
    pub fn new(edge: EdgeId, side: u8) -> Self {
        Dart { edge, side }
    }

    pub fn rev(self) -> Dart {
        Dart { edge: self.edge, side: 1 - self.side }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex {vertex} has degree {degree}, expected 3")]
    NotThreeRegular { vertex: VertexId, degree: usize },
    #[error("edge {edge} is a self-loop or repeats an earlier edge")]
    NotSimple { edge: EdgeId },
    #[error("neighbors {a} and {b} of vertex {vertex} lie in the same direction")]
    DegenerateEmbedding { vertex: VertexId, a: VertexId, b: VertexId },
    #[error("edge {edge} references vertex {vertex}, but there are only {n} vertices")]
    BadEndpoint { edge: EdgeId, vertex: VertexId, n: usize },
    #[error("vertex {0} has non-finite coordinates")]
    NonFinite(VertexId),
    #[error("vertices {0} and {1} have identical coordinates")]
    DuplicatePoint(VertexId, VertexId),
    #[error("graph has no edges")]
    NoEdges,
    #[error("edge set to contract is empty or does not span a connected subgraph")]
    DisconnectedContraction,
    #[error("edge {0} is not a live edge of the multigraph")]
    DeadEdge(EdgeId),
}

/// A closed walk around one face, as a sequence of darts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceWalk {
    pub darts: Vec<Dart>,
}

impl FaceWalk {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    /// Number of times each edge is traversed.
    pub fn edge_counts(&self) -> BTreeMap<EdgeId, usize> {
        let mut m = BTreeMap::new();
        for d in &self.darts {
            *m.entry(d.edge).or_insert(0) += 1;
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeClass {
    Bounding,
    NonBounding,
}

/// Edges traversed once by the walk are bounding on that face; edges
/// traversed twice are not.
pub fn classify_walk_edges(w: &FaceWalk) -> BTreeMap<EdgeId, EdgeClass> {
    w.edge_counts()
        .into_iter()
        .map(|(e, c)| (e, if c == 1 { EdgeClass::Bounding } else { EdgeClass::NonBounding }))
        .collect()
}

/// Clockwise order of directions starting from straight up. Exact: uses a
/// half-plane split and the sign of the cross product.
pub(crate) fn cw_from_up(a: (f64, f64), b: (f64, f64)) -> Ordering {
    let half = |d: (f64, f64)| -> u8 {
        if d.0 > 0.0 || (d.0 == 0.0 && d.1 > 0.0) {
            0
        } else {
            1
        }
    };
    let (ha, hb) = (half(a), half(b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    let cross = a.0 * b.1 - a.1 * b.0;
    if cross < 0.0 {
        Ordering::Less
    } else if cross > 0.0 {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

/// Signed shoelace area; positive for counter-clockwise polygons.
pub fn signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    s / 2.0
}

/// Simple plane graph with arbitrary vertex degrees.
#[derive(Clone, Debug)]
pub struct PlaneEmbedding {
    coords: Vec<Point>,
    edges: Vec<[VertexId; 2]>,
    rot: Vec<Vec<Dart>>,
    // position of each dart in its vertex ring, indexed [edge][side]
    pos: Vec<[usize; 2]>,
}

impl PlaneEmbedding {
    pub fn new(coords: Vec<Point>, edges: Vec<[VertexId; 2]>) -> Result<Self, GraphError> {
        let n = coords.len();
        for (i, p) in coords.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(GraphError::NonFinite(i));
            }
        }
        let mut seen_pts: BTreeMap<(u64, u64), VertexId> = BTreeMap::new();
        for (i, p) in coords.iter().enumerate() {
            // normalize -0.0 so it collides with 0.0
            let key = ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits());
            if let Some(&j) = seen_pts.get(&key) {
                return Err(GraphError::DuplicatePoint(j, i));
            }
            seen_pts.insert(key, i);
        }
        let mut seen = HashSet::new();
        for (e, &[a, b]) in edges.iter().enumerate() {
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::BadEndpoint { edge: e, vertex: v, n });
                }
            }
            if a == b || !seen.insert((a.min(b), a.max(b))) {
                return Err(GraphError::NotSimple { edge: e });
            }
        }
        let mut rot: Vec<Vec<Dart>> = vec![Vec::new(); n];
        for (e, &[a, b]) in edges.iter().enumerate() {
            rot[a].push(Dart::new(e, 0));
            rot[b].push(Dart::new(e, 1));
        }
        for v in 0..n {
            let dir = |d: &Dart| {
                let w = edges[d.edge][1 - d.side as usize];
                (coords[w].x - coords[v].x, coords[w].y - coords[v].y)
            };
            rot[v].sort_by(|a, b| cw_from_up(dir(a), dir(b)));
            for i in 1..rot[v].len() {
                if cw_from_up(dir(&rot[v][i - 1]), dir(&rot[v][i])) == Ordering::Equal {
                    let other = |d: &Dart| edges[d.edge][1 - d.side as usize];
                    return Err(GraphError::DegenerateEmbedding {
                        vertex: v,
                        a: other(&rot[v][i - 1]),
                        b: other(&rot[v][i]),
                    });
                }
            }
        }
        let mut pos = vec![[0usize; 2]; edges.len()];
        for ring in &rot {
            for (i, d) in ring.iter().enumerate() {
                pos[d.edge][d.side as usize] = i;
            }
        }
        Ok(PlaneEmbedding { coords, edges, rot, pos })
    }

    /// Embedding with a prescribed clockwise rotation at every vertex.
    /// Coordinates are kept for display only.
    pub(crate) fn from_rotation(coords: Vec<Point>, edges: Vec<[VertexId; 2]>, rot: Vec<Vec<Dart>>) -> Self {
        let mut pos = vec![[usize::MAX; 2]; edges.len()];
        for ring in &rot {
            for (i, d) in ring.iter().enumerate() {
                pos[d.edge][d.side as usize] = i;
            }
        }
        debug_assert!(pos.iter().all(|p| p[0] != usize::MAX && p[1] != usize::MAX));
        PlaneEmbedding { coords, edges, rot, pos }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn edges(&self) -> &[[VertexId; 2]] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.rot[v].len()
    }

    /// Darts leaving `v` in clockwise order, starting from straight up.
    pub fn rotation(&self, v: VertexId) -> &[Dart] {
        &self.rot[v]
    }

    pub fn tail(&self, d: Dart) -> VertexId {
        self.edges[d.edge][d.side as usize]
    }

    pub fn head(&self, d: Dart) -> VertexId {
        self.edges[d.edge][1 - d.side as usize]
    }

    pub fn other(&self, e: EdgeId, v: VertexId) -> VertexId {
        let [a, b] = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.rot[v].iter().map(move |d| self.head(*d))
    }

    /// Position of `d` in the ring of its tail.
    pub fn ring_pos(&self, d: Dart) -> usize {
        self.pos[d.edge][d.side as usize]
    }

    /// Face-walk successor: arrive along `d`, leave on the next dart clockwise
    /// after the reversal of `d`.
    pub fn face_next(&self, d: Dart) -> Dart {
        let r = d.rev();
        let w = self.tail(r);
        let ring = &self.rot[w];
        ring[(self.ring_pos(r) + 1) % ring.len()]
    }

    /// Same successor restricted to the live edges of a subgraph.
    pub fn face_next_in(&self, d: Dart, alive: &[bool]) -> Dart {
        let r = d.rev();
        let w = self.tail(r);
        let ring = &self.rot[w];
        let p = self.ring_pos(r);
        for i in 1..=ring.len() {
            let c = ring[(p + i) % ring.len()];
            if alive[c.edge] {
                return c;
            }
        }
        r
    }

    pub fn walk_from(&self, start: Dart, alive: Option<&[bool]>) -> FaceWalk {
        let mut darts = vec![start];
        let mut d = start;
        let cap = 2 * self.m() + 1;
        loop {
            d = match alive {
                Some(a) => self.face_next_in(d, a),
                None => self.face_next(d),
            };
            if d == start || darts.len() > cap {
                break;
            }
            darts.push(d);
        }
        FaceWalk { darts }
    }

    /// Upper-leftmost vertex among `candidates`: least x, then greatest y.
    pub fn upper_leftmost(&self, candidates: impl Iterator<Item = VertexId>) -> Option<VertexId> {
        candidates.min_by(|&a, &b| {
            let (pa, pb) = (self.coords[a], self.coords[b]);
            pa.x.partial_cmp(&pb.x)
                .unwrap_or(Ordering::Equal)
                .then(pb.y.partial_cmp(&pa.y).unwrap_or(Ordering::Equal))
                .then(a.cmp(&b))
        })
    }

    /// Walk of the unbounded face of the component of `start_vertex`'s
    /// subgraph, where `start_vertex` is its upper-leftmost vertex.
    pub fn outer_walk_at(&self, start_vertex: VertexId, alive: Option<&[bool]>) -> Option<FaceWalk> {
        let first = self.rot[start_vertex]
            .iter()
            .copied()
            .find(|d| alive.is_none_or(|a| a[d.edge]))?;
        Some(self.walk_from(first, alive))
    }

    pub fn outer_face_walk(&self) -> Result<FaceWalk, GraphError> {
        let v = self
            .upper_leftmost((0..self.n()).filter(|&v| self.degree(v) > 0))
            .ok_or(GraphError::NoEdges)?;
        self.outer_walk_at(v, None).ok_or(GraphError::NoEdges)
    }

    /// Every face walk, each dart used exactly once.
    pub fn face_walks(&self) -> Vec<FaceWalk> {
        let mut used = vec![[false; 2]; self.m()];
        let mut out = Vec::new();
        for e in 0..self.m() {
            for s in 0..2u8 {
                if used[e][s as usize] {
                    continue;
                }
                let w = self.walk_from(Dart::new(e, s), None);
                for d in &w.darts {
                    used[d.edge][d.side as usize] = true;
                }
                out.push(w);
            }
        }
        out
    }

    /// Connected components (vertex lists, ascending), ignoring isolated
    /// vertices only when `skip_isolated` is set.
    pub fn components(&self, skip_isolated: bool) -> Vec<Vec<VertexId>> {
        let mut comp = vec![usize::MAX; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if comp[s] != usize::MAX || (skip_isolated && self.degree(s) == 0) {
                continue;
            }
            let id = out.len();
            let mut list = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < list.len() {
                let v = list[i];
                i += 1;
                for w in self.neighbors(v) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        list.push(w);
                    }
                }
            }
            list.sort_unstable();
            out.push(list);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components(false).len() == 1
    }

    /// Bridges of the graph, ascending.
    pub fn bridges(&self) -> Vec<EdgeId> {
        crate::plane_graph::bridges(self.n(), &self.edges)
    }

    /// Connected with no bridges and no cut vertex.
    pub fn is_biconnected(&self) -> bool {
        if !self.is_connected() || self.n() < 3 {
            return false;
        }
        articulation_points(self.n(), &self.edges).is_empty()
    }
}

/// Bridges of an undirected multigraph given as an edge list.
pub fn bridges(n: usize, edges: &[[VertexId; 2]]) -> Vec<EdgeId> {
    let (low, tin, parent_edge) = lowlink(n, edges);
    let mut out = Vec::new();
    for v in 0..n {
        if let Some(e) = parent_edge[v] {
            if low[v] == tin[v] {
                out.push(e);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Cut vertices of an undirected graph, ascending.
pub fn articulation_points(n: usize, edges: &[[VertexId; 2]]) -> Vec<VertexId> {
    let adj = adjacency(n, edges);
    let (low, tin, parent_edge) = lowlink(n, edges);
    let mut out = Vec::new();
    for v in 0..n {
        match parent_edge[v] {
            None => {
                let kids = adj[v]
                    .iter()
                    .filter(|&&(w, e)| parent_edge[w] == Some(e) && w != v)
                    .count();
                if kids > 1 {
                    out.push(v);
                }
            }
            Some(_) => {
                let cut = adj[v]
                    .iter()
                    .any(|&(w, e)| parent_edge[w] == Some(e) && w != v && low[w] >= tin[v]);
                if cut {
                    out.push(v);
                }
            }
        }
    }
    out
}

fn adjacency(n: usize, edges: &[[VertexId; 2]]) -> Vec<Vec<(VertexId, EdgeId)>> {
    let mut adj = vec![Vec::new(); n];
    for (e, &[a, b]) in edges.iter().enumerate() {
        adj[a].push((b, e));
        if a != b {
            adj[b].push((a, e));
        }
    }
    adj
}

// Iterative DFS computing discovery times, low-links and DFS tree edges.
fn lowlink(n: usize, edges: &[[VertexId; 2]]) -> (Vec<usize>, Vec<usize>, Vec<Option<EdgeId>>) {
    let adj = adjacency(n, edges);
    let mut tin = vec![usize::MAX; n];
    let mut low = vec![usize::MAX; n];
    let mut parent_edge: Vec<Option<EdgeId>> = vec![None; n];
    let mut timer = 0;
    for s in 0..n {
        if tin[s] != usize::MAX {
            continue;
        }
        tin[s] = timer;
        low[s] = timer;
        timer += 1;
        let mut stack = vec![(s, 0usize)];
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < adj[v].len() {
                let (w, e) = adj[v][*i];
                *i += 1;
                if Some(e) == parent_edge[v] {
                    continue;
                }
                if tin[w] == usize::MAX {
                    parent_edge[w] = Some(e);
                    tin[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, 0));
                } else {
                    low[v] = low[v].min(tin[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                }
            }
        }
    }
    (low, tin, parent_edge)
}

/// Simple 3-regular plane graph.
#[derive(Clone, Debug)]
pub struct PlaneGraph(PlaneEmbedding);

impl Deref for PlaneGraph {
    type Target = PlaneEmbedding;
    fn deref(&self) -> &PlaneEmbedding {
        &self.0
    }
}

impl PlaneGraph {
    pub fn from_embedding(emb: PlaneEmbedding) -> Result<Self, GraphError> {
        for v in 0..emb.n() {
            if emb.degree(v) != 3 {
                return Err(GraphError::NotThreeRegular { vertex: v, degree: emb.degree(v) });
            }
        }
        Ok(PlaneGraph(emb))
    }

    pub fn embedding(&self) -> &PlaneEmbedding {
        &self.0
    }

    pub fn into_embedding(self) -> PlaneEmbedding {
        self.0
    }
}

/// Build and validate a simple 3-regular plane graph from a straight-line
/// drawing.
pub fn build_plane_graph(coords: Vec<Point>, edges: Vec<[VertexId; 2]>) -> Result<PlaneGraph, GraphError> {
    let n = coords.len();
    for (e, &[a, b]) in edges.iter().enumerate() {
        for v in [a, b] {
            if v >= n {
                return Err(GraphError::BadEndpoint { edge: e, vertex: v, n });
            }
        }
    }
    let mut deg = vec![0usize; n];
    for &[a, b] in &edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    // degree is reported before simplicity so that a path reads as irregular
    if let Some(v) = (0..n).find(|&v| deg[v] != 3) {
        let mut seen = HashSet::new();
        let dup = edges
            .iter()
            .position(|&[a, b]| a == b || !seen.insert((a.min(b), a.max(b))));
        if let Some(e) = dup {
            return Err(GraphError::NotSimple { edge: e });
        }
        return Err(GraphError::NotThreeRegular { vertex: v, degree: deg[v] });
    }
    PlaneGraph::from_embedding(PlaneEmbedding::new(coords, edges)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Ordinary,
    Super,
}

/// Plane multigraph under contraction. Ordinary vertices keep their ids;
/// every contraction creates a super vertex with a fresh id above them.
#[derive(Clone, Debug)]
pub struct PlaneMultigraph {
    coords: Vec<Point>,
    n_ordinary: usize,
    kind: Vec<VertexKind>,
    alive_v: Vec<bool>,
    ring: Vec<Vec<Dart>>,
    ends: Vec<[VertexId; 2]>,
    orig: Vec<[VertexId; 2]>,
    alive_e: Vec<bool>,
    parts: Vec<Vec<VertexId>>,
    internal: Vec<Vec<EdgeId>>,
    parent: Vec<VertexId>,
}

impl PlaneMultigraph {
    pub fn from_embedding(g: &PlaneEmbedding) -> Self {
        let n = g.n();
        PlaneMultigraph {
            coords: g.coords().to_vec(),
            n_ordinary: n,
            kind: vec![VertexKind::Ordinary; n],
            alive_v: vec![true; n],
            ring: (0..n).map(|v| g.rotation(v).to_vec()).collect(),
            ends: g.edges().to_vec(),
            orig: g.edges().to_vec(),
            alive_e: vec![true; g.m()],
            parts: vec![Vec::new(); n],
            internal: vec![Vec::new(); n],
            parent: (0..n).collect(),
        }
    }

    pub fn n_ordinary(&self) -> usize {
        self.n_ordinary
    }

    /// Total number of vertex ids ever allocated.
    pub fn id_bound(&self) -> usize {
        self.kind.len()
    }

    pub fn m(&self) -> usize {
        self.ends.len()
    }

    pub fn kind(&self, v: VertexId) -> VertexKind {
        self.kind[v]
    }

    pub fn is_super(&self, v: VertexId) -> bool {
        self.kind[v] == VertexKind::Super
    }

    pub fn is_live(&self, v: VertexId) -> bool {
        self.alive_v[v]
    }

    pub fn live_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.kind.len()).filter(move |&v| self.alive_v[v])
    }

    pub fn edge_alive(&self, e: EdgeId) -> bool {
        self.alive_e[e]
    }

    pub fn ends(&self, e: EdgeId) -> [VertexId; 2] {
        self.ends[e]
    }

    pub fn original_ends(&self, e: EdgeId) -> [VertexId; 2] {
        self.orig[e]
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        self.ends[e][0] == self.ends[e][1]
    }

    pub fn ring(&self, v: VertexId) -> &[Dart] {
        &self.ring[v]
    }

    pub fn head(&self, d: Dart) -> VertexId {
        self.ends[d.edge][1 - d.side as usize]
    }

    pub fn tail(&self, d: Dart) -> VertexId {
        self.ends[d.edge][d.side as usize]
    }

    /// Original (ordinary) vertex at the tail of `d`.
    pub fn original_tail(&self, d: Dart) -> VertexId {
        self.orig[d.edge][d.side as usize]
    }

    /// Incident non-loop edge endpoints, counted with multiplicity.
    pub fn degree(&self, v: VertexId) -> usize {
        self.ring[v].iter().filter(|d| self.head(**d) != v).count()
    }

    pub fn loop_count(&self, v: VertexId) -> usize {
        self.ring[v].iter().filter(|d| self.head(**d) == v).count() / 2
    }

    pub fn live_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.ends.len()).filter(move |&e| self.alive_e[e])
    }

    /// Vertex currently containing ordinary vertex `v`.
    pub fn find(&self, mut v: VertexId) -> VertexId {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    /// Like [`find`](Self::find) with path compression.
    pub fn find_mut(&mut self, v: VertexId) -> VertexId {
        let root = self.find(v);
        let mut x = v;
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Ordinary vertices contained in `v`, ascending.
    pub fn members(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            if self.kind[x] == VertexKind::Ordinary {
                out.push(x);
            } else {
                stack.extend(self.parts[x].iter().copied());
            }
        }
        out.sort_unstable();
        out
    }

    /// Vertices merged directly into super vertex `v`.
    pub fn constituents(&self, v: VertexId) -> &[VertexId] {
        &self.parts[v]
    }

    /// Edges recorded as internal when `v` was formed (contracted edges and
    /// removed loops), not including those of its constituents.
    pub fn internal_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.internal[v]
    }

    pub fn position(&self, v: VertexId) -> Point {
        let ms = self.members(v);
        let k = ms.len().max(1) as f64;
        let (sx, sy) = ms.iter().fold((0.0, 0.0), |(x, y), &m| (x + self.coords[m].x, y + self.coords[m].y));
        Point::new(sx / k, sy / k)
    }

    /// Contract `edge_set` into one fresh super vertex. Other edges whose
    /// endpoints both end up inside remain as self-loops.
    pub fn contract_edges(&mut self, edge_set: &[EdgeId]) -> Result<VertexId, GraphError> {
        if edge_set.is_empty() {
            return Err(GraphError::DisconnectedContraction);
        }
        for &e in edge_set {
            if e >= self.ends.len() || !self.alive_e[e] {
                return Err(GraphError::DeadEdge(e));
            }
        }
        // connectivity of the edge set over current endpoints
        let mut verts: Vec<VertexId> = edge_set.iter().flat_map(|&e| self.ends[e]).collect();
        verts.sort_unstable();
        verts.dedup();
        let idx = |v: VertexId| verts.binary_search(&v).unwrap();
        let mut uf: Vec<usize> = (0..verts.len()).collect();
        fn root(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        let mut comps = verts.len();
        for &e in edge_set {
            let (a, b) = (root(&mut uf, idx(self.ends[e][0])), root(&mut uf, idx(self.ends[e][1])));
            if a != b {
                uf[a] = b;
                comps -= 1;
            }
        }
        if comps != 1 {
            return Err(GraphError::DisconnectedContraction);
        }

        let s = self.kind.len();
        self.kind.push(VertexKind::Super);
        self.alive_v.push(true);
        self.ring.push(Vec::new());
        self.parts.push(Vec::new());
        self.internal.push(Vec::new());
        self.parent.push(s);

        let absorb = |this: &mut Self, v: VertexId| -> Vec<Dart> {
            let r = std::mem::take(&mut this.ring[v]);
            for d in &r {
                this.ends[d.edge][d.side as usize] = s;
            }
            this.alive_v[v] = false;
            this.parent[v] = s;
            this.parts[s].push(v);
            r
        };

        let first = self.ends[edge_set[0]][0];
        let r = absorb(self, first);
        self.ring[s] = r;

        let mut pending: VecDeque<EdgeId> = edge_set.iter().copied().collect();
        let mut stall = 0;
        while let Some(e) = pending.pop_front() {
            let [a, b] = self.ends[e];
            if a == s && b == s {
                // both darts already inside: drop them
                self.ring[s].retain(|d| d.edge != e);
                self.alive_e[e] = false;
                self.internal[s].push(e);
                stall = 0;
                continue;
            }
            if a != s && b != s {
                pending.push_back(e);
                stall += 1;
                if stall > pending.len() {
                    return Err(GraphError::DisconnectedContraction);
                }
                continue;
            }
            stall = 0;
            let (c, side_s) = if a == s { (b, 0u8) } else { (a, 1u8) };
            let ds = Dart::new(e, side_s);
            let dc = ds.rev();
            let rc = absorb(self, c);
            let rs = std::mem::take(&mut self.ring[s]);
            let ps = rs.iter().position(|&d| d == ds).expect("dart in ring");
            let pc = rc.iter().position(|&d| d == dc).expect("dart in ring");
            let mut merged = Vec::with_capacity(rs.len() + rc.len() - 2);
            for i in 1..rs.len() {
                merged.push(rs[(ps + i) % rs.len()]);
            }
            for i in 1..rc.len() {
                merged.push(rc[(pc + i) % rc.len()]);
            }
            self.ring[s] = merged;
            self.alive_e[e] = false;
            self.internal[s].push(e);
        }
        Ok(s)
    }

    /// Remove every self-loop at `v`. Returns the removed edges.
    pub fn remove_loops(&mut self, v: VertexId) -> Vec<EdgeId> {
        let mut removed: Vec<EdgeId> = self.ring[v]
            .iter()
            .filter(|d| self.ends[d.edge][0] == v && self.ends[d.edge][1] == v)
            .map(|d| d.edge)
            .collect();
        removed.sort_unstable();
        removed.dedup();
        if removed.is_empty() {
            return removed;
        }
        let ends = &self.ends;
        self.ring[v].retain(|d| !(ends[d.edge][0] == v && ends[d.edge][1] == v));
        for &e in &removed {
            self.alive_e[e] = false;
            self.internal[v].push(e);
        }
        removed
    }

    pub fn face_next(&self, d: Dart) -> Dart {
        let r = d.rev();
        let w = self.tail(r);
        let ring = &self.ring[w];
        let p = ring.iter().position(|&x| x == r).expect("dart in ring");
        ring[(p + 1) % ring.len()]
    }

    pub fn walk_from(&self, start: Dart) -> FaceWalk {
        let mut darts = vec![start];
        let mut d = start;
        let cap = 2 * self.ends.len() + 1;
        loop {
            d = self.face_next(d);
            if d == start || darts.len() > cap {
                break;
            }
            darts.push(d);
        }
        FaceWalk { darts }
    }

    pub fn face_walks(&self) -> Vec<FaceWalk> {
        let mut used = vec![[false; 2]; self.ends.len()];
        let mut out = Vec::new();
        for e in self.live_edges().collect::<Vec<_>>() {
            for s in 0..2u8 {
                if used[e][s as usize] {
                    continue;
                }
                let w = self.walk_from(Dart::new(e, s));
                for d in &w.darts {
                    used[d.edge][d.side as usize] = true;
                }
                out.push(w);
            }
        }
        out
    }

    /// Walk of the unbounded face. The anchor is the upper-leftmost original
    /// vertex among tails of live darts, leaving on its first live edge
    /// clockwise from straight up.
    pub fn outer_face_walk(&self) -> Result<FaceWalk, GraphError> {
        let mut best: Option<Dart> = None;
        let up_key = |d: Dart| {
            let o = self.orig[d.edge][d.side as usize];
            let w = self.orig[d.edge][1 - d.side as usize];
            (o, (self.coords[w].x - self.coords[o].x, self.coords[w].y - self.coords[o].y))
        };
        for e in self.live_edges() {
            for s in 0..2u8 {
                let d = Dart::new(e, s);
                best = Some(match best {
                    None => d,
                    Some(b) => {
                        let (ob, db) = up_key(b);
                        let (od, dd) = up_key(d);
                        let (pb, pd) = (self.coords[ob], self.coords[od]);
                        let ord = pd
                            .x
                            .partial_cmp(&pb.x)
                            .unwrap_or(Ordering::Equal)
                            .then(pb.y.partial_cmp(&pd.y).unwrap_or(Ordering::Equal))
                            .then(od.cmp(&ob))
                            .then(cw_from_up(dd, db));
                        if ord == Ordering::Less {
                            d
                        } else {
                            b
                        }
                    }
                });
            }
        }
        best.map(|d| self.walk_from(d)).ok_or(GraphError::NoEdges)
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }
}

/// Euler characteristic check on the live part of a multigraph. Isolated
/// vertices are ignored.
pub fn euler_holds(mg: &PlaneMultigraph) -> bool {
    let verts: Vec<VertexId> = mg.live_vertices().collect();
    let edges: Vec<EdgeId> = mg.live_edges().collect();
    let faces = mg.face_walks().len();
    // components over live vertices
    let mut index = BTreeMap::new();
    for (i, &v) in verts.iter().enumerate() {
        index.insert(v, i);
    }
    let mut uf: Vec<usize> = (0..verts.len()).collect();
    fn root(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    let mut comps = verts.len();
    for &e in &edges {
        let [a, b] = mg.ends(e);
        let (ra, rb) = (root(&mut uf, index[&a]), root(&mut uf, index[&b]));
        if ra != rb {
            uf[ra] = rb;
            comps -= 1;
        }
    }
    // isolated vertices contribute one face-less component each
    let isolated = verts.iter().filter(|&&v| mg.ring(v).is_empty()).count();
    let nonisolated_comps = comps - isolated;
    let v_count = verts.len() - isolated;
    if nonisolated_comps == 0 {
        return faces == 0;
    }
    // V − E + F = 1 + C with a shared outer face; the walks count one outer
    // walk per component, hence 2C
    v_count as i64 - edges.len() as i64 + faces as i64 == 2 * nonisolated_comps as i64
}
