//! Edge-outerplanarity layers.
//!
//! Layer `i` is the set of edges on the outer face of the residual graph
//! `G_i`. Edges walked once form the cycle set `L_i`, edges walked twice
//! form the tree set `M_i`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_graph::{signed_area, Dart, EdgeId, PlaneEmbedding, PlaneGraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecomposeError {
    #[error("graph has {0} connected components")]
    Disconnected(usize),
    #[error("malformed layer structure: {0}")]
    Malformed(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexClass {
    Inward,
    Outward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Cycle(usize),
    Tree(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeLayer {
    pub index: usize,
    pub cycle_edges: Vec<EdgeId>,
    pub ict_edges: Vec<EdgeId>,
}

/// A cycle of some `L_i`, listed clockwise. `edges[j]` joins `ring[j]` and
/// `ring[(j + 1) % len]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub level: usize,
    pub ring: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub enclosing: Option<usize>,
}

/// An inter-cycle tree: a component of some `M_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ict {
    pub level: usize,
    pub edges: Vec<EdgeId>,
    pub leaves: Vec<VertexId>,
    pub internal: Vec<VertexId>,
    pub enclosing: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerDecomposition {
    pub k: usize,
    pub layers: Vec<EdgeLayer>,
    pub cycles: Vec<Cycle>,
    pub icts: Vec<Ict>,
    pub vertex_class: Vec<Option<VertexClass>>,
    pub vertex_cycle: Vec<Option<usize>>,
    pub edge_kind: Vec<EdgeKind>,
    pub edge_level: Vec<usize>,
}

impl LayerDecomposition {
    pub fn cycle_of(&self, v: VertexId) -> Option<usize> {
        self.vertex_cycle[v]
    }

    pub fn class_of(&self, v: VertexId) -> Option<VertexClass> {
        self.vertex_class[v]
    }

    /// ICTs of the cycle's own level that touch it, i.e. those incident to
    /// it from outside.
    pub fn outside_icts(&self, cycle: usize) -> Vec<usize> {
        let mut out = BTreeSet::new();
        for (t, ict) in self.icts.iter().enumerate() {
            if ict.leaves.iter().any(|&l| {
                self.vertex_cycle[l] == Some(cycle) && self.vertex_class[l] == Some(VertexClass::Outward)
            }) {
                out.insert(t);
            }
        }
        out.into_iter().collect()
    }

    pub fn to_json_value(&self, g: &PlaneEmbedding) -> serde_json::Value {
        let pair = |e: &EdgeId| {
            let [a, b] = g.edge(*e);
            serde_json::json!([a.min(b), a.max(b)])
        };
        let layers: Vec<_> = self
            .layers
            .iter()
            .map(|l| {
                serde_json::json!({
                    "L": l.cycle_edges.iter().map(pair).collect::<Vec<_>>(),
                    "M": l.ict_edges.iter().map(pair).collect::<Vec<_>>(),
                })
            })
            .collect();
        let cycles: Vec<_> = self
            .cycles
            .iter()
            .map(|c| serde_json::json!({"level": c.level, "ring": c.ring}))
            .collect();
        let icts: Vec<_> = self
            .icts
            .iter()
            .map(|t| serde_json::json!({"level": t.level, "edges": t.edges.iter().map(pair).collect::<Vec<_>>()}))
            .collect();
        let pick = |c: VertexClass| -> Vec<VertexId> {
            (0..self.vertex_class.len()).filter(|&v| self.vertex_class[v] == Some(c)).collect()
        };
        serde_json::json!({
            "k": self.k,
            "layers": layers,
            "cycles": cycles,
            "icts": icts,
            "inward": pick(VertexClass::Inward),
            "outward": pick(VertexClass::Outward),
        })
    }
}

/// Peel the graph into edge layers, extract cycles and ICTs, classify
/// cycle vertices.
pub fn decompose(g: &PlaneGraph) -> Result<LayerDecomposition, DecomposeError> {
    decompose_embedding(g)
}

/// Same as [`decompose`] for any simple plane graph. Cycle and tree
/// extraction assumes maximum degree 3.
pub fn decompose_embedding(g: &PlaneEmbedding) -> Result<LayerDecomposition, DecomposeError> {
    decompose_with(g, true)
}

/// Like [`decompose_embedding`], but cycle vertices without an off-cycle
/// edge are left unclassified instead of rejected.
pub(crate) fn decompose_lenient(g: &PlaneEmbedding) -> Result<LayerDecomposition, DecomposeError> {
    decompose_with(g, false)
}

fn decompose_with(g: &PlaneEmbedding, strict: bool) -> Result<LayerDecomposition, DecomposeError> {
    let comps = g.components(true).len();
    if comps > 1 {
        return Err(DecomposeError::Disconnected(comps));
    }
    let n = g.n();
    let m = g.m();
    let (layers, edge_level, is_cycle_edge) = peel(g);
    let k = layers.len();

    // cycles: components of each L_i
    let mut cycles: Vec<Cycle> = Vec::new();
    let mut icts: Vec<Ict> = Vec::new();
    for (i, layer) in layers.iter().enumerate() {
        for comp in edge_components(g, &layer.cycle_edges) {
            cycles.push(build_cycle(g, i, &comp)?);
        }
        for comp in edge_components(g, &layer.ict_edges) {
            icts.push(build_ict(g, i, &comp)?);
        }
    }
    let lowest = |vs: &[VertexId]| vs.iter().copied().min().unwrap_or(usize::MAX);
    cycles.sort_by_key(|c| (c.level, lowest(&c.ring)));
    icts.sort_by_key(|t| {
        let mut all: Vec<VertexId> = t.leaves.clone();
        all.extend(&t.internal);
        (t.level, lowest(&all))
    });

    let mut edge_kind = vec![EdgeKind::Cycle(usize::MAX); m];
    let mut vertex_cycle = vec![None; n];
    for (c, cyc) in cycles.iter().enumerate() {
        for &e in &cyc.edges {
            edge_kind[e] = EdgeKind::Cycle(c);
        }
        for &v in &cyc.ring {
            if vertex_cycle[v].is_some() {
                return Err(DecomposeError::Malformed(format!("vertex {v} lies on two cycles")));
            }
            vertex_cycle[v] = Some(c);
        }
    }
    for (t, ict) in icts.iter().enumerate() {
        for &e in &ict.edges {
            edge_kind[e] = EdgeKind::Tree(t);
        }
    }
    debug_assert!((0..m).all(|e| is_cycle_edge[e] == matches!(edge_kind[e], EdgeKind::Cycle(_))));

    // inward / outward
    let mut vertex_class = vec![None; n];
    for (c, cyc) in cycles.iter().enumerate() {
        for (j, &v) in cyc.ring.iter().enumerate() {
            let len = cyc.ring.len();
            let on_cycle = [cyc.edges[j], cyc.edges[(j + len - 1) % len]];
            let third: Vec<EdgeId> = g
                .rotation(v)
                .iter()
                .map(|d| d.edge)
                .filter(|e| !on_cycle.contains(e))
                .collect();
            if third.is_empty() && !strict {
                continue;
            }
            if third.len() != 1 {
                return Err(DecomposeError::Malformed(format!(
                    "cycle vertex {v} has {} off-cycle edges",
                    third.len()
                )));
            }
            let t = third[0];
            let cls = match edge_kind[t] {
                EdgeKind::Tree(_) if edge_level[t] == cyc.level => VertexClass::Outward,
                EdgeKind::Tree(_) if edge_level[t] == cyc.level + 1 => VertexClass::Inward,
                _ => {
                    return Err(DecomposeError::Malformed(format!(
                        "third edge of vertex {v} on cycle {c} is not an adjacent-level tree edge"
                    )))
                }
            };
            vertex_class[v] = Some(cls);
        }
    }

    // enclosing cycles via residual components
    for i in 1..k {
        let alive: Vec<bool> = (0..m).map(|e| edge_level[e] >= i).collect();
        let comp_of = residual_components(g, &alive);
        let mut enclosing_of_comp: BTreeMap<usize, usize> = BTreeMap::new();
        for v in 0..n {
            if let (Some(cid), Some(c)) = (comp_of[v], vertex_cycle[v]) {
                if cycles[c].level + 1 == i {
                    let entry = enclosing_of_comp.entry(cid).or_insert(c);
                    *entry = (*entry).min(c);
                }
            }
        }
        for cyc in cycles.iter_mut().filter(|c| c.level == i) {
            cyc.enclosing = comp_of[cyc.ring[0]].and_then(|cid| enclosing_of_comp.get(&cid).copied());
        }
        for ict in icts.iter_mut().filter(|t| t.level == i) {
            let v = g.edge(ict.edges[0])[0];
            ict.enclosing = comp_of[v].and_then(|cid| enclosing_of_comp.get(&cid).copied());
        }
    }

    Ok(LayerDecomposition { k, layers, cycles, icts, vertex_class, vertex_cycle, edge_kind, edge_level })
}

pub fn edge_outerplanarity(g: &PlaneGraph) -> Result<usize, DecomposeError> {
    let comps = g.components(true).len();
    if comps > 1 {
        return Err(DecomposeError::Disconnected(comps));
    }
    Ok(peel(g).0.len())
}

/// Edge-outerplanarity of any plane graph, by peeling alone.
pub fn edge_outerplanarity_of(g: &PlaneEmbedding) -> usize {
    peel(g).0.len()
}

/// Admissible range for the vertex outerplanarity given `k`.
pub fn vertex_outerplanarity_bounds(d: &LayerDecomposition) -> (usize, usize) {
    (d.k.saturating_sub(1), d.k)
}

fn peel(g: &PlaneEmbedding) -> (Vec<EdgeLayer>, Vec<usize>, Vec<bool>) {
    let m = g.m();
    let mut alive = vec![true; m];
    let mut remaining = m;
    let mut layers = Vec::new();
    let mut edge_level = vec![usize::MAX; m];
    let mut is_cycle = vec![false; m];
    while remaining > 0 {
        let i = layers.len();
        let comp_of = residual_components(g, &alive);
        let mut starts: BTreeMap<usize, VertexId> = BTreeMap::new();
        for v in 0..g.n() {
            if let Some(c) = comp_of[v] {
                let e = starts.entry(c).or_insert(v);
                let (p, q) = (g.coords()[v], g.coords()[*e]);
                if p.x < q.x || (p.x == q.x && p.y > q.y) {
                    *e = v;
                }
            }
        }
        let mut layer = EdgeLayer { index: i, cycle_edges: Vec::new(), ict_edges: Vec::new() };
        let mut walked = Vec::new();
        for &s in starts.values() {
            let w = g.outer_walk_at(s, Some(&alive)).expect("component has an edge");
            for (e, c) in w.edge_counts() {
                if c == 1 {
                    layer.cycle_edges.push(e);
                    is_cycle[e] = true;
                } else {
                    layer.ict_edges.push(e);
                }
                walked.push(e);
            }
        }
        for e in walked {
            if alive[e] {
                alive[e] = false;
                edge_level[e] = i;
                remaining -= 1;
            }
        }
        layer.cycle_edges.sort_unstable();
        layer.ict_edges.sort_unstable();
        layers.push(layer);
    }
    (layers, edge_level, is_cycle)
}

// Component id of every vertex with at least one live edge.
fn residual_components(g: &PlaneEmbedding, alive: &[bool]) -> Vec<Option<usize>> {
    let n = g.n();
    let mut comp = vec![None; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s].is_some() || !g.rotation(s).iter().any(|d| alive[d.edge]) {
            continue;
        }
        comp[s] = Some(next);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for d in g.rotation(v) {
                if alive[d.edge] {
                    let w = g.head(*d);
                    if comp[w].is_none() {
                        comp[w] = Some(next);
                        stack.push(w);
                    }
                }
            }
        }
        next += 1;
    }
    comp
}

// Connected components of an edge subset, each as a sorted edge list.
fn edge_components(g: &PlaneEmbedding, edges: &[EdgeId]) -> Vec<Vec<EdgeId>> {
    let mut mark = vec![false; g.m()];
    for &e in edges {
        mark[e] = true;
    }
    let mut seen = vec![false; g.m()];
    let mut out = Vec::new();
    for &e0 in edges {
        if seen[e0] {
            continue;
        }
        seen[e0] = true;
        let mut comp = vec![e0];
        let mut i = 0;
        while i < comp.len() {
            let e = comp[i];
            i += 1;
            for v in g.edge(e) {
                for d in g.rotation(v) {
                    if mark[d.edge] && !seen[d.edge] {
                        seen[d.edge] = true;
                        comp.push(d.edge);
                    }
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn build_cycle(g: &PlaneEmbedding, level: usize, edges: &[EdgeId]) -> Result<Cycle, DecomposeError> {
    let mut inc: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
    for &e in edges {
        for v in g.edge(e) {
            inc.entry(v).or_default().push(e);
        }
    }
    if inc.len() != edges.len() || inc.values().any(|l| l.len() != 2) {
        return Err(DecomposeError::Malformed(format!("layer {level} cycle edges do not form a simple cycle")));
    }
    let start = *inc.keys().next().unwrap();
    let mut ring = vec![start];
    let mut cyc_edges = Vec::new();
    let mut prev_edge = usize::MAX;
    let mut v = start;
    loop {
        let e = *inc[&v].iter().find(|&&e| e != prev_edge).unwrap();
        cyc_edges.push(e);
        let w = g.other(e, v);
        if w == start {
            break;
        }
        ring.push(w);
        prev_edge = e;
        v = w;
    }
    let pts: Vec<_> = ring.iter().map(|&v| g.coords()[v]).collect();
    if signed_area(&pts) > 0.0 {
        // counter-clockwise: reverse, keeping `start` first
        ring[1..].reverse();
        cyc_edges.reverse();
    }
    Ok(Cycle { level, ring, edges: cyc_edges, enclosing: None })
}

fn build_ict(g: &PlaneEmbedding, level: usize, edges: &[EdgeId]) -> Result<Ict, DecomposeError> {
    let mut deg: BTreeMap<VertexId, usize> = BTreeMap::new();
    for &e in edges {
        for v in g.edge(e) {
            *deg.entry(v).or_insert(0) += 1;
        }
    }
    if deg.len() != edges.len() + 1 {
        return Err(DecomposeError::Malformed(format!("layer {level} tree edges contain a cycle")));
    }
    let mut leaves = Vec::new();
    let mut internal = Vec::new();
    for (&v, &d) in &deg {
        match d {
            1 => leaves.push(v),
            3 => internal.push(v),
            _ => {
                return Err(DecomposeError::Malformed(format!("tree vertex {v} has tree-degree {d}")));
            }
        }
    }
    Ok(Ict { level, edges: edges.to_vec(), leaves, internal, enclosing: None })
}

/// Structural validator: each `G[L_i]` is a union of simple cycles, each
/// `G[M_i]` a forest, each `G[K_i]` a union of cacti, and the layers
/// partition the edge set.
pub fn cacti_check(d: &LayerDecomposition, g: &PlaneEmbedding) -> bool {
    let m = g.m();
    let mut count = vec![0usize; m];
    for l in &d.layers {
        for &e in l.cycle_edges.iter().chain(&l.ict_edges) {
            if e >= m {
                return false;
            }
            count[e] += 1;
        }
    }
    if count.iter().any(|&c| c != 1) {
        return false;
    }
    for l in &d.layers {
        // L_i: every vertex has degree 0 or 2 and each component is a cycle
        if !is_cycle_union(g, &l.cycle_edges) {
            return false;
        }
        if !is_forest(g.n(), &l.ict_edges.iter().map(|&e| g.edge(e)).collect::<Vec<_>>()) {
            return false;
        }
        let all: Vec<EdgeId> = l.cycle_edges.iter().chain(&l.ict_edges).copied().collect();
        if !is_cactus_union(g, &all) {
            return false;
        }
    }
    true
}

fn is_cycle_union(g: &PlaneEmbedding, edges: &[EdgeId]) -> bool {
    let mut deg = vec![0usize; g.n()];
    for &e in edges {
        let [a, b] = g.edge(e);
        deg[a] += 1;
        deg[b] += 1;
    }
    if deg.iter().any(|&x| x != 0 && x != 2) {
        return false;
    }
    // with all degrees 2, every component is a cycle
    true
}

fn is_forest(n: usize, edges: &[[VertexId; 2]]) -> bool {
    let mut uf: Vec<usize> = (0..n).collect();
    fn root(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    for &[a, b] in edges {
        let (ra, rb) = (root(&mut uf, a), root(&mut uf, b));
        if ra == rb {
            return false;
        }
        uf[ra] = rb;
    }
    true
}

// A graph is a union of cacti iff every biconnected block is a single edge
// or a simple cycle, i.e. has as many edges as vertices or exactly one edge.
fn is_cactus_union(g: &PlaneEmbedding, edges: &[EdgeId]) -> bool {
    for block in biconnected_blocks(g.n(), &edges.iter().map(|&e| g.edge(e)).collect::<Vec<_>>()) {
        let mut vs: Vec<VertexId> = block.iter().flat_map(|e| [e[0], e[1]]).collect();
        vs.sort_unstable();
        vs.dedup();
        if block.len() != 1 && block.len() != vs.len() {
            return false;
        }
    }
    true
}

/// Biconnected blocks as edge lists (endpoint pairs).
pub(crate) fn biconnected_blocks(n: usize, edges: &[[VertexId; 2]]) -> Vec<Vec<[VertexId; 2]>> {
    let mut adj: Vec<Vec<(VertexId, usize)>> = vec![Vec::new(); n];
    for (i, &[a, b]) in edges.iter().enumerate() {
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    let mut tin = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    let mut estack: Vec<usize> = Vec::new();
    let mut blocks = Vec::new();
    let mut used = vec![false; edges.len()];
    for s in 0..n {
        if tin[s] != usize::MAX || adj[s].is_empty() {
            continue;
        }
        tin[s] = timer;
        low[s] = timer;
        timer += 1;
        // (vertex, parent edge, next index)
        let mut stack: Vec<(VertexId, usize, usize)> = vec![(s, usize::MAX, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, pe, i) = *top;
            if i < adj[v].len() {
                top.2 += 1;
                let (w, e) = adj[v][i];
                if e == pe || used[e] {
                    continue;
                }
                used[e] = true;
                estack.push(e);
                if tin[w] == usize::MAX {
                    tin[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, e, 0));
                } else {
                    low[v] = low[v].min(tin[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] >= tin[p] {
                        let mut block = Vec::new();
                        while let Some(e) = estack.pop() {
                            block.push(edges[e]);
                            if e == pe {
                                break;
                            }
                        }
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks
}

/// A block with its degree-2 vertices suppressed, so that every path
/// through them becomes one edge.
pub(crate) struct Smoothed {
    pub graph: PlaneEmbedding,
    pub decomposition: LayerDecomposition,
    /// Block vertex behind each smoothed vertex.
    pub origin: Vec<VertexId>,
    /// Degree-2 block vertices on the paths leaving each smoothed vertex,
    /// in path order.
    pub absorbed: Vec<Vec<VertexId>>,
}

/// Suppress the degree-2 vertices of `g` and carry the decomposition `d`
/// over. Every edge of a suppressed path borders the same two faces, so
/// layers, cycles and ICTs survive unchanged. Returns `None` when the
/// result would have loops, parallel edges or fewer than four vertices.
pub(crate) fn smooth(g: &PlaneEmbedding, d: &LayerDecomposition) -> Option<Smoothed> {
    let keep: Vec<VertexId> = (0..g.n()).filter(|&v| g.degree(v) >= 3).collect();
    if keep.len() < 4 {
        return None;
    }
    let mut new_id = vec![usize::MAX; g.n()];
    for (i, &v) in keep.iter().enumerate() {
        new_id[v] = i;
    }
    let mut edge_map: Vec<Option<EdgeId>> = vec![None; g.m()];
    let mut edges: Vec<[VertexId; 2]> = Vec::new();
    let mut first_edge: Vec<EdgeId> = Vec::new();
    let mut absorbed = vec![Vec::new(); keep.len()];
    let mut pairs = BTreeSet::new();
    for &u in &keep {
        for dart in g.rotation(u) {
            if edge_map[dart.edge].is_some() {
                continue;
            }
            let id = edges.len();
            let mut e = dart.edge;
            let mut x = g.head(*dart);
            let mut path = vec![e];
            let mut inner = Vec::new();
            while g.degree(x) == 2 {
                inner.push(x);
                e = g.rotation(x).iter().map(|d| d.edge).find(|&f| f != e)?;
                x = g.other(e, x);
                path.push(e);
            }
            if x == u || !pairs.insert((new_id[u].min(new_id[x]), new_id[u].max(new_id[x]))) {
                return None;
            }
            if path.iter().any(|&f| d.edge_kind[f] != d.edge_kind[path[0]] || d.edge_level[f] != d.edge_level[path[0]]) {
                return None;
            }
            for &f in &path {
                edge_map[f] = Some(id);
            }
            edges.push([new_id[u], new_id[x]]);
            first_edge.push(path[0]);
            absorbed[new_id[u]].extend(inner);
        }
    }
    let rot: Vec<Vec<Dart>> = keep
        .iter()
        .map(|&u| {
            g.rotation(u)
                .iter()
                .map(|dart| {
                    let e = edge_map[dart.edge].expect("every edge lies on a path");
                    Dart::new(e, if edges[e][0] == new_id[u] { 0 } else { 1 })
                })
                .collect()
        })
        .collect();
    let coords = keep.iter().map(|&v| g.coords()[v]).collect();

    let map_set = |es: &[EdgeId]| -> Vec<EdgeId> {
        let set: BTreeSet<EdgeId> = es.iter().map(|&e| edge_map[e].unwrap()).collect();
        set.into_iter().collect()
    };
    let layers = d
        .layers
        .iter()
        .map(|l| EdgeLayer { index: l.index, cycle_edges: map_set(&l.cycle_edges), ict_edges: map_set(&l.ict_edges) })
        .collect();
    let mut cycles = Vec::new();
    for c in &d.cycles {
        let mut ring = Vec::new();
        let mut cyc_edges = Vec::new();
        for (j, &v) in c.ring.iter().enumerate() {
            if new_id[v] != usize::MAX {
                ring.push(new_id[v]);
                cyc_edges.push(edge_map[c.edges[j]].unwrap());
            }
        }
        if ring.len() < 3 {
            return None;
        }
        cycles.push(Cycle { level: c.level, ring, edges: cyc_edges, enclosing: c.enclosing });
    }
    let mut icts = Vec::new();
    for t in &d.icts {
        if t.leaves.iter().any(|&l| new_id[l] == usize::MAX) {
            return None;
        }
        icts.push(Ict {
            level: t.level,
            edges: map_set(&t.edges),
            leaves: t.leaves.iter().map(|&l| new_id[l]).collect(),
            internal: t.internal.iter().filter(|&&v| new_id[v] != usize::MAX).map(|&v| new_id[v]).collect(),
            enclosing: t.enclosing,
        });
    }
    let decomposition = LayerDecomposition {
        k: d.k,
        layers,
        cycles,
        icts,
        vertex_class: keep.iter().map(|&v| d.vertex_class[v]).collect(),
        vertex_cycle: keep.iter().map(|&v| d.vertex_cycle[v]).collect(),
        edge_kind: first_edge.iter().map(|&e| d.edge_kind[e]).collect(),
        edge_level: first_edge.iter().map(|&e| d.edge_level[e]).collect(),
    };
    Some(Smoothed { graph: PlaneEmbedding::from_rotation(coords, edges, rot), decomposition, origin: keep, absorbed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane_graph::{build_plane_graph, Point};

    fn cube() -> PlaneGraph {
        let pts = [(0., 0.), (6., 0.), (6., 6.), (0., 6.), (2., 2.), (4., 2.), (4., 4.), (2., 4.)];
        let edges = vec![[0, 1], [1, 2], [2, 3], [3, 0], [4, 5], [5, 6], [6, 7], [7, 4], [0, 4], [1, 5], [2, 6], [3, 7]];
        build_plane_graph(pts.iter().map(|&(x, y)| Point::new(x, y)).collect(), edges).unwrap()
    }

    #[test]
    fn smoothing_a_subdivided_cube_restores_it() {
        let mut coords: Vec<Point> = cube().coords().to_vec();
        coords.push(Point::new(3.0, 0.0));
        let edges = vec![[0, 8], [8, 1], [1, 2], [2, 3], [3, 0], [4, 5], [5, 6], [6, 7], [7, 4], [0, 4], [1, 5], [2, 6], [3, 7]];
        let g = PlaneEmbedding::new(coords, edges).unwrap();
        let d = decompose_lenient(&g).unwrap();
        let s = smooth(&g, &d).unwrap();
        assert_eq!((s.graph.n(), s.graph.m()), (8, 12));
        assert_eq!(s.decomposition.k, 2);
        assert_eq!(s.decomposition.cycles[0].ring.len(), 4);
        assert_eq!(s.absorbed.iter().flatten().copied().collect::<Vec<_>>(), vec![8]);
        assert_eq!(decompose_embedding(&s.graph).unwrap().k, 2);
    }

    #[test]
    fn cube_layers() {
        let g = cube();
        let d = decompose(&g).unwrap();
        assert_eq!(d.k, 2);
        assert_eq!(d.layers[0].cycle_edges, vec![0, 1, 2, 3]);
        assert!(d.layers[0].ict_edges.is_empty());
        assert_eq!(d.layers[1].cycle_edges, vec![4, 5, 6, 7]);
        assert_eq!(d.layers[1].ict_edges, vec![8, 9, 10, 11]);
        assert_eq!(d.cycles.len(), 2);
        assert_eq!(d.icts.len(), 4);
        assert_eq!(d.cycles[1].enclosing, Some(0));
        assert!(d.icts.iter().all(|t| t.enclosing == Some(0)));
        for v in 0..4 {
            assert_eq!(d.vertex_class[v], Some(VertexClass::Inward));
        }
        for v in 4..8 {
            assert_eq!(d.vertex_class[v], Some(VertexClass::Outward));
        }
        assert!(cacti_check(&d, &g));
    }

    #[test]
    fn cycles_are_clockwise() {
        let g = cube();
        let d = decompose(&g).unwrap();
        for c in &d.cycles {
            let pts: Vec<_> = c.ring.iter().map(|&v| g.coords()[v]).collect();
            assert!(signed_area(&pts) < 0.0);
            for (j, &e) in c.edges.iter().enumerate() {
                let [a, b] = g.edge(e);
                let (u, w) = (c.ring[j], c.ring[(j + 1) % c.ring.len()]);
                assert!((a, b) == (u, w) || (a, b) == (w, u));
            }
        }
    }

    #[test]
    fn edgeless_graph_has_k_zero() {
        let emb = PlaneEmbedding::new(vec![Point::new(0., 0.), Point::new(1., 1.)], vec![]).unwrap();
        let d = decompose_embedding(&emb).unwrap();
        assert_eq!(d.k, 0);
        assert!(d.layers.is_empty());
        assert!(cacti_check(&d, &emb));
        assert_eq!(vertex_outerplanarity_bounds(&d), (0, 0));
    }

    #[test]
    fn moved_edge_breaks_cacti_check() {
        let g = cube();
        let mut d = decompose(&g).unwrap();
        let e = d.layers[1].cycle_edges.remove(0);
        d.layers[1].ict_edges.push(e);
        assert!(!cacti_check(&d, &g));
    }

    #[test]
    fn bounds() {
        let mk = |k| LayerDecomposition {
            k,
            layers: vec![],
            cycles: vec![],
            icts: vec![],
            vertex_class: vec![],
            vertex_cycle: vec![],
            edge_kind: vec![],
            edge_level: vec![],
        };
        assert_eq!(vertex_outerplanarity_bounds(&mk(4)), (3, 4));
        assert_eq!(vertex_outerplanarity_bounds(&mk(2)), (1, 2));
    }
}
