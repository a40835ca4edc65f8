//! Collapse/merge reassembling driven by the layer decomposition.
//!
//! Rounds alternate. A collapse round contracts every inter-cycle tree that
//! is eligible at the start of the round into a super vertex, emitting a
//! small binary fragment for it. A merge round first drops self-loops, then
//! repeatedly contracts each non-leaf super vertex with its clockwise
//! neighbor on its innermost cycle until nothing applies. The resulting tree
//! has α-measure at most `2k`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layering::{
    biconnected_blocks, decompose, decompose_lenient, edge_outerplanarity_of, smooth, DecomposeError, EdgeKind, LayerDecomposition,
    Smoothed, VertexClass,
};
use crate::plane_graph::{Dart, EdgeId, PlaneEmbedding, PlaneGraph, PlaneMultigraph, Point, VertexId, VertexKind};
use crate::reassembly::{alpha_measure, Node, ReassemblyTree, TreeBuilder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KsError {
    #[error("graph is not biconnected")]
    NotBiconnected,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("edge-outerplanarity {0} is below 2")]
    BadOuterplanarity(usize),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error("no collapse or merge applies in round {round} with {live} live vertices")]
    Stuck { round: usize, live: usize },
    #[error("ICT {0} is not eligible for collapse")]
    NotEligible(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundKind {
    Collapse,
    Merge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IctType {
    TypeA,
    TypeB,
}

/// An ICT ready to collapse. `run` lists the sibling vertices in clockwise
/// order along their common cycle; cycle-less siblings follow at the end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseEligibility {
    pub ict: usize,
    pub kind: IctType,
    pub root: Option<VertexId>,
    pub cycle: Option<usize>,
    pub run: Vec<VertexId>,
}

/// A pending merge of `phi` into its clockwise neighbor `mu`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeAction {
    pub phi: VertexId,
    pub mu: VertexId,
    pub case: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KsEvent {
    Collapse {
        round: usize,
        ict: usize,
        kind: IctType,
        root: Option<VertexId>,
        start: VertexId,
        super_vertex: VertexId,
        contracted: Vec<EdgeId>,
        degree: usize,
        fragment_max_boundary: usize,
    },
    Merge {
        round: usize,
        phi: VertexId,
        mu: VertexId,
        case: u8,
        contracted: Vec<EdgeId>,
        super_vertex: VertexId,
        degree: usize,
    },
    RoundBoundary {
        round: usize,
        kind: RoundKind,
        events: usize,
    },
}

impl KsEvent {
    pub fn round(&self) -> usize {
        match self {
            KsEvent::Collapse { round, .. } | KsEvent::Merge { round, .. } | KsEvent::RoundBoundary { round, .. } => {
                *round
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KsTrace {
    pub events: Vec<KsEvent>,
}

impl KsTrace {
    pub fn rounds(&self) -> usize {
        self.events.iter().map(|e| e.round()).max().unwrap_or(0)
    }

    pub fn collapses(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, KsEvent::Collapse { .. })).count()
    }

    pub fn merges(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, KsEvent::Merge { case, .. } if *case != 5)).count()
    }

    pub fn loop_removals(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, KsEvent::Merge { case: 5, .. })).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KsStats {
    /// Internal tree nodes created by collapse fragments and merges.
    pub tree_nodes_created: usize,
    pub collapses: usize,
    pub merges: usize,
    pub loop_removals: usize,
    pub rounds: usize,
}

impl KsStats {
    /// Tree-node creations plus self-loop removals.
    pub fn events(&self) -> usize {
        self.tree_nodes_created + self.loop_removals
    }
}

/// Per-block data reported by the lifted run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockInfo {
    pub vertices: Vec<VertexId>,
    pub edges: usize,
    pub k: usize,
    /// Graph vertex behind each vertex id used in this block's trace events.
    #[serde(default)]
    pub trace_vertices: Vec<VertexId>,
    /// Number of trace events this block contributed.
    #[serde(default)]
    pub events: usize,
}

#[derive(Clone, Debug)]
pub struct KsResult {
    pub tree: ReassemblyTree,
    pub trace: KsTrace,
    pub k: usize,
    pub alpha: usize,
    pub stats: KsStats,
    pub blocks: Vec<BlockInfo>,
}

/// Evolving multigraph of ordinary and super vertices.
pub struct ContractionState<'a> {
    g: &'a PlaneEmbedding,
    d: &'a LayerDecomposition,
    mg: PlaneMultigraph,
    tb: TreeBuilder,
    node_of: Vec<usize>,
    formed_in: Vec<Option<RoundKind>>,
    ict_done: Vec<bool>,
    outside_open: Vec<usize>,
    // clockwise tail of every cycle edge, in original vertices
    cw_tail: Vec<VertexId>,
    round: usize,
    tree_nodes: usize,
}

impl<'a> ContractionState<'a> {
    pub fn new(g: &'a PlaneEmbedding, d: &'a LayerDecomposition) -> Self {
        let mg = PlaneMultigraph::from_embedding(g);
        let mut tb = TreeBuilder::new(g.n());
        let node_of = (0..g.n()).map(|v| tb.leaf(v)).collect();
        let mut cw_tail = vec![usize::MAX; g.m()];
        for c in &d.cycles {
            for (j, &e) in c.edges.iter().enumerate() {
                cw_tail[e] = c.ring[j];
            }
        }
        let outside_open = (0..d.cycles.len()).map(|c| d.outside_icts(c).len()).collect();
        ContractionState {
            g,
            d,
            mg,
            tb,
            node_of,
            formed_in: vec![None; g.n()],
            ict_done: vec![false; d.icts.len()],
            outside_open,
            cw_tail,
            round: 0,
            tree_nodes: 0,
        }
    }

    pub fn multigraph(&self) -> &PlaneMultigraph {
        &self.mg
    }

    pub fn decomposition(&self) -> &LayerDecomposition {
        self.d
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn ict_collapsed(&self, t: usize) -> bool {
        self.ict_done[t]
    }

    fn is_ordinary(&self, v: VertexId) -> bool {
        self.mg.kind(v) == VertexKind::Ordinary
    }

    fn class(&self, v: VertexId) -> Option<VertexClass> {
        if self.is_ordinary(v) {
            self.d.vertex_class[v]
        } else {
            None
        }
    }

    fn live_edge_dart(&self, v: VertexId, d: &Dart) -> bool {
        self.mg.edge_alive(d.edge) && self.mg.head(*d) != v
    }

    /// Cycles with a live non-loop edge at `v`, by ascending level.
    pub fn cycles_of(&self, v: VertexId) -> Vec<usize> {
        let mut set = BTreeSet::new();
        for d in self.mg.ring(v) {
            if self.live_edge_dart(v, d) {
                if let EdgeKind::Cycle(c) = self.d.edge_kind[d.edge] {
                    set.insert((self.d.cycles[c].level, c));
                }
            }
        }
        set.into_iter().map(|(_, c)| c).collect()
    }

    pub fn inmost(&self, v: VertexId) -> Option<usize> {
        self.cycles_of(v).last().copied()
    }

    /// The uncollapsed ICT that `v` is a leaf of, if any.
    pub fn leaf_ict(&self, v: VertexId) -> Option<usize> {
        self.mg.ring(v).iter().find_map(|d| match self.d.edge_kind[d.edge] {
            EdgeKind::Tree(t) if self.mg.edge_alive(d.edge) => Some(t),
            _ => None,
        })
    }

    fn cw_darts(&self, v: VertexId, x: usize, outgoing: bool) -> Vec<Dart> {
        self.mg
            .ring(v)
            .iter()
            .copied()
            .filter(|d| {
                self.live_edge_dart(v, d)
                    && self.d.edge_kind[d.edge] == EdgeKind::Cycle(x)
                    && (self.mg.original_tail(*d) == self.cw_tail[d.edge]) == outgoing
            })
            .collect()
    }

    /// Clockwise neighbor of `v` along cycle `x`.
    pub fn cw_neighbor(&self, v: VertexId, x: usize) -> Option<VertexId> {
        match self.cw_darts(v, x, true).as_slice() {
            [d] => Some(self.mg.head(*d)),
            _ => None,
        }
    }

    fn ccw_neighbor(&self, v: VertexId, x: usize) -> Option<VertexId> {
        match self.cw_darts(v, x, false).as_slice() {
            [d] => Some(self.mg.head(*d)),
            _ => None,
        }
    }

    /// Every uncollapsed ICT that may collapse now, by ascending id.
    pub fn collapse_eligible(&self) -> Vec<CollapseEligibility> {
        (0..self.d.icts.len()).filter_map(|t| self.check_collapse(t)).collect()
    }

    pub fn check_collapse(&self, t: usize) -> Option<CollapseEligibility> {
        if self.ict_done[t] {
            return None;
        }
        let ict = &self.d.icts[t];
        if let Some(z) = ict.enclosing {
            if self.outside_open[z] > 1 {
                return None;
            }
        }
        let mut current: Vec<VertexId> = Vec::new();
        for &l in &ict.leaves {
            let c = self.mg.find(l);
            if !current.contains(&c) {
                current.push(c);
            }
        }
        let roots: Vec<VertexId> =
            current.iter().copied().filter(|&v| self.class(v) == Some(VertexClass::Outward)).collect();
        if roots.len() > 1 {
            return None;
        }
        let root = roots.first().copied();
        let siblings: Vec<VertexId> = current.iter().copied().filter(|&v| Some(v) != root).collect();
        if siblings.is_empty() {
            return None;
        }
        let mut cycle: Option<usize> = None;
        let mut placed = Vec::new();
        let mut wild = Vec::new();
        for &s in &siblings {
            match self.inmost(s) {
                None => wild.push(s),
                Some(x) => {
                    if cycle.is_some_and(|c| c != x) {
                        return None;
                    }
                    cycle = Some(x);
                    placed.push(s);
                }
            }
        }
        if let (Some(w), Some(x)) = (root, cycle) {
            if self.d.vertex_cycle[w] == Some(x) {
                return None;
            }
        }
        let mut run = match cycle {
            Some(x) => self.consecutive_run(&placed, x)?,
            None => Vec::new(),
        };
        run.extend(wild);
        let kind = if root.is_some() { IctType::TypeB } else { IctType::TypeA };
        Some(CollapseEligibility { ict: t, kind, root, cycle, run })
    }

    // Order `placed` clockwise along `x` if they form one contiguous run.
    fn consecutive_run(&self, placed: &[VertexId], x: usize) -> Option<Vec<VertexId>> {
        let mut succ = Vec::with_capacity(placed.len());
        let mut starts = Vec::new();
        for &s in placed {
            let next = self.cw_neighbor(s, x)?;
            let prev = self.ccw_neighbor(s, x)?;
            succ.push(next);
            if !placed.contains(&prev) || prev == s {
                starts.push(s);
            }
        }
        let start = match starts.as_slice() {
            [s] => *s,
            [] => *placed.iter().min()?,
            _ => return None,
        };
        let mut run = vec![start];
        let mut cur = start;
        while run.len() < placed.len() {
            let i = placed.iter().position(|&p| p == cur)?;
            let next = succ[i];
            if !placed.contains(&next) || run.contains(&next) {
                return None;
            }
            run.push(next);
            cur = next;
        }
        Some(run)
    }

    /// Contract an eligible ICT into a super vertex.
    pub fn collapse_tree(&mut self, e: &CollapseEligibility) -> Result<KsEvent, KsError> {
        if self.check_collapse(e.ict).as_ref() != Some(e) {
            return Err(KsError::NotEligible(e.ict));
        }
        let ict = self.d.icts[e.ict].clone();
        // candidate start leaves: both ends of the sibling run
        let mut starts: Vec<VertexId> = Vec::new();
        for cur in [e.run.first(), e.run.last()].into_iter().flatten() {
            if let Some(&l) = ict.leaves.iter().find(|&&l| self.mg.find(l) == *cur) {
                if !starts.contains(&l) {
                    starts.push(l);
                }
            }
        }
        if starts.is_empty() {
            starts.push(ict.leaves[0]);
        }
        let mut best: Option<(usize, Vec<Step>, VertexId)> = None;
        for &s in &starts {
            let steps = self.fragment_steps(&ict, s);
            let worst = self.simulate(&steps);
            if best.as_ref().is_none_or(|b| worst < b.0) {
                best = Some((worst, steps, s));
            }
        }
        let (worst, steps, start) = best.unwrap();
        let top = self.emit(&steps);
        let mut edges = ict.edges.clone();
        edges.sort_unstable();
        let psi = self.mg.contract_edges(&edges).expect("tree edges are connected and live");
        self.grow(psi);
        self.node_of[psi] = top;
        self.formed_in[psi] = Some(RoundKind::Collapse);
        self.ict_done[e.ict] = true;
        let mut touched = BTreeSet::new();
        for &l in &ict.leaves {
            if self.d.vertex_class[l] == Some(VertexClass::Outward) {
                if let Some(y) = self.d.vertex_cycle[l] {
                    touched.insert(y);
                }
            }
        }
        for y in touched {
            self.outside_open[y] -= 1;
        }
        Ok(KsEvent::Collapse {
            round: self.round,
            ict: e.ict,
            kind: e.kind,
            root: e.root,
            start,
            super_vertex: psi,
            contracted: edges,
            degree: self.mg.degree(psi),
            fragment_max_boundary: worst,
        })
    }

    fn grow(&mut self, v: VertexId) {
        if self.node_of.len() <= v {
            self.node_of.resize(v + 1, usize::MAX);
            self.formed_in.resize(v + 1, None);
        }
    }

    // Joins in traversal order. Leaves start at `start`; each internal
    // vertex reached along edge e joins its left subtree (first clockwise
    // after e), itself, then its right subtree.
    fn fragment_steps(&self, ict: &crate::layering::Ict, start: VertexId) -> Vec<Step> {
        let is_leaf = |v: VertexId| ict.leaves.binary_search(&v).is_ok();
        let mut in_tree = vec![false; self.g.m()];
        for &e in &ict.edges {
            in_tree[e] = true;
        }
        let mut used: Vec<VertexId> = Vec::new();
        let mut steps = Vec::new();
        let item = |v: VertexId, used: &mut Vec<VertexId>| -> Option<Frag> {
            let cur = self.mg.find(v);
            if used.contains(&cur) {
                None
            } else {
                used.push(cur);
                Some(Frag::Vertex(cur))
            }
        };
        let first = item(start, &mut used);
        let d0 = *self.g.rotation(start).iter().find(|d| in_tree[d.edge]).expect("leaf has a tree edge");

        enum Task {
            Visit(Dart),
            AfterLeft(VertexId),
            AfterRight,
        }
        // value stack of partial fragments
        let mut vals: Vec<Option<Frag>> = Vec::new();
        let mut tasks = vec![Task::Visit(d0)];
        let mut counter = 0usize;
        let mut join = |a: Option<Frag>, b: Option<Frag>, steps: &mut Vec<Step>| -> Option<Frag> {
            match (a, b) {
                (Some(x), Some(y)) => {
                    steps.push(Step { a: x, b: y });
                    counter += 1;
                    Some(Frag::Built(counter - 1))
                }
                (x, None) => x,
                (None, y) => y,
            }
        };
        while let Some(task) = tasks.pop() {
            match task {
                Task::Visit(d) => {
                    let v = self.g.head(d);
                    if is_leaf(v) {
                        vals.push(item(v, &mut used));
                        continue;
                    }
                    let ring = self.g.rotation(v);
                    let back = d.rev();
                    let i = ring.iter().position(|&x| x == back).unwrap();
                    let left = ring[(i + 1) % ring.len()];
                    let right = ring[(i + 2) % ring.len()];
                    tasks.push(Task::AfterRight);
                    tasks.push(Task::Visit(right));
                    tasks.push(Task::AfterLeft(v));
                    tasks.push(Task::Visit(left));
                }
                Task::AfterLeft(v) => {
                    let l = vals.pop().unwrap();
                    let me = item(v, &mut used);
                    let j = join(l, me, &mut steps);
                    vals.push(j);
                }
                Task::AfterRight => {
                    let r = vals.pop().unwrap();
                    let lv = vals.pop().unwrap();
                    let j = join(lv, r, &mut steps);
                    vals.push(j);
                }
            }
        }
        let rest = vals.pop().unwrap();
        join(first, rest, &mut steps);
        steps
    }

    // Largest boundary among the fragment's clusters, in the current graph.
    fn simulate(&self, steps: &[Step]) -> usize {
        let mut owner: std::collections::HashMap<VertexId, usize> = std::collections::HashMap::new();
        let mut members: Vec<Vec<VertexId>> = Vec::new();
        let mut bound: Vec<usize> = Vec::new();
        let mut worst = 0;
        let resolve = |f: Frag,
                           owner: &mut std::collections::HashMap<VertexId, usize>,
                           members: &mut Vec<Vec<VertexId>>,
                           bound: &mut Vec<usize>,
                           built: &[usize]|
         -> usize {
            match f {
                Frag::Vertex(v) => {
                    let id = members.len();
                    members.push(vec![v]);
                    let b = self.mg.degree(v);
                    bound.push(b);
                    owner.insert(v, id);
                    id
                }
                Frag::Built(i) => built[i],
            }
        };
        let mut built = Vec::new();
        for s in steps {
            let a = resolve(s.a, &mut owner, &mut members, &mut bound, &built);
            let b = resolve(s.b, &mut owner, &mut members, &mut bound, &built);
            worst = worst.max(bound[a]).max(bound[b]);
            let (small, big) = if members[a].len() <= members[b].len() { (a, b) } else { (b, a) };
            let mut between = 0;
            for &v in &members[small] {
                for d in self.mg.ring(v) {
                    let h = self.mg.head(*d);
                    if h != v && owner.get(&h) == Some(&big) {
                        between += 1;
                    }
                }
            }
            let nb = bound[a] + bound[b] - 2 * between;
            let moved = std::mem::take(&mut members[small]);
            for &v in &moved {
                owner.insert(v, big);
            }
            members[big].extend(moved);
            bound[big] = nb;
            worst = worst.max(nb);
            built.push(big);
        }
        worst
    }

    fn emit(&mut self, steps: &[Step]) -> usize {
        let mut built: Vec<usize> = Vec::new();
        let mut last = None;
        for s in steps {
            let node = |f: Frag, built: &[usize]| match f {
                Frag::Vertex(v) => self.node_of[v],
                Frag::Built(i) => built[i],
            };
            let (a, b) = (node(s.a, &built), node(s.b, &built));
            let id = self.tb.join(a, b);
            self.tree_nodes += 1;
            built.push(id);
            last = Some(id);
        }
        last.expect("a tree has at least one edge")
    }

    /// Merge target of `phi`, if the merge conditions hold.
    pub fn merge_target(&self, phi: VertexId) -> Option<MergeAction> {
        if !self.mg.is_live(phi) || !self.mg.is_super(phi) || self.leaf_ict(phi).is_some() {
            return None;
        }
        let x = self.inmost(phi)?;
        let mu = self.cw_neighbor(phi, x)?;
        if mu == phi {
            return None;
        }
        let case = if self.is_ordinary(mu) {
            match self.d.vertex_class[mu] {
                Some(VertexClass::Inward) => 1,
                Some(VertexClass::Outward) => {
                    if self.cw_neighbor(mu, x) != Some(phi) {
                        return None;
                    }
                    2
                }
                None => return None,
            }
        } else {
            let mutual = self.inmost(mu).and_then(|y| self.cw_neighbor(mu, y)) == Some(phi);
            if mutual {
                4
            } else {
                3
            }
        };
        Some(MergeAction { phi, mu, case })
    }

    /// Every merge applicable right now, by ascending `phi`, plus pending
    /// self-loop removals as case 5.
    pub fn merge_eligible(&self) -> Vec<MergeAction> {
        let mut out = Vec::new();
        for v in self.mg.live_vertices() {
            if self.mg.is_super(v) && self.mg.loop_count(v) > 0 {
                out.push(MergeAction { phi: v, mu: v, case: 5 });
            }
        }
        for v in self.mg.live_vertices() {
            if let Some(a) = self.merge_target(v) {
                out.push(a);
            }
        }
        out
    }

    pub fn apply_merge(&mut self, a: MergeAction) -> KsEvent {
        if a.case == 5 {
            let removed = self.mg.remove_loops(a.phi);
            return KsEvent::Merge {
                round: self.round,
                phi: a.phi,
                mu: a.phi,
                case: 5,
                contracted: removed,
                super_vertex: a.phi,
                degree: self.mg.degree(a.phi),
            };
        }
        let mut edges: Vec<EdgeId> = self
            .mg
            .ring(a.phi)
            .iter()
            .filter(|d| {
                self.mg.edge_alive(d.edge)
                    && self.mg.head(**d) == a.mu
                    && matches!(self.d.edge_kind[d.edge], EdgeKind::Cycle(_))
            })
            .map(|d| d.edge)
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let psi = self.mg.contract_edges(&edges).expect("merge edges are live and connected");
        self.grow(psi);
        self.node_of[psi] = self.tb.join(self.node_of[a.phi], self.node_of[a.mu]);
        self.tree_nodes += 1;
        self.formed_in[psi] = Some(RoundKind::Merge);
        KsEvent::Merge {
            round: self.round,
            phi: a.phi,
            mu: a.mu,
            case: a.case,
            contracted: edges,
            super_vertex: psi,
            degree: self.mg.degree(psi),
        }
    }

    /// Violations of the structural invariants, empty when all hold.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut out = Vec::new();
        for v in self.mg.live_vertices() {
            let cs = self.cycles_of(v);
            for w in cs.windows(2) {
                let (a, b) = (&self.d.cycles[w[0]], &self.d.cycles[w[1]]);
                if b.level != a.level + 1 || b.enclosing != Some(w[0]) {
                    out.push(format!("vertex {v}: cycles {} and {} do not nest", w[0], w[1]));
                }
            }
        }
        // an ordinary cycle vertex keeps its third edge into an ICT one level
        // in (inward) or on its own level (outward)
        for v in self.mg.live_vertices() {
            let Some(class) = self.class(v) else { continue };
            let Some(c) = self.d.vertex_cycle[v] else { continue };
            let level = self.d.cycles[c].level + usize::from(class == VertexClass::Inward);
            let ok = match self.leaf_ict(v) {
                Some(t) => self.d.icts[t].level == level,
                None => false,
            };
            if !ok {
                out.push(format!("vertex {v}: designation {class:?} lost"));
            }
        }
        for (t, ict) in self.d.icts.iter().enumerate() {
            for &e in &ict.edges {
                let alive = self.mg.edge_alive(e);
                if self.ict_done[t] == alive {
                    out.push(format!("ICT {t}: edge {e} liveness disagrees with collapse state"));
                }
                if alive && self.mg.is_loop(e) {
                    out.push(format!("ICT {t}: edge {e} became a self-loop"));
                }
            }
        }
        out
    }

    /// Largest degree among live super vertices.
    pub fn max_super_degree(&self) -> usize {
        self.mg.live_vertices().filter(|&v| self.mg.is_super(v)).map(|v| self.mg.degree(v)).max().unwrap_or(0)
    }

    pub fn self_loop_count(&self) -> usize {
        self.mg.live_vertices().map(|v| self.mg.loop_count(v)).sum()
    }

    /// Original graph with every live super vertex drawn as a cluster.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph ks {\n  node [shape=circle, fontsize=10];\n");
        let pos = |p: Point| format!("{},{}", p.x, p.y);
        let mut clustered = vec![false; self.g.n()];
        for v in self.mg.live_vertices() {
            if !self.mg.is_super(v) {
                continue;
            }
            let color = match self.formed_in[v] {
                Some(RoundKind::Collapse) => "red",
                _ => "green",
            };
            let _ = writeln!(s, "  subgraph cluster_{v} {{\n    color={color};\n    label=\"{v}\";");
            for m in self.mg.members(v) {
                clustered[m] = true;
                let _ = writeln!(s, "    {m} [pos=\"{}!\"];", pos(self.g.coords()[m]));
            }
            s.push_str("  }\n");
        }
        for v in 0..self.g.n() {
            if !clustered[v] {
                let _ = writeln!(s, "  {v} [pos=\"{}!\"];", pos(self.g.coords()[v]));
            }
        }
        for &[a, b] in self.g.edges() {
            let _ = writeln!(s, "  {a} -- {b};");
        }
        s.push_str("}\n");
        s
    }

    fn finished(&self) -> bool {
        self.mg.live_vertices().count() == 1 && self.mg.live_edges().next().is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Frag {
    Vertex(VertexId),
    Built(usize),
}

#[derive(Clone, Copy, Debug)]
struct Step {
    a: Frag,
    b: Frag,
}

/// Reassemble a biconnected graph with `k ≥ 2`.
pub fn run_ks(g: &PlaneGraph) -> Result<KsResult, KsError> {
    run_ks_with_observer(g, &mut |_, _| {})
}

/// [`run_ks`] with a callback after every event, including round boundaries.
pub fn run_ks_with_observer(
    g: &PlaneGraph,
    observer: &mut dyn FnMut(&ContractionState, &KsEvent),
) -> Result<KsResult, KsError> {
    if !g.is_connected() {
        return Err(KsError::Disconnected);
    }
    if !g.is_biconnected() {
        return Err(KsError::NotBiconnected);
    }
    let d = decompose(g)?;
    if d.k < 2 {
        return Err(KsError::BadOuterplanarity(d.k));
    }
    execute(g, &d, observer, Vec::new())
}

/// Reassemble any connected graph. Each block is reassembled on its own after
/// suppressing its degree-2 vertices; the block trees are then spliced along
/// the bridges so every cut of the result is a cut of one block. Falls back
/// to a single whole-graph run when a block cannot be smoothed.
pub fn run_ks_lifted(g: &PlaneGraph) -> Result<KsResult, KsError> {
    run_ks_lifted_with_observer(g, &mut |_, _| {})
}

pub fn run_ks_lifted_with_observer(
    g: &PlaneGraph,
    observer: &mut dyn FnMut(&ContractionState, &KsEvent),
) -> Result<KsResult, KsError> {
    if !g.is_connected() {
        return Err(KsError::Disconnected);
    }
    let d = decompose(g)?;
    if g.is_biconnected() {
        return execute(g, &d, observer, block_info(g));
    }
    match prepare_blocks(g) {
        Some(parts) => run_blocks(g, &d, parts, observer),
        None => execute(g, &d, observer, block_info(g)),
    }
}

/// Vertex list and sub-drawing of every non-trivial block, sorted by vertices.
fn block_parts(g: &PlaneEmbedding) -> Vec<(Vec<VertexId>, PlaneEmbedding)> {
    let mut out = Vec::new();
    for block in biconnected_blocks(g.n(), g.edges()) {
        if block.len() < 2 {
            continue;
        }
        let mut vs: Vec<VertexId> = block.iter().flat_map(|e| [e[0], e[1]]).collect();
        vs.sort_unstable();
        vs.dedup();
        let idx = |v: VertexId| vs.binary_search(&v).unwrap();
        let coords = vs.iter().map(|&v| g.coords()[v]).collect();
        let edges = block.iter().map(|e| [idx(e[0]), idx(e[1])]).collect();
        let sub = PlaneEmbedding::new(coords, edges).expect("sub-drawing of a plane graph");
        out.push((vs, sub));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Non-trivial biconnected blocks with their own edge-outerplanarity.
pub fn block_info(g: &PlaneEmbedding) -> Vec<BlockInfo> {
    block_parts(g)
        .into_iter()
        .map(|(vs, sub)| BlockInfo {
            k: edge_outerplanarity_of(&sub),
            edges: sub.m(),
            vertices: vs,
            trace_vertices: Vec::new(),
            events: 0,
        })
        .collect()
}

enum BlockPlan {
    /// A plain cycle, listed in ring order (block-local ids).
    Ring(Vec<VertexId>),
    Smoothed(Box<Smoothed>),
}

struct BlockPart {
    vertices: Vec<VertexId>,
    k: usize,
    edges: usize,
    plan: BlockPlan,
}

fn prepare_blocks(g: &PlaneEmbedding) -> Option<Vec<BlockPart>> {
    let mut out = Vec::new();
    for (vs, sub) in block_parts(g) {
        let plan = if (0..sub.n()).all(|v| sub.degree(v) == 2) {
            let mut ring = vec![0];
            let mut prev = usize::MAX;
            let mut cur = 0;
            loop {
                let next = sub.neighbors(cur).find(|&x| x != prev)?;
                if next == 0 {
                    break;
                }
                ring.push(next);
                prev = cur;
                cur = next;
            }
            BlockPlan::Ring(ring)
        } else {
            let d = decompose_lenient(&sub).ok()?;
            BlockPlan::Smoothed(Box::new(smooth(&sub, &d)?))
        };
        let k = match &plan {
            BlockPlan::Ring(_) => 1,
            BlockPlan::Smoothed(s) => s.decomposition.k,
        };
        out.push(BlockPart { vertices: vs, k, edges: sub.m(), plan });
    }
    Some(out)
}

/// Run each block on its own and join the block trees through the bridges.
fn run_blocks(
    g: &PlaneEmbedding,
    d: &LayerDecomposition,
    parts: Vec<BlockPart>,
    observer: &mut dyn FnMut(&ContractionState, &KsEvent),
) -> Result<KsResult, KsError> {
    let mut trace = KsTrace::default();
    let mut block_trees = Vec::new();
    let mut blocks = Vec::new();
    for part in &parts {
        let (tree, trace_vertices, events) = match &part.plan {
            BlockPlan::Ring(_) => (None, Vec::new(), 0),
            BlockPlan::Smoothed(s) => {
                let r = execute(&s.graph, &s.decomposition, observer, Vec::new())?;
                let events = r.trace.events.len();
                trace.events.extend(r.trace.events);
                (Some(r.tree), s.origin.iter().map(|&v| part.vertices[v]).collect(), events)
            }
        };
        block_trees.push(tree);
        blocks.push(BlockInfo { vertices: part.vertices.clone(), edges: part.edges, k: part.k, trace_vertices, events });
    }

    let mut in_block = vec![false; g.n()];
    for part in &parts {
        for &v in &part.vertices {
            in_block[v] = true;
        }
    }
    let bridges: BTreeSet<[VertexId; 2]> = biconnected_blocks(g.n(), g.edges())
        .into_iter()
        .filter(|b| b.len() == 1)
        .map(|b| [b[0][0].min(b[0][1]), b[0][0].max(b[0][1])])
        .collect();
    let mut pieces = Pieces { g, bridges: &bridges, nodes: Vec::new() };
    let mut roots = Vec::new();
    for (part, tree) in parts.iter().zip(&block_trees) {
        roots.push(pieces.block(part, tree.as_ref()));
    }
    for v in (0..g.n()).filter(|&v| !in_block[v]) {
        roots.push(pieces.with_stubs(v));
    }
    let tree = glue(g.n(), &pieces.nodes, &roots);
    let alpha = alpha_measure(g, &tree).map(|r| r.alpha).unwrap_or(usize::MAX);
    let stats = KsStats {
        tree_nodes_created: g.n() - 1,
        collapses: trace.collapses(),
        merges: trace.merges(),
        loop_removals: trace.loop_removals(),
        rounds: trace.rounds(),
    };
    Ok(KsResult { tree, trace, k: d.k, alpha, stats, blocks })
}

#[derive(Clone, Copy)]
enum Piece {
    Vertex(VertexId),
    /// Stands for everything across the bridge leaving the vertex.
    Stub(VertexId, VertexId),
    Join(usize, usize),
}

/// Rooted trees over each block plus one stub leaf per bridge endpoint.
struct Pieces<'a> {
    g: &'a PlaneEmbedding,
    bridges: &'a BTreeSet<[VertexId; 2]>,
    nodes: Vec<Piece>,
}

impl Pieces<'_> {
    fn push(&mut self, p: Piece) -> usize {
        self.nodes.push(p);
        self.nodes.len() - 1
    }

    fn with_stubs(&mut self, v: VertexId) -> usize {
        let mut node = self.push(Piece::Vertex(v));
        let across: Vec<VertexId> = self.g.neighbors(v).filter(|&x| self.bridges.contains(&[v.min(x), v.max(x)])).collect();
        for x in across {
            let stub = self.push(Piece::Stub(v, x));
            node = self.push(Piece::Join(node, stub));
        }
        node
    }

    fn block(&mut self, part: &BlockPart, tree: Option<&ReassemblyTree>) -> usize {
        match (&part.plan, tree) {
            (BlockPlan::Ring(ring), _) => {
                let mut node = self.with_stubs(part.vertices[ring[0]]);
                for &v in &ring[1..] {
                    let x = self.with_stubs(part.vertices[v]);
                    node = self.push(Piece::Join(node, x));
                }
                node
            }
            (BlockPlan::Smoothed(s), Some(tree)) => {
                // post-order, so children are mapped before their parent
                let mut map = Vec::with_capacity(tree.len());
                for node in tree.nodes() {
                    let id = match *node {
                        Node::Leaf(v) => {
                            let mut id = self.with_stubs(part.vertices[s.origin[v]]);
                            for &a in &s.absorbed[v] {
                                let x = self.with_stubs(part.vertices[a]);
                                id = self.push(Piece::Join(id, x));
                            }
                            id
                        }
                        Node::Join(l, r) => self.push(Piece::Join(map[l], map[r])),
                    };
                    map.push(id);
                }
                *map.last().expect("non-empty block tree")
            }
            (BlockPlan::Smoothed(_), None) => unreachable!("smoothed blocks are run"),
        }
    }
}

/// Unroot every piece, splice matching stubs into a single tree edge per
/// bridge and re-root at the first piece's root.
fn glue(n: usize, nodes: &[Piece], roots: &[usize]) -> ReassemblyTree {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    let link = |adj: &mut Vec<Vec<usize>>, a: usize, b: usize| {
        adj[a].push(b);
        adj[b].push(a);
    };
    let is_root: BTreeSet<usize> = roots.iter().copied().collect();
    for (i, p) in nodes.iter().enumerate() {
        if let Piece::Join(l, r) = *p {
            if is_root.contains(&i) {
                link(&mut adj, l, r);
            } else {
                link(&mut adj, i, l);
                link(&mut adj, i, r);
            }
        }
    }
    let mut anchor = BTreeMap::new();
    for (i, p) in nodes.iter().enumerate() {
        if let Piece::Stub(v, x) = *p {
            let a = adj[i][0];
            adj[a].retain(|&y| y != i);
            anchor.insert((v, x), a);
        }
    }
    for (&(v, x), &a) in &anchor {
        if v < x {
            link(&mut adj, a, anchor[&(x, v)]);
        }
    }
    let resolve = |y: usize| match nodes[y] {
        Piece::Stub(v, x) => anchor[&(x, v)],
        _ => y,
    };
    let (a, b) = match nodes[roots[0]] {
        Piece::Join(l, r) => (resolve(l), resolve(r)),
        _ => unreachable!("every piece has a stub or a second vertex"),
    };

    let mut tb = TreeBuilder::new(n);
    let mut built = vec![usize::MAX; nodes.len()];
    for (start, parent) in [(a, b), (b, a)] {
        let mut stack = vec![(start, parent, false)];
        while let Some((x, from, done)) = stack.pop() {
            let kids: Vec<usize> = adj[x].iter().copied().filter(|&y| y != from).collect();
            if let Piece::Vertex(v) = nodes[x] {
                built[x] = tb.leaf(v);
            } else if done {
                built[x] = tb.join(built[kids[0]], built[kids[1]]);
            } else {
                stack.push((x, from, true));
                for &y in kids.iter().rev() {
                    stack.push((y, x, false));
                }
            }
        }
    }
    let root = tb.join(built[a], built[b]);
    tb.finish(root)
}

fn execute(
    g: &PlaneEmbedding,
    d: &LayerDecomposition,
    observer: &mut dyn FnMut(&ContractionState, &KsEvent),
    blocks: Vec<BlockInfo>,
) -> Result<KsResult, KsError> {
    let mut st = ContractionState::new(g, d);
    let mut trace = KsTrace::default();
    let mut record = |st: &ContractionState, ev: KsEvent, trace: &mut KsTrace| {
        observer(st, &ev);
        trace.events.push(ev);
    };
    if g.n() == 1 {
        let tree = st.tb.clone().finish(st.node_of[0]);
        let stats = KsStats { tree_nodes_created: 0, collapses: 0, merges: 0, loop_removals: 0, rounds: 0 };
        return Ok(KsResult { tree, trace, k: d.k, alpha: 0, stats, blocks });
    }
    loop {
        st.round += 1;
        let mut count = 0;
        for e in st.collapse_eligible() {
            // an earlier collapse this round may have changed the picture
            if st.check_collapse(e.ict).as_ref() == Some(&e) {
                let ev = st.collapse_tree(&e)?;
                record(&st, ev, &mut trace);
                count += 1;
            }
        }
        let collapsed = count;
        record(&st, KsEvent::RoundBoundary { round: st.round, kind: RoundKind::Collapse, events: count }, &mut trace);

        st.round += 1;
        count = 0;
        let supers: Vec<VertexId> = st.mg.live_vertices().filter(|&v| st.mg.is_super(v)).collect();
        for v in supers {
            if st.mg.loop_count(v) > 0 {
                let ev = st.apply_merge(MergeAction { phi: v, mu: v, case: 5 });
                record(&st, ev, &mut trace);
                count += 1;
            }
        }
        loop {
            let mut progress = false;
            let supers: Vec<VertexId> = st.mg.live_vertices().filter(|&v| st.mg.is_super(v)).collect();
            for v in supers {
                let mut phi = v;
                while let Some(a) = st.merge_target(phi) {
                    let ev = st.apply_merge(a);
                    if let KsEvent::Merge { super_vertex, .. } = ev {
                        phi = super_vertex;
                    }
                    record(&st, ev, &mut trace);
                    count += 1;
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
        record(&st, KsEvent::RoundBoundary { round: st.round, kind: RoundKind::Merge, events: count }, &mut trace);
        if st.finished() {
            break;
        }
        if collapsed == 0 && count == 0 {
            return Err(KsError::Stuck { round: st.round, live: st.mg.live_vertices().count() });
        }
    }
    let last = st.mg.live_vertices().next().expect("one vertex remains");
    let root = st.node_of[last];
    let tree_nodes = st.tree_nodes;
    let tree = st.tb.clone().finish(root);
    let alpha = alpha_measure(g, &tree).map(|r| r.alpha).unwrap_or(usize::MAX);
    let stats = KsStats {
        tree_nodes_created: tree_nodes,
        collapses: trace.collapses(),
        merges: trace.merges(),
        loop_removals: trace.loop_removals(),
        rounds: trace.rounds(),
    };
    Ok(KsResult { tree, trace, k: d.k, alpha, stats, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane_graph::build_plane_graph;
    use crate::reassembly::validate_tree;

    fn cube() -> PlaneGraph {
        let pts = [(0., 0.), (6., 0.), (6., 6.), (0., 6.), (2., 2.), (4., 2.), (4., 4.), (2., 4.)];
        let edges = vec![[0, 1], [1, 2], [2, 3], [3, 0], [4, 5], [5, 6], [6, 7], [7, 4], [0, 4], [1, 5], [2, 6], [3, 7]];
        build_plane_graph(pts.iter().map(|&(x, y)| Point::new(x, y)).collect(), edges).unwrap()
    }

    #[test]
    fn cube_initial_eligibility() {
        let g = cube();
        let d = decompose(&g).unwrap();
        let st = ContractionState::new(&g, &d);
        let el = st.collapse_eligible();
        assert_eq!(el.len(), 4);
        assert!(el.iter().all(|e| e.kind == IctType::TypeB));
    }

    #[test]
    fn cube_spoke_collapse_degree() {
        let g = cube();
        let d = decompose(&g).unwrap();
        let mut st = ContractionState::new(&g, &d);
        let e = st.check_collapse(0).unwrap();
        match st.collapse_tree(&e).unwrap() {
            KsEvent::Collapse { degree, super_vertex, .. } => {
                assert_eq!(degree, 4);
                assert_eq!(st.multigraph().members(super_vertex).len(), 2);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn ordinary_pairs_never_merge() {
        let g = cube();
        let d = decompose(&g).unwrap();
        let st = ContractionState::new(&g, &d);
        assert!(st.merge_eligible().is_empty());
    }

    #[test]
    fn cube_run() {
        let g = cube();
        let r = run_ks(&g).unwrap();
        assert!(validate_tree(&g, &r.tree).valid);
        assert_eq!(r.alpha, 4);
        assert_eq!(r.stats.collapses, 4);
        assert_eq!(r.stats.merges, 3);
        let merged: Vec<usize> = r
            .trace
            .events
            .iter()
            .filter_map(|e| match e {
                KsEvent::Merge { super_vertex, case, .. } if *case != 5 => Some(*super_vertex),
                _ => None,
            })
            .collect();
        assert_eq!(merged.len(), 3);
    }
}
