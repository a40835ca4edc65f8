//! Binary reassembling trees, their α-measure, and carvings.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_graph::{PlaneEmbedding, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReassemblyError {
    #[error("invalid reassembling tree: {}", .0.join("; "))]
    InvalidTree(Vec<String>),
    #[error("a carving needs at least two vertices")]
    TooSmall,
    #[error("graph is disconnected")]
    Disconnected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Node {
    Leaf(VertexId),
    Join(usize, usize),
}

/// Rooted binary tree over the vertex set. Canonical trees number nodes in
/// post-order, so children precede parents and the root is last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReassemblyTree {
    n: usize,
    nodes: Vec<Node>,
}

impl ReassemblyTree {
    /// Wrap raw nodes without checking them; see [`validate_tree`].
    pub fn from_raw(n: usize, nodes: Vec<Node>) -> Self {
        ReassemblyTree { n, nodes }
    }

    /// Number of graph vertices this tree is meant to cover.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The unique parentless node, if there is exactly one.
    pub fn root(&self) -> Option<usize> {
        let parents = self.parents();
        let roots: Vec<usize> = (0..self.nodes.len()).filter(|&i| parents[i].is_none()).collect();
        if roots.len() == 1 {
            Some(roots[0])
        } else {
            None
        }
    }

    /// Parent of every node; children referenced twice keep the last parent.
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut p = vec![None; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Join(a, b) = *node {
                for c in [a, b] {
                    if c < p.len() {
                        p[c] = Some(i);
                    }
                }
            }
        }
        p
    }

    pub fn children(&self, i: usize) -> Option<(usize, usize)> {
        match self.nodes[i] {
            Node::Join(a, b) => Some((a, b)),
            Node::Leaf(_) => None,
        }
    }

    /// Leaf vertices below node `i`, ascending. Assumes a valid tree.
    pub fn cluster(&self, i: usize) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut stack = vec![i];
        while let Some(x) = stack.pop() {
            match self.nodes[x] {
                Node::Leaf(v) => out.push(v),
                Node::Join(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// All clusters as sorted vertex lists, as a set.
    pub fn cluster_family(&self) -> BTreeSet<Vec<VertexId>> {
        (0..self.nodes.len()).map(|i| self.cluster(i)).collect()
    }

    /// Renumber in post-order from the root, dropping unreachable nodes.
    pub fn canonical(&self) -> ReassemblyTree {
        let root = match self.root() {
            Some(r) => r,
            None => return self.clone(),
        };
        let mut b = TreeBuilder::new(self.n);
        let mut map: BTreeMap<usize, usize> = BTreeMap::new();
        let mut stack = vec![(root, false)];
        while let Some((x, done)) = stack.pop() {
            match self.nodes[x] {
                Node::Leaf(v) => {
                    map.insert(x, b.leaf(v));
                }
                Node::Join(l, r) => {
                    if done {
                        let id = b.join(map[&l], map[&r]);
                        map.insert(x, id);
                    } else {
                        stack.push((x, true));
                        stack.push((r, false));
                        stack.push((l, false));
                    }
                }
            }
        }
        b.finish(map[&root])
    }
}

/// Incremental construction; [`finish`](TreeBuilder::finish) returns a
/// canonical tree.
#[derive(Clone, Debug, Default)]
pub struct TreeBuilder {
    n: usize,
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn new(n: usize) -> Self {
        TreeBuilder { n, nodes: Vec::new() }
    }

    pub fn leaf(&mut self, v: VertexId) -> usize {
        self.nodes.push(Node::Leaf(v));
        self.nodes.len() - 1
    }

    pub fn join(&mut self, a: usize, b: usize) -> usize {
        self.nodes.push(Node::Join(a, b));
        self.nodes.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn finish(self, root: usize) -> ReassemblyTree {
        // post-order over the builder arena
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(root, false)];
        while let Some((x, done)) = stack.pop() {
            match self.nodes[x] {
                Node::Leaf(_) => order.push(x),
                Node::Join(l, r) => {
                    if done {
                        order.push(x);
                    } else {
                        stack.push((x, true));
                        stack.push((r, false));
                        stack.push((l, false));
                    }
                }
            }
        }
        let mut new_id = vec![usize::MAX; self.nodes.len()];
        for (i, &x) in order.iter().enumerate() {
            new_id[x] = i;
        }
        let nodes = order
            .iter()
            .map(|&x| match self.nodes[x] {
                Node::Leaf(v) => Node::Leaf(v),
                Node::Join(a, b) => Node::Join(new_id[a], new_id[b]),
            })
            .collect();
        ReassemblyTree { n: self.n, nodes }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

/// Check that `t` is a binary reassembling of the vertex set of `g`.
pub fn validate_tree(g: &PlaneEmbedding, t: &ReassemblyTree) -> Validation {
    validate_for(g.n(), t)
}

pub(crate) fn validate_for(n: usize, t: &ReassemblyTree) -> Validation {
    let mut diag = Vec::new();
    let len = t.nodes.len();
    if len == 0 {
        diag.push("tree has no nodes".to_string());
        return Validation { valid: false, diagnostics: diag };
    }
    let mut parent_count = vec![0usize; len];
    for (i, node) in t.nodes.iter().enumerate() {
        if let Node::Join(a, b) = *node {
            if a >= len || b >= len {
                diag.push(format!("node {i} references a missing child"));
                continue;
            }
            if a == b {
                diag.push(format!("node {i} has the same child twice"));
            }
            if a == i || b == i {
                diag.push(format!("node {i} is its own child"));
            }
            parent_count[a] += 1;
            if a != b {
                parent_count[b] += 1;
            }
        }
    }
    let roots: Vec<usize> = (0..len).filter(|&i| parent_count[i] == 0).collect();
    if roots.len() != 1 {
        diag.push(format!("expected one root, found {}", roots.len()));
    }
    if let Some(i) = (0..len).find(|&i| parent_count[i] > 1) {
        diag.push(format!("node {i} has more than one parent"));
    }
    if !diag.is_empty() {
        return Validation { valid: false, diagnostics: diag };
    }
    // reachability from the root (detects cycles among non-root nodes)
    let mut seen = vec![false; len];
    let mut stack = vec![roots[0]];
    while let Some(x) = stack.pop() {
        if seen[x] {
            continue;
        }
        seen[x] = true;
        if let Node::Join(a, b) = t.nodes[x] {
            stack.push(a);
            stack.push(b);
        }
    }
    if seen.iter().any(|s| !s) {
        diag.push("some nodes are not reachable from the root".to_string());
    }
    let mut leaf_seen = vec![false; n];
    for node in &t.nodes {
        if let Node::Leaf(v) = *node {
            if v >= n {
                diag.push(format!("leaf vertex {v} is out of range"));
            } else if leaf_seen[v] {
                diag.push(format!("vertex {v} appears in two leaves"));
            } else {
                leaf_seen[v] = true;
            }
        }
    }
    if leaf_seen.iter().any(|s| !s) {
        diag.push("leaf cover incomplete".to_string());
    }
    if n > 0 && len != 2 * n - 1 {
        diag.push(format!("expected {} nodes, found {len}", 2 * n - 1));
    }
    Validation { valid: diag.is_empty(), diagnostics: diag }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaReport {
    pub alpha: usize,
    pub argmax_node: usize,
    pub per_node_boundary: Vec<usize>,
}

/// Edge boundary of every node, by counting edges whose lowest common
/// ancestor lies in each subtree.
pub(crate) fn boundaries(n: usize, edges: &[[VertexId; 2]], t: &ReassemblyTree) -> Vec<usize> {
    let len = t.nodes.len();
    let parents = t.parents();
    let root = t.root().expect("validated tree");
    let mut depth = vec![0usize; len];
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        i += 1;
        if let Node::Join(a, b) = t.nodes[x] {
            depth[a] = depth[x] + 1;
            depth[b] = depth[x] + 1;
            order.push(a);
            order.push(b);
        }
    }
    let mut leaf_of = vec![usize::MAX; n];
    for (i, node) in t.nodes.iter().enumerate() {
        if let Node::Leaf(v) = *node {
            leaf_of[v] = i;
        }
    }
    let mut deg = vec![0usize; len];
    let mut inner = vec![0usize; len];
    for &[a, b] in edges {
        deg[leaf_of[a]] += 1;
        deg[leaf_of[b]] += 1;
        let (mut x, mut y) = (leaf_of[a], leaf_of[b]);
        while x != y {
            if depth[x] >= depth[y] {
                x = parents[x].unwrap();
            } else {
                y = parents[y].unwrap();
            }
        }
        inner[x] += 1;
    }
    // accumulate bottom-up
    for &x in order.iter().rev() {
        if let Some(p) = parents[x] {
            deg[p] += deg[x];
            inner[p] += inner[x];
        }
    }
    (0..len).map(|x| deg[x] - 2 * inner[x]).collect()
}

/// ∂(X) for every node and the maximum over them.
pub fn alpha_measure(g: &PlaneEmbedding, t: &ReassemblyTree) -> Result<AlphaReport, ReassemblyError> {
    alpha_for(g.n(), g.edges(), t)
}

pub(crate) fn alpha_for(n: usize, edges: &[[VertexId; 2]], t: &ReassemblyTree) -> Result<AlphaReport, ReassemblyError> {
    let v = validate_for(n, t);
    if !v.valid {
        return Err(ReassemblyError::InvalidTree(v.diagnostics));
    }
    let b = boundaries(n, edges, t);
    let alpha = b.iter().copied().max().unwrap_or(0);
    let argmax_node = b.iter().position(|&x| x == alpha).unwrap_or(0);
    Ok(AlphaReport { alpha, argmax_node, per_node_boundary: b })
}

/// Number of edges between the two children of every internal node.
pub fn merge_degrees(g: &PlaneEmbedding, t: &ReassemblyTree) -> Result<Vec<Option<usize>>, ReassemblyError> {
    let rep = alpha_measure(g, t)?;
    let b = rep.per_node_boundary;
    Ok(t.nodes
        .iter()
        .enumerate()
        .map(|(i, node)| match *node {
            Node::Join(x, y) => Some((b[x] + b[y] - b[i]) / 2),
            Node::Leaf(_) => None,
        })
        .collect())
}

/// Internal nodes whose children share no edge.
pub fn zero_merges(g: &PlaneEmbedding, t: &ReassemblyTree) -> Result<Vec<usize>, ReassemblyError> {
    Ok(merge_degrees(g, t)?
        .into_iter()
        .enumerate()
        .filter(|(_, d)| *d == Some(0))
        .map(|(i, _)| i)
        .collect())
}

/// Unrooted carving: leaves are graph vertices, internal nodes have degree 3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingTree {
    pub leaf: Vec<Option<VertexId>>,
    pub branches: Vec<[usize; 2]>,
}

impl RoutingTree {
    pub fn node_count(&self) -> usize {
        self.leaf.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf.iter().filter(|l| l.is_some()).count()
    }

    pub fn internal_count(&self) -> usize {
        self.node_count() - self.leaf_count()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.leaf.len()];
        for &[a, b] in &self.branches {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Structural check: tree shape, leaf degree 1, internal degree 3.
    pub fn is_valid(&self) -> bool {
        let nn = self.leaf.len();
        if nn < 2 || self.branches.len() != nn - 1 {
            return false;
        }
        let adj = self.adjacency();
        for (i, l) in self.leaf.iter().enumerate() {
            let want = if l.is_some() { 1 } else { 3 };
            if adj[i].len() != want && !(nn == 2 && adj[i].len() == 1) {
                return false;
            }
        }
        let mut seen = vec![false; nn];
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            if !seen[x] {
                seen[x] = true;
                stack.extend(adj[x].iter().copied());
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Largest edge cut induced by a branch.
    pub fn width(&self, g: &PlaneEmbedding) -> usize {
        let nn = self.leaf.len();
        if nn == 0 {
            return 0;
        }
        let adj = self.adjacency();
        // root at node 0; the side of branch (parent, x) away from the root
        // is the leaf set below x
        let mut parent = vec![usize::MAX; nn];
        let mut order = Vec::with_capacity(nn);
        let mut stack = vec![0];
        parent[0] = 0;
        while let Some(x) = stack.pop() {
            order.push(x);
            for &y in &adj[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    stack.push(y);
                }
            }
        }
        let mut below: Vec<Vec<VertexId>> = self.leaf.iter().map(|l| l.iter().copied().collect()).collect();
        let mut best = 0;
        for &x in order.iter().rev() {
            if x == 0 {
                continue;
            }
            best = best.max(edge_cut(g, &below[x]));
            let mine = std::mem::take(&mut below[x]);
            below[parent[x]].extend(mine);
        }
        best
    }
}

fn edge_cut(g: &PlaneEmbedding, side: &[VertexId]) -> usize {
    let mut inside = vec![false; g.n()];
    for &v in side {
        inside[v] = true;
    }
    g.edges().iter().filter(|&&[a, b]| inside[a] != inside[b]).count()
}

/// Remove the root and join its two children by a branch.
pub fn tree_to_carving(t: &ReassemblyTree) -> Result<RoutingTree, ReassemblyError> {
    if t.n < 2 {
        return Err(ReassemblyError::TooSmall);
    }
    let root = t.root().ok_or_else(|| ReassemblyError::InvalidTree(vec!["no unique root".into()]))?;
    let idx = |i: usize| if i < root { i } else { i - 1 };
    let mut leaf = Vec::with_capacity(t.nodes.len() - 1);
    let mut branches = Vec::new();
    for (i, node) in t.nodes.iter().enumerate() {
        if i == root {
            continue;
        }
        match *node {
            Node::Leaf(v) => leaf.push(Some(v)),
            Node::Join(a, b) => {
                leaf.push(None);
                branches.push([idx(i), idx(a)]);
                branches.push([idx(i), idx(b)]);
            }
        }
    }
    match t.nodes[root] {
        Node::Join(a, b) => branches.push([idx(a), idx(b)]),
        Node::Leaf(_) => return Err(ReassemblyError::TooSmall),
    }
    Ok(RoutingTree { leaf, branches })
}

/// One rooted tree per branch, rooted at a fresh node subdividing it.
pub fn carving_to_trees(rt: &RoutingTree) -> Vec<ReassemblyTree> {
    let adj = rt.adjacency();
    let n = rt.leaf_count();
    rt.branches
        .iter()
        .map(|&[a, b]| {
            let mut tb = TreeBuilder::new(n);
            let l = hang(rt, &adj, a, b, &mut tb);
            let r = hang(rt, &adj, b, a, &mut tb);
            let root = tb.join(l, r);
            tb.finish(root)
        })
        .collect()
}

// Build the subtree at `x` hanging away from `from`.
fn hang(rt: &RoutingTree, adj: &[Vec<usize>], x: usize, from: usize, tb: &mut TreeBuilder) -> usize {
    let mut built: BTreeMap<usize, usize> = BTreeMap::new();
    let mut stack = vec![(x, from, false)];
    while let Some((v, p, done)) = stack.pop() {
        if let Some(lv) = rt.leaf[v] {
            built.insert(v, tb.leaf(lv));
            continue;
        }
        let kids: Vec<usize> = adj[v].iter().copied().filter(|&w| w != p).collect();
        if done {
            let id = tb.join(built[&kids[0]], built[&kids[1]]);
            built.insert(v, id);
        } else {
            stack.push((v, p, true));
            for &k in kids.iter().rev() {
                stack.push((k, v, false));
            }
        }
    }
    built[&x]
}

/// Rearrange `t` so that every merge joins two clusters sharing an edge,
/// without increasing the α-measure.
///
/// Repeatedly takes the highest merge `X1 ⊎ X2` with no edge between the
/// parts. With `X3, X4, …` the siblings met on the way to the root and `k`
/// the first index with an edge from `X2` to `Xk`, the spine is rebuilt so
/// that `X2` joins at level `k`: either `X2 ⊎ Xk` is formed and then joined
/// with `X1 ∪ X3 ∪ … ∪ X(k−1)`, or `X2` is added after `Xk`. The variant whose
/// new cluster has the smaller boundary is used; one of them always stays
/// within the previous α.
pub fn normalize_no_zero_merges(g: &PlaneEmbedding, t: &ReassemblyTree) -> Result<ReassemblyTree, ReassemblyError> {
    let v = validate_tree(g, t);
    if !v.valid {
        return Err(ReassemblyError::InvalidTree(v.diagnostics));
    }
    if !g.is_connected() {
        return Err(ReassemblyError::Disconnected);
    }
    let n = g.n();
    let mut cur = t.canonical();
    let cap = n * n + 16;
    for _ in 0..cap {
        match normalize_step(g, &cur) {
            Some(next) => cur = next,
            None => return Ok(cur),
        }
    }
    unreachable!("normalization did not converge")
}

// One spine rearrangement, or None when no zero merge is left.
fn normalize_step(g: &PlaneEmbedding, t: &ReassemblyTree) -> Option<ReassemblyTree> {
    let n = g.n();
    let b = boundaries(n, g.edges(), t);
    let parents = t.parents();
    let root = t.nodes.len() - 1;
    let mut depth = vec![0usize; t.nodes.len()];
    for i in (0..t.nodes.len()).rev() {
        if let Some(p) = parents[i] {
            depth[i] = depth[p] + 1;
        }
    }
    let zero = (0..t.nodes.len())
        .filter(|&i| match t.nodes[i] {
            Node::Join(x, y) => b[x] + b[y] == b[i],
            Node::Leaf(_) => false,
        })
        .min_by_key(|&i| (depth[i], i))?;
    assert_ne!(zero, root, "connected graph cannot have a zero root merge");

    let (mut x1, mut x2) = t.children(zero).unwrap();
    // spine siblings X3.. upward; spine[0] is X3
    let mut spine = Vec::new();
    let mut c = zero;
    while let Some(p) = parents[c] {
        let (l, r) = t.children(p).unwrap();
        spine.push(if l == c { r } else { l });
        c = p;
    }
    // label vertices by part: 0 = X1, 1 = X2, j + 2 = spine[j]
    let mut label = vec![usize::MAX; n];
    let mut mark = |node: usize, lab: usize| {
        for v in t.cluster(node) {
            label[v] = lab;
        }
    };
    mark(x1, 0);
    mark(x2, 1);
    for (j, &s) in spine.iter().enumerate() {
        mark(s, j + 2);
    }
    let between = |p: usize, q: usize, label: &[usize]| {
        g.edges()
            .iter()
            .filter(|&&[a, c]| (label[a] == p && label[c] == q) || (label[a] == q && label[c] == p))
            .count()
    };
    if between(0, 2, &label) == 0 {
        std::mem::swap(&mut x1, &mut x2);
        for l in label.iter_mut() {
            if *l <= 1 {
                *l = 1 - *l;
            }
        }
    }
    let kk = (2..spine.len() + 2).find(|&j| between(1, j, &label) >= 1).expect("connected graph");
    let cut = |set: &dyn Fn(usize) -> bool| {
        g.edges().iter().filter(|&&[a, c]| set(label[a]) != set(label[c])).count()
    };
    let s_k = cut(&|l| l == 0 || (l >= 2 && l <= kk));
    let u = cut(&|l| l == 1 || l == kk);

    let mut tb = TreeBuilder::new(n);
    let copy = |tb: &mut TreeBuilder, node: usize| copy_subtree(t, node, tb);
    let a1 = copy(&mut tb, x1);
    let a2 = copy(&mut tb, x2);
    let parts: Vec<usize> = spine.iter().map(|&s| copy(&mut tb, s)).collect();
    let xk = parts[kk - 2];
    let mut acc = a1;
    for &p in &parts[..kk - 2] {
        acc = tb.join(acc, p);
    }
    let mut top = if s_k < u {
        let sk = tb.join(acc, xk);
        tb.join(sk, a2)
    } else {
        let un = tb.join(a2, xk);
        tb.join(acc, un)
    };
    for &p in &parts[kk - 1..] {
        top = tb.join(top, p);
    }
    Some(tb.finish(top))
}

fn copy_subtree(t: &ReassemblyTree, node: usize, tb: &mut TreeBuilder) -> usize {
    match t.nodes[node] {
        Node::Leaf(v) => tb.leaf(v),
        Node::Join(a, b) => {
            let x = copy_subtree(t, a, tb);
            let y = copy_subtree(t, b, tb);
            tb.join(x, y)
        }
    }
}
