//! Exact ground truth at desk scale.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::{HFamilyParams, HLayout, HVertex};
use crate::plane_graph::{PlaneEmbedding, VertexId};
use crate::reassembly::{ReassemblyTree, TreeBuilder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("graph has {n} vertices, the limit is {max_n}")]
    TooLarge { n: usize, max_n: usize },
    #[error("graph has no vertices")]
    Empty,
    #[error("graph is not the H-family member with k = {k}, f = {f}")]
    WrongFamily { k: usize, f: usize },
    #[error("bad parameters: {0}")]
    BadParams(String),
}

pub const DEFAULT_MAX_N: usize = 16;

#[derive(Clone, Debug)]
pub struct OptimalAlphaResult {
    pub alpha_opt: usize,
    pub witness: ReassemblyTree,
    /// Bipartitions examined.
    pub subset_count: u64,
}

/// Minimum α-measure over all binary reassemblings, by dynamic programming
/// over vertex subsets. Degree-0 merges are allowed.
pub fn optimal_alpha(g: &PlaneEmbedding, max_n: usize) -> Result<OptimalAlphaResult, OracleError> {
    optimal_alpha_edges(g.n(), g.edges(), max_n)
}

/// [`optimal_alpha`] on a bare edge list; parallel edges count with
/// multiplicity.
pub fn optimal_alpha_edges(n: usize, edges: &[[VertexId; 2]], max_n: usize) -> Result<OptimalAlphaResult, OracleError> {
    if n == 0 {
        return Err(OracleError::Empty);
    }
    if n > max_n || n > 24 {
        return Err(OracleError::TooLarge { n, max_n: max_n.min(24) });
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let size = 1usize << n;
    let mut adj = vec![vec![0u32; n]; n];
    let mut deg = vec![0u32; n];
    for &[a, b] in edges {
        deg[a] += 1;
        deg[b] += 1;
        if a != b {
            adj[a][b] += 1;
            adj[b][a] += 1;
        }
    }
    let adj_mask: Vec<u32> = (0..n)
        .map(|v| (0..n).filter(|&w| adj[v][w] > 0).fold(0u32, |m, w| m | (1 << w)))
        .collect();
    let simple = adj.iter().flatten().all(|&c| c <= 1);
    let mut bnd = vec![0u32; size];
    for s in 1..size {
        let v = (s as u32).trailing_zeros() as usize;
        let rest = s & (s - 1);
        let inside = if simple {
            (adj_mask[v] & rest as u32).count_ones()
        } else {
            (0..n).filter(|&w| rest & (1 << w) != 0).map(|w| adj[v][w]).sum()
        };
        bnd[s] = bnd[rest] + deg[v] - 2 * inside;
    }
    let mut best = vec![u32::MAX; size];
    let mut choice = vec![0u32; size];
    let mut pairs = 0u64;
    // increasing numeric order visits every proper subset first
    for s in 1..size {
        if s & (s - 1) == 0 {
            best[s] = bnd[s];
            continue;
        }
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut top = u32::MAX;
        let mut arg = 0;
        // submasks containing the lowest vertex, excluding s itself
        let mut sub = rest;
        loop {
            let a = sub | low;
            if a != s {
                pairs += 1;
                let v = best[a].max(best[s ^ a]);
                if v < top {
                    top = v;
                    arg = a as u32;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        let own = if s as u32 == full { 0 } else { bnd[s] };
        best[s] = top.max(own);
        choice[s] = arg;
    }
    let mut tb = TreeBuilder::new(n);
    let root = build_witness(full as usize, &choice, &mut tb);
    Ok(OptimalAlphaResult { alpha_opt: best[full as usize] as usize, witness: tb.finish(root), subset_count: pairs })
}

fn build_witness(s: usize, choice: &[u32], tb: &mut TreeBuilder) -> usize {
    if s & (s - 1) == 0 {
        return tb.leaf(s.trailing_zeros() as usize);
    }
    let a = choice[s] as usize;
    let l = build_witness(a, choice, tb);
    let r = build_witness(s ^ a, choice, tb);
    tb.join(l, r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundingCycle {
    Outermost,
    Innermost,
}

/// A strongly regular cluster of an H-family graph with its measured size
/// and boundary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterStats {
    pub bounded_by: BoundingCycle,
    /// First arc index on the bounding cycle.
    pub start: usize,
    /// Height in cycles.
    pub p: usize,
    /// Base on the far side, in edges.
    pub q: usize,
    /// Base on the bounding cycle, in edges.
    pub n: usize,
    pub boundary: usize,
    pub size: usize,
    pub vertices: Vec<VertexId>,
}

impl ClusterStats {
    /// Closed-form (∂X, |X|) for these parameters.
    pub fn formula(&self, k: usize) -> (usize, usize) {
        let (p, q) = (self.p, self.q);
        if p + 1 == k {
            (2 * k, p * p + 2 * p * q + p)
        } else {
            (2 * (p + 1) + q / 2, p * p + p * q + p + q / 2)
        }
    }
}

/// Every strongly regular cluster bounded by the outermost or innermost
/// cycle of `H_{f,k}`, measured on `g`.
pub fn enumerate_strongly_regular(g: &PlaneEmbedding, k: usize, f: usize) -> Result<Vec<ClusterStats>, OracleError> {
    let lay = HLayout::new(HFamilyParams::new(k, f)).map_err(|e| OracleError::BadParams(e.to_string()))?;
    let norm = |es: &[[VertexId; 2]]| -> BTreeSet<[VertexId; 2]> { es.iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect() };
    if g.n() != lay.names.len() || norm(g.edges()) != norm(&lay.edges) {
        return Err(OracleError::WrongFamily { k, f });
    }
    let wrap = |j: isize| -> usize { (j - 1).rem_euclid(f as isize) as usize + 1 };
    let mirror = |v: HVertex| match v {
        HVertex::X(i, j) => HVertex::Y(k - i, wrap(-(j as isize))),
        HVertex::Y(i, j) => HVertex::X(k - i, wrap(-(j as isize))),
    };
    let mut out = Vec::new();
    for p in 1..k {
        // n = f-1 would take every vertex of the bounding cycle, which makes
        // the two side sequences meet
        for n in 1..f - 1 {
            let q = if p + 1 == k {
                if n < p {
                    continue;
                }
                n + 1 - p
            } else {
                if n < p {
                    continue;
                }
                2 * (n + 1 - p)
            };
            for a in 1..=f {
                let names = outer_cluster(k, a, n, p, &wrap);
                for side in [BoundingCycle::Outermost, BoundingCycle::Innermost] {
                    let mut vs: Vec<VertexId> = names
                        .iter()
                        .map(|&v| if side == BoundingCycle::Outermost { v } else { mirror(v) })
                        .map(|v| lay.id_of(v).expect("named vertex"))
                        .collect();
                    vs.sort_unstable();
                    vs.dedup();
                    let boundary = edge_boundary(g, &vs);
                    out.push(ClusterStats {
                        bounded_by: side,
                        start: a,
                        p,
                        q,
                        n,
                        boundary,
                        size: vs.len(),
                        vertices: vs,
                    });
                }
            }
        }
    }
    Ok(out)
}

// Trapezoid of height p over the arc x_{1,a..a+n} of the outer cycle.
fn outer_cluster(k: usize, a: usize, n: usize, p: usize, wrap: &dyn Fn(isize) -> usize) -> Vec<HVertex> {
    let at = |off: usize| wrap((a + off) as isize);
    let mut v = Vec::new();
    for off in 0..=n {
        v.push(HVertex::X(1, at(off)));
    }
    for i in 1..=p {
        // y_{i, a .. a+n-i+1}
        for off in 0..=(n + 1 - i) {
            v.push(HVertex::Y(i, at(off)));
        }
        if i + 1 < k && n >= i {
            for off in 0..=(n - i) {
                v.push(HVertex::X(i + 1, at(off)));
            }
        }
    }
    v
}

pub fn edge_boundary(g: &PlaneEmbedding, set: &[VertexId]) -> usize {
    let mut inside = vec![false; g.n()];
    for &v in set {
        inside[v] = true;
    }
    g.edges().iter().filter(|&&[a, b]| inside[a] != inside[b]).count()
}

/// Exact fraction, kept unreduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn ceil(&self) -> i64 {
        self.num.div_euclid(self.den) + i64::from(self.num.rem_euclid(self.den) != 0)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `⌈(16k² − 32k + 13) / 12⌉`.
pub fn max_cluster_bound(k: usize) -> Result<usize, OracleError> {
    if k < 2 {
        return Err(OracleError::BadParams(format!("k = {k} must be at least 2")));
    }
    let k = k as i64;
    Ok(Ratio { num: 16 * k * k - 32 * k + 13, den: 12 }.ceil() as usize)
}

/// Abscissa of the parabola maximum, `2(c − 1)/3`.
pub fn q_hat(c: i64) -> Ratio {
    Ratio { num: 2 * (c - 1), den: 3 }
}

/// Parabola maximum `(4c² − 8c + 1)/12`.
pub fn f_c_at_q_hat(c: i64) -> Ratio {
    Ratio { num: 4 * c * c - 8 * c + 1, den: 12 }
}

/// Largest cluster size with boundary `c` as a function of the far base
/// `q`: `|X|` with the height eliminated through `∂X = c`,
/// `(2c − q − 4)(2c + 3q)/16 + q/2`.
pub fn f_c(c: i64, q: Ratio) -> Ratio {
    let (qn, d) = (q.num, q.den);
    let num = (2 * c * d - qn - 4 * d) * (2 * c * d + 3 * qn) + 8 * qn * d;
    Ratio { num, den: 16 * d * d }
}

impl Ratio {
    /// Equality as rational numbers.
    pub fn same_value(&self, other: &Ratio) -> bool {
        self.num * other.den == other.num * self.den
    }
}

/// `(16k − 13) / 6`.
pub fn density_threshold(k: usize) -> Ratio {
    Ratio { num: 16 * k as i64 - 13, den: 6 }
}
