//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reasm_core::generators::{cube, expand_with_origin, four_regular_12, three_regular_30};
use reasm_core::ks_engine::{run_ks_lifted_with_observer, run_ks_with_observer, ContractionState, RoundKind};
use reasm_core::oracle::max_cluster_bound;
use reasm_core::reassembly::zero_merges;
use reasm_core::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn report(n: usize, title: &str, outcome: &Outcome) {
    let mut out = std::io::stdout().lock();
    match outcome {
        Ok(detail) => writeln!(out, "PASS criterion {n}: {title} ({detail})").unwrap(),
        Err(why) => writeln!(out, "FAIL criterion {n}: {title}: {why}").unwrap(),
    }
}

fn h_density_f(k: usize) -> usize {
    (16 * k - 13).div_ceil(6) + 1
}

struct Instance {
    name: String,
    graph: PlaneGraph,
    lifted: bool,
}

fn bound_matrix() -> Vec<Instance> {
    let mut v = vec![
        Instance { name: "cube".into(), graph: cube(), lifted: false },
        Instance { name: "fig-3reg-30v".into(), graph: three_regular_30(), lifted: true },
    ];
    for k in 2..=5 {
        let f = h_density_f(k);
        v.push(Instance { name: format!("H(f={f},k={k})"), graph: gen_hfk(HFamilyParams::new(k, f)).unwrap(), lifted: false });
    }
    for k in 2..=6 {
        for c in [3, 4] {
            v.push(Instance {
                name: format!("constant(k={k},c={c})"),
                graph: gen_constant_density(k, c).unwrap(),
                lifted: false,
            });
        }
    }
    v
}

fn tightness_matrix() -> Vec<Instance> {
    let mut v = Vec::new();
    for k in 2..=5 {
        for f in [3, 7, 12] {
            v.push(Instance { name: format!("H(f={f},k={k})"), graph: gen_hfk(HFamilyParams::new(k, f)).unwrap(), lifted: false });
        }
    }
    v
}

fn run(inst: &Instance) -> Result<KsResult, KsError> {
    if inst.lifted {
        run_ks_lifted(&inst.graph)
    } else {
        run_ks(&inst.graph)
    }
}

fn criterion_1() -> Outcome {
    let matrix = bound_matrix();
    let start = Instant::now();
    for inst in &matrix {
        let k = edge_outerplanarity(&inst.graph).map_err(|e| format!("{}: {e}", inst.name))?;
        let r = run(inst).map_err(|e| format!("{}: {e}", inst.name))?;
        let val = validate_tree(&inst.graph, &r.tree);
        if !val.valid {
            return Err(format!("{}: invalid tree: {:?}", inst.name, val.diagnostics));
        }
        let alpha = alpha_measure(&inst.graph, &r.tree).unwrap().alpha;
        if alpha > 2 * k {
            return Err(format!("{}: alpha {alpha} > 2k = {}", inst.name, 2 * k));
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 1.0 {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} instances in {elapsed:?}", matrix.len()))
}

fn criterion_2() -> Outcome {
    for inst in tightness_matrix() {
        let k = edge_outerplanarity(&inst.graph).unwrap();
        let r = run(&inst).map_err(|e| format!("{}: {e}", inst.name))?;
        if r.alpha != 2 * k {
            return Err(format!("{}: alpha {} != 2k = {}", inst.name, r.alpha, 2 * k));
        }
    }
    Ok("k in 2..=5, f in {3,7,12}".into())
}

fn criterion_3() -> Outcome {
    let g = gen_hfk(HFamilyParams::new(2, 4)).unwrap();
    let start = Instant::now();
    let res = optimal_alpha(&g, 16).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if g.n() != 8 || res.alpha_opt != 4 {
        return Err(format!("n = {}, alpha_opt = {}", g.n(), res.alpha_opt));
    }
    if alpha_measure(&g, &res.witness).unwrap().alpha != 4 {
        return Err("witness alpha differs".into());
    }
    if elapsed.as_secs_f64() >= 1.0 {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("alpha_opt = 4 in {elapsed:?}"))
}

fn criterion_4() -> Outcome {
    let (k, f) = (4, 9);
    let g = gen_hfk(HFamilyParams::new(k, f)).unwrap();
    let clusters = enumerate_strongly_regular(&g, k, f).map_err(|e| e.to_string())?;
    let mut checked = 0;
    let mut max_small = 0;
    for c in &clusters {
        if c.p + 1 < k {
            let want = (2 * (c.p + 1) + c.q / 2, c.p * c.p + c.p * c.q + c.p + c.q / 2);
            if (c.boundary, c.size) != want {
                return Err(format!("p={} q={} start={}: measured {:?}, formula {:?}", c.p, c.q, c.start, (c.boundary, c.size), want));
            }
            checked += 1;
        }
        if c.boundary < 2 * k {
            max_small = max_small.max(c.size);
        }
    }
    let bound = max_cluster_bound(k).unwrap();
    if bound != 12 || max_small > bound {
        return Err(format!("max |X| = {max_small}, bound = {bound}"));
    }
    Ok(format!("{checked} clusters match, max |X| = {max_small} <= 12"))
}

fn criterion_5() -> Outcome {
    let c = 3;
    for k in 3..=5 {
        let g = gen_constant_density(k, c).unwrap();
        let t = inside_out_reassemble(&g).map_err(|e| e.to_string())?;
        if !validate_tree(&g, &t).valid {
            return Err(format!("k={k}: inside-out tree invalid"));
        }
        let a = alpha_measure(&g, &t).unwrap().alpha;
        if a != c + 2 {
            return Err(format!("k={k}: inside-out alpha {a} != 5"));
        }
        let ks = run_ks(&g).map_err(|e| e.to_string())?.alpha;
        if ks != 2 * k || ks <= c + 2 {
            return Err(format!("k={k}: KS alpha {ks}"));
        }
    }
    let prism = gen_constant_density(2, c).unwrap();
    let opt = optimal_alpha(&prism, 16).map_err(|e| e.to_string())?.alpha_opt;
    let io = alpha_measure(&prism, &inside_out_reassemble(&prism).unwrap()).unwrap().alpha;
    Ok(format!("prism oracle alpha_opt = {opt}, inside-out = {io}, c+2 = {}", c + 2))
}

fn criterion_6() -> Outcome {
    let g = cube();
    let res = optimal_alpha(&g, 16).map_err(|e| e.to_string())?;
    let rt = tree_to_carving(&res.witness).map_err(|e| e.to_string())?;
    let trees = carving_to_trees(&rt);
    if trees.len() != 13 {
        return Err(format!("{} trees", trees.len()));
    }
    let alphas: Vec<usize> = trees.iter().map(|t| alpha_measure(&g, t).unwrap().alpha).collect();
    if !alphas.contains(&res.alpha_opt) {
        return Err(format!("no tree reaches {}: {alphas:?}", res.alpha_opt));
    }
    let width = rt.width(&g);
    if alphas.iter().any(|&a| width > a) {
        return Err(format!("width {width} exceeds some of {alphas:?}"));
    }
    Ok(format!("13 trees, width {width}, alpha_opt {}", res.alpha_opt))
}

/// Pair off non-adjacent vertices first, then join the pieces at random.
fn adversarial_tree(g: &PlaneEmbedding, rng: &mut ChaCha8Rng) -> ReassemblyTree {
    let n = g.n();
    let mut adj = vec![vec![false; n]; n];
    for &[a, b] in g.edges() {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut tb = TreeBuilder::new(n);
    let mut used = vec![false; n];
    let mut pool = Vec::new();
    for i in 0..n {
        let a = order[i];
        if used[a] {
            continue;
        }
        used[a] = true;
        let partner = order[i + 1..].iter().copied().find(|&b| !used[b] && !adj[a][b]);
        let la = tb.leaf(a);
        match partner {
            Some(b) => {
                used[b] = true;
                let lb = tb.leaf(b);
                pool.push(tb.join(la, lb));
            }
            None => pool.push(la),
        }
    }
    while pool.len() > 1 {
        let i = rng.gen_range(0..pool.len());
        let x = pool.swap_remove(i);
        let j = rng.gen_range(0..pool.len());
        let y = pool.swap_remove(j);
        pool.push(tb.join(x, y));
    }
    tb.finish(pool[0])
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut total = 0;
    let mut with_zero = 0;
    for entry in load_corpus() {
        let g = &entry.graph;
        for _ in 0..100 {
            let t = adversarial_tree(g, &mut rng);
            let before = alpha_measure(g, &t).unwrap().alpha;
            if !zero_merges(g, &t).unwrap().is_empty() {
                with_zero += 1;
            }
            let out = normalize_no_zero_merges(g, &t).map_err(|e| e.to_string())?;
            if !validate_tree(g, &out).valid {
                return Err(format!("{}: normalized tree invalid", entry.name));
            }
            let zeros = zero_merges(g, &out).unwrap().len();
            let after = alpha_measure(g, &out).unwrap().alpha;
            if zeros != 0 || after > before {
                return Err(format!("{}: {zeros} zero merges left, alpha {before} -> {after}", entry.name));
            }
            total += 1;
        }
    }
    Ok(format!("{total} trees, {with_zero} had zero merges"))
}

fn criterion_8() -> Outcome {
    let mut ratios = Vec::new();
    let start = Instant::now();
    for k in 2..=4 {
        for f in [6, 8, 10] {
            let mut ev = [0usize; 2];
            for (slot, ff) in [f, 2 * f].into_iter().enumerate() {
                let g = gen_hfk(HFamilyParams::new(k, ff)).unwrap();
                let r = run_ks(&g).map_err(|e| e.to_string())?;
                let n = g.n();
                if r.stats.tree_nodes_created != n - 1 || r.stats.loop_removals > n {
                    return Err(format!(
                        "k={k} f={ff}: {} tree nodes, {} loop removals for n = {n}",
                        r.stats.tree_nodes_created, r.stats.loop_removals
                    ));
                }
                ev[slot] = r.stats.events();
            }
            let ratio = ev[1] as f64 / ev[0] as f64;
            if !(1.8..=2.2).contains(&ratio) {
                return Err(format!("k={k} f={f}: events {} -> {}, ratio {ratio:.3}", ev[0], ev[1]));
            }
            ratios.push(ratio);
        }
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    Ok(format!("ratios in [{lo:.3}, {hi:.3}], wall clock {:?}", start.elapsed()))
}

fn criterion_9() -> Outcome {
    let g = four_regular_12();
    if g.n() != 12 || (0..12).any(|v| g.degree(v) != 4) {
        return Err("input is not the 4-regular 12-vertex graph".into());
    }
    let ex = expand_with_origin(&g).map_err(|e| e.to_string())?;
    let h = &ex.graph;
    if h.n() != 48 || (0..h.n()).any(|v| h.degree(v) != 3) {
        return Err(format!("expanded to {} vertices", h.n()));
    }
    build_plane_graph(h.coords().to_vec(), h.edges().to_vec()).map_err(|e| e.to_string())?;
    let d = decompose(h).map_err(|e| e.to_string())?;
    let mut want: BTreeMap<[usize; 2], usize> = BTreeMap::new();
    for &[a, b] in g.edges() {
        *want.entry([a.min(b), a.max(b)]).or_default() += 1;
    }
    let mut got: BTreeMap<[usize; 2], usize> = BTreeMap::new();
    for &[a, b] in h.edges() {
        let (x, y) = (ex.origin[a], ex.origin[b]);
        if x != y {
            *got.entry([x.min(y), x.max(y)]).or_default() += 1;
        }
    }
    if got != want {
        return Err("re-contraction does not recover the adjacency".into());
    }
    Ok(format!("48 vertices, k = {}", d.k))
}

fn invariant_violations(inst: &Instance) -> Result<(usize, Vec<String>), String> {
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut obs = |st: &ContractionState, ev: &KsEvent| {
        checked += 1;
        for v in st.check_invariants() {
            bad.push(format!("{} round {}: {v}", inst.name, ev.round()));
        }
        let parity_ok = match ev {
            KsEvent::Collapse { round, .. } => round % 2 == 1,
            KsEvent::Merge { round, .. } => round % 2 == 0,
            KsEvent::RoundBoundary { round, kind, .. } => (*kind == RoundKind::Collapse) == (round % 2 == 1),
        };
        if !parity_ok || ev.round() != st.round() {
            bad.push(format!("{} round {}: event in the wrong round", inst.name, ev.round()));
        }
        if let KsEvent::RoundBoundary { kind: RoundKind::Merge, round, .. } = ev {
            if st.self_loop_count() != 0 {
                bad.push(format!("{} round {round}: self-loops after merge round", inst.name));
            }
        }
    };
    if inst.lifted {
        run_ks_lifted_with_observer(&inst.graph, &mut obs)
    } else {
        run_ks_with_observer(&inst.graph, &mut obs)
    }
    .map_err(|e| format!("{}: {e}", inst.name))?;
    Ok((checked, bad))
}

fn criterion_10() -> Outcome {
    let mut events = 0;
    for inst in bound_matrix().into_iter().chain(tightness_matrix()) {
        let (n, bad) = invariant_violations(&inst)?;
        if let Some(first) = bad.first() {
            return Err(format!("{} violations, first: {first}", bad.len()));
        }
        events += n;
    }
    Ok(format!("{events} events checked"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("KS bound alpha <= 2k", criterion_1),
        ("KS tightness on H family", criterion_2),
        ("lower bound at desk scale", criterion_3),
        ("cluster algebra", criterion_4),
        ("inside-out optimality regime", criterion_5),
        ("carving correspondence", criterion_6),
        ("normalization", criterion_7),
        ("linearity", criterion_8),
        ("expansion", criterion_9),
        ("invariant suite", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (title, f)) in criteria.iter().enumerate() {
        let outcome = f();
        report(i + 1, title, &outcome);
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
