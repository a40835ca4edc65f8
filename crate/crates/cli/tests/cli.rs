use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn reasm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reasm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> String {
    let out = p(dir, name);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", &out]);
    let o = reasm(&all);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

#[test]
fn ks_then_verify_on_cube() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "cube.json", &["--family", "cube"]);
    let tree = p(&dir, "out.json");
    let o = reasm(&["ks", &g, "--tree", &tree]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&tree).unwrap()).unwrap();
    assert_eq!(v["alpha"], 4);
    assert_eq!(v["n"], 8);
    let o = reasm(&["verify", &g, &tree]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "valid, alpha=4, bound 2k=4: OK");
}

#[test]
fn ks_rejects_a_path() {
    let dir = TempDir::new().unwrap();
    let g = p(&dir, "path4.json");
    fs::write(
        &g,
        r#"{"vertices":[{"id":0,"x":0,"y":0},{"id":1,"x":1,"y":0},{"id":2,"x":2,"y":0},{"id":3,"x":3,"y":0}],
            "edges":[[0,1],[1,2],[2,3]]}"#,
    )
    .unwrap();
    let o = reasm(&["ks", &g]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("expected 3"), "{}", stderr(&o));
}

#[test]
fn verify_h_family_k4() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "h.json", &["--family", "hfk", "--k", "4", "--f", "7"]);
    let tree = p(&dir, "t.json");
    assert!(reasm(&["ks", &g, "--tree", &tree]).status.success());
    let o = reasm(&["verify", &g, &tree]);
    assert_eq!(stdout(&o).trim(), "valid, alpha=8, bound 2k=8: OK");
}

#[test]
fn verify_ignores_cached_alpha_and_flags_tampering() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "cube.json", &["--family", "cube"]);
    let tree = p(&dir, "t.json");
    assert!(reasm(&["ks", &g, "--tree", &tree]).status.success());
    let text = fs::read_to_string(&tree).unwrap();

    let lying = p(&dir, "lying.json");
    fs::write(&lying, text.replace("\"alpha\": 4", "\"alpha\": 1")).unwrap();
    let o = reasm(&["verify", &g, &lying]);
    assert_eq!(stdout(&o).trim(), "valid, alpha=4, bound 2k=4: OK");

    let swapped = p(&dir, "swapped.json");
    fs::write(&swapped, text.replacen("\"leaf\": 5", "\"leaf\": 4", 1)).unwrap();
    let o = reasm(&["verify", &g, &swapped]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("invalid reassembling tree"), "{}", stderr(&o));
}

#[test]
fn verify_reports_violated_bound() {
    // a comb that adds the H(4,7) vertices one by one in id order
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "h.json", &["--family", "hfk", "--k", "4", "--f", "7"]);
    let n = 42;
    let mut nodes: Vec<String> = (0..n).map(|v| format!(r#"{{"id":{v},"leaf":{v}}}"#)).collect();
    let mut prev = 0;
    for v in 1..n {
        let id = n + v - 1;
        nodes.push(format!(r#"{{"id":{id},"children":[{prev},{v}]}}"#));
        prev = id;
    }
    let tree = p(&dir, "comb.json");
    fs::write(&tree, format!(r#"{{"n":{n},"nodes":[{}]}}"#, nodes.join(","))).unwrap();
    let o = reasm(&["verify", &g, &tree]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("bound 2k=8: bound VIOLATED"), "{}", stdout(&o));
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "h.json", &["--family", "constant", "--k", "4", "--c", "3"]);
    let (t1, t2) = (p(&dir, "t1.json"), p(&dir, "t2.json"));
    let (r1, r2) = (p(&dir, "r1.json"), p(&dir, "r2.json"));
    assert!(reasm(&["ks", &g, "--tree", &t1, "--trace", &r1]).status.success());
    assert!(reasm(&["ks", &g, "--tree", &t2, "--trace", &r2]).status.success());
    assert_eq!(fs::read(&t1).unwrap(), fs::read(&t2).unwrap());
    assert_eq!(fs::read(&r1).unwrap(), fs::read(&r2).unwrap());
    let d1 = reasm(&["decompose", &g]);
    let d2 = reasm(&["decompose", &g]);
    assert!(d1.status.success());
    assert_eq!(d1.stdout, d2.stdout);
    let g2 = gen(&dir, "h2.json", &["--family", "constant", "--k", "4", "--c", "3"]);
    assert_eq!(fs::read(&g).unwrap(), fs::read(&g2).unwrap());
}

#[test]
fn round_trip_over_the_matrix() {
    let dir = TempDir::new().unwrap();
    let families: Vec<Vec<String>> = vec![
        vec!["--family".into(), "corpus:fig-3reg-30v".into()],
        vec!["--family".into(), "corpus:hfk-4-7".into()],
        vec!["--family".into(), "hfk".into(), "--k".into(), "5".into(), "--f".into(), "12".into()],
        vec!["--family".into(), "constant".into(), "--k".into(), "6".into(), "--c".into(), "4".into()],
    ];
    for (i, fam) in families.iter().enumerate() {
        let args: Vec<&str> = fam.iter().map(String::as_str).collect();
        let g = gen(&dir, &format!("g{i}.json"), &args);
        let tree = p(&dir, &format!("t{i}.json"));
        let o = reasm(&["ks", &g, "--tree", &tree, "--lifted"]);
        assert!(o.status.success(), "{fam:?}: {}", stderr(&o));
        let o = reasm(&["verify", &g, &tree]);
        assert_eq!(o.status.code(), Some(0), "{fam:?}: {}", stdout(&o));
    }
}

#[test]
fn trace_and_snapshots() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "cube.json", &["--family", "cube"]);
    let (tree, trace, snaps) = (p(&dir, "t.json"), p(&dir, "trace.json"), p(&dir, "snaps"));
    let o = reasm(&["ks", &g, "--tree", &tree, "--trace", &trace, "--snapshots", &snaps]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    let events = v["events"].as_array().unwrap();
    assert_eq!(events[0]["type"], "collapse");
    assert_eq!(v["stats"]["tree_nodes_created"], 7);
    let dots = fs::read_dir(&snaps).unwrap().count();
    assert!(dots >= 2);
    let first = fs::read_to_string(Path::new(&snaps).join("round-001.dot")).unwrap();
    assert!(first.contains("subgraph cluster_"));
}

#[test]
fn oracle_with_witness_and_convert() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "cube.json", &["--family", "cube"]);
    let w = p(&dir, "w.json");
    let o = reasm(&["oracle", &g, "--witness", &w]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("alpha_opt=4"));
    let carving = p(&dir, "c.json");
    assert!(reasm(&["convert", "--to", "carving", &w, "--out", &carving]).status.success());
    let back = p(&dir, "back.json");
    assert!(reasm(&["convert", "--to", "tree", &carving, "--out", &back]).status.success());
    let o = reasm(&["verify", &g, &back]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = reasm(&["oracle", &g, "--max-n", "4"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn expand_four_regular_figure() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "f.json", &["--family", "corpus:fig-4reg-12v"]);
    let out = p(&dir, "x.json");
    let o = reasm(&["expand", &g, "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 48);
    assert!(reasm(&["decompose", &out]).status.success());
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "x.json");
    assert_eq!(reasm(&["gen", "--family", "hfk", "--k", "3", "--out", &out]).status.code(), Some(2));
    assert_eq!(reasm(&["gen", "--family", "nope", "--out", &out]).status.code(), Some(2));
    assert_eq!(reasm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(reasm(&["verify", "only-one.json"]).status.code(), Some(2));
}
