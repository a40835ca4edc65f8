use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use reasm_core::generators::{corpus_entry, cube, four_regular_12};
use reasm_core::io::{carving_to_json, graph_to_json, parse_carving, parse_graph, parse_tree, tree_to_json};
use reasm_core::ks_engine::{run_ks_lifted_with_observer, run_ks_with_observer, ContractionState};
use reasm_core::*;

#[derive(Parser)]
#[command(name = "reasm", version, about = "Reassemble 3-regular plane graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Peel a graph into edge layers and print the decomposition
    Decompose {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the collapse/merge reassembling
    Ks {
        input: PathBuf,
        /// Tree output; printed to stdout when omitted
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Directory for one DOT file per round
        #[arg(long)]
        snapshots: Option<PathBuf>,
        /// Accept graphs that are connected but not biconnected
        #[arg(long)]
        lifted: bool,
    },
    /// Check a tree against a graph and the 2k bound
    Verify { input: PathBuf, tree: PathBuf },
    /// Exact optimal α-measure by exhaustive search
    Oracle {
        input: PathBuf,
        #[arg(long, default_value_t = 16)]
        max_n: usize,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Write a generated or built-in graph
    Gen {
        /// hfk, constant, cube or corpus:<name>
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        f: Option<usize>,
        #[arg(long)]
        c: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert between rooted trees and carvings
    Convert {
        #[arg(long, value_enum)]
        to: Target,
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replace vertices of degree four or more by cycles
    Expand {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Carving,
    Tree,
}

/// Bad flag combinations that clap cannot see.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn with_newline(mut s: String) -> String {
    s.push('\n');
    s
}

fn load_drawing(path: &Path) -> Result<PlaneEmbedding> {
    let (coords, edges) = parse_graph(&read(path)?)?;
    Ok(PlaneEmbedding::new(coords, edges)?)
}

fn load_graph(path: &Path) -> Result<PlaneGraph> {
    let (coords, edges) = parse_graph(&read(path)?)?;
    Ok(build_plane_graph(coords, edges)?)
}

fn decompose_cmd(input: &Path, out: Option<&Path>) -> Result<()> {
    let g = load_graph(input)?;
    let d = decompose(&g)?;
    let text = with_newline(serde_json::to_string_pretty(&d.to_json_value(&g))?);
    match out {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ks_cmd(input: &Path, tree: Option<&Path>, trace: Option<&Path>, snapshots: Option<&Path>, lifted: bool) -> Result<()> {
    let g = load_graph(input)?;
    let mut dots = Vec::new();
    let mut obs = |st: &ContractionState, ev: &KsEvent| {
        if snapshots.is_some() && matches!(ev, KsEvent::RoundBoundary { .. }) {
            dots.push((ev.round(), st.to_dot()));
        }
    };
    let r = if lifted { run_ks_lifted_with_observer(&g, &mut obs) } else { run_ks_with_observer(&g, &mut obs) }?;
    let text = with_newline(tree_to_json(&r.tree, Some(r.alpha)));
    match tree {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    if let Some(p) = trace {
        let body = serde_json::json!({ "events": r.trace.events, "stats": r.stats, "blocks": r.blocks });
        write(p, &with_newline(serde_json::to_string_pretty(&body)?))?;
    }
    if let Some(dir) = snapshots {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for (round, dot) in &dots {
            write(&dir.join(format!("round-{round:03}.dot")), dot)?;
        }
    }
    if tree.is_some() {
        println!("alpha={}, k={}, bound 2k={}", r.alpha, r.k, 2 * r.k);
    }
    Ok(())
}

/// Returns whether the bound holds.
fn verify_cmd(input: &Path, tree: &Path) -> Result<bool> {
    let g = load_graph(input)?;
    let t = parse_tree(&read(tree)?)?;
    let v = validate_tree(&g, &t);
    if !v.valid {
        bail!(ReassemblyError::InvalidTree(v.diagnostics));
    }
    let alpha = alpha_measure(&g, &t)?.alpha;
    let k = edge_outerplanarity(&g)?;
    let ok = alpha <= 2 * k;
    println!("valid, alpha={alpha}, bound 2k={}: {}", 2 * k, if ok { "OK" } else { "bound VIOLATED" });
    Ok(ok)
}

fn oracle_cmd(input: &Path, max_n: usize, witness: Option<&Path>) -> Result<()> {
    let g = load_drawing(input)?;
    let res = optimal_alpha(&g, max_n)?;
    println!("alpha_opt={}, subsets={}", res.alpha_opt, res.subset_count);
    if let Some(p) = witness {
        write(p, &with_newline(tree_to_json(&res.witness, Some(res.alpha_opt))))?;
    }
    Ok(())
}

fn need(v: Option<usize>, flag: &str, family: &str) -> Result<usize> {
    v.ok_or_else(|| Usage(format!("--family {family} needs --{flag}")).into())
}

fn gen_cmd(family: &str, k: Option<usize>, f: Option<usize>, c: Option<usize>, out: &Path) -> Result<()> {
    let g: PlaneEmbedding = match family {
        "hfk" => gen_hfk(HFamilyParams::new(need(k, "k", family)?, need(f, "f", family)?))?.into_embedding(),
        "constant" => gen_constant_density(need(k, "k", family)?, need(c, "c", family)?)?.into_embedding(),
        "cube" => cube().into_embedding(),
        "corpus:fig-4reg-12v" => four_regular_12(),
        _ => match family.strip_prefix("corpus:") {
            Some(name) => match corpus_entry(name) {
                Some(e) => e.graph.into_embedding(),
                None => bail!(Usage(format!("unknown corpus graph {name}"))),
            },
            None => bail!(Usage(format!("unknown family {family}"))),
        },
    };
    write(out, &with_newline(graph_to_json(&g)))
}

fn convert_cmd(to: Target, input: &Path, out: &Path) -> Result<()> {
    let text = read(input)?;
    match to {
        Target::Carving => {
            let t = parse_tree(&text)?;
            write(out, &with_newline(carving_to_json(&tree_to_carving(&t)?, None)))
        }
        Target::Tree => {
            let rt = parse_carving(&text)?;
            // rooted on the first branch
            match carving_to_trees(&rt).first() {
                Some(t) => write(out, &with_newline(tree_to_json(t, None))),
                None => bail!("carving has no branches"),
            }
        }
    }
}

fn expand_cmd(input: &Path, out: &Path) -> Result<()> {
    let g = load_drawing(input)?;
    let h = expand_to_three_regular(&g)?;
    decompose(&h)?;
    write(out, &with_newline(graph_to_json(&h)))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Decompose { input, out } => decompose_cmd(&input, out.as_deref())?,
        Command::Ks { input, tree, trace, snapshots, lifted } => {
            ks_cmd(&input, tree.as_deref(), trace.as_deref(), snapshots.as_deref(), lifted)?
        }
        Command::Verify { input, tree } => return verify_cmd(&input, &tree),
        Command::Oracle { input, max_n, witness } => oracle_cmd(&input, max_n, witness.as_deref())?,
        Command::Gen { family, k, f, c, out } => gen_cmd(&family, k, f, c, &out)?,
        Command::Convert { to, input, out } => convert_cmd(to, &input, &out)?,
        Command::Expand { input, out } => expand_cmd(&input, &out)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Usage>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
