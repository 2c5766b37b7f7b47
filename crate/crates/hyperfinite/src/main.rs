//! Command-line surface over the library: generate graph families,
//! compute neighborhood statistics and distances, verify mass-transport
//! identities, build and check bounded-component cuts, run the transfer
//! pipeline, and validate artifact files.
//!
//! Machine-readable JSON goes to stdout (each report embeds the fully
//! resolved configuration, seed included); progress notes go to stderr.
//! Exit codes: 0 success, 2 invalid input or usage, 3 instance beyond
//! supported scale.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use hyperfinite::error::{domain, Error};
use hyperfinite::exact::to_f64;
use hyperfinite::stats::tv_distance_exact;
use hyperfinite::transfer::{transfer_experiment, ComponentStats, TransferConfig, DEFAULT_SET_BUDGET};
use hyperfinite::{
    brute_force_optimal_cut, generators, greedy_ball_partition, grid_block_cut, mtp_check, psi,
    random_shifted_partition, sample_psi, verify_partition, CutEnsemble, EdgeCut, Graph,
    LocalFunction, NeighborhoodDistribution,
};

#[derive(Parser)]
#[command(
    name = "hyperfinite",
    version,
    about = "Local statistics, mass-transport checks, and partition transfer on bounded-degree graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the analysis subcommands. The implementation always
/// computes in exact rational arithmetic and runs single-threaded;
/// both flags are accepted so configurations are explicit and
/// portable, and both are echoed in every report. Output never depends
/// on the thread count.
#[derive(Args, Clone)]
struct CommonFlags {
    /// Use exact rational arithmetic (the default and only mode).
    #[arg(long, default_value_t = true)]
    exact: bool,
    /// Parallelism level; results are independent of it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph family as edge-list text.
    Gen {
        family: Family,
        /// Vertex count (path, cycle, random-regular) or side length (torus).
        #[arg(long)]
        n: Option<usize>,
        /// Degree for random-regular.
        #[arg(long)]
        d: Option<u32>,
        /// Depth for binary-tree.
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Root-neighborhood statistics of a graph at a fixed radius.
    Stats {
        #[arg(long)]
        input: PathBuf,
        /// Neighborhood radius.
        #[arg(long)]
        r: u32,
        /// Sample this many uniform roots instead of enumerating all.
        #[arg(long)]
        roots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the distribution JSON here.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Total variation distance between two statistics.
    ///
    /// Each input is either a distribution JSON file or a graph
    /// edge-list (statistics are then computed at --r).
    Distance {
        /// Exactly two inputs, repeated flag.
        #[arg(long, required = true, num_args = 1)]
        input: Vec<PathBuf>,
        /// Radius for graph inputs.
        #[arg(long)]
        r: Option<u32>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Verify the mass-transport identity for a catalog function.
    Mtp {
        #[arg(long)]
        input: PathBuf,
        /// Catalog function: edge, deg_edge, dist_band:<r>, tri_edge.
        #[arg(long)]
        f: LocalFunction,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Build a cut with components of at most k vertices and verify it.
    Partition {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the cut as edge-list text here.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Exact minimum cut (small instances only).
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Also write the cut as edge-list text here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Learn pattern statistics from a cut ensemble on a source graph
    /// and replay them on a target graph.
    Transfer {
        /// Source graph (edge-list text).
        #[arg(long)]
        input: PathBuf,
        /// Target graph; defaults to the source itself.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        k: usize,
        /// Ensemble size on the source.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Largest pattern radius tried by the stabilization search.
        #[arg(long = "R-max", alias = "r-max", default_value_t = 6)]
        r_max: u32,
        /// Impose this pattern radius instead of searching.
        #[arg(long)]
        r: Option<u32>,
        /// Number of sampled roots for the estimator.
        #[arg(long, default_value_t = 10_000)]
        roots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ceiling on enumerated connected sets across the whole run.
        #[arg(long, default_value_t = DEFAULT_SET_BUDGET)]
        budget: u64,
        /// Also write the transferred cut as edge-list text here.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Validate an artifact file and print a normalized summary.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Path,
    Cycle,
    Torus,
    BinaryTree,
    RandomRegular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Greedy,
    Random,
    GridBlock,
    Oracle,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Greedy => "greedy",
            Method::Random => "random",
            Method::GridBlock => "grid-block",
            Method::Oracle => "oracle",
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Gen { family, n, d, depth, seed, output } => {
            cmd_gen(family, n, d, depth, seed, output.as_deref())
        }
        Command::Stats { input, r, roots, seed, output, common } => {
            cmd_stats(&input, r, roots, seed, output.as_deref(), &common)
        }
        Command::Distance { input, r, common } => cmd_distance(&input, r, &common),
        Command::Mtp { input, f, common } => cmd_mtp(&input, f, &common),
        Command::Partition { input, k, method, seed, output, common } => {
            cmd_partition(&input, k, method, seed, output.as_deref(), &common)
        }
        Command::Oracle { input, k, output } => cmd_oracle(&input, k, output.as_deref()),
        Command::Transfer {
            input,
            target,
            k,
            samples,
            r_max,
            r,
            roots,
            seed,
            budget,
            output,
            common,
        } => cmd_transfer(
            &input,
            target.as_deref(),
            k,
            samples,
            r_max,
            r,
            roots,
            seed,
            budget,
            output.as_deref(),
            &common,
        ),
        Command::Report { input } => cmd_report(&input),
    }
}

/// The `--exact` flag is accepted for configuration portability, but
/// exact rational arithmetic is the only implemented mode, so the echo
/// is constant.
fn arithmetic_mode(common: &CommonFlags) -> &'static str {
    let _ = common.exact;
    "exact"
}

fn emit(report: &serde_json::Value) -> Result<(), Error> {
    println!("{}", serde_json::to_string_pretty(report)?);
    Ok(())
}

fn cmd_gen(
    family: Family,
    n: Option<usize>,
    d: Option<u32>,
    depth: Option<u32>,
    seed: u64,
    output: Option<&Path>,
) -> Result<(), Error> {
    let need_n = || n.ok_or_else(|| domain("--n is required for this family"));
    let (g, describe) = match family {
        Family::Path => {
            let n = need_n()?;
            (generators::path(n)?, format!("# family=path n={n}"))
        }
        Family::Cycle => {
            let n = need_n()?;
            (generators::cycle(n)?, format!("# family=cycle n={n}"))
        }
        Family::Torus => {
            let n = need_n()?;
            (generators::torus(n)?, format!("# family=torus side={n}"))
        }
        Family::BinaryTree => {
            let depth = depth.ok_or_else(|| domain("--depth is required for binary-tree"))?;
            (generators::binary_tree(depth)?, format!("# family=binary-tree depth={depth}"))
        }
        Family::RandomRegular => {
            let n = need_n()?;
            let d = d.ok_or_else(|| domain("--d is required for random-regular"))?;
            (
                generators::random_regular(d, n, seed)?,
                format!("# family=random-regular d={d} n={n} seed={seed}"),
            )
        }
    };
    let text = format!("{describe}\n{}", g.to_edge_list_string());
    match output {
        Some(path) => {
            std::fs::write(path, text)?;
            eprintln!(
                "wrote {} ({} vertices, {} edges)",
                path.display(),
                g.vertex_count(),
                g.edge_count()
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn load_graph(path: &Path) -> Result<Graph, Error> {
    Graph::read_edge_list(path)
        .map_err(|e| domain(format!("reading {}: {e}", path.display())))
}

fn distribution_json(dist: &NeighborhoodDistribution) -> serde_json::Value {
    dist.to_json()
}

fn cmd_stats(
    input: &Path,
    r: u32,
    roots: Option<u64>,
    seed: u64,
    output: Option<&Path>,
    common: &CommonFlags,
) -> Result<(), Error> {
    let g = load_graph(input)?;
    eprintln!("loaded {} ({} vertices)", input.display(), g.vertex_count());
    let dist = match roots {
        Some(count) => sample_psi(&g, r, count, seed)?,
        None => psi(&g, r)?,
    };
    let payload = distribution_json(&dist);
    if let Some(path) = output {
        let mut text = serde_json::to_string_pretty(&payload)?;
        text.push('\n');
        std::fs::write(path, text)?;
        eprintln!("wrote {}", path.display());
    }
    emit(&serde_json::json!({
        "command": "stats",
        "config": {
            "input": input.display().to_string(),
            "r": r,
            "roots": roots,
            "seed": seed,
            "arithmetic": arithmetic_mode(common),
            "threads": common.threads,
        },
        "vertex_count": g.vertex_count(),
        "support_size": dist.support_size(),
        "distribution": payload,
    }))
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| domain(format!("reading {}: {e}", path.display())))
}

/// A distance input is a distribution JSON file or a graph edge-list.
fn load_distribution(path: &Path, r: Option<u32>) -> Result<NeighborhoodDistribution, Error> {
    let text = read_text(path)?;
    if text.trim_start().starts_with('{') {
        return NeighborhoodDistribution::from_json(&serde_json::from_str(&text)?);
    }
    let g = Graph::from_edge_list_str(&text)?;
    let r = r.ok_or_else(|| domain("--r is required when an input is a graph edge-list"))?;
    psi(&g, r)
}

fn cmd_distance(inputs: &[PathBuf], r: Option<u32>, common: &CommonFlags) -> Result<(), Error> {
    if inputs.len() != 2 {
        return Err(domain(format!(
            "distance needs exactly two --input files, got {}",
            inputs.len()
        )));
    }
    let a = load_distribution(&inputs[0], r)?;
    let b = load_distribution(&inputs[1], r)?;
    let tv = tv_distance_exact(&a, &b)?;
    emit(&serde_json::json!({
        "command": "distance",
        "config": {
            "inputs": [inputs[0].display().to_string(), inputs[1].display().to_string()],
            "r": a.radius(),
            "arithmetic": arithmetic_mode(common),
            "threads": common.threads,
        },
        "tv_num": i64::try_from(*tv.numer()).ok(),
        "tv_den": i64::try_from(*tv.denom()).ok(),
        "tv": to_f64(&tv),
    }))
}

fn cmd_mtp(input: &Path, f: LocalFunction, common: &CommonFlags) -> Result<(), Error> {
    let g = load_graph(input)?;
    let report = mtp_check(&g, f)?;
    let d = report.discrepancy();
    emit(&serde_json::json!({
        "command": "mtp",
        "config": {
            "input": input.display().to_string(),
            "f": f.to_string(),
            "arithmetic": arithmetic_mode(common),
            "threads": common.threads,
        },
        "vertex_count": report.vertex_count,
        "lhs": report.lhs_f64(),
        "rhs": report.rhs_f64(),
        "lhs_num": i64::try_from(*report.lhs.numer()).ok(),
        "lhs_den": i64::try_from(*report.lhs.denom()).ok(),
        "rhs_num": i64::try_from(*report.rhs.numer()).ok(),
        "rhs_den": i64::try_from(*report.rhs.denom()).ok(),
        "discrepancy": to_f64(&d),
        "exact_zero": d == hyperfinite::exact::rat_int(0),
    }))
}

/// Infer grid-block parameters: the input must be an s×s torus grid
/// with s = √n, and k must be a square b² with b dividing s.
fn grid_block_params(g: &Graph, k: usize) -> Result<(usize, usize), Error> {
    let n = g.vertex_count();
    let side = (n as f64).sqrt().round() as usize;
    if side * side != n {
        return Err(domain(format!(
            "grid-block needs a square grid; {n} vertices is not a perfect square"
        )));
    }
    let block = (k as f64).sqrt().round() as usize;
    if block * block != k {
        return Err(domain(format!("grid-block needs k to be a perfect square, got {k}")));
    }
    if block == 0 || side % block != 0 {
        return Err(domain(format!("block side {block} must divide the grid side {side}")));
    }
    Ok((side, block))
}

fn cmd_partition(
    input: &Path,
    k: usize,
    method: Method,
    seed: u64,
    output: Option<&Path>,
    common: &CommonFlags,
) -> Result<(), Error> {
    let g = load_graph(input)?;
    eprintln!(
        "partitioning {} ({} vertices) with method {}",
        input.display(),
        g.vertex_count(),
        method.name()
    );
    let cut = match method {
        Method::Greedy => greedy_ball_partition(&g, k)?,
        Method::Random => random_shifted_partition(&g, k, seed)?,
        Method::GridBlock => {
            let (side, block) = grid_block_params(&g, k)?;
            grid_block_cut(side as u32, block as u32)?
        }
        Method::Oracle => brute_force_optimal_cut(&g, k)?,
    };
    let quality = verify_partition(&g, &cut, k)?;
    if let Some(path) = output {
        cut.write_file(path)?;
        eprintln!("wrote {}", path.display());
    }
    emit(&serde_json::json!({
        "command": "partition",
        "config": {
            "input": input.display().to_string(),
            "k": k,
            "method": method.name(),
            "seed": seed,
            "arithmetic": arithmetic_mode(common),
            "threads": common.threads,
        },
        "quality": serde_json::to_value(&quality)?,
        "cut_edges": cut.to_vec(),
    }))
}

fn cmd_oracle(input: &Path, k: usize, output: Option<&Path>) -> Result<(), Error> {
    let g = load_graph(input)?;
    let cut = brute_force_optimal_cut(&g, k)?;
    let quality = verify_partition(&g, &cut, k)?;
    if let Some(path) = output {
        cut.write_file(path)?;
        eprintln!("wrote {}", path.display());
    }
    emit(&serde_json::json!({
        "command": "oracle",
        "config": {
            "input": input.display().to_string(),
            "k": k,
        },
        "quality": serde_json::to_value(&quality)?,
        "cut_edges": cut.to_vec(),
    }))
}

#[allow(clippy::too_many_arguments)]
fn cmd_transfer(
    input: &Path,
    target: Option<&Path>,
    k: usize,
    samples: usize,
    r_max: u32,
    forced_r: Option<u32>,
    roots: u64,
    seed: u64,
    budget: u64,
    output: Option<&Path>,
    common: &CommonFlags,
) -> Result<(), Error> {
    let source = load_graph(input)?;
    let target_graph = match target {
        Some(path) => load_graph(path)?,
        None => source.clone(),
    };
    eprintln!(
        "transfer: source {} ({} vertices) -> target {} ({} vertices), k={k}",
        input.display(),
        source.vertex_count(),
        target.map_or_else(|| input.display().to_string(), |p| p.display().to_string()),
        target_graph.vertex_count(),
    );
    let config = TransferConfig {
        k,
        n_samples: samples,
        r_max,
        n_roots: roots,
        seed,
        forced_radius: forced_r,
        set_budget: budget,
    };
    let report = transfer_experiment(&source, &target_graph, &config)?;
    if let Some(path) = output {
        report.cut.write_file(path)?;
        eprintln!("wrote {}", path.display());
    }
    let mut body = report.to_json();
    body.as_object_mut().expect("report is an object").insert(
        "cli".into(),
        serde_json::json!({
            "input": input.display().to_string(),
            "target": target.map(|p| p.display().to_string()),
            "arithmetic": arithmetic_mode(common),
            "threads": common.threads,
        }),
    );
    emit(&serde_json::json!({
        "command": "transfer",
        "report": body,
    }))
}

/// Identify, validate, and summarize an artifact file.
fn cmd_report(input: &Path) -> Result<(), Error> {
    let text = read_text(input)?;
    let summary = if text.trim_start().starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(&text)?;
        summarize_json_artifact(&value)?
    } else {
        summarize_text_artifact(&text)?
    };
    emit(&serde_json::json!({
        "command": "report",
        "config": { "input": input.display().to_string() },
        "artifact": summary,
    }))
}

fn summarize_json_artifact(value: &serde_json::Value) -> Result<serde_json::Value, Error> {
    let obj = value
        .as_object()
        .ok_or_else(|| domain("artifact JSON must be an object"))?;
    if obj.contains_key("samples") {
        let ens = CutEnsemble::from_json(value)?;
        let sizes: Vec<usize> = ens.samples().iter().map(|s| s.cut.len()).collect();
        return Ok(serde_json::json!({
            "type": "cut-ensemble",
            "k": ens.k(),
            "samples": ens.samples().len(),
            "cut_sizes": sizes,
        }));
    }
    if obj.contains_key("default") {
        let stats = ComponentStats::from_json(value)?;
        return Ok(serde_json::json!({
            "type": "component-stats",
            "k": stats.k(),
            "R": stats.radius(),
            "patterns": stats.len(),
        }));
    }
    if obj.contains_key("radius") && obj.contains_key("entries") {
        let dist = NeighborhoodDistribution::from_json(value)?;
        return Ok(serde_json::json!({
            "type": "distribution",
            "radius": dist.radius(),
            "sample_count": dist.sample_count(),
            "support_size": dist.support_size(),
        }));
    }
    if obj.contains_key("eps_base") || obj.contains_key("report") {
        // Transfer reports are emitted, not consumed; check the pieces
        // that must re-parse.
        let body = obj.get("report").unwrap_or(value);
        let quality = body
            .get("quality")
            .ok_or_else(|| domain("transfer report lacks a quality section"))?;
        return Ok(serde_json::json!({
            "type": "transfer-report",
            "quality": quality,
        }));
    }
    Err(domain("unrecognized JSON artifact"))
}

fn summarize_text_artifact(text: &str) -> Result<serde_json::Value, Error> {
    // Cut files are bare edge lists with an `# edges=` header; graph
    // files carry `# n=` / `# M=` headers. Both bodies parse as either
    // kind, so classify by header first.
    let cut_header = text
        .lines()
        .map_while(|l| l.trim().strip_prefix('#'))
        .any(|c| c.trim().starts_with("edges="));
    if cut_header {
        let cut = EdgeCut::parse_text(text)?;
        return Ok(serde_json::json!({
            "type": "edge-cut",
            "size": cut.len(),
        }));
    }
    match Graph::from_edge_list_str(text) {
        Ok(g) => Ok(serde_json::json!({
            "type": "graph",
            "vertex_count": g.vertex_count(),
            "edge_count": g.edge_count(),
            "degree_bound": g.degree_bound(),
            "components": g.components().len(),
        })),
        Err(graph_err) => match EdgeCut::parse_text(text) {
            Ok(cut) => Ok(serde_json::json!({
                "type": "edge-cut",
                "size": cut.len(),
            })),
            Err(_) => Err(graph_err),
        },
    }
}
