use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ohx_core::constructions::{FamilyName, FamilySpec};
use ohx_core::format::{format_rational, parse_any, to_json, to_ohx, weighted_to_json, HypergraphDoc};
use ohx_core::patterns::{contains, Pattern};
use ohx_core::search::{
    max_pattern_free, partite_sizes, verify_boxes, verify_constructions, verify_splitter, z_max_pattern_free,
    SolverConfig, ValueCache, Verifier, VerifyReport, DEFAULT_GUARD,
};
use ohx_core::splitter::{box_decomposition, extract_bipartite, extract_split, ExtractConfig};
use ohx_core::{Hypergraph, Mode, WeightedHypergraph};
use serde_json::json;

/// Ordered and convex geometric hypergraphs: constructions, pattern
/// containment, split extraction and exact extremal values.
#[derive(Parser, Debug)]
#[command(name = "ohx", version)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit JSON instead of text or CSV.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an extremal family and write it as .ohx (or JSON).
    Construct(ConstructArgs),
    /// Look for a pattern in a host.
    Check(CheckArgs),
    /// Codegree density `|w| / v^(r-1)` of a (weighted) hypergraph.
    Density(InputArgs),
    /// Extract a dense split (or bipartite) subgraph with its certificate.
    Split(SplitArgs),
    /// Interval box partition of all r-subsets of 0..n.
    Boxes(BoxesArgs),
    /// Exact maximum number of edges avoiding a pattern.
    Extremal(ExtremalArgs),
    /// Run a verification suite and print it as CSV.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Linear,
    Cyclic,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Linear => Mode::Linear,
            ModeArg::Cyclic => Mode::Cyclic,
        }
    }
}

#[derive(Args, Debug)]
struct ConstructArgs {
    /// consecutive (k <= r + 1), consecutive_plus_last (k = r + 1), pow2 (or
    /// pow2gap).
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    /// Path length the family avoids (consecutive families only).
    #[arg(long)]
    k: Option<usize>,
    /// Mode written to the output header.
    #[arg(long, value_enum, default_value = "linear")]
    mode: ModeArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    host: PathBuf,
    /// Built-in name (cp:r:k or cm:r:k) or a pattern file. The host's
    /// mode is used.
    #[arg(long)]
    pattern: String,
    /// Exit with status 1 when the pattern is found.
    #[arg(long)]
    require_free: bool,
}

#[derive(Args, Debug)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SplitKind {
    Split,
    Bipartite,
}

#[derive(Args, Debug)]
struct SplitArgs {
    #[arg(long)]
    input: PathBuf,
    /// Weighted JSON document over host edges; unlisted host edges weigh 1.
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "split")]
    kind: SplitKind,
    /// Vertex count at or below which bipartite extraction stops recursing
    /// (default r^5).
    #[arg(long)]
    base_threshold: Option<usize>,
    /// Exit with status 1 if the ratio misses the guarantee.
    #[arg(long)]
    require_guarantee: bool,
}

#[derive(Args, Debug)]
struct BoxesArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    /// Include every box, not just the per-level counts.
    #[arg(long)]
    full: bool,
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// Largest edge universe the solver accepts.
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard: u128,
    /// Stop after this many nodes (the result is then not proved optimal).
    #[arg(long)]
    node_limit: Option<u64>,
    /// Branching decisions expanded into parallel subtrees.
    #[arg(long, default_value_t = 6)]
    split_depth: usize,
}

#[derive(Args, Debug)]
struct ExtremalArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    pattern: String,
    #[arg(long, value_enum, default_value = "linear")]
    mode: ModeArg,
    /// Interval part sizes (comma separated) for the partite variant; replaces
    /// --n and --r.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Start from the best built-in construction.
    #[arg(long)]
    seed_construction: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Suite {
    #[value(alias = "theorem4")]
    ClosedForm,
    Recurrence,
    Partite,
    Cyclic,
    Constructions,
    Boxes,
    Splitter,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    max_r: Option<usize>,
    /// Largest k for the partite suite.
    #[arg(long, default_value_t = 3)]
    k_max: usize,
    /// Largest total vertex count of partite size vectors.
    #[arg(long, default_value_t = 6)]
    max_total: usize,
    /// Patterns for the cyclic suite.
    #[arg(long, value_delimiter = ',', default_value = "cp:2:2,cp:2:3,cm:2:2")]
    patterns: Vec<String>,
    /// Largest n at which the constructions suite runs the detector.
    #[arg(long, default_value_t = 10)]
    free_max_n: usize,
    /// Uniformities for the splitter suite.
    #[arg(long, value_delimiter = ',', default_value = "3,4")]
    rs: Vec<usize>,
    /// Instances per uniformity for the splitter suite.
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long)]
    base_threshold: Option<usize>,
    /// JSON value cache shared between runs.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_doc(path: &Path) -> Result<HypergraphDoc> {
    parse_any(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_hypergraph(path: &Path) -> Result<Hypergraph> {
    load_doc(path)?.to_hypergraph().with_context(|| format!("in {}", path.display()))
}

fn load_pattern(spec: &str) -> Result<Pattern> {
    if spec.starts_with("cp:") || spec.starts_with("cm:") {
        return Ok(Pattern::from_name(spec)?);
    }
    let h = load_hypergraph(Path::new(spec))?;
    Ok(Pattern::from_hypergraph(&h)?)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn solver_config(args: &SolverArgs, seed_construction: bool) -> SolverConfig {
    SolverConfig { guard: args.guard, seed_construction, node_limit: args.node_limit, split_depth: args.split_depth }
}

fn construct(cli: &Cli, a: &ConstructArgs) -> Result<ExitCode> {
    let name: FamilyName = a.family.parse()?;
    let k = match (name, a.k) {
        (FamilyName::Pow2Gap, _) => a.r + 2,
        (_, Some(k)) => k,
        (_, None) => bail!("--k is required for the {name} family"),
    };
    let spec = match name {
        FamilyName::Pow2Gap => FamilySpec::pow2(a.n, a.r),
        FamilyName::Consecutive => FamilySpec::consecutive(a.n, a.r, k),
        FamilyName::ConsecutivePlusLast => FamilySpec { name, n: a.n, r: a.r, k },
    };
    let h = spec.build()?.with_mode(a.mode.into());
    let text = if cli.json { to_json(&h) } else { to_ohx(&h) };
    emit(a.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn check(cli: &Cli, a: &CheckArgs) -> Result<ExitCode> {
    let host = load_hypergraph(&a.host)?;
    let pattern = load_pattern(&a.pattern)?.with_mode(host.mode());
    let found = contains(&host, &pattern)?;
    if cli.json {
        emit(None, &pretty(&json!({ "pattern": pattern.label(), "found": found.is_some(), "embedding": found })))?;
    } else {
        match &found {
            Some(emb) => {
                let map = emb.map.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
                emit(None, &format!("found: {map} (rotation {})", emb.rotation))?;
            }
            None => emit(None, "not found")?,
        }
    }
    Ok(if a.require_free && found.is_some() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn density(cli: &Cli, a: &InputArgs) -> Result<ExitCode> {
    let doc = load_doc(&a.input)?;
    let w = doc.to_weighted()?;
    let d = w.codegree_density()?;
    if cli.json {
        emit(
            None,
            &pretty(&json!({
                "vertices": w.vertex_count(),
                "total": format_rational(&w.total()),
                "density": format_rational(&d),
            })),
        )?;
    } else {
        emit(None, &format_rational(&d))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn load_weighting(a: &SplitArgs) -> Result<WeightedHypergraph> {
    let doc = load_doc(&a.input)?;
    let mut w = doc.to_weighted()?;
    if let Some(path) = &a.weights {
        let extra = load_doc(path)?.to_weighted().with_context(|| format!("in {}", path.display()))?;
        if extra.n() != w.n() || extra.r() != w.r() {
            bail!(
                "{}: weights are for n = {}, r = {}, host has n = {}, r = {}",
                path.display(),
                extra.n(),
                extra.r(),
                w.n(),
                w.r()
            );
        }
        for (e, x) in extra.iter() {
            if w.weight(e) == Default::default() {
                bail!("{}: weighted edge {e:?} is not a host edge", path.display());
            }
            w.set(e, x.clone())?;
        }
    }
    Ok(w)
}

fn split(a: &SplitArgs) -> Result<ExitCode> {
    let w = load_weighting(a)?;
    let config = ExtractConfig { base_threshold: a.base_threshold };
    let res = match a.kind {
        SplitKind::Split => extract_split(&w, &config)?,
        SplitKind::Bipartite => extract_bipartite(&w, &config)?,
    };
    let ok = res.meets_guarantee() && res.validate().is_ok();
    let mut out = serde_json::to_value(&res)?;
    out["edges"] = json!(res.subgraph.edge_count());
    out["valid"] = json!(ok);
    out["subgraph"] = serde_json::from_str(&weighted_to_json(&res.weights))?;
    emit(None, &pretty(&out))?;
    Ok(if a.require_guarantee && !ok { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn boxes(a: &BoxesArgs) -> Result<ExitCode> {
    let d = box_decomposition(a.n, a.r)?;
    let levels: Vec<_> = d
        .levels
        .iter()
        .enumerate()
        .map(|(t, l)| {
            let mut v = json!({
                "level": t + 1,
                "intervals": l.intervals.len(),
                "boxes": l.boxes.len(),
                "bound": d.level_bound(t + 1).to_string(),
            });
            if a.full {
                v["box_list"] = serde_json::to_value(&l.boxes).expect("serializable");
                v["interval_list"] = serde_json::to_value(&l.intervals).expect("serializable");
            }
            v
        })
        .collect();
    let out = json!({
        "n": a.n,
        "r": a.r,
        "total_boxes": d.box_count(),
        "level_bounds_hold": d.level_bounds_hold(),
        "levels": levels,
    });
    emit(None, &pretty(&out))?;
    Ok(ExitCode::SUCCESS)
}

fn extremal(cli: &Cli, a: &ExtremalArgs) -> Result<ExitCode> {
    let pattern = load_pattern(&a.pattern)?;
    let config = solver_config(&a.solver, a.seed_construction);
    let res = match &a.sizes {
        Some(sizes) => z_max_pattern_free(sizes, &pattern, &config)?,
        None => {
            let (Some(n), Some(r)) = (a.n, a.r) else { bail!("--n and --r are required unless --sizes is given") };
            max_pattern_free(n, r, &pattern, a.mode.into(), &config)?
        }
    };
    if cli.json {
        let mut out = serde_json::to_value(&res)?;
        out["pattern"] = json!(pattern.label());
        out["witness"] = serde_json::from_str(&to_json(&res.witness))?;
        emit(None, &pretty(&out))?;
    } else {
        let status = if res.proved_optimal { "proved optimal" } else { "node limit reached, lower bound only" };
        emit(
            None,
            &format!(
                "value {} ({status}; {} nodes, {} candidate edges, {} copies)\n{}",
                res.value,
                res.nodes_explored,
                res.universe,
                res.copies,
                to_ohx(&res.witness)
            ),
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(cli: &Cli, a: &VerifyArgs) -> Result<ExitCode> {
    let cache = match &a.cache {
        Some(path) => ValueCache::open(path).with_context(|| format!("opening cache {}", path.display()))?,
        None => ValueCache::in_memory(),
    };
    let mut v = Verifier::new(solver_config(&a.solver, true), cache);
    let extract = ExtractConfig { base_threshold: a.base_threshold };
    let report: VerifyReport = match a.suite {
        Suite::ClosedForm => v.closed_form(a.max_n.unwrap_or(8), a.max_r.unwrap_or(2))?,
        Suite::Recurrence => v.recurrence(a.max_n.unwrap_or(7), a.max_r.unwrap_or(3))?,
        Suite::Partite => {
            let sizes: Vec<Vec<usize>> =
                (2..=a.max_r.unwrap_or(2)).flat_map(|r| partite_sizes(r, a.max_total)).collect();
            v.partite(&sizes, a.k_max)?
        }
        Suite::Cyclic => {
            let patterns = a.patterns.iter().map(|p| load_pattern(p)).collect::<Result<Vec<_>>>()?;
            v.cyclic_vs_linear(a.max_n.unwrap_or(7), &patterns)?
        }
        Suite::Constructions => verify_constructions(a.max_n.unwrap_or(12), a.max_r.unwrap_or(4), a.free_max_n)?,
        Suite::Boxes => {
            let max_n = a.max_n.unwrap_or(16);
            let cases: Vec<(usize, usize)> =
                (2..=a.max_r.unwrap_or(3)).flat_map(|r| (r..=max_n).map(move |n| (n, r))).collect();
            verify_boxes(&cases)?
        }
        Suite::Splitter => verify_splitter(&a.rs, a.count, cli.seed, &extract)?,
    };
    v.cache.save()?;
    let text = if cli.json { pretty(&serde_json::to_value(&report)?) } else { report.to_csv() };
    emit(a.output.as_deref(), &text)?;
    if report.all_match() {
        Ok(ExitCode::SUCCESS)
    } else {
        for row in report.mismatches() {
            eprintln!("mismatch: {} formula {} computed {}", row.params.join(","), row.formula, row.computed);
        }
        Ok(ExitCode::from(1))
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be positive");
        }
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Construct(a) => construct(cli, a),
        Command::Check(a) => check(cli, a),
        Command::Density(a) => density(cli, a),
        Command::Split(a) => split(a),
        Command::Boxes(a) => boxes(a),
        Command::Extremal(a) => extremal(cli, a),
        Command::Verify(a) => verify(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
