//! Subcommands of the `tangle` binary. Each `cmd_*` function writes its
//! primary output to the given writer and returns a value for callers that
//! want to inspect the result.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use tangle_core::counting::{verify_against_bruteforce, CountError, CountTable, DEFAULT_H_CAP};
use tangle_core::duality::{
    irreducible_layouts, layout_to_pair, pair_to_layout, rotation_graph_isomorphic, triangulation_to_tree,
    tree_to_triangulation,
};
use tangle_core::flip_graph::{is_connected, Adjacency, FlipGraph, DEFAULT_GRAPH_CAP};
use tangle_core::known::{MIXING, CORE_COUNTS, CORE_COUNT_ERRATA};
use tangle_core::polygon::{enumerate_disjoint_pairs, flip_pair, moves, DisjointPair, Symmetry, Triangulation};
use tangle_core::sampling::{
    check_branch_identities, exact_distribution, random_walk_step, ChaChaStream, DecisionSource, SampleMode, Sampler,
    SamplerConfig, SamplingError, DEFAULT_EXACT_IRREDUCIBLE_CAP,
};
use tangle_core::spectral::spectral_report;
use tangle_core::tanglegram::{Layout, PlaneTree, Presentation, Tanglegram};

/// Directory used for caches when neither the flag nor the environment
/// variable is set.
pub const DEFAULT_CACHE_DIR: &str = ".tangle-cache";

/// Samples generated in parallel before being written out in order.
const SAMPLE_CHUNK: u64 = 4096;

#[derive(Debug, Parser)]
#[command(name = "tangle", version, about = "Planar tanglegrams, disjoint triangulation pairs and their flip graphs")]
pub struct Cli {
    /// Directory for count-table caches.
    #[arg(long, env = "TANGLE_CACHE_DIR", global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads (defaults to available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count planar tanglegrams by size and core size, as CSV.
    Count(CountArgs),
    /// Draw random planar tanglegrams, one canonical code per line.
    Sample(SampleArgs),
    /// Random walk on the flip graph of disjoint triangulation pairs.
    Walk(WalkArgs),
    /// Build a flip graph and report its structure.
    Graph(GraphArgs),
    /// Second eigenvalue and mixing iterations per polygon size, as CSV.
    Spectra(SpectraArgs),
    /// Translate between layouts, triangulation pairs and canonical codes.
    Convert(ConvertArgs),
    /// Run the built-in consistency checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CountArgs {
    #[arg(long, default_value_t = 8)]
    pub max_n: usize,
    /// Largest size whose irreducible count may be computed.
    #[arg(long, default_value_t = DEFAULT_H_CAP)]
    pub h_cap: usize,
    /// Also write the CSV to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Exact draws for cores up to the exact cap.
    Exact,
    /// Random-walk draws for every core of size three or more.
    Mcmc,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub size: usize,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Walk steps for cores drawn by random walk.
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_EXACT_IRREDUCIBLE_CAP)]
    pub exact_cap: usize,
    /// Start walks at a random symmetric image of the standard pair.
    #[arg(long)]
    pub randomize_start: bool,
    /// Write one JSON trace per sample to this file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_H_CAP)]
    pub h_cap: usize,
}

#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    /// Polygon size.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub steps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub emit_every: u64,
    #[arg(long)]
    pub randomize_start: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// Polygon size.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_GRAPH_CAP)]
    pub cap: usize,
    /// Write the graph in DOT format to this file.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Write vertices and edges as JSON to this file.
    #[arg(long)]
    pub graph_json: Option<PathBuf>,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SpectraArgs {
    #[arg(long, default_value_t = 5)]
    pub from: usize,
    #[arg(long, default_value_t = 8)]
    pub to: usize,
    /// One JSON object per line instead of CSV.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvertKind {
    /// `L|R` irreducible layout to `T1|T2` triangulation pair.
    LayoutToPair,
    /// `T1|T2` pair to `L|R` layout.
    PairToLayout,
    /// `L|R|perm` presentation (or `L|R` layout) to its canonical code.
    Canon,
    /// Plane tree to triangulation.
    TreeToTriangulation,
    /// Triangulation to plane tree.
    TriangulationToTree,
}

#[derive(Debug, Clone, Args)]
pub struct ConvertArgs {
    #[arg(value_enum)]
    pub kind: ConvertKind,
    pub input: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    pub level: Level,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone)]
pub struct CliConfig {
    pub cache_dir: PathBuf,
}

impl CliConfig {
    pub fn from_cli(cli: &Cli) -> Self {
        CliConfig { cache_dir: cli.cache_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR)) }
    }

    pub fn counts_path(&self, max_n: usize) -> PathBuf {
        self.cache_dir.join(format!("counts-{max_n}.txt"))
    }
}

/// Dispatches one parsed command line. Returns false when `verify` found a
/// failing check.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    let cfg = CliConfig::from_cli(cli);
    match &cli.command {
        Command::Count(a) => cmd_count(&cfg, a, out).map(|_| true),
        Command::Sample(a) => cmd_sample(&cfg, a, out).map(|_| true),
        Command::Walk(a) => cmd_walk(a, out).map(|_| true),
        Command::Graph(a) => cmd_graph(a, out).map(|_| true),
        Command::Spectra(a) => cmd_spectra(a, out).map(|_| true),
        Command::Convert(a) => cmd_convert(a, out).map(|_| true),
        Command::Verify(a) => cmd_verify(&cfg, a, out).map(|r| r.passed),
    }
}

/// Loads the count tables through `max_n` from the cache, computing and
/// storing them when absent or written by another version.
pub fn load_tables(cfg: &CliConfig, max_n: usize, h_cap: usize) -> Result<(CountTable, bool)> {
    let path = cfg.counts_path(max_n);
    CountTable::load_or_compute_with_cap(&path, max_n, h_cap).map_err(|e| match e {
        CountError::CapExceeded { n, cap } => anyhow::anyhow!(
            "counting through n = {n} needs irreducible counts beyond the cap {cap}; raise --h-cap (at most 15)"
        ),
        CountError::CorruptCache(why) => anyhow::anyhow!(
            "cache file {} is corrupt ({why}); delete it to rebuild",
            path.display()
        ),
        e => anyhow::Error::new(e).context(format!("count tables through n = {max_n}")),
    })
}

pub fn cmd_count(cfg: &CliConfig, args: &CountArgs, out: &mut dyn Write) -> Result<CountTable> {
    let (table, cached) = load_tables(cfg, args.max_n, args.h_cap)?;
    let csv = table.to_csv();
    out.write_all(csv.as_bytes())?;
    if let Some(path) = &args.out {
        fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!(
        "counts through n = {} {}; t_{} = {}",
        table.max_n(),
        if cached { "loaded from cache" } else { "computed and cached" },
        table.max_n(),
        table.t(table.max_n()).map(ToString::to_string).unwrap_or_default()
    );
    Ok(table)
}

#[derive(Debug, Clone, Serialize)]
struct TraceLine<'a> {
    index: u64,
    mode: SampleMode,
    trace: &'a tangle_core::sampling::SampleTrace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SampleSummary {
    pub exact: u64,
    pub approximate: u64,
}

pub fn sampler_config(args: &SampleArgs) -> Result<SamplerConfig> {
    let exact_irreducible_cap = match args.mode {
        Mode::Exact => args.exact_cap,
        Mode::Mcmc => {
            if args.burn_in.is_none() {
                bail!("--mode mcmc needs --burn-in");
            }
            2
        }
    };
    Ok(SamplerConfig {
        seed: args.seed,
        exact_irreducible_cap,
        mcmc_burn_in: args.burn_in,
        randomize_start: args.randomize_start,
    })
}

pub fn cmd_sample(cfg: &CliConfig, args: &SampleArgs, out: &mut dyn Write) -> Result<SampleSummary> {
    if args.size == 0 {
        bail!("--size must be positive");
    }
    let (tables, _) = load_tables(cfg, args.size.max(2), args.h_cap)?;
    let sampler = Sampler::new(&tables, sampler_config(args)?)?;
    let mut trace_file = match &args.trace {
        Some(p) => Some(std::io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => None,
    };
    let mut summary = SampleSummary::default();
    let mut start = 0;
    while start < args.count {
        let end = (start + SAMPLE_CHUNK).min(args.count);
        let chunk = (start..end)
            .into_par_iter()
            .map(|i| sampler.sample(args.size, &mut sampler.stream(i)))
            .collect::<Result<Vec<_>, SamplingError>>()
            .map_err(|e| match e {
                SamplingError::MissingBurnIn { k, cap } => anyhow::anyhow!(
                    "a core of size {k} exceeds the exact cap {cap}; pass --burn-in to draw it by random walk (output is then approximate)"
                ),
                e => e.into(),
            })?;
        for (i, s) in (start..end).zip(&chunk) {
            writeln!(out, "{}", s.tanglegram)?;
            match s.mode {
                SampleMode::Exact => summary.exact += 1,
                SampleMode::Approximate => summary.approximate += 1,
            }
            if let Some(f) = trace_file.as_mut() {
                serde_json::to_writer(&mut *f, &TraceLine { index: i, mode: s.mode, trace: &s.trace })?;
                writeln!(f)?;
            }
        }
        start = end;
    }
    if let Some(mut f) = trace_file {
        f.flush()?;
    }
    eprintln!("{} exact, {} approximate", summary.exact, summary.approximate);
    Ok(summary)
}

pub fn cmd_walk(args: &WalkArgs, out: &mut dyn Write) -> Result<DisjointPair> {
    if args.n < 5 {
        bail!("walks need a polygon with at least 5 vertices");
    }
    if args.emit_every == 0 {
        bail!("--emit-every must be positive");
    }
    let mut src = ChaChaStream::new(args.seed);
    let mut p = DisjointPair::standard(args.n)?;
    if args.randomize_start {
        let symmetries = Symmetry::all(args.n);
        p = symmetries[src.below_usize(symmetries.len())].apply(&p);
    }
    writeln!(out, "0 {p}")?;
    for t in 1..=args.steps {
        p = random_walk_step(&p, &mut src);
        if t % args.emit_every == 0 {
            writeln!(out, "{t} {p}")?;
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphReport {
    pub n: usize,
    pub vertices: usize,
    pub edges: usize,
    pub degree: usize,
    pub simple: bool,
    pub regular: bool,
    pub connected: bool,
    pub diameter: usize,
    pub diameter_bound: usize,
    pub within_bound: bool,
    /// Three mutually adjacent vertices.
    pub triangle: Option<[String; 3]>,
    pub seconds: f64,
}

#[derive(Serialize)]
struct GraphExport<'a> {
    n: usize,
    vertices: Vec<String>,
    edges: &'a [(usize, usize)],
}

pub fn graph_report(n: usize, cap: usize) -> Result<(FlipGraph, GraphReport)> {
    let start = Instant::now();
    let g = FlipGraph::build_with_cap(n, cap)?;
    let degree = 2 * (n - 3);
    let regular = g.degree() == degree && (0..g.vertex_count()).all(|v| g.neighbors(v).len() == degree);
    let connected = is_connected(&g);
    let diameter = if connected { g.diameter()? } else { usize::MAX };
    let bound = (4 * n).saturating_sub(16);
    let triangle = g.find_triangle().ok().map(|t| t.map(|i| g.vertex(i).to_string()));
    let report = GraphReport {
        n,
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        degree: g.degree(),
        simple: g.is_simple() && g.is_symmetric(),
        regular,
        connected,
        diameter,
        diameter_bound: bound,
        within_bound: diameter <= bound,
        triangle,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((g, report))
}

pub fn cmd_graph(args: &GraphArgs, out: &mut dyn Write) -> Result<GraphReport> {
    if args.n < 5 {
        bail!("flip graphs are built for polygons with at least 5 vertices");
    }
    let (g, report) = graph_report(args.n, args.cap)?;
    if let Some(path) = &args.dot {
        fs::write(path, g.to_dot()).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.graph_json {
        let edges: Vec<(usize, usize)> = (0..g.vertex_count())
            .flat_map(|v| g.neighbors(v).iter().map(move |&w| (v, w as usize)))
            .filter(|(v, w)| v < w)
            .collect();
        let export = GraphExport { n: g.n(), vertices: g.vertices().iter().map(ToString::to_string).collect(), edges: &edges };
        fs::write(path, serde_json::to_string(&export)?).with_context(|| format!("writing {}", path.display()))?;
    }
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        writeln!(out, "n {}", report.n)?;
        writeln!(out, "vertices {}", report.vertices)?;
        writeln!(out, "edges {}", report.edges)?;
        writeln!(out, "degree {}", report.degree)?;
        writeln!(out, "simple {}", report.simple)?;
        writeln!(out, "regular {}", report.regular)?;
        writeln!(out, "connected {}", report.connected)?;
        writeln!(out, "diameter {}", report.diameter)?;
        writeln!(out, "diameter_bound {}", report.diameter_bound)?;
        writeln!(out, "within_bound {}", report.within_bound)?;
        if let Some([a, b, c]) = &report.triangle {
            writeln!(out, "triangle {a} {b} {c}")?;
        }
    }
    Ok(report)
}

pub fn cmd_spectra(args: &SpectraArgs, out: &mut dyn Write) -> Result<Vec<tangle_core::spectral::SpectralReport>> {
    if args.from < 5 || args.to < args.from {
        bail!("need 5 <= --from <= --to");
    }
    if !args.json {
        writeln!(out, "n,vertices,sigma2,sigma2_abs,tv_iterations,method")?;
    }
    let mut reports = Vec::new();
    for n in args.from..=args.to {
        let g = FlipGraph::build(n)?;
        let r = spectral_report(&g)?;
        if args.json {
            writeln!(out, "{}", serde_json::to_string(&r)?)?;
        } else {
            let method = serde_json::to_value(r.method)?;
            writeln!(
                out,
                "{},{},{:.6},{:.6},{},{}",
                r.n,
                r.vertex_count,
                r.sigma2,
                r.sigma2_abs,
                r.tv_iterations,
                method.as_str().unwrap_or_default()
            )?;
        }
        out.flush()?;
        reports.push(r);
    }
    Ok(reports)
}

pub fn convert(kind: ConvertKind, input: &str) -> Result<String> {
    let input = input.trim();
    Ok(match kind {
        ConvertKind::LayoutToPair => layout_to_pair(&input.parse::<Layout>()?)?.to_string(),
        ConvertKind::PairToLayout => pair_to_layout(&input.parse::<DisjointPair>()?).to_string(),
        ConvertKind::Canon => {
            let p = match input.parse::<Presentation>() {
                Ok(p) => p,
                Err(_) => input.parse::<Layout>()?.presentation(),
            };
            Tanglegram::from_presentation(&p).to_string()
        }
        ConvertKind::TreeToTriangulation => tree_to_triangulation(&input.parse::<PlaneTree>()?)?.to_string(),
        ConvertKind::TriangulationToTree => triangulation_to_tree(&input.parse::<Triangulation>()?).to_string(),
    })
}

pub fn cmd_convert(args: &ConvertArgs, out: &mut dyn Write) -> Result<String> {
    let s = convert(args.kind, &args.input)?;
    writeln!(out, "{s}")?;
    Ok(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub level: &'static str,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn check(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e:#}")));
    Check { name: name.to_string(), passed, detail }
}

/// Flip then inverse is the identity for every pair and move of the `n`-gon.
pub fn flip_involution_failures(n: usize) -> Result<(usize, usize)> {
    let pairs = enumerate_disjoint_pairs(n)?;
    let failures = pairs
        .par_iter()
        .map(|p| {
            moves(p)
                .into_iter()
                .filter(|&m| {
                    let Ok(out) = flip_pair(p, m) else { return true };
                    let valid = DisjointPair::new(*out.pair.first(), *out.pair.second()).is_ok();
                    let back = flip_pair(&out.pair, out.inverse).map(|o| o.pair == *p).unwrap_or(false);
                    !(valid && back)
                })
                .count()
        })
        .sum();
    Ok((pairs.len() * 2 * (n - 3), failures))
}

/// Published table rows with the known misprints replaced by their values.
pub fn corrected_core_counts() -> Vec<(usize, Vec<u64>, u64)> {
    CORE_COUNTS
        .iter()
        .map(|&(n, row, total)| {
            let mut row = row.to_vec();
            for &(en, k, _, correct) in CORE_COUNT_ERRATA {
                if en == n {
                    row[k - 2] = correct;
                }
            }
            (n, row, total)
        })
        .collect()
}

fn cache_files(dir: &Path) -> Vec<(PathBuf, usize)> {
    let Ok(entries) = fs::read_dir(dir) else { return Vec::new() };
    let mut out: Vec<(PathBuf, usize)> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().into_string().ok()?;
            let n = name.strip_prefix("counts-")?.strip_suffix(".txt")?.parse().ok()?;
            Some((e.path(), n))
        })
        .collect();
    out.sort();
    out
}

pub fn cmd_verify(cfg: &CliConfig, args: &VerifyArgs, out: &mut dyn Write) -> Result<VerifyReport> {
    let full = args.level == Level::Full;
    let census_max = if full { 6 } else { 5 };
    let flip_max = if full { 7 } else { 6 };
    let graph_max = if full { 8 } else { 7 };
    let rotation_max = if full { 7 } else { 5 };
    let sampler_n = if full { 5 } else { 4 };
    let mut checks = Vec::new();

    checks.push(check("count-identities", || {
        let table = CountTable::compute(8)?;
        check_branch_identities(&table)?;
        let mut bad = Vec::new();
        for (n, row, total) in corrected_core_counts() {
            for (k, &v) in (2..).zip(&row) {
                if *table.t_nk(n, k)? != BigUint::from(v) {
                    bad.push(format!("t_{{{n},{k}}}"));
                }
            }
            if *table.t(n)? != BigUint::from(total) || row.iter().sum::<u64>() != total {
                bad.push(format!("t_{n}"));
            }
        }
        let detail = if bad.is_empty() {
            format!("rows through n = 8 agree, with {} misprinted entry corrected", CORE_COUNT_ERRATA.len())
        } else {
            format!("disagreements at {}", bad.join(", "))
        };
        Ok((bad.is_empty(), detail))
    }));

    checks.push(check("census", || {
        let table = CountTable::compute(census_max)?;
        let mut ok = true;
        for n in 2..=census_max {
            ok &= verify_against_bruteforce(&table, n)?.matches;
        }
        Ok((ok, format!("enumerated planar tanglegrams by core size, n <= {census_max}")))
    }));

    checks.push(check("flip-involution", || {
        let mut total = 0;
        let mut failures = 0;
        for n in 4..=flip_max {
            let (t, f) = flip_involution_failures(n)?;
            total += t;
            failures += f;
        }
        Ok((failures == 0, format!("{total} moves, {failures} failures, n <= {flip_max}")))
    }));

    checks.push(check("graph-structure", || {
        let mut notes = Vec::new();
        let mut ok = true;
        for row in MIXING.iter().filter(|r| r.n <= graph_max) {
            let g = FlipGraph::build(row.n)?;
            let regular = (0..g.vertex_count()).all(|v| g.neighbors(v).len() == 2 * (row.n - 3));
            let good = g.vertex_count() == row.vertices && regular && g.is_simple() && g.is_symmetric() && is_connected(&g);
            ok &= good;
            notes.push(format!("n={}:{}", row.n, g.vertex_count()));
        }
        Ok((ok, notes.join(" ")))
    }));

    checks.push(check("bijection", || {
        let mut ok = true;
        for n in 4..=graph_max {
            ok &= enumerate_disjoint_pairs(n)?
                .par_iter()
                .all(|p| layout_to_pair(&pair_to_layout(p)).map(|q| q == *p).unwrap_or(false));
        }
        for k in 3..=rotation_max {
            ok &= irreducible_layouts(k).len() == FlipGraph::build(k + 1)?.vertex_count();
            ok &= rotation_graph_isomorphic(k)?;
        }
        Ok((ok, format!("round trips for n <= {graph_max}, rotations for sizes <= {rotation_max}")))
    }));

    checks.push(check("sampler-exactness", || {
        let table = CountTable::compute(sampler_n)?;
        let dist = exact_distribution(sampler_n, &table, &SamplerConfig::default())?;
        let t_n = table.t(sampler_n)?.clone();
        let uniform = dist.len() == usize::try_from(&t_n).unwrap_or(0)
            && dist.values().all(|p| p.numer() == &1.into() && p.denom() == &t_n.clone().into());
        Ok((uniform, format!("{} outcomes at n = {sampler_n}", dist.len())))
    }));

    checks.push(check("cache-integrity", || {
        let files = cache_files(&cfg.cache_dir);
        let mut bad = BTreeMap::new();
        for (path, n) in &files {
            if let Err(e) = CountTable::load(path, *n) {
                bad.insert(path.display().to_string(), e.to_string());
            }
        }
        let detail = if bad.is_empty() {
            format!("{} cache files valid", files.len())
        } else {
            bad.iter().map(|(p, e)| format!("{p}: {e}")).collect::<Vec<_>>().join("; ")
        };
        Ok((bad.is_empty(), detail))
    }));

    let passed = checks.iter().all(|c| c.passed);
    let report = VerifyReport { level: if full { "full" } else { "quick" }, checks, passed };
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        for c in &report.checks {
            writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        writeln!(out, "verdict {}", if passed { "pass" } else { "fail" })?;
    }
    Ok(report)
}
