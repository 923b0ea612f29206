use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sgh_core::codec;
use sgh_core::decomposition::dump_paths;
use sgh_core::embed::{embed, EmbedOptions, EmbeddingTable};
use sgh_core::error::HyperbolicError;
use sgh_core::families;
use sgh_core::graph::{load_graph, Graph, SpanningStrategy};
use sgh_core::hyperbolic::{approx_acosh, render_svg, HyperbolicOracle, HyperbolicParams, Layers, RenderOptions};
use sgh_core::router::{route, verify_all_pairs, DistanceOracle, DyadicOracle, NextHopPolicy, VerifyOptions};

#[derive(Parser)]
#[command(name = "sgh", version, about = "Succinct greedy embeddings: embed, verify, route, stats, render, bench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a graph and write its coordinate file
    Embed(EmbedArgs),
    /// Check that greedy forwarding never gets stuck, for every ordered pair
    Verify(VerifyArgs),
    /// Print the greedy route between two vertices
    Route(RouteArgs),
    /// Coordinate size histogram and heavy-path summary
    Stats(StatsArgs),
    /// Draw the hyperbolic realization as SVG
    Render(RenderArgs),
    /// Time the pipeline on random connected graphs and print CSV
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Binary,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Space {
    Dyadic,
    Hyperbolic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Bfs,
    Dfs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Smallest,
    Largest,
    Random,
}

#[derive(Args)]
struct TreeArgs {
    /// Root of the spanning tree
    #[arg(long, default_value_t = 0)]
    root: usize,
    #[arg(long, value_enum, default_value_t = Strategy::Bfs)]
    strategy: Strategy,
}

impl TreeArgs {
    fn options(&self) -> EmbedOptions {
        let strategy = match self.strategy {
            Strategy::Bfs => SpanningStrategy::BreadthFirst,
            Strategy::Dfs => SpanningStrategy::DepthFirst,
        };
        EmbedOptions { root: self.root, strategy }
    }
}

#[derive(Args)]
struct GeometryArgs {
    /// Buffer zone width (default: chosen from the coordinate depth)
    #[arg(long = "d", value_name = "VALUE")]
    d: Option<f64>,
    /// Working precision in bits (default: chosen from the edge length)
    #[arg(long, value_name = "BITS", value_parser = clap::value_parser!(u32).range(64..))]
    precision: Option<u32>,
}

impl GeometryArgs {
    fn params(&self, table: &EmbeddingTable) -> Result<HyperbolicParams> {
        if let Some(d) = self.d {
            if !(d.is_finite() && d > 0.0) {
                bail!("--d must be a positive number, got {d}");
            }
        }
        Ok(HyperbolicParams::new(table.max_address_depth(), self.d, self.precision.map(|p| p as usize))?)
    }
}

#[derive(Args)]
struct EmbedArgs {
    /// Graph file: "n m" then m lines "u v"
    #[arg(long, short)]
    input: PathBuf,
    /// Coordinate file to write
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Binary)]
    format: Format,
    #[command(flatten)]
    tree: TreeArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, short, visible_alias = "graph")]
    input: PathBuf,
    /// Coordinate file, binary or JSON
    #[arg(long, short)]
    coords: PathBuf,
    #[arg(long, value_enum, default_value_t = Space::Dyadic)]
    space: Space,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Worker threads (default: available parallelism)
    #[arg(long, env = "SGH_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    /// Next-hop rule used for the delivery and stretch statistics
    #[arg(long, value_enum, default_value_t = Policy::Smallest)]
    policy: Policy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest graph accepted in hyperbolic space
    #[arg(long, default_value_t = 64)]
    max_vertices: usize,
}

#[derive(Args)]
struct RouteArgs {
    #[arg(long, short, visible_alias = "input")]
    graph: PathBuf,
    #[arg(long, short)]
    coords: PathBuf,
    #[arg(long)]
    from: usize,
    #[arg(long)]
    to: usize,
    #[arg(long, value_enum, default_value_t = Space::Dyadic)]
    space: Space,
    #[command(flatten)]
    geometry: GeometryArgs,
    #[arg(long, value_enum, default_value_t = Policy::Smallest)]
    policy: Policy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[command(flatten)]
    tree: TreeArgs,
    /// Also list every heavy path
    #[arg(long)]
    dump_paths: bool,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long, short, visible_alias = "graph")]
    input: PathBuf,
    #[arg(long, short)]
    coords: PathBuf,
    /// SVG file to write
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated subset of edges,circles,buffers,heptagons, or "all"
    #[arg(long, default_value = "edges,circles")]
    layers: Layers,
    /// Image width and height in pixels
    #[arg(long, default_value_t = 800, value_parser = clap::value_parser!(u32).range(1..))]
    disk_size: u32,
    #[command(flatten)]
    geometry: GeometryArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Graph sizes, comma-separated
    #[arg(long, value_delimiter = ',', default_value = "16,64,256,1024,4096")]
    sizes: Vec<usize>,
    /// Base seed; each size uses its own fixed seed derived from it
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, env = "SGH_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}

/// 3 for exhausted precision, 2 for everything else.
fn error_code(e: &anyhow::Error) -> u8 {
    let exhausted = |h: &HyperbolicError| matches!(h, HyperbolicError::PrecisionExhausted { .. });
    let precision = e.chain().any(|cause| {
        cause.downcast_ref::<HyperbolicError>().is_some_and(exhausted)
            || matches!(cause.downcast_ref::<sgh_core::Error>(), Some(sgh_core::Error::Hyperbolic(h)) if exhausted(h))
    });
    if precision {
        3
    } else {
        2
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Embed(args) => cmd_embed(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Route(args) => cmd_route(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Render(args) => cmd_render(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    load_graph(file).with_context(|| format!("cannot parse graph {}", path.display()))
}

fn read_coords(path: &Path, g: &Graph) -> Result<EmbeddingTable> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let table = codec::decode_any(&bytes).with_context(|| format!("cannot decode {}", path.display()))?;
    if table.len() != g.vertex_count() {
        bail!("{} holds {} coordinates but the graph has {} vertices", path.display(), table.len(), g.vertex_count());
    }
    Ok(table)
}

fn policy(p: Policy, seed: u64) -> NextHopPolicy {
    match p {
        Policy::Smallest => NextHopPolicy::SmallestId,
        Policy::Largest => NextHopPolicy::LargestId,
        Policy::Random => NextHopPolicy::RandomCloser { seed },
    }
}

fn cmd_embed(args: EmbedArgs) -> Result<ExitCode> {
    let g = read_graph(&args.input)?;
    let emb = embed(&g, &args.tree.options())?;
    let bytes = match args.format {
        Format::Binary => codec::encode(&emb.table)?,
        Format::Json => codec::to_json(&emb.table).into_bytes(),
    };
    fs::write(&args.output, bytes).with_context(|| format!("cannot write {}", args.output.display()))?;
    println!(
        "{} vertices, max {} bits, {} dummies -> {}",
        emb.table.len(),
        emb.table.coordinate_bits().max,
        emb.dummy_count(),
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let g = read_graph(&args.input)?;
    let table = read_coords(&args.coords, &g)?;
    let options = VerifyOptions { policy: policy(args.policy, args.seed), threads: args.threads.map(|t| t as usize) };
    let report = match args.space {
        Space::Dyadic => verify_all_pairs(&g, &DyadicOracle::new(&table), &options),
        Space::Hyperbolic => {
            if g.vertex_count() > args.max_vertices {
                bail!(
                    "hyperbolic verification is limited to {} vertices (graph has {}); raise --max-vertices to override",
                    args.max_vertices,
                    g.vertex_count()
                );
            }
            let params = args.geometry.params(&table)?;
            eprintln!("D = {}, precision = {} bits", params.d, params.precision_bits);
            let (oracle, _) = HyperbolicOracle::realize(&table, &params)?;
            verify_all_pairs(&g, &oracle, &options)
        }
    };
    println!("{report}");
    for (_, t, v) in report.failures.iter().take(10) {
        println!("  dead end at {v} toward {t}");
    }
    if report.failures.len() > 10 {
        println!("  ... {} more", report.failures.len() - 10);
    }
    println!(
        "undelivered {}, max hops {}, mean stretch {:.4}",
        report.undelivered, report.max_hops, report.mean_stretch
    );
    Ok(if report.is_greedy() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn print_route<O: DistanceOracle>(
    g: &Graph,
    oracle: &O,
    args: &RouteArgs,
    show: impl Fn(&O::Distance) -> String,
) -> Result<ExitCode> {
    match route(g, oracle, args.from, args.to, policy(args.policy, args.seed)) {
        Ok(r) => {
            let mut out = io::stdout().lock();
            for (v, d) in r.hops.iter().zip(&r.distances) {
                writeln!(out, "{v}  (d={})", show(d))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(e @ sgh_core::error::RouteError::DeadEnd { .. }) => {
            eprintln!("{e}");
            Ok(ExitCode::from(1))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_route(args: RouteArgs) -> Result<ExitCode> {
    let g = read_graph(&args.graph)?;
    let table = read_coords(&args.coords, &g)?;
    match args.space {
        Space::Dyadic => print_route(&g, &DyadicOracle::new(&table), &args, |d| d.to_string()),
        Space::Hyperbolic => {
            let params = args.geometry.params(&table)?;
            let (oracle, _) = HyperbolicOracle::realize(&table, &params)?;
            print_route(&g, &oracle, &args, |d| format!("{:.6}", approx_acosh(&d.0)))
        }
    }
}

fn cmd_stats(args: StatsArgs) -> Result<ExitCode> {
    let g = read_graph(&args.input)?;
    let emb = embed(&g, &args.tree.options())?;
    let bits = emb.table.coordinate_bits();
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for &b in &bits.per_vertex {
        *histogram.entry(b).or_default() += 1;
    }
    let mean = bits.per_vertex.iter().sum::<usize>() as f64 / bits.per_vertex.len() as f64;
    let mut out = io::stdout().lock();
    writeln!(out, "vertices {}, edges {}", g.vertex_count(), g.edge_count())?;
    writeln!(
        out,
        "heavy paths {}, compressed tree depth {}, dummies {}",
        emb.decomposition.path_count(),
        emb.compressed.depth(),
        emb.dummy_count()
    )?;
    writeln!(out, "coordinate bits: max {}, mean {mean:.2}", bits.max)?;
    writeln!(out, "bits  vertices")?;
    let widest = histogram.values().copied().max().unwrap_or(1);
    for (b, count) in &histogram {
        let bar = "#".repeat((count * 40).div_ceil(widest));
        writeln!(out, "{b:>4}  {count:>8}  {bar}")?;
    }
    if args.dump_paths {
        write!(out, "{}", dump_paths(&emb.tree, &emb.decomposition))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_render(args: RenderArgs) -> Result<ExitCode> {
    let g = read_graph(&args.input)?;
    let table = read_coords(&args.coords, &g)?;
    let params = args.geometry.params(&table)?;
    let (_, frames) = HyperbolicOracle::realize(&table, &params)?;
    let options = RenderOptions { layers: args.layers, disk_size: args.disk_size, ..RenderOptions::default() };
    let svg = render_svg(&table, &g, &frames, &options)?;
    let file = File::create(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let mut w = BufWriter::new(file);
    w.write_all(svg.as_bytes())?;
    w.flush()?;
    println!("{} vertices, D = {} -> {}", table.len(), params.d, args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let options = VerifyOptions { threads: args.threads.map(|t| t as usize), ..VerifyOptions::default() };
    let mut out = io::stdout().lock();
    writeln!(out, "n,max_bits,embed_ms,verify_ms,failures")?;
    for &n in &args.sizes {
        if n < 2 {
            bail!("bench sizes must be at least 2, got {n}");
        }
        let p = (2.0 * (n as f64).ln() / n as f64).min(1.0);
        let g = families::gnp_connected(n, p, args.seed.wrapping_mul(1_000_003).wrapping_add(n as u64));
        let start = Instant::now();
        let emb = embed(&g, &EmbedOptions::default())?;
        let embed_ms = start.elapsed().as_secs_f64() * 1e3;
        let start = Instant::now();
        let report = verify_all_pairs(&g, &DyadicOracle::new(&emb.table), &options);
        let verify_ms = start.elapsed().as_secs_f64() * 1e3;
        writeln!(
            out,
            "{n},{},{embed_ms:.2},{verify_ms:.2},{}",
            emb.table.coordinate_bits().max,
            report.failures.len()
        )?;
        out.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}
