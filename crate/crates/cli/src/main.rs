use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use topomap::commgraph::{edge_cut, mcv, simple_partition};
use topomap::harness::{
    aggregate, compare_partitioners, fmt_float, read_aggregate_csv, run_experiment, write_aggregate_csv,
    write_cells_csv, write_quotients_csv, ExperimentConfig, Instance, NamedTopology, PartitionSource, SeedStreams,
};
use topomap::metis::read_metis;
use topomap::partition::{parse_partition, write_partition};
use topomap::topology::centrality_sums;
use topomap::{Algorithm, Graph, Partition, ProcessorGraph, TopologySpec};

#[derive(Parser)]
#[command(name = "topomap", version, about = "Map partitioned application graphs onto processor topologies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map one partitioned graph and write one CSV row per topology and algorithm.
    Map(MapArgs),
    /// Full sweep over graphs, seeds, topologies and algorithms.
    Bench(BenchArgs),
    /// Print size and communication-time statistics of topologies.
    TopoInfo(TopoArgs),
    /// Partition a graph with the built-in recursive bisection.
    Partition(PartitionArgs),
    /// Divide the runtime and Q columns of two aggregate CSVs.
    Compare(CompareArgs),
}

#[derive(Args)]
struct TopologyOpts {
    /// `grid2d:AxB`, `grid3d:AxBxC`, `torus2d:AxB`, `torus3d:AxBxC` or `custom:FILE`.
    #[arg(long = "topology", value_name = "SPEC", required = true)]
    topologies: Vec<TopologySpec>,
    /// Link bandwidth (scales the weights of custom topologies).
    #[arg(long, default_value_t = 1.0)]
    bandwidth: f64,
    /// Report the communication-time precomputation of each topology on stderr.
    #[arg(long)]
    precompute_times: bool,
}

#[derive(Args)]
struct MapArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Partition file, one block id per line.
    #[arg(long, conflicts_with = "k")]
    partition: Option<PathBuf>,
    /// Partition internally into this many blocks instead.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0.03)]
    epsilon: f64,
    #[command(flatten)]
    topo: TopologyOpts,
    /// Algorithms, comma separated, or `all`.
    #[arg(long = "algo", alias = "algos", value_delimiter = ',', default_value = "all")]
    algos: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Graph files or directories of graph files; a directory is one instance class.
    #[arg(long = "graphs", alias = "graph", required = true)]
    graphs: Vec<PathBuf>,
    /// Directory with partition files `<graph stem>.part` or `<graph stem>.part.<seed index>`.
    #[arg(long, conflicts_with = "k")]
    partitions: Option<PathBuf>,
    /// Number of blocks for the built-in partitioner; defaults to the topology size.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0.03)]
    epsilon: f64,
    #[command(flatten)]
    topo: TopologyOpts,
    #[arg(long = "algos", alias = "algo", value_delimiter = ',', default_value = "all")]
    algos: Vec<String>,
    /// Number of master seeds (0, 1, ...).
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Aggregate CSV.
    #[arg(long)]
    out: PathBuf,
    /// Per-cell CSV; defaults to the aggregate path with `.cells.csv`.
    #[arg(long)]
    cells: Option<PathBuf>,
    /// Algorithm the Q columns are relative to.
    #[arg(long, default_value = "initial")]
    baseline: String,
}

#[derive(Args)]
struct TopoArgs {
    #[command(flatten)]
    topo: TopologyOpts,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PartitionArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.03)]
    epsilon: f64,
    /// Master seed; the partitioner uses its derived partition stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Aggregate CSV of the first partitioner (numerator).
    #[arg(long)]
    a: PathBuf,
    /// Aggregate CSV of the second partitioner (denominator).
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn parse_algorithms(list: &[String]) -> Result<Vec<Algorithm>> {
    if list.iter().any(|a| a.eq_ignore_ascii_case("all")) {
        return Ok(Algorithm::ALL.to_vec());
    }
    let mut out = Vec::new();
    for a in list {
        let alg: Algorithm = a.parse().with_context(|| "invalid value for --algo")?;
        if !out.contains(&alg) {
            out.push(alg);
        }
    }
    if out.is_empty() {
        bail!("--algo: no algorithms given");
    }
    Ok(out)
}

fn read_graph(path: &Path) -> Result<Graph> {
    let file = File::open(path).with_context(|| format!("cannot open graph {}", path.display()))?;
    read_metis(io::BufReader::new(file)).with_context(|| format!("cannot parse graph {}", path.display()))
}

fn read_partition(path: &Path, epsilon: f64) -> Result<Partition> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read partition {}", path.display()))?;
    parse_partition(&text, None, epsilon).with_context(|| format!("invalid partition {}", path.display()))
}

fn build_topologies(opts: &TopologyOpts) -> Result<Vec<NamedTopology>> {
    opts.topologies
        .iter()
        .map(|spec| {
            let graph: ProcessorGraph =
                spec.build(opts.bandwidth).with_context(|| format!("invalid value for --topology: {spec}"))?;
            if opts.precompute_times {
                eprintln!("{spec}: communication times precomputed in {:.6} s", graph.precompute_time().as_secs_f64());
            }
            Ok(NamedTopology { name: spec.to_string(), graph })
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn warn_imbalance(name: &str, g: &Graph, p: &Partition) -> Result<()> {
    let b = p.balance(g)?;
    if !b.is_balanced() {
        eprintln!(
            "warning: {name}: heaviest block {} exceeds the balance bound {}",
            b.max_block_weight, b.bound
        );
    }
    Ok(())
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn cmd_map(args: MapArgs) -> Result<()> {
    let algorithms = parse_algorithms(&args.algos)?;
    let graph = read_graph(&args.graph)?;
    let topologies = build_topologies(&args.topo)?;
    let partitions = match (&args.partition, args.k) {
        (Some(path), _) => {
            let p = read_partition(path, args.epsilon)?;
            warn_imbalance(&instance_name(path), &graph, &p)?;
            PartitionSource::Fixed(vec![p])
        }
        (None, Some(k)) => PartitionSource::Internal { k, epsilon: args.epsilon },
        (None, None) => bail!("either --partition or --k is required"),
    };
    let cfg = ExperimentConfig {
        instances: vec![Instance { name: instance_name(&args.graph), class: "single".into(), graph, partitions }],
        topologies,
        algorithms,
        seeds: vec![args.seed],
    };
    let cells = run_experiment(&cfg)?;
    write_cells_csv(&cells, create(&args.out)?)?;
    Ok(())
}

fn graph_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<io::Result<_>>()?;
    files.retain(|p| p.is_file() && matches!(p.extension().and_then(|e| e.to_str()), Some("graph" | "metis")));
    files.sort();
    if files.is_empty() {
        bail!("--graphs: no .graph or .metis files in {}", dir.display());
    }
    Ok(files)
}

fn imported_partitions(dir: &Path, stem: &str, seeds: u64, epsilon: f64) -> Result<Vec<Partition>> {
    let shared = dir.join(format!("{stem}.part"));
    if shared.is_file() {
        return Ok(vec![read_partition(&shared, epsilon)?]);
    }
    (0..seeds).map(|i| read_partition(&dir.join(format!("{stem}.part.{i}")), epsilon)).collect()
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let algorithms = parse_algorithms(&args.algos)?;
    let baseline: Algorithm = args.baseline.parse().context("invalid value for --baseline")?;
    if !algorithms.contains(&baseline) {
        bail!("--baseline {baseline} is not among the selected algorithms");
    }
    if args.seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    let topologies = build_topologies(&args.topo)?;
    let k = match args.k {
        Some(k) => k,
        None => topologies[0].graph.num_nodes(),
    };

    let mut instances = Vec::new();
    for input in &args.graphs {
        let (class, files) = if input.is_dir() {
            (instance_name(input), graph_files(input)?)
        } else {
            ("default".to_string(), vec![input.clone()])
        };
        for file in files {
            let name = instance_name(&file);
            let graph = read_graph(&file)?;
            let partitions = match &args.partitions {
                Some(dir) => {
                    let ps = imported_partitions(dir, &name, args.seeds, args.epsilon)?;
                    for p in &ps {
                        warn_imbalance(&name, &graph, p)?;
                    }
                    PartitionSource::Fixed(ps)
                }
                None => PartitionSource::Internal { k, epsilon: args.epsilon },
            };
            instances.push(Instance { name, class: class.clone(), graph, partitions });
        }
    }
    let cfg = ExperimentConfig { instances, topologies, algorithms, seeds: (0..args.seeds).collect() };
    let cells = run_experiment(&cfg)?;
    let cells_path = args.cells.clone().unwrap_or_else(|| args.out.with_extension("cells.csv"));
    write_cells_csv(&cells, create(&cells_path)?)?;
    let rows = aggregate(&cells, Some(baseline))?;
    write_aggregate_csv(&rows, create(&args.out)?)?;
    Ok(())
}

fn cmd_topo_info(args: TopoArgs) -> Result<()> {
    let topologies = build_topologies(&args.topo)?;
    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    writeln!(out, "topology,nodes,edges,max_t,mean_t,centrality_min,centrality_max,precompute_s")?;
    for t in &topologies {
        let tm = t.graph.time_matrix();
        let k = tm.k();
        let total: f64 = (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).map(|(a, b)| tm.get(a, b)).sum();
        let mean = if k > 1 { total / (k * (k - 1)) as f64 } else { 0.0 };
        let c = centrality_sums(tm);
        let cmin = c.iter().copied().fold(f64::INFINITY, f64::min);
        let cmax = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            t.name,
            k,
            t.graph.graph().num_edges(),
            fmt_float(tm.max()),
            fmt_float(mean),
            fmt_float(cmin),
            fmt_float(cmax),
            fmt_float(t.graph.precompute_time().as_secs_f64())
        )?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_partition(args: PartitionArgs) -> Result<()> {
    let graph = read_graph(&args.graph)?;
    let seed = SeedStreams::from_master(args.seed).partition;
    let p = simple_partition(&graph, args.k, args.epsilon, seed)?;
    fs::write(&args.out, write_partition(&p)).with_context(|| format!("cannot write {}", args.out.display()))?;
    let b = p.balance(&graph)?;
    eprintln!(
        "k {} edge cut {} max communication volume {} imbalance {:.4}",
        args.k,
        edge_cut(&graph, &p)?,
        mcv(&graph, &p)?,
        b.imbalance(args.epsilon)
    );
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let load = |p: &Path| -> Result<_> {
        read_aggregate_csv(File::open(p).with_context(|| format!("cannot open {}", p.display()))?)
            .with_context(|| format!("cannot parse {}", p.display()))
    };
    let rows = compare_partitioners(&load(&args.a)?, &load(&args.b)?)?;
    write_quotients_csv(&rows, create(&args.out)?)?;
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("TOPOMAP_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("TOPOMAP_THREADS: not a number: `{v}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Map(a) => cmd_map(a),
        Command::Bench(a) => cmd_bench(a),
        Command::TopoInfo(a) => cmd_topo_info(a),
        Command::Partition(a) => cmd_partition(a),
        Command::Compare(a) => cmd_compare(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
