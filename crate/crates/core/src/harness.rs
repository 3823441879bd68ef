//! Experiment pipeline: partition, build the communication graph, map onto
//! each processor graph, evaluate, aggregate over seeds and instances, and
//! relate everything to a baseline algorithm.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;

use crate::commgraph::{build_comm_graph, edge_cut, mcv, simple_partition};
use crate::error::{Error, Result};
use crate::mappers::{self, check_sizes, Algorithm};
use crate::metrics::{evaluate, MetricsReport};
use crate::partition::Partition;
use crate::seeds;
use crate::{Graph, ProcessorGraph};

/// Independent seeds derived from one master seed. Each is ChaCha8 stream
/// `i` of the master seed: 0 partitioning, 1 Random, 2 GreedyMin's first
/// node, 3 DRB bisections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedStreams {
    pub partition: u64,
    pub random: u64,
    pub greedy_min: u64,
    pub drb: u64,
}

impl SeedStreams {
    pub fn from_master(seed: u64) -> Self {
        SeedStreams {
            partition: seeds::derive(seed, 0),
            random: seeds::derive(seed, 1),
            greedy_min: seeds::derive(seed, 2),
            drb: seeds::derive(seed, 3),
        }
    }

    pub fn for_algorithm(&self, a: Algorithm) -> u64 {
        match a {
            Algorithm::Random => self.random,
            Algorithm::GreedyMin => self.greedy_min,
            Algorithm::Drb => self.drb,
            _ => 0,
        }
    }
}

/// Maps one communication graph and evaluates the result. The reported wall
/// time covers the mapper only; the time matrix is precomputed with the
/// processor graph.
pub fn map_and_evaluate(
    g_c: &Graph,
    topology: &ProcessorGraph,
    algorithm: Algorithm,
    seed: u64,
) -> Result<MetricsReport<f64>> {
    check_sizes(g_c.n(), topology.num_nodes())?;
    let streams = SeedStreams::from_master(seed);
    let start = Instant::now();
    let pi = mappers::map(algorithm, g_c, topology, streams.for_algorithm(algorithm))?;
    let elapsed = start.elapsed();
    evaluate(g_c, topology, &pi, elapsed)
}

/// One (application graph, partition, topology, algorithm, seed) cell.
pub fn run_cell(
    g_a: &Graph,
    partition: &Partition,
    topology: &ProcessorGraph,
    algorithm: Algorithm,
    seed: u64,
) -> Result<MetricsReport<f64>> {
    let g_c = build_comm_graph(g_a, partition)?;
    map_and_evaluate(&g_c, topology, algorithm, seed)
}

/// Where the partitions of an instance come from.
#[derive(Clone, Debug)]
pub enum PartitionSource {
    /// Imported partitions: either one shared by all seeds or one per seed.
    Fixed(Vec<Partition>),
    /// Internal recursive-bisection partitioner, seeded per cell.
    Internal { k: usize, epsilon: f64 },
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub class: String,
    pub graph: Graph,
    pub partitions: PartitionSource,
}

#[derive(Clone, Debug)]
pub struct NamedTopology {
    pub name: String,
    pub graph: ProcessorGraph,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub instances: Vec<Instance>,
    pub topologies: Vec<NamedTopology>,
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellRecord {
    pub instance: String,
    pub class: String,
    pub topology: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub k: usize,
    pub edge_cut: f64,
    pub mcv: usize,
    pub balanced: bool,
    pub report: MetricsReport<f64>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::InvalidArgument("seed list is empty".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidArgument("algorithm list is empty".into()));
        }
        for inst in &self.instances {
            let ks: Vec<usize> = match &inst.partitions {
                PartitionSource::Fixed(ps) => {
                    if ps.len() != 1 && ps.len() != self.seeds.len() {
                        return Err(Error::InvalidArgument(format!(
                            "{}: {} partitions for {} seeds",
                            inst.name,
                            ps.len(),
                            self.seeds.len()
                        )));
                    }
                    ps.iter().map(Partition::k).collect()
                }
                PartitionSource::Internal { k, .. } => vec![*k],
            };
            for t in &self.topologies {
                for &k in &ks {
                    if k != t.graph.num_nodes() {
                        return Err(Error::SizeMismatch {
                            what: "blocks vs. processor nodes",
                            left: k,
                            right: t.graph.num_nodes(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Runs every cell of the sweep. Cells run in parallel on the current rayon
/// pool; the output order is deterministic.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<CellRecord>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for inst in &cfg.instances {
        let parts: Vec<Partition> = cfg
            .seeds
            .par_iter()
            .enumerate()
            .map(|(i, &seed)| match &inst.partitions {
                PartitionSource::Fixed(ps) => Ok(ps[if ps.len() == 1 { 0 } else { i }].clone()),
                PartitionSource::Internal { k, epsilon } => {
                    simple_partition(&inst.graph, *k, *epsilon, SeedStreams::from_master(seed).partition)
                }
            })
            .collect::<Result<_>>()?;
        let prepared: Vec<(Graph, f64, usize, bool)> = parts
            .par_iter()
            .map(|p| {
                Ok((
                    build_comm_graph(&inst.graph, p)?,
                    edge_cut(&inst.graph, p)?,
                    mcv(&inst.graph, p)?,
                    p.balance(&inst.graph)?.is_balanced(),
                ))
            })
            .collect::<Result<_>>()?;
        let jobs: Vec<(usize, &NamedTopology, Algorithm)> = (0..cfg.seeds.len())
            .flat_map(|i| {
                cfg.topologies
                    .iter()
                    .flat_map(move |t| cfg.algorithms.iter().map(move |&a| (i, t, a)))
            })
            .collect();
        let cells: Vec<CellRecord> = jobs
            .par_iter()
            .map(|&(i, t, a)| {
                let (g_c, cut, vol, balanced) = &prepared[i];
                let report = map_and_evaluate(g_c, &t.graph, a, cfg.seeds[i])?;
                Ok(CellRecord {
                    instance: inst.name.clone(),
                    class: inst.class.clone(),
                    topology: t.name.clone(),
                    algorithm: a,
                    seed: cfg.seeds[i],
                    k: g_c.n(),
                    edge_cut: *cut,
                    mcv: *vol,
                    balanced: *balanced,
                    report,
                })
            })
            .collect::<Result<_>>()?;
        out.extend(cells);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Stats {
    /// Min, arithmetic mean and max. The mean is clamped into `[min, max]` to
    /// absorb rounding.
    pub fn of(values: &[f64]) -> Stats {
        assert!(!values.is_empty());
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Stats { min, mean: mean.clamp(min, max), max }
    }

    fn geometric(items: &[Stats]) -> Stats {
        let pick = |f: fn(&Stats) -> f64| geometric_mean(&items.iter().map(f).collect::<Vec<_>>());
        let min = pick(|s| s.min);
        let max = pick(|s| s.max).max(min);
        Stats { min, mean: pick(|s| s.mean).clamp(min, max), max }
    }

    fn ratio(&self, base: &Stats, name: &'static str) -> Result<Stats> {
        use crate::metrics::ratio;
        Ok(Stats {
            min: ratio(self.min, base.min, name)?,
            mean: ratio(self.mean, base.mean, name)?,
            max: ratio(self.max, base.max, name)?,
        })
    }
}

/// Geometric mean, computed relative to the first value so that identical
/// inputs reproduce that value exactly. Zero if any input is zero.
pub fn geometric_mean(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let x0 = values[0];
    if values.contains(&0.0) {
        return 0.0;
    }
    let log_sum: f64 = values.iter().map(|&x| (x / x0).ln()).sum();
    x0 * (log_sum / values.len() as f64).exp()
}

/// Q-values relative to the baseline algorithm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QStats {
    pub max_congestion: Stats,
    pub max_dilation: Stats,
    pub avg_dilation: Stats,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub class: String,
    pub topology: String,
    pub algorithm: String,
    pub time: Stats,
    pub max_congestion: Stats,
    pub max_dilation: Stats,
    pub avg_dilation: Stats,
    pub q: Option<QStats>,
}

impl AggregateRow {
    pub fn key(&self) -> String {
        format!("{}/{}/{}", self.class, self.topology, self.algorithm)
    }
}

/// Per-instance min/mean/max over seeds, geometric means over the instances
/// of a class, then Q-values against `baseline` (if given) from the same
/// class and topology.
pub fn aggregate(cells: &[CellRecord], baseline: Option<Algorithm>) -> Result<Vec<AggregateRow>> {
    type Key = (String, String, Algorithm);
    let mut groups: BTreeMap<Key, BTreeMap<String, Vec<MetricsReport<f64>>>> = BTreeMap::new();
    for c in cells {
        groups
            .entry((c.class.clone(), c.topology.clone(), c.algorithm))
            .or_default()
            .entry(c.instance.clone())
            .or_default()
            .push(c.report);
    }
    let mut rows: BTreeMap<Key, AggregateRow> = BTreeMap::new();
    for (key, per_instance) in groups {
        let mut t = Vec::new();
        let mut mc = Vec::new();
        let mut md = Vec::new();
        let mut ad = Vec::new();
        for reports in per_instance.values() {
            let col = |f: fn(&MetricsReport<f64>) -> f64| Stats::of(&reports.iter().map(f).collect::<Vec<_>>());
            t.push(col(|r| r.wall_time));
            mc.push(col(|r| r.max_congestion));
            md.push(col(|r| r.max_dilation));
            ad.push(col(|r| r.avg_dilation));
        }
        let row = AggregateRow {
            class: key.0.clone(),
            topology: key.1.clone(),
            algorithm: key.2.name().to_string(),
            time: Stats::geometric(&t),
            max_congestion: Stats::geometric(&mc),
            max_dilation: Stats::geometric(&md),
            avg_dilation: Stats::geometric(&ad),
            q: None,
        };
        rows.insert(key, row);
    }
    if let Some(base) = baseline {
        let mut qs = Vec::new();
        for ((class, topo, _), row) in &rows {
            let b = rows.get(&(class.clone(), topo.clone(), base)).ok_or_else(|| Error::MissingBaseline {
                class: class.clone(),
                topology: topo.clone(),
                algorithm: base.name().to_string(),
            })?;
            qs.push(QStats {
                max_congestion: row.max_congestion.ratio(&b.max_congestion, "mC")?,
                max_dilation: row.max_dilation.ratio(&b.max_dilation, "mD")?,
                avg_dilation: row.avg_dilation.ratio(&b.avg_dilation, "aD")?,
            });
        }
        for (row, q) in rows.values_mut().zip(qs) {
            row.q = Some(q);
        }
    }
    Ok(rows.into_values().collect())
}

/// Quotients of the twelve headline aggregates (runtime and the nine
/// Q-values) of two partitioners, for matching rows.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientRow {
    pub class: String,
    pub topology: String,
    pub algorithm: String,
    pub time: Stats,
    pub q: QStats,
}

/// `rows_a / rows_b` for every row of `rows_a`. Rows must carry Q-values.
pub fn compare_partitioners(rows_a: &[AggregateRow], rows_b: &[AggregateRow]) -> Result<Vec<QuotientRow>> {
    let div = |a: &Stats, b: &Stats| Stats { min: a.min / b.min, mean: a.mean / b.mean, max: a.max / b.max };
    rows_a
        .iter()
        .map(|a| {
            let b = rows_b.iter().find(|b| b.key() == a.key()).ok_or_else(|| Error::KeyMismatch(a.key()))?;
            let missing = |r: &AggregateRow| Error::InvalidArgument(format!("{} has no Q-values", r.key()));
            let (qa, qb) = (a.q.ok_or_else(|| missing(a))?, b.q.ok_or_else(|| missing(b))?);
            Ok(QuotientRow {
                class: a.class.clone(),
                topology: a.topology.clone(),
                algorithm: a.algorithm.clone(),
                time: div(&a.time, &b.time),
                q: QStats {
                    max_congestion: div(&qa.max_congestion, &qb.max_congestion),
                    max_dilation: div(&qa.max_dilation, &qb.max_dilation),
                    avg_dilation: div(&qa.avg_dilation, &qb.avg_dilation),
                },
            })
        })
        .collect()
}

/// Canonical float text: 17 significant digits, round-trips exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_float(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::InvalidArgument(format!("malformed number `{s}`")))
}

const STAT_COLS: [&str; 4] = ["t", "mC", "mD", "aD"];
const Q_COLS: [&str; 3] = ["QmC", "QmD", "QaD"];

fn stat_header(prefixes: &[&str]) -> Vec<String> {
    prefixes
        .iter()
        .flat_map(|p| ["min", "mean", "max"].map(|s| format!("{p}_{s}")))
        .collect()
}

fn push_stats(rec: &mut Vec<String>, s: &Stats) {
    rec.extend([s.min, s.mean, s.max].map(fmt_float));
}

pub const CELL_HEADER: [&str; 17] = [
    "instance",
    "class",
    "topology",
    "algorithm",
    "seed",
    "partition_seed",
    "random_seed",
    "greedymin_seed",
    "drb_seed",
    "k",
    "edge_cut",
    "mcv",
    "balanced",
    "t",
    "mC",
    "mD",
    "aD",
];

/// Per-cell CSV. The derived seed streams of every cell are written out.
pub fn write_cells_csv<O: Write>(cells: &[CellRecord], out: O) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CELL_HEADER)?;
    for c in cells {
        let s = SeedStreams::from_master(c.seed);
        w.write_record([
            c.instance.clone(),
            c.class.clone(),
            c.topology.clone(),
            c.algorithm.name().to_string(),
            c.seed.to_string(),
            s.partition.to_string(),
            s.random.to_string(),
            s.greedy_min.to_string(),
            s.drb.to_string(),
            c.k.to_string(),
            fmt_float(c.edge_cut),
            c.mcv.to_string(),
            c.balanced.to_string(),
            fmt_float(c.report.wall_time),
            fmt_float(c.report.max_congestion),
            fmt_float(c.report.max_dilation),
            fmt_float(c.report.avg_dilation),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn aggregate_header() -> Vec<String> {
    let mut h: Vec<String> = ["class", "topology", "algorithm"].map(String::from).to_vec();
    h.extend(stat_header(&STAT_COLS));
    h.extend(stat_header(&Q_COLS));
    h
}

/// Aggregate CSV. Q columns are empty when no baseline was applied.
pub fn write_aggregate_csv<O: Write>(rows: &[AggregateRow], out: O) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(aggregate_header())?;
    for r in rows {
        let mut rec = vec![r.class.clone(), r.topology.clone(), r.algorithm.clone()];
        for s in [&r.time, &r.max_congestion, &r.max_dilation, &r.avg_dilation] {
            push_stats(&mut rec, s);
        }
        match &r.q {
            Some(q) => {
                for s in [&q.max_congestion, &q.max_dilation, &q.avg_dilation] {
                    push_stats(&mut rec, s);
                }
            }
            None => rec.extend(std::iter::repeat_n(String::new(), 9)),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_aggregate_csv<R: Read>(input: R) -> Result<Vec<AggregateRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if header != aggregate_header() {
        return Err(Error::InvalidArgument("unexpected aggregate CSV header".into()));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let stats = |i: usize| -> Result<Stats> {
            Ok(Stats { min: parse_float(&rec[i])?, mean: parse_float(&rec[i + 1])?, max: parse_float(&rec[i + 2])? })
        };
        let q = if rec[15].is_empty() {
            None
        } else {
            Some(QStats { max_congestion: stats(15)?, max_dilation: stats(18)?, avg_dilation: stats(21)? })
        };
        rows.push(AggregateRow {
            class: rec[0].to_string(),
            topology: rec[1].to_string(),
            algorithm: rec[2].to_string(),
            time: stats(3)?,
            max_congestion: stats(6)?,
            max_dilation: stats(9)?,
            avg_dilation: stats(12)?,
            q,
        });
    }
    Ok(rows)
}

/// Quotient CSV with the runtime and Q columns of [`aggregate_header`].
pub fn write_quotients_csv<O: Write>(rows: &[QuotientRow], out: O) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut h: Vec<String> = ["class", "topology", "algorithm"].map(String::from).to_vec();
    h.extend(stat_header(&["t"]));
    h.extend(stat_header(&Q_COLS));
    w.write_record(&h)?;
    for r in rows {
        let mut rec = vec![r.class.clone(), r.topology.clone(), r.algorithm.clone()];
        for s in [&r.time, &r.q.max_congestion, &r.q.max_dilation, &r.q.avg_dilation] {
            push_stats(&mut rec, s);
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
