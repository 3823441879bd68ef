//! Quality of a mapping: dilation, congestion and ratios against a baseline.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mappers::{check_sizes, Mapping};
use crate::scalar::Scalar;
use crate::topology::{ProcessorGraph, Router, TimeMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport<W> {
    /// Maximum dilation.
    pub max_dilation: W,
    /// Average dilation.
    pub avg_dilation: W,
    /// Maximum weighted congestion.
    pub max_congestion: W,
    /// Mapping wall time in seconds.
    pub wall_time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QReport<W> {
    pub q_max_congestion: W,
    pub q_max_dilation: W,
    pub q_avg_dilation: W,
}

fn check<W: Scalar>(g_c: &Graph<W>, k: usize, pi: &Mapping) -> Result<()> {
    check_sizes(g_c.n(), k)?;
    check_sizes(pi.len(), k)
}

/// `d(e) = weight(u, v) * t(pi(u), pi(v))` for each edge, in canonical edge order.
pub fn dilation_per_edge<W: Scalar>(g_c: &Graph<W>, tm: &TimeMatrix<W>, pi: &Mapping) -> Result<Vec<W>> {
    check(g_c, tm.k(), pi)?;
    Ok(g_c.edges().iter().map(|&(e, w)| w * tm.get(pi.get(e.u), pi.get(e.v))).collect())
}

/// `(max, mean)` of the per-edge dilations; `(0, 0)` without edges.
pub fn max_avg_dilation<W: Scalar>(g_c: &Graph<W>, tm: &TimeMatrix<W>, pi: &Mapping) -> Result<(W, W)> {
    let d = dilation_per_edge(g_c, tm, pi)?;
    if d.is_empty() {
        return Ok((W::zero(), W::zero()));
    }
    let max = d.iter().copied().fold(W::zero(), W::max);
    let sum: W = d.iter().copied().sum();
    Ok((max, sum / W::from_usize_lossy(d.len())))
}

/// Volume routed over each processor edge before division by bandwidth.
///
/// Every communication edge sends its weight from `pi(u)` to `pi(v)`, split
/// uniformly over all minimum-time paths.
pub fn edge_loads<W: Scalar>(g_c: &Graph<W>, p: &ProcessorGraph<W>, pi: &Mapping) -> Result<Vec<W>> {
    check(g_c, p.num_nodes(), pi)?;
    let mut loads = vec![W::zero(); p.graph().num_edges()];
    let mut router = Router::new(p.num_nodes());
    for &(e, w) in g_c.edges() {
        router.route(p.graph(), p.time_matrix(), pi.get(e.u), pi.get(e.v), |pe, frac| {
            loads[pe] = loads[pe] + w * frac;
        });
    }
    Ok(loads)
}

/// Maximum over processor edges of routed volume divided by bandwidth.
pub fn max_congestion<W: Scalar>(g_c: &Graph<W>, p: &ProcessorGraph<W>, pi: &Mapping) -> Result<W> {
    let loads = edge_loads(g_c, p, pi)?;
    Ok(loads
        .iter()
        .zip(p.graph().edges())
        .map(|(&load, &(_, bw))| load / bw)
        .fold(W::zero(), W::max))
}

/// All three metrics for one mapping; `wall_time` is the caller's measurement.
pub fn evaluate<W: Scalar>(
    g_c: &Graph<W>,
    p: &ProcessorGraph<W>,
    pi: &Mapping,
    wall_time: Duration,
) -> Result<MetricsReport<W>> {
    let (max_dilation, avg_dilation) = max_avg_dilation(g_c, p.time_matrix(), pi)?;
    let max_congestion = max_congestion(g_c, p, pi)?;
    Ok(MetricsReport { max_dilation, avg_dilation, max_congestion, wall_time: wall_time.as_secs_f64() })
}

pub(crate) fn ratio<W: Scalar>(value: W, base: W, name: &'static str) -> Result<W> {
    if base == W::zero() {
        Err(Error::ZeroBaseline(name))
    } else {
        Ok(value / base)
    }
}

/// Elementwise quotients of the quality metrics against `baseline`.
pub fn q_ratios<W: Scalar>(r: &MetricsReport<W>, baseline: &MetricsReport<W>) -> Result<QReport<W>> {
    Ok(QReport {
        q_max_congestion: ratio(r.max_congestion, baseline.max_congestion, "mC")?,
        q_max_dilation: ratio(r.max_dilation, baseline.max_dilation, "mD")?,
        q_avg_dilation: ratio(r.avg_dilation, baseline.avg_dilation, "aD")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_edge_example() -> (Graph<f64>, ProcessorGraph<f64>) {
        let g = Graph::from_edges(4, [(0, 1, 2.0), (0, 3, 1.0)]).unwrap();
        (g, ProcessorGraph::grid(&[2, 2], 1.0).unwrap())
    }

    #[test]
    fn dilation_examples() {
        let (g, p) = two_edge_example();
        let id = Mapping::identity(4);
        assert_eq!(dilation_per_edge(&g, p.time_matrix(), &id).unwrap(), vec![2.0, 2.0]);
        assert_eq!(max_avg_dilation(&g, p.time_matrix(), &id).unwrap(), (2.0, 2.0));
        let single = Graph::from_edges(4, [(1, 2, 3.0)]).unwrap();
        let (m, a) = max_avg_dilation(&single, p.time_matrix(), &id).unwrap();
        assert_eq!(m, a);
        let empty = Graph::empty(4);
        assert_eq!(max_avg_dilation(&empty, p.time_matrix(), &id).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn congestion_examples() {
        let (g, p) = two_edge_example();
        let id = Mapping::identity(4);
        // edge order: (0,1) (0,2) (1,3) (2,3)
        assert_eq!(edge_loads(&g, &p, &id).unwrap(), vec![2.5, 0.5, 0.5, 0.5]);
        assert_eq!(max_congestion(&g, &p, &id).unwrap(), 2.5);
        assert_eq!(max_congestion(&Graph::empty(4), &p, &id).unwrap(), 0.0);

        let fat = ProcessorGraph::grid(&[2, 2], 2.0).unwrap();
        let one = Graph::from_edges(4, [(0, 1, 4.0)]).unwrap();
        assert_eq!(max_congestion(&one, &fat, &id).unwrap(), 2.0);
    }

    #[test]
    fn evaluate_examples() {
        let (g, p) = two_edge_example();
        let r = evaluate(&g, &p, &Mapping::identity(4), Duration::from_millis(3)).unwrap();
        assert_eq!((r.max_dilation, r.avg_dilation, r.max_congestion), (2.0, 2.0, 2.5));
        assert!(r.wall_time >= 0.0);

        let solo = ProcessorGraph::custom(Graph::<f64>::empty(1)).unwrap();
        let r = evaluate(&Graph::empty(1), &solo, &Mapping::identity(1), Duration::ZERO).unwrap();
        assert_eq!((r.max_dilation, r.avg_dilation, r.max_congestion), (0.0, 0.0, 0.0));
    }

    #[test]
    fn ratio_examples() {
        let base = MetricsReport { max_dilation: 2.0, avg_dilation: 1.5, max_congestion: 1.0, wall_time: 0.1 };
        let q = q_ratios(&base, &base).unwrap();
        assert_eq!((q.q_max_congestion, q.q_max_dilation, q.q_avg_dilation), (1.0, 1.0, 1.0));
        let better = MetricsReport { max_congestion: 0.5, ..base };
        assert_eq!(q_ratios(&better, &base).unwrap().q_max_congestion, 0.5);
        let zero = MetricsReport { max_dilation: 0.0, ..base };
        assert!(matches!(q_ratios(&base, &zero), Err(Error::ZeroBaseline("mD"))));
    }

    #[test]
    fn size_mismatch() {
        let (g, p) = two_edge_example();
        assert!(max_congestion(&g, &p, &Mapping::identity(3)).is_err());
    }
}
