//! Processor graphs: 2D/3D grids and tori with lexicographic node numbering,
//! the all-pairs communication time matrix, and per-edge flow fractions for
//! routing on uniformly distributed shortest paths.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeRef, Graph};
use crate::scalar::{self, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TopologyKind {
    Grid2d,
    Grid3d,
    Torus2d,
    Torus3d,
    Custom,
}

impl TopologyKind {
    pub fn name(self) -> &'static str {
        match self {
            TopologyKind::Grid2d => "grid2d",
            TopologyKind::Grid3d => "grid3d",
            TopologyKind::Torus2d => "torus2d",
            TopologyKind::Torus3d => "torus3d",
            TopologyKind::Custom => "custom",
        }
    }

    fn is_torus(self) -> bool {
        matches!(self, TopologyKind::Torus2d | TopologyKind::Torus3d)
    }
}

/// Symmetric matrix of minimum times `t(u, v)` to send a unit message.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeMatrix<W> {
    k: usize,
    t: Vec<W>,
}

impl<W: Scalar> TimeMatrix<W> {
    /// Wraps a row-major `k x k` matrix. Only the shape is checked.
    pub fn from_rows(k: usize, t: Vec<W>) -> Result<Self> {
        if t.len() != k * k {
            return Err(Error::SizeMismatch { what: "time matrix entries vs. k*k", left: t.len(), right: k * k });
        }
        Ok(TimeMatrix { k, t })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> W {
        self.t[u * self.k + v]
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[W] {
        &self.t[u * self.k..(u + 1) * self.k]
    }

    pub fn max(&self) -> W {
        self.t.iter().copied().fold(W::zero(), W::max)
    }
}

/// Row sums of `t`: the total time from each node to all others.
pub fn centrality_sums<W: Scalar>(tm: &TimeMatrix<W>) -> Vec<W> {
    (0..tm.k()).map(|u| tm.row(u).iter().copied().sum()).collect()
}

#[derive(Clone, Copy)]
struct HeapItem<W> {
    dist: W,
    node: usize,
}

impl<W: Scalar> PartialEq for HeapItem<W> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<W: Scalar> Eq for HeapItem<W> {}
impl<W: Scalar> PartialOrd for HeapItem<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<W: Scalar> Ord for HeapItem<W> {
    // reversed: BinaryHeap pops the smallest distance first
    fn cmp(&self, other: &Self) -> Ordering {
        scalar::cmp(other.dist, self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

/// Single-source times with edge cost `1 / weight`.
fn dijkstra<W: Scalar>(g: &Graph<W>, src: usize, dist: &mut [W]) {
    dist.fill(W::infinity());
    dist[src] = W::zero();
    let mut heap = BinaryHeap::from([HeapItem { dist: W::zero(), node: src }]);
    while let Some(HeapItem { dist: d, node: u }) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for (v, w) in g.neighbors(u) {
            let nd = d + w.recip();
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapItem { dist: nd, node: v });
            }
        }
    }
}

/// All-pairs minimum communication time, `t(u,v) = min over paths of sum 1/w(e)`.
///
/// All edge costs are positive, so one Dijkstra run per source gives the same
/// result as Johnson's algorithm (its reweighting step is the identity).
pub fn all_pairs_time<W: Scalar>(g: &Graph<W>) -> Result<TimeMatrix<W>> {
    let k = g.n();
    let mut t = vec![W::zero(); k * k];
    if k > 0 {
        t.par_chunks_mut(k).enumerate().for_each(|(src, row)| dijkstra(g, src, row));
    }
    if t.iter().any(|d| !d.is_finite()) {
        return Err(Error::Disconnected);
    }
    Ok(TimeMatrix { k, t })
}

#[derive(Clone, Debug)]
pub struct ProcessorGraph<W> {
    graph: Graph<W>,
    kind: TopologyKind,
    dims: Vec<usize>,
    times: TimeMatrix<W>,
    precompute: Duration,
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() != 2 && dims.len() != 3 {
        return Err(Error::InvalidTopology(format!("expected 2 or 3 axes, got {}", dims.len())));
    }
    if let Some(&d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidTopology(format!("axis extent {d} is below 2")));
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for a in (0..dims.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * dims[a + 1];
    }
    s
}

fn lattice<W: Scalar>(dims: &[usize], wrap: bool, bandwidth: W) -> Result<Graph<W>> {
    let n: usize = dims.iter().product();
    let stride = strides(dims);
    let mut edges = Vec::new();
    for node in 0..n {
        for (a, &extent) in dims.iter().enumerate() {
            let c = (node / stride[a]) % extent;
            if c + 1 < extent {
                edges.push((node, node + stride[a], bandwidth));
            } else if wrap && extent > 2 {
                // wrap link from the last to the first coordinate on this axis
                edges.push((node, node - c * stride[a], bandwidth));
            }
        }
    }
    Graph::from_edges(n, edges)
}

impl<W: Scalar> ProcessorGraph<W> {
    fn assemble(graph: Graph<W>, kind: TopologyKind, dims: Vec<usize>) -> Result<Self> {
        if graph.n() == 0 {
            return Err(Error::InvalidTopology("processor graph has no nodes".into()));
        }
        let start = Instant::now();
        let times = all_pairs_time(&graph)?;
        let precompute = start.elapsed();
        Ok(ProcessorGraph { graph, kind, dims, times, precompute })
    }

    /// Grid with uniform link bandwidth. Node id is the lexicographic rank of
    /// its coordinates, last axis fastest.
    pub fn grid(dims: &[usize], bandwidth: W) -> Result<Self> {
        check_dims(dims)?;
        check_bandwidth(bandwidth)?;
        let kind = if dims.len() == 2 { TopologyKind::Grid2d } else { TopologyKind::Grid3d };
        Self::assemble(lattice(dims, false, bandwidth)?, kind, dims.to_vec())
    }

    /// Torus with uniform link bandwidth. Axes of extent 2 carry a single link.
    pub fn torus(dims: &[usize], bandwidth: W) -> Result<Self> {
        check_dims(dims)?;
        check_bandwidth(bandwidth)?;
        let kind = if dims.len() == 2 { TopologyKind::Torus2d } else { TopologyKind::Torus3d };
        Self::assemble(lattice(dims, true, bandwidth)?, kind, dims.to_vec())
    }

    /// Any connected graph whose edge weights are link bandwidths.
    pub fn custom(graph: Graph<W>) -> Result<Self> {
        let n = graph.n();
        Self::assemble(graph, TopologyKind::Custom, vec![n])
    }

    pub fn graph(&self) -> &Graph<W> {
        &self.graph
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.n()
    }

    pub fn time_matrix(&self) -> &TimeMatrix<W> {
        &self.times
    }

    /// Wall time spent computing the time matrix.
    pub fn precompute_time(&self) -> Duration {
        self.precompute
    }

    /// Integer coordinates of `node`; `None` for custom graphs.
    pub fn coords(&self, node: usize) -> Option<Vec<usize>> {
        if self.kind == TopologyKind::Custom || node >= self.num_nodes() {
            return None;
        }
        let stride = strides(&self.dims);
        Some(self.dims.iter().zip(&stride).map(|(&d, &s)| (node / s) % d).collect())
    }

    /// Node id of a coordinate tuple.
    pub fn node_at(&self, coords: &[usize]) -> Option<usize> {
        if self.kind == TopologyKind::Custom
            || coords.len() != self.dims.len()
            || coords.iter().zip(&self.dims).any(|(c, d)| c >= d)
        {
            return None;
        }
        Some(coords.iter().zip(strides(&self.dims)).map(|(c, s)| c * s).sum())
    }

    pub fn is_torus(&self) -> bool {
        self.kind.is_torus()
    }
}

fn check_bandwidth<W: Scalar>(bw: W) -> Result<()> {
    if bw.is_finite() && bw > W::zero() {
        Ok(())
    } else {
        Err(Error::InvalidTopology(format!("bandwidth {bw} must be positive")))
    }
}

pub fn build_grid<W: Scalar>(dims: &[usize], bandwidth: W) -> Result<ProcessorGraph<W>> {
    ProcessorGraph::grid(dims, bandwidth)
}

pub fn build_torus<W: Scalar>(dims: &[usize], bandwidth: W) -> Result<ProcessorGraph<W>> {
    ProcessorGraph::torus(dims, bandwidth)
}

/// Topology description as used on the command line: `grid2d:16x16`,
/// `torus3d:8x8x8` or `custom:<path to METIS file>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TopologySpec {
    Lattice { kind: TopologyKind, dims: Vec<usize> },
    Custom(PathBuf),
}

impl FromStr for TopologySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidTopology(format!("`{s}`: {msg}"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected `<kind>:<dims>`".into()))?;
        let (kind, axes) = match kind {
            "grid2d" => (TopologyKind::Grid2d, 2),
            "grid3d" => (TopologyKind::Grid3d, 3),
            "torus2d" => (TopologyKind::Torus2d, 2),
            "torus3d" => (TopologyKind::Torus3d, 3),
            "custom" if !rest.is_empty() => return Ok(TopologySpec::Custom(PathBuf::from(rest))),
            other => return Err(bad(format!("unknown kind `{other}`"))),
        };
        let dims = rest
            .split('x')
            .map(|d| d.parse::<usize>().map_err(|_| bad(format!("malformed extent `{d}`"))))
            .collect::<Result<Vec<_>>>()?;
        if dims.len() != axes {
            return Err(bad(format!("{} needs {axes} extents", kind.name())));
        }
        check_dims(&dims).map_err(|e| bad(e.to_string()))?;
        Ok(TopologySpec::Lattice { kind, dims })
    }
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologySpec::Lattice { kind, dims } => {
                let d: Vec<String> = dims.iter().map(usize::to_string).collect();
                write!(f, "{}:{}", kind.name(), d.join("x"))
            }
            TopologySpec::Custom(p) => write!(f, "custom:{}", p.display()),
        }
    }
}

impl TopologySpec {
    /// Number of processor nodes, when known without reading files.
    pub fn num_nodes(&self) -> Option<usize> {
        match self {
            TopologySpec::Lattice { dims, .. } => Some(dims.iter().product()),
            TopologySpec::Custom(_) => None,
        }
    }

    /// Builds the processor graph. For custom graphs the file's edge weights
    /// are bandwidths and are multiplied by `bandwidth`.
    pub fn build<W: Scalar>(&self, bandwidth: W) -> Result<ProcessorGraph<W>> {
        match self {
            TopologySpec::Lattice { kind, dims } => {
                if kind.is_torus() {
                    ProcessorGraph::torus(dims, bandwidth)
                } else {
                    ProcessorGraph::grid(dims, bandwidth)
                }
            }
            TopologySpec::Custom(path) => {
                check_bandwidth(bandwidth)?;
                let g: Graph<W> = crate::metis::read_metis(std::fs::File::open(path)?)?;
                ProcessorGraph::custom(g.scale_edge_weights(bandwidth)?)
            }
        }
    }
}

/// Fraction of a unit message from `s` to `d` carried by each processor edge,
/// indexed like [`Graph::edges`] of the processor graph.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeFlow<W> {
    fractions: Vec<W>,
}

impl<W: Scalar> EdgeFlow<W> {
    pub fn as_slice(&self) -> &[W] {
        &self.fractions
    }

    pub fn get(&self, g: &Graph<W>, e: EdgeRef) -> W {
        g.edge_index(e.u, e.v).map_or(W::zero(), |i| self.fractions[i])
    }
}

/// Reusable scratch space for shortest-path-DAG routing.
pub(crate) struct Router<W> {
    on_dag: Vec<bool>,
    order: Vec<usize>,
    sigma_s: Vec<W>,
    sigma_d: Vec<W>,
}

impl<W: Scalar> Router<W> {
    pub(crate) fn new(k: usize) -> Self {
        Router {
            on_dag: vec![false; k],
            order: Vec::with_capacity(k),
            sigma_s: vec![W::zero(); k],
            sigma_d: vec![W::zero(); k],
        }
    }

    fn tolerance(optimum: W) -> W {
        let rel = W::from_f64(1e-12).unwrap().max(W::epsilon() * W::from_f64(8.0).unwrap());
        rel * optimum.max(W::one())
    }

    /// Calls `emit(edge_index, fraction)` for every processor edge on a
    /// shortest `s`-`d` path. The fraction of `u -> v` is
    /// `sigma(s,u) * sigma(v,d) / sigma(s,d)` with path counts restricted to
    /// the shortest-path DAG.
    pub(crate) fn route(
        &mut self,
        g: &Graph<W>,
        tm: &TimeMatrix<W>,
        s: usize,
        d: usize,
        mut emit: impl FnMut(usize, W),
    ) {
        debug_assert_ne!(s, d);
        let from_s = tm.row(s);
        let to_d = tm.row(d);
        let opt = from_s[d];
        let limit = opt + Self::tolerance(opt);
        self.order.clear();
        for u in 0..tm.k() {
            let on = from_s[u] + to_d[u] <= limit;
            self.on_dag[u] = on;
            if on {
                self.order.push(u);
                self.sigma_s[u] = W::zero();
                self.sigma_d[u] = W::zero();
            }
        }
        self.order
            .sort_unstable_by(|&a, &b| scalar::cmp(from_s[a], from_s[b]).then(a.cmp(&b)));
        let tight = |u: usize, v: usize, w: W| from_s[u] < from_s[v] && from_s[u] + w.recip() + to_d[v] <= limit;

        self.sigma_s[s] = W::one();
        for i in 0..self.order.len() {
            let u = self.order[i];
            let su = self.sigma_s[u];
            for (v, w) in g.neighbors(u) {
                if self.on_dag[v] && tight(u, v, w) {
                    self.sigma_s[v] = self.sigma_s[v] + su;
                }
            }
        }
        self.sigma_d[d] = W::one();
        for i in (0..self.order.len()).rev() {
            let u = self.order[i];
            let mut acc = self.sigma_d[u];
            for (v, w) in g.neighbors(u) {
                if self.on_dag[v] && tight(u, v, w) {
                    acc = acc + self.sigma_d[v];
                }
            }
            self.sigma_d[u] = acc;
        }
        let total = self.sigma_s[d];
        for &u in &self.order {
            for (v, w, e) in g.neighbor_edges(u) {
                if self.on_dag[v] && tight(u, v, w) {
                    emit(e, self.sigma_s[u] * self.sigma_d[v] / total);
                }
            }
        }
    }
}

/// Per-edge fractions of a unit message from `s` to `d` routed uniformly over
/// all minimum-time paths.
pub fn edge_flow_fractions<W: Scalar>(p: &ProcessorGraph<W>, s: usize, d: usize) -> Result<EdgeFlow<W>> {
    let k = p.num_nodes();
    for x in [s, d] {
        if x >= k {
            return Err(Error::VertexOutOfRange { vertex: x, n: k });
        }
    }
    if s == d {
        return Err(Error::SameEndpoints(s));
    }
    let mut fractions = vec![W::zero(); p.graph().num_edges()];
    Router::new(k).route(p.graph(), p.time_matrix(), s, d, |e, f| fractions[e] = f);
    Ok(EdgeFlow { fractions })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize, bw: f64) -> ProcessorGraph<f64> {
        let g = Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1, bw))).unwrap();
        ProcessorGraph::custom(g).unwrap()
    }

    #[test]
    fn grid_and_torus_sizes() {
        let g = build_grid::<f64>(&[2, 2], 1.0).unwrap();
        assert_eq!((g.num_nodes(), g.graph().num_edges()), (4, 4));
        let g = build_grid::<f64>(&[16, 16], 1.0).unwrap();
        assert_eq!((g.num_nodes(), g.graph().num_edges()), (256, 2 * 16 * 15));
        let g = build_grid::<f64>(&[8, 8, 8], 1.0).unwrap();
        assert_eq!((g.num_nodes(), g.graph().num_edges()), (512, 3 * 8 * 8 * 7));
        let t = build_torus::<f64>(&[16, 16], 1.0).unwrap();
        assert_eq!((t.num_nodes(), t.graph().num_edges()), (256, 512));
        let t = build_torus::<f64>(&[8, 8, 8], 1.0).unwrap();
        assert_eq!((t.num_nodes(), t.graph().num_edges()), (512, 1536));
        let t = build_torus::<f64>(&[2, 2], 1.0).unwrap();
        assert_eq!(t.graph().edges(), build_grid::<f64>(&[2, 2], 1.0).unwrap().graph().edges());
        let t = build_torus::<f64>(&[2, 3], 1.0).unwrap();
        // axis of extent 2 stays single, axis of extent 3 wraps
        assert_eq!(t.graph().num_edges(), 3 + 2 * 3);
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(build_grid::<f64>(&[1, 4], 1.0).is_err());
        assert!(build_grid::<f64>(&[4], 1.0).is_err());
        assert!(build_torus::<f64>(&[2, 2, 2, 2], 1.0).is_err());
        assert!(build_grid::<f64>(&[2, 2], 0.0).is_err());
    }

    #[test]
    fn lexicographic_numbering() {
        let g = build_grid::<f64>(&[2, 3], 1.0).unwrap();
        assert_eq!(g.coords(4), Some(vec![1, 1]));
        assert_eq!(g.node_at(&[1, 2]), Some(5));
        // last axis fastest: 0 and 1 are neighbors along axis 1
        assert!(g.graph().edge_index(0, 1).is_some());
        assert!(g.graph().edge_index(0, 3).is_some());
        assert!(g.graph().edge_index(2, 3).is_none());
    }

    #[test]
    fn time_examples() {
        let g = build_grid::<f64>(&[2, 2], 1.0).unwrap();
        assert_eq!(g.time_matrix().get(0, 3), 2.0);
        let p = path(3, 2.0);
        assert_eq!(p.time_matrix().get(0, 2), 1.0);
        let t = build_torus::<f64>(&[16, 16], 1.0).unwrap();
        let far = t.node_at(&[8, 8]).unwrap();
        assert_eq!(t.time_matrix().get(0, far), 16.0);
    }

    #[test]
    fn disconnected_is_rejected() {
        let g = Graph::<f64>::from_edges(3, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(ProcessorGraph::custom(g), Err(Error::Disconnected)));
    }

    #[test]
    fn centrality_examples() {
        let g = build_grid::<f64>(&[2, 2], 1.0).unwrap();
        assert_eq!(centrality_sums(g.time_matrix()), vec![4.0; 4]);
        let p = path(3, 1.0);
        assert_eq!(centrality_sums(p.time_matrix()), vec![3.0, 2.0, 3.0]);
    }

    #[test]
    fn flow_examples() {
        let g = build_grid::<f64>(&[2, 2], 1.0).unwrap();
        let f = edge_flow_fractions(&g, 0, 3).unwrap();
        assert_eq!(f.as_slice(), &[0.5; 4]);
        let p = path(3, 1.0);
        let f = edge_flow_fractions(&p, 0, 2).unwrap();
        assert_eq!(f.as_slice(), &[1.0, 1.0]);
        let g = build_grid::<f64>(&[3, 3], 1.0).unwrap();
        let f = edge_flow_fractions(&g, 0, 8).unwrap();
        // 3 of the 6 monotone lattice paths start with the step (0,0)-(0,1)
        assert_eq!(f.get(g.graph(), EdgeRef::new(0, 1)), 3.0 / 6.0);
        assert!(edge_flow_fractions(&g, 2, 2).is_err());
    }

    #[test]
    fn time_metric_not_hops() {
        // 0-1-2 with fast links beats the direct slow 0-2 link
        let g = Graph::from_edges(3, [(0, 1, 4.0), (1, 2, 4.0), (0, 2, 1.0)]).unwrap();
        let p = ProcessorGraph::custom(g).unwrap();
        assert_eq!(p.time_matrix().get(0, 2), 0.5);
        let f = edge_flow_fractions(&p, 0, 2).unwrap();
        assert_eq!(f.as_slice(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn spec_strings() {
        let s: TopologySpec = "torus3d:8x8x8".parse().unwrap();
        assert_eq!(s.num_nodes(), Some(512));
        assert_eq!(s.to_string(), "torus3d:8x8x8");
        assert!("grid2d:16".parse::<TopologySpec>().is_err());
        assert!("mesh:4x4".parse::<TopologySpec>().is_err());
        assert!("grid2d:1x4".parse::<TopologySpec>().is_err());
        assert!(matches!("custom:foo.graph".parse(), Ok(TopologySpec::Custom(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let t = build_torus::<f32>(&[4, 4], 2.0).unwrap();
        assert_eq!(t.time_matrix().get(0, 10), 2.0);
        let f = edge_flow_fractions(&t, 0, 5).unwrap();
        let out: f32 = t.graph().neighbor_edges(0).map(|(_, _, e)| f.as_slice()[e]).sum();
        assert!((out - 1.0).abs() < 1e-6);
    }
}
