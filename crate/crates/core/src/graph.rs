//! Undirected weighted graph in compressed adjacency form.
//!
//! The same representation holds application graphs, communication graphs and
//! the combinatorial part of processor graphs. Every constructor validates the
//! structural invariants, so a `Graph` value is always well formed:
//! symmetric adjacency with identical weights in both directions, no
//! self-loops, no parallel edges, strictly sorted neighbor lists and strictly
//! positive finite weights.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Canonical identity of an undirected edge, `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeRef {
    pub u: usize,
    pub v: usize,
}

impl EdgeRef {
    /// Builds the canonical form of `{a, b}`. Panics on `a == b`.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "an edge needs two distinct endpoints");
        if a < b {
            EdgeRef { u: a, v: b }
        } else {
            EdgeRef { u: b, v: a }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph<W> {
    xadj: Vec<usize>,
    adjncy: Vec<usize>,
    adjwgt: Vec<W>,
    /// Canonical edge index of every adjacency slot.
    slot_edge: Vec<usize>,
    edges: Vec<(EdgeRef, W)>,
    vwgt: Option<Vec<W>>,
}

fn check_weight<W: Scalar>(w: W) -> std::result::Result<(), String> {
    if w.is_finite() && w > W::zero() {
        Ok(())
    } else {
        Err(format!("weight {w} is not a positive finite number"))
    }
}

impl<W: Scalar> Graph<W> {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            xadj: vec![0; n + 1],
            adjncy: Vec::new(),
            adjwgt: Vec::new(),
            slot_edge: Vec::new(),
            edges: Vec::new(),
            vwgt: None,
        }
    }

    /// Builds a graph from a list of undirected edges. Each edge must appear once.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, W)>,
    {
        let mut lists: Vec<Vec<(usize, W)>> = vec![Vec::new(); n];
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::VertexOutOfRange { vertex: a.max(b), n });
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            check_weight(w).map_err(Error::InvalidGraph)?;
            lists[a].push((b, w));
            lists[b].push((a, w));
        }
        Self::from_adjacency(lists)
    }

    /// Builds a graph from per-vertex neighbor lists (any order). Both
    /// directions of every edge must be present with the same weight.
    pub fn from_adjacency(mut lists: Vec<Vec<(usize, W)>>) -> Result<Self> {
        let mut xadj = Vec::with_capacity(lists.len() + 1);
        xadj.push(0);
        let mut adjncy = Vec::new();
        let mut adjwgt = Vec::new();
        for list in &mut lists {
            list.sort_by_key(|&(v, _)| v);
            for &(v, w) in list.iter() {
                adjncy.push(v);
                adjwgt.push(w);
            }
            xadj.push(adjncy.len());
        }
        Self::from_csr(xadj, adjncy, adjwgt, None)
    }

    /// Builds a graph from raw compressed arrays, validating every invariant.
    pub fn from_csr(
        xadj: Vec<usize>,
        adjncy: Vec<usize>,
        adjwgt: Vec<W>,
        vwgt: Option<Vec<W>>,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidGraph(msg));
        if xadj.is_empty() || xadj[0] != 0 {
            return invalid("offset array must start at 0".into());
        }
        let n = xadj.len() - 1;
        if xadj.windows(2).any(|w| w[0] > w[1]) {
            return invalid("offset array is not monotone".into());
        }
        if xadj[n] != adjncy.len() || adjncy.len() != adjwgt.len() {
            return invalid("adjacency arrays have inconsistent lengths".into());
        }
        if let Some(vw) = &vwgt {
            if vw.len() != n {
                return invalid(format!("{} vertex weights for {n} vertices", vw.len()));
            }
            for (v, &w) in vw.iter().enumerate() {
                check_weight(w).map_err(|m| Error::InvalidGraph(format!("vertex {v}: {m}")))?;
            }
        }
        for u in 0..n {
            let (lo, hi) = (xadj[u], xadj[u + 1]);
            for s in lo..hi {
                let v = adjncy[s];
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if v == u {
                    return invalid(format!("self-loop at vertex {u}"));
                }
                if s > lo && adjncy[s - 1] >= v {
                    return invalid(format!("neighbors of {u} not strictly sorted (duplicate edge?)"));
                }
                check_weight(adjwgt[s])
                    .map_err(|m| Error::InvalidGraph(format!("edge {{{u},{v}}}: {m}")))?;
            }
        }
        let mut slot_edge = vec![usize::MAX; adjncy.len()];
        let mut edges = Vec::with_capacity(adjncy.len() / 2);
        for u in 0..n {
            for s in xadj[u]..xadj[u + 1] {
                let v = adjncy[s];
                if u < v {
                    slot_edge[s] = edges.len();
                    edges.push((EdgeRef { u, v }, adjwgt[s]));
                }
            }
        }
        for u in 0..n {
            for s in xadj[u]..xadj[u + 1] {
                let v = adjncy[s];
                let back = &adjncy[xadj[v]..xadj[v + 1]];
                let Ok(pos) = back.binary_search(&u) else {
                    return invalid(format!("edge ({u},{v}) has no reverse ({v},{u})"));
                };
                let r = xadj[v] + pos;
                if adjwgt[r] != adjwgt[s] {
                    return invalid(format!(
                        "edge {{{u},{v}}} has weights {} and {}",
                        adjwgt[s], adjwgt[r]
                    ));
                }
                if u > v {
                    slot_edge[s] = slot_edge[r];
                }
            }
        }
        Ok(Graph { xadj, adjncy, adjwgt, slot_edge, edges, vwgt })
    }

    /// Attaches per-vertex weights.
    pub fn with_vertex_weights(self, vwgt: Vec<W>) -> Result<Self> {
        Self::from_csr(self.xadj, self.adjncy, self.adjwgt, Some(vwgt))
    }

    pub fn n(&self) -> usize {
        self.xadj.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.xadj[v + 1] - self.xadj[v]
    }

    /// Neighbors of `v` with edge weights, ascending by neighbor id.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, W)> + '_ {
        let r = self.xadj[v]..self.xadj[v + 1];
        self.adjncy[r.clone()].iter().copied().zip(self.adjwgt[r].iter().copied())
    }

    /// Neighbors of `v` as `(neighbor, weight, canonical edge index)`.
    pub fn neighbor_edges(&self, v: usize) -> impl Iterator<Item = (usize, W, usize)> + '_ {
        (self.xadj[v]..self.xadj[v + 1]).map(move |s| (self.adjncy[s], self.adjwgt[s], self.slot_edge[s]))
    }

    pub fn neighbor_ids(&self, v: usize) -> &[usize] {
        &self.adjncy[self.xadj[v]..self.xadj[v + 1]]
    }

    /// Undirected edges in canonical order (by `u`, then `v`).
    pub fn edges(&self) -> &[(EdgeRef, W)] {
        &self.edges
    }

    /// Index of edge `{a, b}` in [`Graph::edges`], if present.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        if a >= self.n() || b >= self.n() {
            return None;
        }
        let lo = self.xadj[a];
        self.neighbor_ids(a).binary_search(&b).ok().map(|p| self.slot_edge[lo + p])
    }

    pub fn edge_weight(&self, a: usize, b: usize) -> Option<W> {
        self.edge_index(a, b).map(|e| self.edges[e].1)
    }

    /// Sum of the weights of the edges incident to `v`.
    pub fn weighted_degree(&self, v: usize) -> Result<W> {
        if v >= self.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n() });
        }
        Ok(self.neighbors(v).map(|(_, w)| w).sum())
    }

    pub fn vertex_weights(&self) -> Option<&[W]> {
        self.vwgt.as_deref()
    }

    /// Weight of vertex `v`; 1 when the graph carries no vertex weights.
    pub fn vertex_weight(&self, v: usize) -> W {
        self.vwgt.as_ref().map_or(W::one(), |vw| vw[v])
    }

    pub fn total_vertex_weight(&self) -> W {
        match &self.vwgt {
            Some(vw) => vw.iter().copied().sum(),
            None => W::from_usize_lossy(self.n()),
        }
    }

    pub fn total_edge_weight(&self) -> W {
        self.edges.iter().map(|&(_, w)| w).sum()
    }

    /// Same structure with every edge weight multiplied by `factor > 0`.
    pub fn scale_edge_weights(&self, factor: W) -> Result<Self> {
        Self::from_csr(
            self.xadj.clone(),
            self.adjncy.clone(),
            self.adjwgt.iter().map(|&w| w * factor).collect(),
            self.vwgt.clone(),
        )
    }

    /// Subgraph induced by `vertices`; local vertex `i` is `vertices[i]`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Self {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut xadj = Vec::with_capacity(vertices.len() + 1);
        xadj.push(0);
        let mut adjncy = Vec::new();
        let mut adjwgt = Vec::new();
        for &v in vertices {
            let mut row: Vec<(usize, W)> = self
                .neighbors(v)
                .filter(|&(u, _)| local[u] != usize::MAX)
                .map(|(u, w)| (local[u], w))
                .collect();
            row.sort_by_key(|&(u, _)| u);
            for (u, w) in row {
                adjncy.push(u);
                adjwgt.push(w);
            }
            xadj.push(adjncy.len());
        }
        let vwgt = self.vwgt.as_ref().map(|vw| vertices.iter().map(|&v| vw[v]).collect());
        Self::from_csr(xadj, adjncy, adjwgt, vwgt).expect("induced subgraph of a valid graph")
    }

    /// Hop distances from `src`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_levels(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        let mut queue = VecDeque::from([src]);
        dist[src] = 0;
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbor_ids(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Connected components, each sorted ascending, ordered by lowest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in self.neighbor_ids(u) {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.bfs_levels(0).iter().all(|&d| d != usize::MAX)
    }

    /// Raw compressed arrays `(xadj, adjncy, adjwgt)`.
    pub fn csr(&self) -> (&[usize], &[usize], &[W]) {
        (&self.xadj, &self.adjncy, &self.adjwgt)
    }
}
