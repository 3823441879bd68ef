//! Greedy construction mappers.
//!
//! All four variants grow the mapping one pair `(v_c, v_p)` at a time. They
//! differ in how the next communication vertex is chosen (total vs. maximum
//! edge weight to the mapped set), how the next processor node is chosen
//! (centrality w.r.t. the mapped nodes, proximity to the previous node, or the
//! communication time the new pair adds), and how the first node is picked.
//! Every tie goes to the lowest id.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::seeds;
use crate::topology::{centrality_sums, TimeMatrix};

use super::{check_sizes, Mapping};
use rand::Rng;

/// Rule for the next communication vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommRule {
    /// Largest total edge weight to the mapped vertices.
    TotalWeight,
    /// Largest single edge weight to a mapped vertex.
    MaxWeight,
}

/// Rule for the next processor node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeRule {
    /// Smallest total time to the mapped nodes, independent of `v_c`.
    Central,
    /// Smallest time to the previously mapped node, independent of `v_c`.
    Nearest,
    /// Smallest added communication time
    /// `sum over mapped neighbors w of v_c: weight(v_c, w) * t(v_p, pi(w))`;
    /// ties go to the smaller total time to the mapped nodes.
    AddedTime,
}

/// How the first processor node is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FirstNode {
    /// Smallest row sum of the time matrix.
    MostCentral,
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GreedyVariant {
    pub comm: CommRule,
    pub node: NodeRule,
    pub first: FirstNode,
}

impl GreedyVariant {
    pub const ALL: GreedyVariant =
        GreedyVariant { comm: CommRule::TotalWeight, node: NodeRule::Central, first: FirstNode::MostCentral };
    pub const ALL_C: GreedyVariant =
        GreedyVariant { comm: CommRule::TotalWeight, node: NodeRule::AddedTime, first: FirstNode::MostCentral };
    pub const MIN_C: GreedyVariant =
        GreedyVariant { comm: CommRule::MaxWeight, node: NodeRule::AddedTime, first: FirstNode::MostCentral };

    pub fn min(first: usize) -> Self {
        GreedyVariant { comm: CommRule::MaxWeight, node: NodeRule::Nearest, first: FirstNode::Fixed(first) }
    }
}

/// Incrementally maintained scores of the unassigned vertices and nodes.
#[derive(Clone, Debug)]
pub struct GreedyState<W> {
    /// Total edge weight from each unassigned vertex to the mapped vertices.
    sum_c: Vec<W>,
    /// Heaviest single edge from each unassigned vertex to a mapped vertex.
    max_c: Vec<W>,
    /// Total time from each unassigned node to the mapped nodes.
    sum_p: Vec<W>,
    assigned_c: Vec<bool>,
    assigned_p: Vec<bool>,
    pi: Vec<usize>,
}

impl<W: Scalar> GreedyState<W> {
    pub fn new(k: usize) -> Self {
        GreedyState {
            sum_c: vec![W::zero(); k],
            max_c: vec![W::zero(); k],
            sum_p: vec![W::zero(); k],
            assigned_c: vec![false; k],
            assigned_p: vec![false; k],
            pi: vec![usize::MAX; k],
        }
    }

    pub fn assign(&mut self, g_c: &Graph<W>, tm: &TimeMatrix<W>, vc: usize, vp: usize) {
        debug_assert!(!self.assigned_c[vc] && !self.assigned_p[vp]);
        self.assigned_c[vc] = true;
        self.assigned_p[vp] = true;
        self.pi[vc] = vp;
        for (w, weight) in g_c.neighbors(vc) {
            if !self.assigned_c[w] {
                self.sum_c[w] = self.sum_c[w] + weight;
                self.max_c[w] = self.max_c[w].max(weight);
            }
        }
        for ((sum, &t), &done) in self.sum_p.iter_mut().zip(tm.row(vp)).zip(&self.assigned_p) {
            if !done {
                *sum = *sum + t;
            }
        }
    }

    pub fn sum_c(&self) -> &[W] {
        &self.sum_c
    }

    pub fn sum_p(&self) -> &[W] {
        &self.sum_p
    }

    pub fn is_assigned_c(&self, v: usize) -> bool {
        self.assigned_c[v]
    }

    pub fn is_assigned_p(&self, q: usize) -> bool {
        self.assigned_p[q]
    }

    /// `pi(v)` for mapped vertices.
    pub fn image(&self, v: usize) -> Option<usize> {
        self.assigned_c[v].then(|| self.pi[v])
    }

    fn next_comm(&self, rule: CommRule) -> usize {
        let score = match rule {
            CommRule::TotalWeight => &self.sum_c,
            CommRule::MaxWeight => &self.max_c,
        };
        let mut best: Option<usize> = None;
        for v in 0..score.len() {
            if !self.assigned_c[v] && best.is_none_or(|b| score[v] > score[b]) {
                best = Some(v);
            }
        }
        best.expect("an unassigned vertex remains")
    }

    fn next_node(&self, g_c: &Graph<W>, tm: &TimeMatrix<W>, rule: NodeRule, vc: usize, prev: usize) -> usize {
        let free = (0..self.assigned_p.len()).filter(|&q| !self.assigned_p[q]);
        match rule {
            NodeRule::Central => argmin_by(free, |q| (self.sum_p[q], W::zero())),
            NodeRule::Nearest => argmin_by(free, |q| (tm.get(prev, q), W::zero())),
            NodeRule::AddedTime => {
                let mapped: Vec<(W, usize)> = g_c
                    .neighbors(vc)
                    .filter(|&(w, _)| self.assigned_c[w])
                    .map(|(w, weight)| (weight, self.pi[w]))
                    .collect();
                argmin_by(free, |q| {
                    let row = tm.row(q);
                    let added = mapped.iter().fold(W::zero(), |acc, &(weight, img)| acc + weight * row[img]);
                    (added, self.sum_p[q])
                })
            }
        }
    }
}

/// First candidate with the lexicographically smallest key.
fn argmin_by<W: Scalar>(candidates: impl Iterator<Item = usize>, key: impl Fn(usize) -> (W, W)) -> usize {
    let mut best: Option<(usize, (W, W))> = None;
    for q in candidates {
        let kq = key(q);
        let better = match best {
            None => true,
            Some((_, kb)) => kq.0 < kb.0 || (kq.0 == kb.0 && kq.1 < kb.1),
        };
        if better {
            best = Some((q, kq));
        }
    }
    best.expect("an unassigned node remains").0
}

/// Runs a greedy variant and returns the pairs `(v_c, v_p)` in the order they
/// were formed.
pub fn greedy_pairs<W: Scalar>(g_c: &Graph<W>, tm: &TimeMatrix<W>, variant: GreedyVariant) -> Result<Vec<(usize, usize)>> {
    greedy_run(g_c, tm, variant, |_| {})
}

pub(crate) fn greedy_run<W: Scalar>(
    g_c: &Graph<W>,
    tm: &TimeMatrix<W>,
    variant: GreedyVariant,
    mut observe: impl FnMut(&GreedyState<W>),
) -> Result<Vec<(usize, usize)>> {
    let k = g_c.n();
    check_sizes(k, tm.k())?;
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut state = GreedyState::new(k);
    let mut pairs = Vec::with_capacity(k);

    let mut vc = 0;
    let mut heaviest = W::zero();
    for v in 0..k {
        let d: W = g_c.neighbors(v).map(|(_, w)| w).sum();
        if d > heaviest {
            heaviest = d;
            vc = v;
        }
    }
    let mut vp = match variant.first {
        FirstNode::MostCentral => argmin_by(0..k, {
            let c = centrality_sums(tm);
            move |q| (c[q], W::zero())
        }),
        FirstNode::Fixed(q) if q < k => q,
        FirstNode::Fixed(q) => return Err(Error::VertexOutOfRange { vertex: q, n: k }),
    };
    loop {
        state.assign(g_c, tm, vc, vp);
        pairs.push((vc, vp));
        observe(&state);
        if pairs.len() == k {
            break;
        }
        vc = state.next_comm(variant.comm);
        vp = state.next_node(g_c, tm, variant.node, vc, vp);
    }
    Ok(pairs)
}

fn to_mapping(k: usize, pairs: Vec<(usize, usize)>) -> Mapping {
    let mut pi = vec![0; k];
    for (vc, vp) in pairs {
        pi[vc] = vp;
    }
    Mapping { pi }
}

fn run<W: Scalar>(g_c: &Graph<W>, tm: &TimeMatrix<W>, variant: GreedyVariant) -> Result<Mapping> {
    Ok(to_mapping(g_c.n(), greedy_pairs(g_c, tm, variant)?))
}

/// Heaviest vertex onto the most central node, then repeatedly the vertex with
/// the largest total weight to the mapped set onto the node with the smallest
/// total time to the mapped nodes.
pub fn map_greedy_all<W: Scalar>(g_c: &Graph<W>, tm: &TimeMatrix<W>) -> Result<Mapping> {
    run(g_c, tm, GreedyVariant::ALL)
}

/// Random first node; then the vertex with the heaviest single edge to the
/// mapped set onto the free node closest to the previously used node.
pub fn map_greedy_min<W: Scalar>(g_c: &Graph<W>, tm: &TimeMatrix<W>, seed: u64) -> Result<Mapping> {
    if tm.k() == 0 {
        return run(g_c, tm, GreedyVariant::ALL);
    }
    let first = seeds::rng(seed).gen_range(0..tm.k());
    map_greedy_min_from(g_c, tm, first)
}

/// GreedyMin with an explicit first processor node.
pub fn map_greedy_min_from<W: Scalar>(g_c: &Graph<W>, tm: &TimeMatrix<W>, first: usize) -> Result<Mapping> {
    check_sizes(g_c.n(), tm.k())?;
    if first >= tm.k() {
        return Err(Error::VertexOutOfRange { vertex: first, n: tm.k() });
    }
    run(g_c, tm, GreedyVariant::min(first))
}

/// GreedyAll's vertex order, with each node chosen to minimize the
/// communication time added by the new pair.
pub fn map_greedy_all_c<W: Scalar>(g_c: &Graph<W>, tm: &TimeMatrix<W>) -> Result<Mapping> {
    run(g_c, tm, GreedyVariant::ALL_C)
}

/// GreedyMin's vertex order, central first node, nodes chosen by added
/// communication time.
pub fn map_greedy_min_c<W: Scalar>(g_c: &Graph<W>, tm: &TimeMatrix<W>) -> Result<Mapping> {
    run(g_c, tm, GreedyVariant::MIN_C)
}
