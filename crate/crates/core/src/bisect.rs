//! Balanced two-way bisection: BFS region growing from a pseudo-peripheral
//! vertex followed by boundary Fiduccia-Mattheyses refinement.
//!
//! Equal-gain moves are taken most recent first, which keeps a pass working
//! along one stretch of the boundary.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{self, Scalar};

const MAX_PASSES: usize = 10;
const TRIALS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Bisection<W> {
    /// 0 or 1 per vertex.
    pub side: Vec<u8>,
    pub cut_weight: W,
}

impl<W: Scalar> Bisection<W> {
    pub fn size(&self, s: u8) -> usize {
        self.side.iter().filter(|&&x| x == s).count()
    }

    /// Vertices on side `s`, ascending.
    pub fn members(&self, s: u8) -> Vec<usize> {
        (0..self.side.len()).filter(|&v| self.side[v] == s).collect()
    }
}

/// Total weight of edges whose endpoints lie on different sides.
pub fn cut_weight<W: Scalar>(g: &Graph<W>, side: &[u8]) -> W {
    g.edges()
        .iter()
        .filter(|(e, _)| side[e.u] != side[e.v])
        .map(|&(_, w)| w)
        .sum()
}

/// Farthest vertex (hop metric, ties to lowest id) from `start`, restricted
/// to its component.
fn farthest(g: &Graph<impl Scalar>, start: usize) -> usize {
    let levels = g.bfs_levels(start);
    let mut best = start;
    for (v, &d) in levels.iter().enumerate() {
        if d != usize::MAX && d > levels[best] {
            best = v;
        }
    }
    best
}

/// Pseudo-peripheral vertex of `start`'s component found by two BFS sweeps.
pub fn pseudo_peripheral<W: Scalar>(g: &Graph<W>, start: usize) -> usize {
    farthest(g, farthest(g, start))
}

/// Splits `g` into sides of `⌈n/2⌉` (side 0) and `⌊n/2⌋` vertices.
///
/// The construction runs from several pseudo-peripheral starts, drawn from
/// the seed, and keeps the lowest cut (earliest on ties).
pub fn bisect<W: Scalar>(g: &Graph<W>, seed: u64) -> Result<Bisection<W>> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("cannot bisect a graph with {n} vertices")));
    }
    Ok(bisect_sized(g, n.div_ceil(2), seed))
}

/// Bisection with exactly `size0` vertices on side 0.
pub(crate) fn bisect_sized<W: Scalar>(g: &Graph<W>, size0: usize, seed: u64) -> Bisection<W> {
    let n = g.n();
    assert!(size0 <= n);
    let mut side = vec![1u8; n];
    if size0 == n {
        side.fill(0);
    }
    if size0 == 0 || size0 == n {
        let cut_weight = cut_weight(g, &side);
        return Bisection { side, cut_weight };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tried = Vec::with_capacity(TRIALS);
    let mut best: Option<Bisection<W>> = None;
    for _ in 0..TRIALS {
        let start = pseudo_peripheral(g, rng.gen_range(0..n));
        if tried.contains(&start) {
            continue;
        }
        tried.push(start);
        let mut side = vec![1u8; n];
        grow_region(g, start, size0, &mut side);
        refine(g, &mut side, size0);
        let cut_weight = cut_weight(g, &side);
        if best.as_ref().is_none_or(|b| cut_weight < b.cut_weight) {
            best = Some(Bisection { side, cut_weight });
        }
    }
    best.unwrap()
}

/// Claims `size0` vertices for side 0 in BFS order from `start`, restarting
/// at the lowest unvisited vertex when a component is exhausted.
fn grow_region<W: Scalar>(g: &Graph<W>, start: usize, size0: usize, side: &mut [u8]) {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    let mut claimed = 0;
    let mut next_restart = 0;
    queue.push_back(start);
    seen[start] = true;
    while claimed < size0 {
        let u = match queue.pop_front() {
            Some(u) => u,
            None => {
                while seen[next_restart] {
                    next_restart += 1;
                }
                seen[next_restart] = true;
                next_restart
            }
        };
        side[u] = 0;
        claimed += 1;
        for &v in g.neighbor_ids(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
}

struct Candidate<W> {
    gain: W,
    vertex: usize,
    stamp: u32,
    order: u64,
}

impl<W: Scalar> PartialEq for Candidate<W> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<W: Scalar> Eq for Candidate<W> {}
impl<W: Scalar> PartialOrd for Candidate<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<W: Scalar> Ord for Candidate<W> {
    // max-heap: highest gain first, then most recently pushed
    fn cmp(&self, other: &Self) -> Ordering {
        scalar::cmp(self.gain, other.gain).then_with(|| self.order.cmp(&other.order))
    }
}

/// FM passes until a pass brings no improvement, at most [`MAX_PASSES`].
fn refine<W: Scalar>(g: &Graph<W>, side: &mut [u8], size0: usize) {
    for _ in 0..MAX_PASSES {
        if !fm_pass(g, side, size0) {
            break;
        }
    }
}

/// One pass of single-vertex moves. Side 0 may deviate from `size0` by one
/// vertex while moving; the pass rolls back to the best state with exact
/// balance. Returns whether the cut strictly decreased.
fn fm_pass<W: Scalar>(g: &Graph<W>, side: &mut [u8], size0: usize) -> bool {
    let n = g.n();
    let mut gain = vec![W::zero(); n];
    for v in 0..n {
        for (u, w) in g.neighbors(v) {
            gain[v] = if side[u] != side[v] { gain[v] + w } else { gain[v] - w };
        }
    }
    let mut stamp = vec![0u32; n];
    let mut locked = vec![false; n];
    let mut heaps: [BinaryHeap<Candidate<W>>; 2] = [BinaryHeap::new(), BinaryHeap::new()];
    let mut order = 0u64;
    for v in (0..n).rev() {
        if g.neighbor_ids(v).iter().any(|&u| side[u] != side[v]) {
            order += 1;
            heaps[side[v] as usize].push(Candidate { gain: gain[v], vertex: v, stamp: 0, order });
        }
    }

    let mut count0 = side.iter().filter(|&&s| s == 0).count();
    let initial = cut_weight(g, side);
    let mut cut = initial;
    let mut best = initial;
    let mut best_len = 0;
    let mut moves: Vec<usize> = Vec::new();

    loop {
        let allowed: &[usize] = match count0.cmp(&size0) {
            Ordering::Greater => &[0],
            Ordering::Less => &[1],
            Ordering::Equal => &[0, 1],
        };
        for &s in allowed {
            let h = &mut heaps[s];
            while let Some(top) = h.peek() {
                let v = top.vertex;
                if locked[v] || stamp[v] != top.stamp || side[v] as usize != s {
                    h.pop();
                } else {
                    break;
                }
            }
        }
        let pick = allowed
            .iter()
            .filter_map(|&s| heaps[s].peek().map(|c| (s, c)))
            .max_by(|a, b| a.1.cmp(b.1))
            .map(|(s, _)| s);
        let Some(from) = pick else { break };
        let v = heaps[from].pop().unwrap().vertex;

        locked[v] = true;
        cut = cut - gain[v];
        side[v] ^= 1;
        if from == 0 {
            count0 -= 1;
        } else {
            count0 += 1;
        }
        moves.push(v);
        for (u, w) in g.neighbors(v) {
            if locked[u] {
                continue;
            }
            let two_w = w + w;
            gain[u] = if side[u] == side[v] { gain[u] - two_w } else { gain[u] + two_w };
            stamp[u] += 1;
            order += 1;
            heaps[side[u] as usize].push(Candidate { gain: gain[u], vertex: u, stamp: stamp[u], order });
        }
        if count0 == size0 && cut < best {
            best = cut;
            best_len = moves.len();
        }
    }
    for &v in &moves[best_len..] {
        side[v] ^= 1;
    }
    best < initial
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exhaustive_min_cut(g: &Graph<f64>) -> f64 {
        let n = g.n();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != n.div_ceil(2) {
                continue;
            }
            let side: Vec<u8> = (0..n).map(|v| if mask >> v & 1 == 1 { 0 } else { 1 }).collect();
            best = best.min(cut_weight(g, &side));
        }
        best
    }

    fn two_triangles() -> Graph<f64> {
        Graph::from_edges(
            6,
            [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn named_examples_hit_optimum() {
        let path4 = Graph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let k4 = Graph::from_edges(4, (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b, 1.0)))).unwrap();
        let tri = two_triangles();
        for seed in 0..20 {
            let b = bisect(&path4, seed).unwrap();
            assert_eq!(exhaustive_min_cut(&path4), 1.0);
            assert_eq!(b.cut_weight, 1.0);
            assert!(b.side == [0, 0, 1, 1] || b.side == [1, 1, 0, 0]);
            assert_eq!(bisect(&k4, seed).unwrap().cut_weight, 4.0);
            assert_eq!(exhaustive_min_cut(&tri), 1.0);
            assert_eq!(bisect(&tri, seed).unwrap().cut_weight, 1.0);
        }
    }

    #[test]
    fn sizes_are_balanced() {
        let g = Graph::from_edges(7, (0..6).map(|i| (i, i + 1, 1.0))).unwrap();
        let b = bisect(&g, 3).unwrap();
        assert_eq!((b.size(0), b.size(1)), (4, 3));
        assert!(bisect(&Graph::<f64>::empty(1), 0).is_err());
    }

    #[test]
    fn disconnected_input_stays_balanced() {
        let g = Graph::from_edges(9, [(0, 1, 1.0), (2, 3, 1.0), (5, 6, 1.0)]).unwrap();
        for seed in 0..10 {
            let b = bisect(&g, seed).unwrap();
            assert_eq!(b.size(0), 5);
            assert_eq!(b.cut_weight, cut_weight(&g, &b.side));
        }
    }

    #[test]
    fn refinement_repairs_bad_start() {
        // interleaved assignment on a path: cut 7, optimum 1
        let g = Graph::from_edges(8, (0..7).map(|i| (i, i + 1, 1.0))).unwrap();
        let mut side: Vec<u8> = (0..8).map(|v| (v % 2) as u8).collect();
        let before = cut_weight(&g, &side);
        refine(&g, &mut side, 4);
        let after = cut_weight(&g, &side);
        assert!(after <= before);
        assert_eq!(side.iter().filter(|&&s| s == 0).count(), 4);
        assert!(after <= 3.0, "cut {after}");
    }

    #[test]
    fn deterministic_for_seed() {
        let g = two_triangles();
        assert_eq!(bisect(&g, 42).unwrap(), bisect(&g, 42).unwrap());
    }
}
