//! Reverse Cuthill-McKee layouts of both graphs, matched position by position.

use std::collections::VecDeque;

use crate::bisect::pseudo_peripheral;
use crate::error::Result;
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::topology::ProcessorGraph;

use super::{check_sizes, Mapping};

/// Reverse Cuthill-McKee ordering.
///
/// Each component (ordered by lowest id) is traversed breadth-first from a
/// pseudo-peripheral vertex, found by two sweeps starting at the component's
/// minimum-degree vertex. Neighbors are enqueued by ascending degree, then
/// id. Each component's sequence is reversed before concatenation.
pub fn rcm_order<W: Scalar>(g: &Graph<W>) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.n());
    let mut seen = vec![false; g.n()];
    for comp in g.components() {
        let start = *comp.iter().min_by_key(|&&v| (g.degree(v), v)).unwrap();
        let root = pseudo_peripheral(g, start);
        let first = order.len();
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut next: Vec<usize> = g.neighbor_ids(u).iter().copied().filter(|&v| !seen[v]).collect();
            next.sort_unstable_by_key(|&v| (g.degree(v), v));
            for v in next {
                seen[v] = true;
                queue.push_back(v);
            }
        }
        order[first..].reverse();
    }
    order
}

/// Maps the `i`-th vertex of `g_c`'s RCM ordering onto the `i`-th node of the
/// processor graph's RCM ordering.
pub fn map_rcm<W: Scalar>(g_c: &Graph<W>, p: &ProcessorGraph<W>) -> Result<Mapping> {
    check_sizes(g_c.n(), p.num_nodes())?;
    let oc = rcm_order(g_c);
    let op = rcm_order(p.graph());
    let mut pi = vec![0; oc.len()];
    for (&c, &q) in oc.iter().zip(&op) {
        pi[c] = q;
    }
    Ok(Mapping { pi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph<f64> {
        Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    #[test]
    fn path_onto_path() {
        let p = ProcessorGraph::custom(path(4)).unwrap();
        let m = map_rcm(&path(4), &p).unwrap();
        assert!(m.as_slice() == [0, 1, 2, 3] || m.as_slice() == [3, 2, 1, 0]);
        assert_eq!(m.as_slice(), &[0, 1, 2, 3]);
    }

    #[test]
    fn cycle_onto_grid_keeps_adjacency() {
        let c4 = Graph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap();
        let g = ProcessorGraph::grid(&[2, 2], 1.0).unwrap();
        let m = map_rcm(&c4, &g).unwrap();
        for &(e, _) in c4.edges() {
            let t = g.time_matrix().get(m.get(e.u), m.get(e.v));
            assert!(t == 1.0 || t == 2.0);
        }
        assert_eq!(m.as_slice(), &[0, 1, 3, 2]);
    }

    #[test]
    fn single_vertex() {
        let g = Graph::<f64>::empty(1);
        assert_eq!(rcm_order(&g), vec![0]);
    }

    #[test]
    fn disconnected_components_in_id_order() {
        let g = Graph::from_edges(5, [(0, 3, 1.0), (1, 2, 1.0), (2, 4, 1.0)]).unwrap();
        let o = rcm_order(&g);
        let mut first: Vec<usize> = o[..2].to_vec();
        first.sort();
        assert_eq!(first, vec![0, 3]);
        assert_eq!(o.len(), 5);
    }
}
