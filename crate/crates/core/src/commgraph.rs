//! Communication graph construction and partition quality metrics.

use std::collections::BTreeMap;

use crate::bisect::bisect_sized;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::scalar::Scalar;
use crate::seeds;

/// Collapses each block of `p` into one vertex. The weight of `{A, B}` is the
/// total weight of application edges between blocks `A` and `B`.
pub fn build_comm_graph<W: Scalar>(g_a: &Graph<W>, p: &Partition) -> Result<Graph<W>> {
    p.check_graph(g_a)?;
    let mut volume: BTreeMap<(usize, usize), W> = BTreeMap::new();
    for &(e, w) in g_a.edges() {
        let (a, b) = (p.block(e.u), p.block(e.v));
        if a != b {
            let key = (a.min(b), a.max(b));
            let acc = volume.entry(key).or_insert_with(W::zero);
            *acc = *acc + w;
        }
    }
    Graph::from_edges(p.k(), volume.into_iter().map(|((a, b), w)| (a, b, w)))
}

/// Total weight of the application edges between different blocks.
pub fn edge_cut<W: Scalar>(g_a: &Graph<W>, p: &Partition) -> Result<W> {
    p.check_graph(g_a)?;
    Ok(g_a
        .edges()
        .iter()
        .filter(|(e, _)| p.block(e.u) != p.block(e.v))
        .map(|&(_, w)| w)
        .sum())
}

/// Maximum communication volume: for each block, the number of distinct
/// foreign blocks adjacent to each of its vertices, summed over the block;
/// the maximum over blocks.
pub fn mcv<W: Scalar>(g_a: &Graph<W>, p: &Partition) -> Result<usize> {
    p.check_graph(g_a)?;
    let mut per_block = vec![0usize; p.k()];
    // last vertex that marked each block, to count distinct blocks per vertex
    let mut marker = vec![usize::MAX; p.k()];
    for v in 0..g_a.n() {
        let own = p.block(v);
        for &u in g_a.neighbor_ids(v) {
            let b = p.block(u);
            if b != own && marker[b] != v {
                marker[b] = v;
                per_block[own] += 1;
            }
        }
    }
    Ok(per_block.into_iter().max().unwrap_or(0))
}

/// Cuts a vertex ordering into `k` consecutive blocks whose sizes differ by at
/// most one: the vertex at position `j` goes to block `⌊j·k/n⌋`.
pub fn partition_from_ordering(n: usize, order: &[usize], k: usize) -> Result<Partition> {
    if order.len() != n {
        return Err(Error::SizeMismatch { what: "ordering length vs. vertex count", left: order.len(), right: n });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidPartition(format!("cannot cut {n} vertices into {k} blocks")));
    }
    let mut assignment = vec![usize::MAX; n];
    for (j, &v) in order.iter().enumerate() {
        if v >= n || assignment[v] != usize::MAX {
            return Err(Error::InvalidPartition(format!("ordering is not a permutation (entry {v})")));
        }
        assignment[v] = j * k / n;
    }
    Partition::new(assignment, k, 0.0)
}

/// Self-contained recursive-bisection partitioner.
///
/// Block sizes are `⌊n/k⌋` or `⌈n/k⌉` (vertex counts). Blocks produced from
/// side 0 of a bisection get the lower ids.
pub fn simple_partition<W: Scalar>(g_a: &Graph<W>, k: usize, epsilon: f64, seed: u64) -> Result<Partition> {
    let n = g_a.n();
    if k == 0 || k > n {
        return Err(Error::InvalidPartition(format!("cannot split {n} vertices into {k} nonempty blocks")));
    }
    let mut assignment = vec![0usize; n];
    let all: Vec<usize> = (0..n).collect();
    split(g_a, &all, 0, k, seed, &mut assignment);
    Partition::new(assignment, k, epsilon)
}

fn split<W: Scalar>(g_a: &Graph<W>, vertices: &[usize], first_block: usize, k: usize, seed: u64, out: &mut [usize]) {
    if k == 1 {
        for &v in vertices {
            out[v] = first_block;
        }
        return;
    }
    let n = vertices.len();
    let (q, r) = (n / k, n % k);
    let k0 = k.div_ceil(2);
    let size0 = k0 * q + r.min(k0);
    let sub = g_a.induced_subgraph(vertices);
    let bis = bisect_sized(&sub, size0, seed);
    let side = |s: u8| -> Vec<usize> {
        (0..n).filter(|&i| bis.side[i] == s).map(|i| vertices[i]).collect()
    };
    let (left, right) = (side(0), side(1));
    split(g_a, &left, first_block, k0, seeds::derive(seed, 1), out);
    split(g_a, &right, first_block + k0, k - k0, seeds::derive(seed, 2), out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn path(n: usize) -> Graph<f64> {
        Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    fn part(a: &[usize], k: usize) -> Partition {
        Partition::new(a.to_vec(), k, 0.0).unwrap()
    }

    /// Direct evaluation of the set formula.
    fn mcv_oracle(g: &Graph<f64>, p: &Partition) -> usize {
        (0..p.k())
            .map(|blk| {
                (0..g.n())
                    .filter(|&v| p.block(v) == blk)
                    .map(|v| {
                        let foreign: BTreeSet<usize> = g
                            .neighbor_ids(v)
                            .iter()
                            .map(|&u| p.block(u))
                            .filter(|&b| b != blk)
                            .collect();
                        foreign.len()
                    })
                    .sum()
            })
            .max()
            .unwrap()
    }

    #[test]
    fn comm_graph_examples() {
        let g = path(6);
        let p = part(&[0, 0, 1, 1, 2, 2], 3);
        let c = build_comm_graph(&g, &p).unwrap();
        assert_eq!(c, path(3));
        assert_eq!(edge_cut(&g, &p).unwrap(), 2.0);
        assert_eq!(mcv(&g, &p).unwrap(), 2);
        assert_eq!(mcv_oracle(&g, &p), 2);

        let one = part(&[0; 6], 1);
        assert_eq!(build_comm_graph(&g, &one).unwrap(), Graph::empty(1));
        assert_eq!(edge_cut(&g, &one).unwrap(), 0.0);
        assert_eq!(mcv(&g, &one).unwrap(), 0);

        let tri = Graph::from_edges(3, [(0, 1, 2.0), (1, 2, 3.0), (0, 2, 5.0)]).unwrap();
        let id = part(&[0, 1, 2], 3);
        assert_eq!(build_comm_graph(&tri, &id).unwrap(), tri);
        assert_eq!(edge_cut(&tri, &id).unwrap(), 10.0);
    }

    #[test]
    fn mcv_star() {
        let star = Graph::from_edges(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let p = part(&[0, 1, 2, 3], 4);
        assert_eq!(mcv(&star, &p).unwrap(), 3);
        assert_eq!(mcv_oracle(&star, &p), 3);
    }

    #[test]
    fn errors() {
        let g = path(4);
        assert!(build_comm_graph(&g, &part(&[0, 1, 1], 2)).is_err());
        assert!(edge_cut(&g, &part(&[0, 1, 1], 2)).is_err());
    }

    #[test]
    fn ordering_examples() {
        let p = partition_from_ordering(6, &[0, 1, 2, 3, 4, 5], 3).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 1, 1, 2, 2]);
        let p = partition_from_ordering(5, &[0, 1, 2, 3, 4], 2).unwrap();
        assert_eq!(p.block_sizes(), vec![3, 2]);
        let rev: Vec<usize> = (0..7).rev().collect();
        let p = partition_from_ordering(7, &rev, 3).unwrap();
        assert_eq!(p.block(6), 0);
        assert!(partition_from_ordering(3, &[0, 0, 1], 2).is_err());
        assert!(partition_from_ordering(3, &[0, 1, 2], 4).is_err());
    }

    #[test]
    fn simple_partition_examples() {
        let g = path(4);
        assert_eq!(simple_partition(&g, 1, 0.0, 7).unwrap().assignment(), &[0; 4]);
        let p = simple_partition(&g, 2, 0.0, 7).unwrap();
        assert_eq!(edge_cut(&g, &p).unwrap(), 1.0);
        assert_eq!(p.block_sizes(), vec![2, 2]);
        let p = simple_partition(&g, 4, 0.0, 7).unwrap();
        let mut blocks = p.assignment().to_vec();
        blocks.sort();
        assert_eq!(blocks, vec![0, 1, 2, 3]);
        assert!(simple_partition(&g, 5, 0.0, 7).is_err());
    }

    #[test]
    fn simple_partition_balanced_for_odd_k() {
        let g = path(23);
        for k in 1..=23 {
            let p = simple_partition(&g, k, 0.0, 1).unwrap();
            let sizes = p.block_sizes();
            let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
            assert!(hi - lo <= 1, "k={k}: {sizes:?}");
            assert!(p.balance(&g).unwrap().is_balanced());
        }
    }
}
