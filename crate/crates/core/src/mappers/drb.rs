//! Dual recursive bisection of the communication graph and the processor
//! graph in lockstep.

use crate::bisect::bisect_sized;
use crate::error::Result;
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::seeds;
use crate::topology::ProcessorGraph;

use super::{check_sizes, Mapping};

/// Bisects `g_c` and the processor graph into equal halves, pairs half 0 with
/// half 0 and half 1 with half 1, and recurses on the induced subgraphs until
/// single vertices remain. Relations between sub-blocks of different blocks
/// are ignored.
pub fn map_drb<W: Scalar>(g_c: &Graph<W>, p: &ProcessorGraph<W>, seed: u64) -> Result<Mapping> {
    check_sizes(g_c.n(), p.num_nodes())?;
    let k = g_c.n();
    let mut pi = vec![0; k];
    let all: Vec<usize> = (0..k).collect();
    recurse(g_c, p.graph(), &all, &all, seed, &mut pi);
    Ok(Mapping { pi })
}

fn recurse<W: Scalar>(
    g_c: &Graph<W>,
    g_p: &Graph<W>,
    verts: &[usize],
    nodes: &[usize],
    seed: u64,
    pi: &mut [usize],
) {
    debug_assert_eq!(verts.len(), nodes.len());
    match verts.len() {
        0 => return,
        1 => {
            pi[verts[0]] = nodes[0];
            return;
        }
        _ => {}
    }
    let half = verts.len().div_ceil(2);
    let split = |g: &Graph<W>, ids: &[usize], s: u64| -> [Vec<usize>; 2] {
        let b = bisect_sized(&g.induced_subgraph(ids), half, s);
        let mut sides = [Vec::new(), Vec::new()];
        for (i, &v) in ids.iter().enumerate() {
            sides[b.side[i] as usize].push(v);
        }
        sides
    };
    let [c0, c1] = split(g_c, verts, seeds::derive(seed, 0));
    let [p0, p1] = split(g_p, nodes, seeds::derive(seed, 1));
    recurse(g_c, g_p, &c0, &p0, seeds::derive(seed, 2), pi);
    recurse(g_c, g_p, &c1, &p1, seeds::derive(seed, 3), pi);
}
