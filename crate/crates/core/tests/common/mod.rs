#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topomap::mappers::Mapping;
use topomap::{Graph, Partition};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected graph: a random spanning tree plus `extra` random edges.
pub fn random_connected(r: &mut ChaCha8Rng, n: usize, extra: usize, weight: impl Fn(&mut ChaCha8Rng) -> f64) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(r);
    let mut edges = BTreeSet::new();
    for i in 1..n {
        let j = r.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        edges.insert((a.min(b), a.max(b)));
    }
    let mut tries = 0;
    while edges.len() < n - 1 + extra && tries < 50 * (extra + 1) && n > 1 {
        tries += 1;
        let (a, b) = (r.gen_range(0..n), r.gen_range(0..n));
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let list: Vec<(usize, usize, f64)> = edges.into_iter().map(|(a, b)| (a, b, weight(r))).collect();
    Graph::from_edges(n, list).unwrap()
}

/// Random graph, possibly disconnected, with about `m` edges.
pub fn random_graph(r: &mut ChaCha8Rng, n: usize, m: usize, weight: impl Fn(&mut ChaCha8Rng) -> f64) -> Graph {
    let mut edges = BTreeSet::new();
    if n > 1 {
        for _ in 0..m {
            let (a, b) = (r.gen_range(0..n), r.gen_range(0..n));
            if a != b {
                edges.insert((a.min(b), a.max(b)));
            }
        }
    }
    let list: Vec<(usize, usize, f64)> = edges.into_iter().map(|(a, b)| (a, b, weight(r))).collect();
    Graph::from_edges(n, list).unwrap()
}

pub fn grid_app(rows: usize, cols: usize) -> Graph {
    let mut e = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                e.push((v, v + 1, 1.0));
            }
            if r + 1 < rows {
                e.push((v, v + cols, 1.0));
            }
        }
    }
    Graph::from_edges(rows * cols, e).unwrap()
}

/// Random partition with every block nonempty.
pub fn random_partition(r: &mut ChaCha8Rng, n: usize, k: usize) -> Partition {
    let mut a: Vec<usize> = (0..n).map(|i| if i < k { i } else { r.gen_range(0..k) }).collect();
    a.shuffle(r);
    Partition::new(a, k, 0.03).unwrap()
}

/// Dense all-pairs communication times, `1/bandwidth` per edge.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(e, w) in g.edges() {
        d[e.u][e.v] = 1.0 / w;
        d[e.v][e.u] = 1.0 / w;
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][m] + d[m][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Congestion by listing every minimum-time simple path explicitly and
/// splitting each message evenly over them.
pub fn congestion_by_enumeration(g_c: &Graph, g_p: &Graph, pi: &[usize], tol: f64) -> f64 {
    let fw = floyd_warshall(g_p);
    let mut load = vec![0.0; g_p.num_edges()];
    for &(e, w) in g_c.edges() {
        let (s, d) = (pi[e.u], pi[e.v]);
        let mut paths: Vec<Vec<usize>> = Vec::new();
        let mut on_path = vec![false; g_p.n()];
        on_path[s] = true;
        let mut stack = Vec::new();
        dfs(g_p, s, d, 0.0, fw[s][d] + tol, &mut on_path, &mut stack, &mut paths);
        let share = w / paths.len() as f64;
        for p in &paths {
            for &ei in p {
                load[ei] += share;
            }
        }
    }
    load.iter().zip(g_p.edges()).map(|(l, &(_, bw))| l / bw).fold(0.0, f64::max)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    g: &Graph,
    at: usize,
    target: usize,
    time: f64,
    limit: f64,
    on_path: &mut [bool],
    stack: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if at == target {
        out.push(stack.clone());
        return;
    }
    for (u, w, ei) in g.neighbor_edges(at) {
        let t = time + 1.0 / w;
        if on_path[u] || t > limit {
            continue;
        }
        on_path[u] = true;
        stack.push(ei);
        dfs(g, u, target, t, limit, on_path, stack, out);
        stack.pop();
        on_path[u] = false;
    }
}

pub fn mcv_by_sets(g: &Graph, p: &Partition) -> usize {
    (0..p.k())
        .map(|b| {
            (0..g.n())
                .filter(|&v| p.block(v) == b)
                .map(|v| {
                    g.neighbor_ids(v)
                        .iter()
                        .map(|&u| p.block(u))
                        .filter(|&x| x != b)
                        .collect::<BTreeSet<_>>()
                        .len()
                })
                .sum::<usize>()
        })
        .max()
        .unwrap_or(0)
}

/// Every permutation of `0..k` (Heap's algorithm).
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn heap(n: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..n {
            heap(n - 1, a, out);
            let j = if n.is_multiple_of(2) { i } else { 0 };
            a.swap(j, n - 1);
        }
    }
    let mut a: Vec<usize> = (0..k).collect();
    let mut out = Vec::new();
    heap(k, &mut a, &mut out);
    out
}

pub fn is_permutation(pi: &Mapping, k: usize) -> bool {
    let mut s = pi.as_slice().to_vec();
    s.sort_unstable();
    s == (0..k).collect::<Vec<_>>()
}

/// Minimum wrapped (or plain) Manhattan distance on a lattice, row-major ids.
pub fn manhattan(dims: &[usize], a: usize, b: usize, wrap: bool) -> f64 {
    let mut total = 0;
    let (mut x, mut y) = (a, b);
    for &d in dims.iter().rev() {
        let (ca, cb) = (x % d, y % d);
        x /= d;
        y /= d;
        let lin = ca.abs_diff(cb);
        total += if wrap && d > 2 { lin.min(d - lin) } else { lin };
    }
    total as f64
}
