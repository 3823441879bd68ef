//! Partitions of an application graph into `k` blocks, and the plain-text
//! partition file format (line `i` holds the block id of vertex `i`).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
    epsilon: f64,
}

/// Outcome of the balance check `max block weight <= (1+eps) * ceil(W/k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Balance {
    pub max_block_weight: f64,
    pub bound: f64,
}

impl Balance {
    pub fn is_balanced(&self) -> bool {
        self.max_block_weight <= self.bound
    }

    /// `max block weight / ceil(W/k)`.
    pub fn imbalance(&self, epsilon: f64) -> f64 {
        self.max_block_weight / (self.bound / (1.0 + epsilon))
    }
}

impl Partition {
    /// Validates ids in `[0, k)` and that no block is empty.
    pub fn new(assignment: Vec<usize>, k: usize, epsilon: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPartition("k must be at least 1".into()));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidPartition(format!("imbalance {epsilon} must be >= 0")));
        }
        let mut sizes = vec![0usize; k];
        for (v, &b) in assignment.iter().enumerate() {
            if b >= k {
                return Err(Error::InvalidPartition(format!(
                    "vertex {v} assigned to block {b}, but k = {k}"
                )));
            }
            sizes[b] += 1;
        }
        if let Some(b) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyBlock(b));
        }
        Ok(Partition { assignment, k, epsilon })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn block(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &b in &self.assignment {
            sizes[b] += 1;
        }
        sizes
    }

    /// Errors unless the partition covers exactly the vertices of `g`.
    pub fn check_graph<W: Scalar>(&self, g: &Graph<W>) -> Result<()> {
        if self.assignment.len() != g.n() {
            return Err(Error::SizeMismatch {
                what: "partition length vs. vertex count",
                left: self.assignment.len(),
                right: g.n(),
            });
        }
        Ok(())
    }

    /// Balance check with vertex weights. Violations are reported, not fixed.
    pub fn balance<W: Scalar>(&self, g: &Graph<W>) -> Result<Balance> {
        self.check_graph(g)?;
        let mut weights = vec![0.0f64; self.k];
        for (v, &b) in self.assignment.iter().enumerate() {
            weights[b] += g.vertex_weight(v).to_f64().unwrap_or(f64::NAN);
        }
        let total: f64 = weights.iter().sum();
        let max = weights.iter().copied().fold(0.0, f64::max);
        let avg = (total / self.k as f64).ceil();
        Ok(Balance { max_block_weight: max, bound: (1.0 + self.epsilon) * avg })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }
}

/// Parses a partition file. Blank lines and `%` comments are skipped; `k`
/// defaults to one more than the largest block id.
pub fn parse_partition(text: &str, k: Option<usize>, epsilon: f64) -> Result<Partition> {
    let mut assignment = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let b: usize = t.parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("malformed block id `{t}`"),
        })?;
        assignment.push(b);
    }
    let k = k.unwrap_or_else(|| assignment.iter().max().map_or(0, |&m| m + 1));
    Partition::new(assignment, k, epsilon)
}

pub fn write_partition(p: &Partition) -> String {
    let mut out = String::with_capacity(p.len() * 4);
    for &b in p.assignment() {
        writeln!(out, "{b}").unwrap();
    }
    out
}
