//! Mapping algorithms: each produces a bijection from communication graph
//! vertices to processor nodes.

mod drb;
mod greedy;
mod rcm;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::seeds;
use crate::topology::ProcessorGraph;

pub use drb::map_drb;
pub use greedy::{
    greedy_pairs, map_greedy_all, map_greedy_all_c, map_greedy_min, map_greedy_min_c, map_greedy_min_from,
    CommRule, FirstNode, GreedyState, GreedyVariant, NodeRule,
};
pub use rcm::{map_rcm, rcm_order};

/// `pi[i]` is the processor node hosting communication vertex `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mapping {
    pi: Vec<usize>,
}

impl Mapping {
    /// Validates that `pi` is a permutation of `0..pi.len()`.
    pub fn new(pi: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; pi.len()];
        for &x in &pi {
            if x >= pi.len() || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidArgument(format!("mapping is not a permutation (entry {x})")));
            }
        }
        Ok(Mapping { pi })
    }

    pub fn identity(k: usize) -> Self {
        Mapping { pi: (0..k).collect() }
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    #[inline]
    pub fn get(&self, v: usize) -> usize {
        self.pi[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.pi
    }

    /// Inverse permutation: node -> communication vertex.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.pi.len()];
        for (v, &p) in self.pi.iter().enumerate() {
            inv[p] = v;
        }
        inv
    }
}

pub(crate) fn check_sizes(k_c: usize, k_p: usize) -> Result<()> {
    if k_c != k_p {
        return Err(Error::SizeMismatch { what: "communication vertices vs. processor nodes", left: k_c, right: k_p });
    }
    Ok(())
}

pub fn map_identity(k: usize) -> Mapping {
    Mapping::identity(k)
}

/// Uniformly random permutation (seeded Fisher-Yates).
pub fn map_random(k: usize, seed: u64) -> Mapping {
    let mut pi: Vec<usize> = (0..k).collect();
    pi.shuffle(&mut seeds::rng(seed));
    Mapping { pi }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Initial,
    Random,
    Rcm,
    Drb,
    GreedyAll,
    GreedyMin,
    GreedyAllC,
    GreedyMinC,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Initial,
        Algorithm::Random,
        Algorithm::Rcm,
        Algorithm::Drb,
        Algorithm::GreedyAll,
        Algorithm::GreedyMin,
        Algorithm::GreedyAllC,
        Algorithm::GreedyMinC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Initial => "initial",
            Algorithm::Random => "random",
            Algorithm::Rcm => "rcm",
            Algorithm::Drb => "drb",
            Algorithm::GreedyAll => "greedyall",
            Algorithm::GreedyMin => "greedymin",
            Algorithm::GreedyAllC => "greedyallc",
            Algorithm::GreedyMinC => "greedyminc",
        }
    }

    /// Whether the result depends on the seed.
    pub fn is_randomized(self) -> bool {
        matches!(self, Algorithm::Random | Algorithm::Drb | Algorithm::GreedyMin)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == lower)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

/// Runs `algorithm` on `(g_c, p)`.
pub fn map<W: Scalar>(algorithm: Algorithm, g_c: &Graph<W>, p: &ProcessorGraph<W>, seed: u64) -> Result<Mapping> {
    check_sizes(g_c.n(), p.num_nodes())?;
    let tm = p.time_matrix();
    match algorithm {
        Algorithm::Initial => Ok(map_identity(g_c.n())),
        Algorithm::Random => Ok(map_random(g_c.n(), seed)),
        Algorithm::Rcm => map_rcm(g_c, p),
        Algorithm::Drb => map_drb(g_c, p, seed),
        Algorithm::GreedyAll => map_greedy_all(g_c, tm),
        Algorithm::GreedyMin => map_greedy_min(g_c, tm, seed),
        Algorithm::GreedyAllC => map_greedy_all_c(g_c, tm),
        Algorithm::GreedyMinC => map_greedy_min_c(g_c, tm),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_examples() {
        assert_eq!(map_identity(4).as_slice(), &[0, 1, 2, 3]);
        assert_eq!(map_identity(1).as_slice(), &[0]);
        assert_eq!(map_identity(256).get(255), 255);
    }

    #[test]
    fn random_examples() {
        assert_eq!(map_random(1, 9).as_slice(), &[0]);
        assert_eq!(map_random(50, 9), map_random(50, 9));
        assert_ne!(map_random(50, 9), map_random(50, 10));
        assert!(Mapping::new(map_random(50, 3).as_slice().to_vec()).is_ok());
    }

    #[test]
    fn mapping_validation() {
        assert!(Mapping::new(vec![1, 0, 2]).is_ok());
        assert!(Mapping::new(vec![1, 1, 2]).is_err());
        assert!(Mapping::new(vec![0, 3]).is_err());
        assert_eq!(Mapping::new(vec![2, 0, 1]).unwrap().inverse(), vec![1, 2, 0]);
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("GreedyAllC".parse::<Algorithm>().unwrap(), Algorithm::GreedyAllC);
        assert!("scotch".parse::<Algorithm>().is_err());
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let g = Graph::<f64>::empty(3);
        let p = ProcessorGraph::grid(&[2, 2], 1.0).unwrap();
        for a in Algorithm::ALL {
            assert!(matches!(map(a, &g, &p, 0), Err(Error::SizeMismatch { .. })));
        }
    }
}
