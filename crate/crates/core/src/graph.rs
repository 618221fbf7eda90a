//! Static directed networks.
//!
//! A [`Digraph`] stores, for every node `i`, the ordered list of nodes `j`
//! with an edge `(j, i)`: the nodes whose broadcasts `i` receives. Self-loops
//! are never stored; a node's own value is added by the consensus layer.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

pub mod robustness;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("node {node} lists itself as an in-neighbor")]
    SelfLoop { node: usize },
    #[error("node {node} lists in-neighbor {neighbor} more than once")]
    DuplicateNeighbor { node: usize, neighbor: usize },
    #[error("node {node} lists in-neighbor {neighbor}, outside [0, {n})")]
    NodeOutOfRange { node: usize, neighbor: usize, n: usize },
    #[error("in-degree {in_degree} out of range for {n} nodes (need 1 <= in_degree <= n-1)")]
    InDegreeOutOfRange { in_degree: usize, n: usize },
    #[error("exhaustive check infeasible: {n} nodes exceeds the limit of {limit}")]
    ExhaustiveCheckInfeasible { n: usize, limit: usize },
    #[error("robustness parameters must satisfy r >= 1 and s >= 1 (got r={r}, s={s})")]
    InvalidRobustnessParams { r: usize, s: usize },
}

/// Directed graph over nodes `0..n`, stored as in-neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    in_neighbors: Vec<Vec<usize>>,
}

impl Digraph {
    /// Builds a graph from explicit in-neighbor lists, checking that every
    /// index is in range and that no list has self-loops or duplicates.
    pub fn from_in_neighbors(in_neighbors: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let n = in_neighbors.len();
        let mut seen = vec![usize::MAX; n];
        for (node, list) in in_neighbors.iter().enumerate() {
            for &neighbor in list {
                if neighbor >= n {
                    return Err(GraphError::NodeOutOfRange { node, neighbor, n });
                }
                if neighbor == node {
                    return Err(GraphError::SelfLoop { node });
                }
                if seen[neighbor] == node {
                    return Err(GraphError::DuplicateNeighbor { node, neighbor });
                }
                seen[neighbor] = node;
            }
        }
        Ok(Self { in_neighbors })
    }

    /// Builds a graph from directed edges `(from, to)`; `from` becomes an
    /// in-neighbor of `to`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut lists = vec![Vec::new(); n];
        for &(from, to) in edges {
            if to >= n {
                return Err(GraphError::NodeOutOfRange { node: from, neighbor: to, n });
            }
            lists[to].push(from);
        }
        Self::from_in_neighbors(lists)
    }

    pub fn empty(n: usize) -> Self {
        Self { in_neighbors: vec![Vec::new(); n] }
    }

    /// Every node receives from every other node.
    pub fn complete(n: usize) -> Self {
        let in_neighbors = (0..n).map(|i| (0..n).filter(|&j| j != i).collect()).collect();
        Self { in_neighbors }
    }

    pub fn node_count(&self) -> usize {
        self.in_neighbors.len()
    }

    /// Nodes whose broadcasts node `i` receives. Never contains `i`.
    ///
    /// Panics if `i` is not a node of the graph.
    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.in_neighbors[i]
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.in_neighbors[i].len()
    }

    pub fn all_in_neighbors(&self) -> &[Vec<usize>] {
        &self.in_neighbors
    }

    /// Relabels nodes so that old node `i` becomes `perm[i]`.
    ///
    /// Panics if `perm` is not a permutation of `0..n`.
    pub fn relabel(&self, perm: &[usize]) -> Digraph {
        let n = self.node_count();
        assert_eq!(perm.len(), n, "permutation length must equal node count");
        let mut lists = vec![Vec::new(); n];
        for (old, list) in self.in_neighbors.iter().enumerate() {
            lists[perm[old]] = list.iter().map(|&j| perm[j]).collect();
        }
        Digraph::from_in_neighbors(lists).expect("relabeling by a permutation preserves validity")
    }
}

/// Random digraph in which every node draws exactly `in_degree` distinct
/// in-neighbors uniformly, without replacement, from the other `n - 1` nodes.
pub fn generate_random_digraph<R: Rng + ?Sized>(
    n: usize,
    in_degree: usize,
    rng: &mut R,
) -> Result<Digraph, GraphError> {
    if in_degree == 0 || in_degree >= n {
        return Err(GraphError::InDegreeOutOfRange { in_degree, n });
    }
    let in_neighbors = (0..n)
        .map(|i| {
            index::sample(rng, n - 1, in_degree)
                .into_iter()
                // skip over i itself
                .map(|j| if j >= i { j + 1 } else { j })
                .collect()
        })
        .collect();
    Ok(Digraph { in_neighbors })
}
