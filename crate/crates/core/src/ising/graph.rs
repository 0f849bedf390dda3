use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple graph on nodes `0..p`. Edges are stored as `(v, w)`
/// with `v < w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    p: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn empty(p: usize) -> Self {
        Graph {
            p,
            edges: BTreeSet::new(),
        }
    }

    /// Builds a graph, rejecting self-loops, out-of-range endpoints and
    /// duplicate edges (in either orientation).
    pub fn new(p: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::empty(p);
        for (v, w) in edges {
            if !g.insert(v, w)? {
                return Err(Error::invalid(format!("duplicate edge {{{v},{w}}}")));
            }
        }
        Ok(g)
    }

    pub fn complete(p: usize) -> Self {
        let mut g = Graph::empty(p);
        for v in 0..p {
            for w in v + 1..p {
                g.edges.insert((v, w));
            }
        }
        g
    }

    /// Inserts `{v, w}`; returns false when it was already present.
    pub fn insert(&mut self, v: usize, w: usize) -> Result<bool> {
        if v == w {
            return Err(Error::invalid(format!("self-loop at node {v}")));
        }
        if v >= self.p || w >= self.p {
            return Err(Error::invalid(format!(
                "edge {{{v},{w}}} out of range for p = {}",
                self.p
            )));
        }
        Ok(self.edges.insert(ordered(v, w)))
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, v: usize, w: usize) -> bool {
        v != w && self.edges.contains(&ordered(v, w))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Neighbors of `v` in increasing order.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.p];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.p == other.p && self.edges.is_subset(&other.edges)
    }

    /// Relabels node `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.p, "permutation length must equal p");
        Graph {
            p: self.p,
            edges: self.edges.iter().map(|&(a, b)| ordered(perm[a], perm[b])).collect(),
        }
    }

    /// Subgraph induced by `keep` (increasing original labels), relabeled
    /// to `0..keep.len()`.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.p];
        for (new, &old) in keep.iter().enumerate() {
            index[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                let (na, nb) = (index[a], index[b]);
                (na != usize::MAX && nb != usize::MAX).then(|| ordered(na, nb))
            })
            .collect();
        Graph { p: keep.len(), edges }
    }
}

fn ordered(v: usize, w: usize) -> (usize, usize) {
    if v < w {
        (v, w)
    } else {
        (w, v)
    }
}
