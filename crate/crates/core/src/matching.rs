//! Maximum-cardinality bipartite matching (Hopcroft–Karp).
//!
//! Adjacency lists are kept sorted, and both the BFS layering and the DFS
//! augmentation visit vertices in index order, so the returned matching is a
//! deterministic function of the graph.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    left_size: usize,
    right_size: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left_size: usize, right_size: usize) -> Self {
        Self {
            left_size,
            right_size,
            adj: vec![Vec::new(); left_size],
        }
    }

    pub fn from_edges<I>(left_size: usize, right_size: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::new(left_size, right_size);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        g.finish();
        Ok(g)
    }

    /// Adds an edge; call [`BipartiteGraph::finish`] once all edges are in.
    pub fn add_edge(&mut self, left: usize, right: usize) -> Result<()> {
        if left >= self.left_size {
            return Err(Error::IndexOutOfRange {
                index: left,
                limit: self.left_size,
            });
        }
        if right >= self.right_size {
            return Err(Error::IndexOutOfRange {
                index: right,
                limit: self.right_size,
            });
        }
        self.adj[left].push(right);
        Ok(())
    }

    /// Sorts and deduplicates adjacency lists.
    pub fn finish(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
            list.dedup();
        }
    }

    pub fn left_size(&self) -> usize {
        self.left_size
    }

    pub fn right_size(&self) -> usize {
        self.right_size
    }

    pub fn neighbors(&self, left: usize) -> &[usize] {
        &self.adj[left]
    }

    pub fn has_edge(&self, left: usize, right: usize) -> bool {
        self.adj[left].binary_search(&right).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }
}

/// A set of vertex-disjoint edges, sorted by left endpoint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Every pair is an edge of `g` and no vertex is used twice.
    pub fn is_valid_for(&self, g: &BipartiteGraph) -> bool {
        let mut left_used = vec![false; g.left_size()];
        let mut right_used = vec![false; g.right_size()];
        self.pairs.iter().all(|&(u, v)| {
            u < g.left_size()
                && v < g.right_size()
                && g.has_edge(u, v)
                && !std::mem::replace(&mut left_used[u], true)
                && !std::mem::replace(&mut right_used[v], true)
        })
    }
}

const UNMATCHED: usize = usize::MAX;

pub fn max_matching(g: &BipartiteGraph) -> Matching {
    let n_left = g.left_size();
    let mut match_left = vec![UNMATCHED; n_left];
    let mut match_right = vec![UNMATCHED; g.right_size()];
    let mut dist = vec![usize::MAX; n_left];

    loop {
        // Layer the graph from every free left vertex.
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_left[u] == UNMATCHED {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found_free = false;
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                let w = match_right[v];
                if w == UNMATCHED {
                    found_free = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found_free {
            break;
        }

        let mut next_edge = vec![0usize; n_left];
        let mut augmented = false;
        for u in 0..n_left {
            if match_left[u] == UNMATCHED
                && augment(
                    g,
                    u,
                    &mut match_left,
                    &mut match_right,
                    &mut dist,
                    &mut next_edge,
                )
            {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }

    Matching::new(
        match_left
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != UNMATCHED)
            .map(|(u, &v)| (u, v))
            .collect(),
    )
}

/// Searches for a shortest augmenting path from `u` along the BFS layers.
fn augment(
    g: &BipartiteGraph,
    u: usize,
    match_left: &mut [usize],
    match_right: &mut [usize],
    dist: &mut [usize],
    next_edge: &mut [usize],
) -> bool {
    let neighbors = g.neighbors(u);
    while next_edge[u] < neighbors.len() {
        let v = neighbors[next_edge[u]];
        next_edge[u] += 1;
        let w = match_right[v];
        let ok = if w == UNMATCHED {
            true
        } else {
            dist[w] == dist[u] + 1 && augment(g, w, match_left, match_right, dist, next_edge)
        };
        if ok {
            match_left[u] = v;
            match_right[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

/// Whether `m` covers every vertex of a balanced graph.
pub fn is_perfect(g: &BipartiteGraph, m: &Matching) -> bool {
    g.left_size() == g.right_size() && m.len() == g.left_size() && m.is_valid_for(g)
}
