// SPDX-License-Identifier: Apache-2.0

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Rejects self-loops, out-of-range endpoints and repeated edges.
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (k, &(u, v)) in edges.iter().enumerate() {
            if u == v {
                return Err(Error::invalid(format!("edge {k} is a self-loop at vertex {u}")));
            }
            if u >= n_vertices || v >= n_vertices {
                return Err(Error::invalid(format!(
                    "edge {k} = ({u}, {v}) references a vertex outside 0..{n_vertices}"
                )));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::invalid(format!("edge {k} = ({u}, {v}) is repeated")));
            }
        }
        Ok(Graph { n_vertices, edges })
    }

    /// Path `0 − 1 − … − (n−1)`.
    pub fn path(n: usize) -> Self {
        Graph {
            n_vertices: n,
            edges: (1..n).map(|v| (v - 1, v)).collect(),
        }
    }

    /// Star with hub `0` and `k` leaves.
    pub fn star(k: usize) -> Self {
        Graph {
            n_vertices: k + 1,
            edges: (1..=k).map(|v| (0, v)).collect(),
        }
    }

    /// Hypercube `Q_k`: vertices are bit strings, edges join strings at
    /// Hamming distance one.
    pub fn hypercube(k: u32) -> Self {
        let n = 1usize << k;
        let mut edges = Vec::new();
        for u in 0..n {
            for b in 0..k {
                let v = u ^ (1 << b);
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        Graph { n_vertices: n, edges }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }
}

/// Edge classes such that no two edges in a class share a vertex.
/// Classes hold indices into [`Graph::edges`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    classes: Vec<Vec<usize>>,
}

impl EdgeColoring {
    pub fn new(classes: Vec<Vec<usize>>, graph: &Graph) -> Result<Self> {
        let c = EdgeColoring { classes };
        c.verify(graph)?;
        Ok(c)
    }

    pub fn n_colors(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Check that the classes partition the edges and are matchings.
    pub fn verify(&self, graph: &Graph) -> Result<()> {
        let m = graph.edges().len();
        let mut used = vec![false; m];
        for (c, class) in self.classes.iter().enumerate() {
            let mut touched = HashSet::new();
            for &e in class {
                if e >= m {
                    return Err(Error::invalid(format!("color {c} names edge {e}, graph has {m}")));
                }
                if std::mem::replace(&mut used[e], true) {
                    return Err(Error::invalid(format!("edge {e} is colored twice")));
                }
                let (u, v) = graph.edges()[e];
                if !touched.insert(u) || !touched.insert(v) {
                    return Err(Error::invalid(format!("color {c} has two edges sharing a vertex")));
                }
            }
        }
        if let Some(e) = used.iter().position(|&u| !u) {
            return Err(Error::invalid(format!("edge {e} has no color")));
        }
        Ok(())
    }
}

/// First-fit coloring in edge order: each edge takes the smallest color not
/// already present at either endpoint. Uses at most `2Δ − 1` colors.
pub fn greedy_edge_coloring(graph: &Graph) -> EdgeColoring {
    let mut at_vertex: Vec<HashSet<usize>> = vec![HashSet::new(); graph.n_vertices()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (e, &(u, v)) in graph.edges().iter().enumerate() {
        let c = (0..)
            .find(|c| !at_vertex[u].contains(c) && !at_vertex[v].contains(c))
            .expect("unbounded search");
        if c == classes.len() {
            classes.push(Vec::new());
        }
        classes[c].push(e);
        at_vertex[u].insert(c);
        at_vertex[v].insert(c);
    }
    EdgeColoring { classes }
}
