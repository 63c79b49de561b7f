//! Natural undirected graphs (NUGs) over areal units.
//!
//! Lattice vertices are numbered in row-major order: the unit in row `r`,
//! column `c` (both 0-based) is vertex `r * cols + c`. Boundaries are free, so
//! border units have truncated neighborhoods. Edges are stored once as
//! `(i, j)` with `i < j`, sorted lexicographically.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Neighborhood structure of a regular lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    /// Units sharing a border (up, down, left, right).
    First,
    /// Units sharing a border or a corner.
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nug {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    adjacency: Vec<usize>,
    dims: Option<(usize, usize)>,
}

impl Nug {
    /// Builds the neighborhood graph of a `rows x cols` lattice.
    pub fn lattice(rows: usize, cols: usize, order: Order) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "lattice dimensions must be positive, got {rows}x{cols}"
            )));
        }
        let idx = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let i = idx(r, c);
                // Emitted in increasing j so the list comes out sorted.
                if c + 1 < cols {
                    edges.push((i, idx(r, c + 1)));
                }
                if r + 1 < rows {
                    if order == Order::Second && c > 0 {
                        edges.push((i, idx(r + 1, c - 1)));
                    }
                    edges.push((i, idx(r + 1, c)));
                    if order == Order::Second && c + 1 < cols {
                        edges.push((i, idx(r + 1, c + 1)));
                    }
                }
            }
        }
        let mut nug = Self::from_sorted_edges(rows * cols, edges);
        nug.dims = Some((rows, cols));
        Ok(nug)
    }

    /// Builds a graph from an arbitrary edge list.
    ///
    /// Pairs may be given in either orientation; self-loops, duplicate edges
    /// and out-of-range endpoints are rejected.
    pub fn from_edges(n_vertices: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            if a >= n_vertices || b >= n_vertices {
                return Err(Error::invalid(format!(
                    "edge ({a}, {b}) references a vertex outside 0..{n_vertices}"
                )));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at vertex {a}")));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("duplicate edge {:?}", w[0])));
        }
        Ok(Self::from_sorted_edges(n_vertices, edges))
    }

    fn from_sorted_edges(n_vertices: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut degree = alloc::vec![0usize; n_vertices];
        for &(i, j) in &edges {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut offsets = Vec::with_capacity(n_vertices + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut adjacency = alloc::vec![0usize; 2 * edges.len()];
        for &(i, j) in &edges {
            adjacency[fill[i]] = j;
            fill[i] += 1;
            adjacency[fill[j]] = i;
            fill[j] += 1;
        }
        for v in 0..n_vertices {
            adjacency[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Nug {
            n_vertices,
            edges,
            offsets,
            adjacency,
            dims: None,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list, `i < j`, lexicographically sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(rows, cols)` when the graph was built as a lattice.
    pub fn dims(&self) -> Option<(usize, usize)> {
        self.dims
    }

    /// Checked neighbor lookup.
    pub fn neighbors(&self, i: usize) -> Result<&[usize]> {
        if i >= self.n_vertices {
            return Err(Error::invalid(format!(
                "vertex {i} out of range 0..{}",
                self.n_vertices
            )));
        }
        Ok(self.neighbors_of(i))
    }

    /// Unchecked neighbor lookup for hot loops; panics when `i` is out of range.
    #[inline]
    pub fn neighbors_of(&self, i: usize) -> &[usize] {
        &self.adjacency[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }
}
