//! Web-graph loading, the column-stochastic transition matrix and dataset
//! statistics.
//!
//! A stored edge `(j, i)` means node `j` links to node `i`, i.e. the binary
//! link matrix has `G(i, j) = 1`. The transition matrix keeps the same
//! orientation: `P(i, j) = 1 / out_degree(j)` for every stored edge `(j, i)`.

mod cache;
mod edge_list;
mod matrix_market;

use std::collections::HashSet;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub use cache::{read_cache, read_cache_from, write_cache, write_cache_to, CACHE_MAGIC};
pub use edge_list::{parse_edge_list, parse_edge_list_str, write_edge_list};
pub use matrix_market::{
    parse_matrix_market, parse_matrix_market_str, read_matrix_market_operator,
    read_matrix_market_operator_str,
};

/// Directed graph with contiguous 0-based node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    out_degree: Vec<u32>,
    original_ids: Vec<u64>,
}

impl Graph {
    /// Builds a graph from `(source, destination)` pairs. Duplicate pairs are
    /// collapsed keeping the first occurrence; self-loops are kept.
    ///
    /// `original_ids` maps each internal id to the id it carried in the input
    /// file; pass `None` to use the identity.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
        original_ids: Option<Vec<u64>>,
    ) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "{n} nodes exceed the supported maximum of {}",
                u32::MAX
            )));
        }
        let original_ids = match original_ids {
            Some(ids) if ids.len() != n => {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: ids.len(),
                })
            }
            Some(ids) => ids,
            None => (0..n as u64).collect(),
        };

        let mut seen = HashSet::new();
        let mut out_degree = vec![0u32; n];
        let mut kept = Vec::new();
        for (src, dst) in edges {
            for idx in [src, dst] {
                if idx as usize >= n {
                    return Err(Error::IndexOutOfBounds {
                        index: idx as u64,
                        dim: n as u64,
                        line: 0,
                    });
                }
            }
            if seen.insert((src, dst)) {
                out_degree[src as usize] += 1;
                kept.push((src, dst));
            }
        }

        Ok(Self {
            n,
            edges: kept,
            out_degree,
            original_ids,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn nnz(&self) -> usize {
        self.edges.len()
    }

    pub fn out_degree(&self) -> &[u32] {
        &self.out_degree
    }

    /// Id of node `i` as it appeared in the source file.
    pub fn original_id(&self, i: usize) -> u64 {
        self.original_ids[i]
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }
}

/// Table-style dataset characteristics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub nnz: usize,
    /// Number of dangling nodes (zero columns of the transition matrix).
    pub zcol: usize,
    /// Mean number of nonzeros per row.
    pub a_nz: f64,
    /// Density in percent.
    pub den: f64,
}

pub fn graph_stats(graph: &Graph) -> Result<GraphStats> {
    let n = graph.n();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let nnz = graph.nnz();
    let zcol = graph.out_degree().iter().filter(|&&d| d == 0).count();
    let nf = n as f64;
    Ok(GraphStats {
        n,
        nnz,
        zcol,
        a_nz: nnz as f64 / nf,
        den: nnz as f64 / (nf * nf) * 100.0,
    })
}

/// Sparse column-stochastic transition matrix stored by destination row, so
/// that `y = P x` streams one row of sources per output entry.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    sources: Vec<u32>,
    values: Vec<f64>,
    dangling: Vec<bool>,
}

pub fn build_transition(graph: &Graph) -> TransitionMatrix {
    let n = graph.n();
    let mut row_ptr = vec![0usize; n + 1];
    for &(_, dst) in graph.edges() {
        row_ptr[dst as usize + 1] += 1;
    }
    for i in 0..n {
        row_ptr[i + 1] += row_ptr[i];
    }

    let mut fill = row_ptr.clone();
    let mut sources = vec![0u32; graph.nnz()];
    for &(src, dst) in graph.edges() {
        let slot = &mut fill[dst as usize];
        sources[*slot] = src;
        *slot += 1;
    }
    for i in 0..n {
        sources[row_ptr[i]..row_ptr[i + 1]].sort_unstable();
    }

    let inv_degree: Vec<f64> = graph
        .out_degree()
        .iter()
        .map(|&d| if d == 0 { 0.0 } else { 1.0 / d as f64 })
        .collect();
    let values = sources.iter().map(|&j| inv_degree[j as usize]).collect();
    let dangling = graph.out_degree().iter().map(|&d| d == 0).collect();

    TransitionMatrix {
        n,
        row_ptr,
        sources,
        values,
        dangling,
    }
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.sources.len()
    }

    /// Dangling indicator `d`: true for nodes without out-links.
    pub fn dangling(&self) -> &[bool] {
        &self.dangling
    }

    /// `(source, value)` entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.sources[range.clone()]
            .iter()
            .zip(&self.values[range])
            .map(|(&j, &v)| (j as usize, v))
    }

    /// Entry `P(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.sources[range.clone()].binary_search(&(j as u32)) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }

    /// `y[i] = (P x)[i]` for the rows covered by `y`, starting at `first_row`.
    pub(crate) fn mul_rows(&self, x: &[f64], y: &mut [f64], first_row: usize) {
        for (offset, yi) in y.iter_mut().enumerate() {
            let i = first_row + offset;
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.sources[k] as usize];
            }
            *yi = acc;
        }
    }

    /// Column sums of `P`, accumulated in row order.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for (&j, &v) in self.sources.iter().zip(&self.values) {
            sums[j as usize] += v;
        }
        sums
    }

    /// Frobenius norm squared.
    pub fn frobenius_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Snap,
    MatrixMarket,
    Cache,
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snap" | "edges" | "edge-list" => Ok(Self::Snap),
            "mtx" | "mm" | "matrix-market" => Ok(Self::MatrixMarket),
            "cache" | "prnk" => Ok(Self::Cache),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

impl GraphFormat {
    /// Guesses the format from the file extension; anything unknown is
    /// treated as a SNAP edge list.
    pub fn detect(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("mtx") => Self::MatrixMarket,
            Some("prnk") => Self::Cache,
            _ => Self::Snap,
        }
    }
}

pub fn load_graph(path: &Path, format: Option<GraphFormat>) -> Result<Graph> {
    let format = format.unwrap_or_else(|| GraphFormat::detect(path));
    match format {
        GraphFormat::Cache => read_cache(path),
        GraphFormat::Snap => parse_edge_list(BufReader::new(File::open(path)?)),
        GraphFormat::MatrixMarket => parse_matrix_market(BufReader::new(File::open(path)?)),
    }
}
