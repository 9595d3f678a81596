#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use prnk_core::dense_small::DenseMatrix;
use prnk_core::graph_io::{build_transition, Graph, TransitionMatrix};
use prnk_core::operator::{CsrMatrix, GoogleOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random directed graph: each node is dangling with probability
/// `dangling`, otherwise it links to `1..=2*degree-1` uniformly chosen
/// targets (mean `degree`; duplicates collapse).
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, degree: usize, dangling: f64) -> Graph {
    let mut edges = Vec::new();
    for s in 0..n {
        if rng.gen_bool(dangling) {
            continue;
        }
        let k = rng.gen_range(1..=2 * degree - 1);
        for _ in 0..k {
            edges.push((s as u32, rng.gen_range(0..n) as u32));
        }
    }
    Graph::from_edges(n, edges, None).unwrap()
}

pub fn google(graph: &Graph, alpha: f64) -> GoogleOperator {
    GoogleOperator::new(Arc::new(build_transition(graph)), alpha).unwrap()
}

pub fn transition(graph: &Graph) -> Arc<TransitionMatrix> {
    Arc::new(build_transition(graph))
}

/// Dense Google matrix assembled straight from the edge list with the
/// uniform teleport vector.
pub fn dense_google(graph: &Graph, alpha: f64) -> Vec<Vec<f64>> {
    let n = graph.n();
    let mut g = vec![vec![0.0; n]; n];
    for &(s, d) in graph.edges() {
        g[d as usize][s as usize] = 1.0;
    }
    let v = 1.0 / n as f64;
    let mut a = vec![vec![0.0; n]; n];
    for j in 0..n {
        let deg: f64 = (0..n).map(|i| g[i][j]).sum();
        for i in 0..n {
            let link = if deg > 0.0 { g[i][j] / deg } else { v };
            a[i][j] = alpha * link + (1.0 - alpha) * v;
        }
    }
    a
}

pub fn dense_apply(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

pub fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn dense_residual(a: &[Vec<f64>], x: &[f64]) -> f64 {
    let ax = dense_apply(a, x);
    ax.iter().zip(x).map(|(p, q)| (p - q).abs()).sum::<f64>() / norm1(x)
}

/// Power iteration on the dense matrix until successive iterates differ by
/// less than `tol` in the 1-norm.
pub fn dense_power_oracle(a: &[Vec<f64>], tol: f64) -> Vec<f64> {
    let n = a.len();
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..100_000 {
        let mut y = dense_apply(a, &x);
        let s = norm1(&y);
        y.iter_mut().for_each(|v| *v /= s);
        let diff: f64 = x.iter().zip(&y).map(|(p, q)| (p - q).abs()).sum();
        x = y;
        if diff < tol {
            return x;
        }
    }
    panic!("dense oracle did not converge");
}

pub fn random_sparse(rng: &mut ChaCha8Rng, n: usize, per_row: usize) -> CsrMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, rng.gen_range(-1.0..1.0)));
        for _ in 0..per_row {
            t.push((i, rng.gen_range(0..n), rng.gen_range(-1.0..1.0)));
        }
    }
    CsrMatrix::from_triplets(n, n, t).unwrap()
}

pub fn random_dense(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = rng.gen_range(-1.0..1.0);
        }
    }
    m
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Directory holding the large benchmark graphs (`PRNK_DATA_DIR`, default
/// `data/` at the workspace root).
pub fn data_dir() -> PathBuf {
    std::env::var_os("PRNK_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

/// First existing file among `names` in the data directory.
pub fn dataset(names: &[&str]) -> Option<PathBuf> {
    let dir = data_dir();
    names.iter().map(|n| dir.join(n)).find(|p| p.is_file())
}

pub fn slashdot() -> Option<PathBuf> {
    dataset(&["soc-Slashdot0902.txt", "soc-Slashdot0902.prnk"])
}

pub fn west0479() -> Option<PathBuf> {
    dataset(&["west0479.mtx", "west0479/west0479.mtx"])
}
