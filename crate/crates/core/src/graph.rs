//! Neighborhood graph on the candidate pool and its combinatorial Laplacian.
//!
//! The graph is a symmetrized k-nearest-neighbor graph; the Laplacian is the
//! unnormalized `L = D - W`, whose quadratic form `fᵀLf` is the pairwise
//! smoothness penalty `Σ w_ij (f_i - f_j)²`.

use ndarray::{Array2, ArrayView1, ArrayView2};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("need more points than neighbors: n = {n}, k = {k}")]
    TooFewPoints { n: usize, k: usize },
    #[error("neighbor count k must be at least 1")]
    ZeroNeighbors,
    #[error("invalid edge ({i}, {j}): {reason}")]
    InvalidEdge { i: usize, j: usize, reason: String },
}

/// Edge weighting rule for [`knn_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum EdgeWeight {
    /// Every edge has weight 1.
    #[default]
    Binary,
    /// Heat-kernel weight `exp(-‖x_i - x_j‖² / (2 t²))`.
    Heat { t: f64 },
}

/// Undirected weighted graph stored as an edge list with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl AdjacencyGraph {
    /// Validates and normalizes an edge list: endpoints in range and
    /// distinct, weights nonnegative, no duplicate pairs.
    pub fn new(n: usize, mut edges: Vec<(usize, usize, f64)>) -> Result<Self, GraphError> {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
            if e.0 == e.1 {
                return Err(GraphError::InvalidEdge {
                    i: e.0,
                    j: e.1,
                    reason: "self-loop".into(),
                });
            }
            if e.1 >= n {
                return Err(GraphError::InvalidEdge {
                    i: e.0,
                    j: e.1,
                    reason: format!("endpoint out of range for n = {n}"),
                });
            }
            if !(e.2 >= 0.0) {
                return Err(GraphError::InvalidEdge {
                    i: e.0,
                    j: e.1,
                    reason: format!("negative or NaN weight {}", e.2),
                });
            }
        }
        edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for w in edges.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(GraphError::InvalidEdge {
                    i: w[0].0,
                    j: w[0].1,
                    reason: "duplicate pair".into(),
                });
            }
        }
        Ok(AdjacencyGraph { n, edges })
    }

    pub fn edgeless(n: usize) -> Self {
        AdjacencyGraph {
            n,
            edges: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }
}

/// Dense unnormalized graph Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    values: Array2<f64>,
}

impl LaplacianMatrix {
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    /// The smoothness penalty `fᵀLf`.
    pub fn quadratic_form(&self, f: ArrayView1<f64>) -> f64 {
        let n = self.dim();
        debug_assert_eq!(f.len(), n);
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.values[(i, j)] * f[j];
            }
            acc += f[i] * row;
        }
        acc
    }
}

/// Symmetrized k-nearest-neighbor graph: edge `(i,j)` is present iff `j` is
/// among the `k` nearest Euclidean neighbors of `i` or vice versa. Distance
/// ties are broken by lower index.
pub fn knn_graph(
    points: ArrayView2<f64>,
    k: usize,
    weight: EdgeWeight,
) -> Result<AdjacencyGraph, GraphError> {
    let n = points.nrows();
    if k == 0 {
        return Err(GraphError::ZeroNeighbors);
    }
    if n <= k {
        return Err(GraphError::TooFewPoints { n, k });
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut dist_row = vec![0.0_f64; n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            let d2: f64 = points
                .row(i)
                .iter()
                .zip(points.row(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            dist_row[j] = d2;
        }
        order.clear();
        order.extend((0..n).filter(|&j| j != i));
        order.sort_by(|&a, &b| dist_row[a].total_cmp(&dist_row[b]).then(a.cmp(&b)));
        for &j in order.iter().take(k) {
            pairs.push((i.min(j), i.max(j)));
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    let edges = pairs
        .into_iter()
        .map(|(i, j)| {
            let w = match weight {
                EdgeWeight::Binary => 1.0,
                EdgeWeight::Heat { t } => {
                    let d2: f64 = points
                        .row(i)
                        .iter()
                        .zip(points.row(j).iter())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    (-d2 / (2.0 * t * t)).exp()
                }
            };
            (i, j, w)
        })
        .collect();
    AdjacencyGraph::new(n, edges)
}

/// `L = D - W` from the symmetric weight matrix and its degree diagonal.
pub fn laplacian(g: &AdjacencyGraph) -> LaplacianMatrix {
    let n = g.node_count();
    let mut values = Array2::zeros((n, n));
    for &(i, j, w) in g.edges() {
        values[(i, j)] -= w;
        values[(j, i)] -= w;
        values[(i, i)] += w;
        values[(j, j)] += w;
    }
    LaplacianMatrix { values }
}
