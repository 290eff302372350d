//! The candidate pool: ambient points plus the kernel and graph structures
//! derived from them once and shared by every consumer.

use crate::graph::{knn_graph, laplacian, AdjacencyGraph, EdgeWeight, GraphError, LaplacianMatrix};
use crate::kernels::{gram, GramMatrix, KernelError, KernelSpec};
use ndarray::{Array2, ArrayView2};
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoolError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph has {graph_nodes} nodes but the pool has {pool_points} points")]
    GraphSizeMismatch {
        graph_nodes: usize,
        pool_points: usize,
    },
}

/// The design space: `n` candidate points with their Gram matrix and graph
/// Laplacian. Labels are deliberately not part of the pool; selection
/// strategies must work from geometry alone.
#[derive(Debug, Clone)]
pub struct CandidatePool {
    points: Arc<Array2<f64>>,
    kernel: KernelSpec,
    gram: GramMatrix,
    laplacian: LaplacianMatrix,
    smoothed_gram: OnceLock<Array2<f64>>,
}

impl CandidatePool {
    /// Builds the pool with a symmetrized kNN graph on the points.
    pub fn build(
        points: Array2<f64>,
        kernel: KernelSpec,
        knn_k: usize,
        weight: EdgeWeight,
    ) -> Result<Self, PoolError> {
        let graph = knn_graph(points.view(), knn_k, weight)?;
        Self::with_graph(points, kernel, &graph)
    }

    /// Builds the pool around a caller-supplied graph (useful for pools too
    /// small for a kNN graph, or for custom adjacency).
    pub fn with_graph(
        points: Array2<f64>,
        kernel: KernelSpec,
        graph: &AdjacencyGraph,
    ) -> Result<Self, PoolError> {
        if graph.node_count() != points.nrows() {
            return Err(PoolError::GraphSizeMismatch {
                graph_nodes: graph.node_count(),
                pool_points: points.nrows(),
            });
        }
        let gram = gram(&kernel, points.view(), points.view())?;
        let laplacian = laplacian(graph);
        Ok(CandidatePool {
            points: Arc::new(points),
            kernel,
            gram,
            laplacian,
            smoothed_gram: OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn ambient_dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> ArrayView2<'_, f64> {
        self.points.view()
    }

    pub fn points_shared(&self) -> Arc<Array2<f64>> {
        Arc::clone(&self.points)
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn laplacian(&self) -> &LaplacianMatrix {
        &self.laplacian
    }

    /// `K L K`, the manifold-smoothness operator in coefficient space.
    /// Computed on first use and cached; the product is the single most
    /// expensive assembly in the pipeline.
    pub fn smoothed_gram(&self) -> &Array2<f64> {
        self.smoothed_gram.get_or_init(|| {
            let k = self.gram.values();
            let lk = self.laplacian.values().dot(k);
            let klk = k.dot(&lk);
            // the product is symmetric only up to roundoff
            let mut s = klk;
            for i in 0..s.nrows() {
                for j in 0..i {
                    let m = 0.5 * (s[(i, j)] + s[(j, i)]);
                    s[(i, j)] = m;
                    s[(j, i)] = m;
                }
            }
            s
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn build_derives_gram_and_laplacian() {
        let pts = arr2(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 2.0]]);
        let pool = CandidatePool::build(pts, KernelSpec::rbf(1.0).unwrap(), 2, EdgeWeight::Binary)
            .unwrap();
        assert_eq!(pool.len(), 4);
        assert_eq!(pool.gram().values().nrows(), 4);
        assert_eq!(pool.laplacian().dim(), 4);
    }

    #[test]
    fn graph_size_must_match() {
        let pts = arr2(&[[0.0], [1.0]]);
        let g = crate::graph::AdjacencyGraph::edgeless(3);
        let err = CandidatePool::with_graph(pts, KernelSpec::linear(), &g).unwrap_err();
        assert!(matches!(err, PoolError::GraphSizeMismatch { .. }));
    }

    #[test]
    fn smoothed_gram_is_symmetric() {
        let pts = arr2(&[[0.0, 0.0], [0.5, 0.1], [1.0, 0.4], [0.2, 0.9], [0.8, 0.8]]);
        let pool = CandidatePool::build(pts, KernelSpec::rbf(0.7).unwrap(), 2, EdgeWeight::Binary)
            .unwrap();
        let s = pool.smoothed_gram();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(s[(i, j)], s[(j, i)]);
            }
        }
    }
}
