//! Undirected communication topology.
//!
//! Nodes are numbered 1..=n. The Laplacian L = D - A with unit edge weights
//! drives the dynamic average consensus estimator; its fast dynamics in
//! stretched time form the block matrix returned by
//! [`boundary_layer_matrix`], and [`reduced_boundary_layer`] projects out
//! the Laplacian kernel direction to expose the Hurwitz core that the
//! imperfect-information rule relies on.

use crate::linalg::Matrix;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) is out of range for {2} nodes (nodes are 1..=n)")]
    EdgeOutOfRange(usize, usize, usize),
    #[error("self-loop at node {0} is not allowed")]
    SelfLoop(usize),
    #[error("graph is disconnected")]
    Disconnected,
}

/// Undirected graph on nodes 1..=n with an explicit edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    /// Build from an edge list; edges are stored unordered, duplicates merge.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for &(i, j) in edges {
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            if i < 1 || j < 1 || i > n || j > n {
                return Err(GraphError::EdgeOutOfRange(i, j, n));
            }
            set.insert((i.min(j), i.max(j)));
        }
        Ok(Graph { n, edges: set })
    }

    /// Cycle graph 1-2-...-n-1.
    pub fn cycle(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..=n).map(|i| (i, i % n + 1)).collect();
        Graph::new(n, &edges).expect("cycle edges are valid")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == i || b == i)
            .count()
    }

    /// Laplacian L = D - A; symmetric with zero row sums.
    pub fn laplacian(&self) -> Matrix {
        let mut l = Matrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            let (i, j) = (i - 1, j - 1);
            l[(i, i)] += 1.0;
            l[(j, j)] += 1.0;
            l[(i, j)] -= 1.0;
            l[(j, i)] -= 1.0;
        }
        l
    }

    /// Breadth-first connectivity test.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i - 1].push(j - 1);
            adj[j - 1].push(i - 1);
        }
        let mut seen = vec![false; self.n];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Fast-subsystem matrix of the consensus estimator in stretched time:
    ///
    /// ```text
    /// [ -I - L   -L ]
    /// [    L      0 ]
    /// ```
    ///
    /// acting on stacked (eta, omega). Requires a connected graph.
    pub fn boundary_layer_matrix(&self) -> Result<Matrix, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let n = self.n;
        let l = self.laplacian();
        let mut bl = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                bl[(i, j)] = -l[(i, j)];
                bl[(i, n + j)] = -l[(i, j)];
                bl[(n + i, j)] = l[(i, j)];
            }
            bl[(i, i)] -= 1.0;
        }
        Ok(bl)
    }

    /// Boundary-layer matrix with the Laplacian kernel direction of the
    /// omega block projected out:
    ///
    /// ```text
    /// [ -I - L    -L R~ ]
    /// [ R~^T L      0   ]
    /// ```
    ///
    /// where [R~, r] is an orthonormal completion of r = 1/sqrt(n). For a
    /// connected graph this (2n-1) x (2n-1) matrix is Hurwitz.
    pub fn reduced_boundary_layer(&self) -> Result<Matrix, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let n = self.n;
        let l = self.laplacian();
        let rt = orthonormal_completion(n);
        let l_rt = &l * &rt;
        let mut out = Matrix::zeros(2 * n - 1, 2 * n - 1);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = -l[(i, j)];
            }
            out[(i, i)] -= 1.0;
            for j in 0..n - 1 {
                out[(i, n + j)] = -l_rt[(i, j)];
                out[(n + j, i)] = l_rt[(i, j)];
            }
        }
        Ok(out)
    }
}

/// Gram-Schmidt completion of r = 1/sqrt(n): returns the n x (n-1) matrix
/// R~ whose columns are orthonormal and orthogonal to the all-ones vector.
fn orthonormal_completion(n: usize) -> Matrix {
    let r: Vec<f64> = vec![1.0 / (n as f64).sqrt(); n];
    let mut basis: Vec<Vec<f64>> = vec![r];
    for k in 0..n {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        // two passes of classical Gram-Schmidt for orthogonality at
        // working precision
        for _ in 0..2 {
            for b in &basis {
                let dot: f64 = b.iter().zip(&v).map(|(a, c)| a * c).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= dot * bi;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            basis.push(v);
        }
        if basis.len() == n {
            break;
        }
    }
    assert_eq!(basis.len(), n, "orthonormal completion failed");
    Matrix::from_fn(n, n - 1, |i, j| basis[j + 1][i])
}
