#pragma once

#include "graphspde/graph.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace graphspde {

/// Eigendecomposition of a graph Laplacian. Eigenvalues ascend and are
/// clamped at 0 against roundoff; eigenvector columns are orthonormal.
struct SpectralBasis {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    LaplacianKind laplacian_kind = LaplacianKind::combinatorial;

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Dense cyclic-Jacobi eigendecomposition (desk-scale path). Throws when the
/// matrix dimension exceeds `cap`; callers above the cap should use the
/// Chebyshev filter path instead.
SpectralBasis eigendecompose(const Eigen::SparseMatrix<double>& L,
                             LaplacianKind kind = LaplacianKind::combinatorial,
                             int cap = 2000);

/// Jacobi kernel on a dense symmetric matrix: returns ascending eigenvalues
/// and orthonormal eigenvectors. Off-diagonal Frobenius tolerance is relative
/// to the input norm.
void jacobi_eigen(const Eigen::MatrixXd& A, Eigen::VectorXd& values,
                  Eigen::MatrixXd& vectors, double tol = 1e-12,
                  int max_sweeps = 100);

} // namespace graphspde
