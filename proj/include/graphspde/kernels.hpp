#pragma once

#include "graphspde/graph.hpp"
#include "graphspde/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>

namespace graphspde {

enum class KernelFamily { matern, rbf };

/// Matern / RBF kernel parameterization. The Matern spectral density is
/// phi(lambda) = (2 nu / kappa^2 + lambda)^(-nu); the RBF (heat) density is
/// exp(-kappa^2 lambda / 2). `normalize` rescales the covariance to unit
/// mean diagonal.
struct KernelSpec {
    KernelFamily family = KernelFamily::matern;
    double nu = 1.0;
    double kappa = 1.0;
    bool normalize = false;

    void validate() const;
};

/// Scalar spectral density phi(lambda) for a kernel spec.
double kernel_phi(const KernelSpec& spec, double lambda);

/// Dense symmetric PSD covariance with an optional cached Cholesky factor.
struct CovMatrix {
    Eigen::MatrixXd K;
    std::optional<Eigen::MatrixXd> chol; // lower triangular

    int size() const { return static_cast<int>(K.rows()); }
};

/// K = U diag(phi(lambda_k)) U^T for the Matern density.
CovMatrix matern_kernel_exact(const SpectralBasis& basis, const KernelSpec& spec);

/// K = U diag(exp(-kappa^2 lambda_k / 2)) U^T.
CovMatrix rbf_kernel_exact(const SpectralBasis& basis, double kappa,
                           bool normalize = false);

CovMatrix kernel_exact(const SpectralBasis& basis, const KernelSpec& spec);

/// Degree-m Chebyshev representation of a spectral density on
/// [0, lambda_max_bound]. Coefficients are for sum_k c_k T_k(x) under the
/// affine map lambda = (x + 1) lambda_max_bound / 2.
struct ChebKernel {
    int degree = 0;
    Eigen::VectorXd coefficients; // c_0 .. c_m
    double lambda_max_bound = 0.0;
    KernelSpec spec;
};

/// Coefficients by cosine quadrature at m+1 first-kind Chebyshev nodes
/// (equivalently, interpolation at those nodes).
ChebKernel chebyshev_fit_fn(const std::function<double(double)>& phi, int degree,
                            double lambda_max_bound);

/// Fits phi(lambda)^power for the kernel spec; power = 0.5 gives the
/// half-power filter used for sampling. Normalization is deferred to the
/// caller (the density itself is fitted).
ChebKernel chebyshev_fit(const KernelSpec& spec, int degree,
                         double lambda_max_bound, double power = 1.0);

/// sum_k c_k T_k(L~) v via the three-term recurrence with
/// L~ = 2 L / lambda_max_bound - I. Cost O(m |E|).
Eigen::VectorXd chebyshev_apply(const Eigen::SparseMatrix<double>& L,
                                const ChebKernel& k, const Eigen::VectorXd& v);

/// Column-wise filter application.
Eigen::MatrixXd chebyshev_apply(const Eigen::SparseMatrix<double>& L,
                                const ChebKernel& k, const Eigen::MatrixXd& V);

/// Evaluate the fitted polynomial at a scalar lambda (diagnostics / tests).
double chebyshev_eval(const ChebKernel& k, double lambda);

/// Geometric bound on the Chebyshev approximation error of the Matern
/// density: rho^(-m) with rho = 16 nu / (kappa^2 d_max) + 1.
double cheb_error_bound(double nu, double kappa, double d_max, int m);

/// Spectral upper bound for rescaling: min(2 d_max, power-iteration
/// estimate * 1.01). The Gershgorin term guarantees validity.
double lambda_max_bound(const Graph& g, const Eigen::SparseMatrix<double>& L);

/// Lower factor of K + jitter I with jitter escalated x10 from `jitter` up
/// to 1e-6; throws if the matrix is not PSD even at the maximum jitter.
Eigen::MatrixXd cholesky(const Eigen::MatrixXd& K, double jitter = 1e-12);

} // namespace graphspde
