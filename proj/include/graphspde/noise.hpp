#pragma once

#include "graphspde/kernels.hpp"
#include "graphspde/spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace graphspde {

/// Spectral weight function for the Wiener-process expansion. `matern` and
/// `rbf` use the kernel densities; `identity` is phi(lambda) = lambda, the
/// Q-Wiener baseline.
struct PhiSpec {
    enum class Family { matern, rbf, identity };
    Family family = Family::matern;
    double nu = 1.0;
    double kappa = 1.0;

    static PhiSpec from_kernel(const KernelSpec& spec);
    double operator()(double lambda) const;
};

/// Time-indexed noise sample path; values[0] is exactly zero.
struct NoisePath {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> values;
};

/// One draw from N(0, scale * K) through the Cholesky factor of K.
Eigen::VectorXd sample_grf(const CovMatrix& K, double scale, std::uint64_t seed);

/// One draw via the half-power Chebyshev filter: `half_filter` must encode
/// phi^(1/2), so the filtered standard normal has covariance phi(L) up to the
/// polynomial approximation error.
Eigen::VectorXd sample_grf(const Eigen::SparseMatrix<double>& L,
                           const ChebKernel& half_filter, double scale,
                           std::uint64_t seed);

/// Truncated Karhunen-Loeve simulation of the Phi-Wiener process
/// W(t) = sum_k sqrt(phi(lambda_k)) u_k beta_k(t), each beta_k advanced by
/// independent N(0, dt) increments. `num_modes` < 0 keeps all modes;
/// otherwise only the top num_modes spectral terms (largest phi) enter.
///
/// The finite expansion is always well defined. In the continuum limit the
/// Matern weights give a trace-class covariance only when the smoothness nu
/// exceeds the domain dimension; that condition is background for the
/// infinite-dimensional analogue and is not checked at runtime.
NoisePath simulate_phi_wiener(const SpectralBasis& basis, const PhiSpec& phi,
                              const std::vector<double>& times, std::uint64_t seed,
                              int num_modes = -1);

/// Q-Wiener baseline: spectral weights sqrt(lambda_k).
NoisePath simulate_q_wiener(const SpectralBasis& basis,
                            const std::vector<double>& times, std::uint64_t seed);

struct CovEstimate {
    Eigen::MatrixXd cov; // unbiased sample covariance
    Eigen::MatrixXd se;  // asymptotic standard error per entry
};

/// Unbiased sample covariance with per-entry standard errors
/// se_ij = sqrt((C_ii C_jj + C_ij^2) / (N - 1)). Requires >= 2 samples.
CovEstimate empirical_covariance(const std::vector<Eigen::VectorXd>& samples);

} // namespace graphspde
