#include "graphspde/noise.hpp"

#include "graphspde/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace graphspde {

PhiSpec PhiSpec::from_kernel(const KernelSpec& spec) {
    PhiSpec p;
    p.family = spec.family == KernelFamily::matern ? Family::matern : Family::rbf;
    p.nu = spec.nu;
    p.kappa = spec.kappa;
    return p;
}

double PhiSpec::operator()(double lambda) const {
    switch (family) {
        case Family::matern:
            return std::pow(2.0 * nu / (kappa * kappa) + lambda, -nu);
        case Family::rbf:
            return std::exp(-0.5 * kappa * kappa * lambda);
        case Family::identity:
            return lambda;
    }
    return 0.0;
}

Eigen::VectorXd sample_grf(const CovMatrix& K, double scale, std::uint64_t seed) {
    if (scale < 0) throw std::invalid_argument("sample_grf: scale must be >= 0");
    const int n = K.size();
    if (scale == 0) return Eigen::VectorXd::Zero(n);
    const Eigen::MatrixXd factor = K.chol ? *K.chol : cholesky(K.K);
    Rng rng(seed);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = rng.normal();
    return std::sqrt(scale) * (factor * z);
}

Eigen::VectorXd sample_grf(const Eigen::SparseMatrix<double>& L,
                           const ChebKernel& half_filter, double scale,
                           std::uint64_t seed) {
    if (scale < 0) throw std::invalid_argument("sample_grf: scale must be >= 0");
    const int n = static_cast<int>(L.rows());
    if (scale == 0) return Eigen::VectorXd::Zero(n);
    Rng rng(seed);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = rng.normal();
    return std::sqrt(scale) * chebyshev_apply(L, half_filter, z);
}

NoisePath simulate_phi_wiener(const SpectralBasis& basis, const PhiSpec& phi,
                              const std::vector<double>& times, std::uint64_t seed,
                              int num_modes) {
    if (times.empty() || times.front() != 0.0)
        throw std::invalid_argument("simulate_phi_wiener: times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw std::invalid_argument("simulate_phi_wiener: times must strictly increase");

    const int n = basis.size();
    Eigen::VectorXd weight(n);
    for (int k = 0; k < n; ++k) {
        const double p = phi(basis.eigenvalues[k]);
        weight[k] = p > 0 ? std::sqrt(p) : 0.0;
    }
    if (num_modes >= 0 && num_modes < n) {
        // keep the num_modes largest spectral weights, zero the rest
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return weight[a] > weight[b]; });
        for (int r = num_modes; r < n; ++r) weight[idx[r]] = 0.0;
    }

    Rng rng(seed);
    NoisePath path;
    path.times = times;
    path.values.reserve(times.size());
    path.values.push_back(Eigen::VectorXd::Zero(n));
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
    for (std::size_t s = 1; s < times.size(); ++s) {
        const double sdt = std::sqrt(times[s] - times[s - 1]);
        for (int k = 0; k < n; ++k) beta[k] += sdt * rng.normal();
        path.values.push_back(basis.eigenvectors * (weight.array() * beta.array()).matrix());
    }
    return path;
}

NoisePath simulate_q_wiener(const SpectralBasis& basis,
                            const std::vector<double>& times, std::uint64_t seed) {
    PhiSpec identity;
    identity.family = PhiSpec::Family::identity;
    return simulate_phi_wiener(basis, identity, times, seed);
}

CovEstimate empirical_covariance(const std::vector<Eigen::VectorXd>& samples) {
    const auto count = samples.size();
    if (count < 2)
        throw std::invalid_argument("empirical_covariance: need at least 2 samples");
    const int n = static_cast<int>(samples.front().size());
    for (const auto& x : samples)
        if (x.size() != n)
            throw std::invalid_argument("empirical_covariance: sample size mismatch");
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (const auto& x : samples) mean += x;
    mean /= static_cast<double>(count);

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (const auto& x : samples) {
        const Eigen::VectorXd d = x - mean;
        cov.noalias() += d * d.transpose();
    }
    cov /= static_cast<double>(count - 1);

    CovEstimate est;
    est.cov = cov;
    est.se.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            est.se(i, j) = std::sqrt(
                std::max(cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j), 0.0) /
                static_cast<double>(count - 1));
    return est;
}

} // namespace graphspde
