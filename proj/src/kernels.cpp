#include "graphspde/kernels.hpp"

#include "graphspde/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace graphspde {

void KernelSpec::validate() const {
    if (kappa < 0) throw std::invalid_argument("KernelSpec: kappa must be >= 0");
    if (family == KernelFamily::matern && (nu <= 0 || kappa <= 0))
        throw std::invalid_argument("KernelSpec: matern requires nu > 0 and kappa > 0");
}

double kernel_phi(const KernelSpec& spec, double lambda) {
    if (spec.family == KernelFamily::matern)
        return std::pow(2.0 * spec.nu / (spec.kappa * spec.kappa) + lambda, -spec.nu);
    return std::exp(-0.5 * spec.kappa * spec.kappa * lambda);
}

namespace {

CovMatrix assemble(const SpectralBasis& basis, const KernelSpec& spec) {
    const int n = basis.size();
    Eigen::VectorXd d(n);
    for (int k = 0; k < n; ++k) d[k] = kernel_phi(spec, basis.eigenvalues[k]);
    CovMatrix cov;
    cov.K = basis.eigenvectors * d.asDiagonal() * basis.eigenvectors.transpose();
    cov.K = 0.5 * (cov.K + cov.K.transpose().eval());
    if (spec.normalize) {
        const double mean_diag = cov.K.diagonal().mean();
        if (mean_diag > 0) cov.K /= mean_diag;
    }
    return cov;
}

} // namespace

CovMatrix matern_kernel_exact(const SpectralBasis& basis, const KernelSpec& spec) {
    if (spec.family != KernelFamily::matern)
        throw std::invalid_argument("matern_kernel_exact: spec.family must be matern");
    spec.validate();
    return assemble(basis, spec);
}

CovMatrix rbf_kernel_exact(const SpectralBasis& basis, double kappa, bool normalize) {
    KernelSpec spec{KernelFamily::rbf, 1.0, kappa, normalize};
    spec.validate();
    return assemble(basis, spec);
}

CovMatrix kernel_exact(const SpectralBasis& basis, const KernelSpec& spec) {
    return spec.family == KernelFamily::matern
               ? matern_kernel_exact(basis, spec)
               : rbf_kernel_exact(basis, spec.kappa, spec.normalize);
}

ChebKernel chebyshev_fit_fn(const std::function<double(double)>& phi, int degree,
                            double lambda_max_bound) {
    if (degree < 1) throw std::invalid_argument("chebyshev_fit: degree must be >= 1");
    if (lambda_max_bound <= 0)
        throw std::invalid_argument("chebyshev_fit: lambda_max_bound must be > 0");
    const int m1 = degree + 1;
    Eigen::VectorXd fvals(m1);
    for (int j = 0; j < m1; ++j) {
        const double theta = std::numbers::pi * (j + 0.5) / m1;
        const double x = std::cos(theta);
        fvals[j] = phi((x + 1.0) * lambda_max_bound / 2.0);
    }
    ChebKernel k;
    k.degree = degree;
    k.lambda_max_bound = lambda_max_bound;
    k.coefficients.resize(m1);
    for (int c = 0; c < m1; ++c) {
        double acc = 0.0;
        for (int j = 0; j < m1; ++j)
            acc += fvals[j] * std::cos(c * std::numbers::pi * (j + 0.5) / m1);
        k.coefficients[c] = (c == 0 ? 1.0 : 2.0) * acc / m1;
    }
    return k;
}

ChebKernel chebyshev_fit(const KernelSpec& spec, int degree,
                         double lambda_max_bound, double power) {
    spec.validate();
    ChebKernel k = chebyshev_fit_fn(
        [&](double lam) { return std::pow(kernel_phi(spec, lam), power); }, degree,
        lambda_max_bound);
    k.spec = spec;
    return k;
}

Eigen::MatrixXd chebyshev_apply(const Eigen::SparseMatrix<double>& L,
                                const ChebKernel& k, const Eigen::MatrixXd& V) {
    if (L.rows() != V.rows())
        throw std::invalid_argument("chebyshev_apply: dimension mismatch");
    const double b = k.lambda_max_bound;
    const double alpha = 2.0 / b; // L~ v = alpha L v - v
    Eigen::MatrixXd t_prev = V;
    Eigen::MatrixXd t_cur = alpha * (L * V) - V;
    Eigen::MatrixXd out = k.coefficients[0] * t_prev;
    if (k.degree >= 1) out += k.coefficients[1] * t_cur;
    for (int c = 2; c <= k.degree; ++c) {
        Eigen::MatrixXd t_next = 2.0 * (alpha * (L * t_cur) - t_cur) - t_prev;
        out += k.coefficients[c] * t_next;
        t_prev.swap(t_cur);
        t_cur.swap(t_next);
    }
    return out;
}

Eigen::VectorXd chebyshev_apply(const Eigen::SparseMatrix<double>& L,
                                const ChebKernel& k, const Eigen::VectorXd& v) {
    return chebyshev_apply(L, k, Eigen::MatrixXd(v)).col(0);
}

double chebyshev_eval(const ChebKernel& k, double lambda) {
    const double x = 2.0 * lambda / k.lambda_max_bound - 1.0;
    double t_prev = 1.0, t_cur = x;
    double out = k.coefficients[0];
    if (k.degree >= 1) out += k.coefficients[1] * x;
    for (int c = 2; c <= k.degree; ++c) {
        const double t_next = 2.0 * x * t_cur - t_prev;
        out += k.coefficients[c] * t_next;
        t_prev = t_cur;
        t_cur = t_next;
    }
    return out;
}

double cheb_error_bound(double nu, double kappa, double d_max, int m) {
    if (nu <= 0 || kappa <= 0 || d_max <= 0 || m < 0)
        throw std::invalid_argument("cheb_error_bound: arguments must be positive");
    const double rho = 16.0 * nu / (kappa * kappa * d_max) + 1.0;
    return std::pow(rho, -m);
}

double lambda_max_bound(const Graph& g, const Eigen::SparseMatrix<double>& L) {
    const double gershgorin = 2.0 * std::max(g.max_degree(), 1);
    const int n = static_cast<int>(L.rows());
    Rng rng(0x9a1b2c3d);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    v.normalize();
    double est = 0.0;
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd w = L * v;
        const double norm = w.norm();
        if (norm < 1e-300) { est = 0.0; break; }
        w /= norm;
        const double next = norm;
        const bool converged = std::abs(next - est) <= 1e-10 * std::max(next, 1.0);
        est = next;
        v = w;
        if (converged && it > 4) break;
    }
    const double powered = est * 1.01;
    const double bound = std::min(gershgorin, powered > 0 ? powered : gershgorin);
    return std::max(bound, 1e-12);
}

Eigen::MatrixXd cholesky(const Eigen::MatrixXd& K, double jitter) {
    if ((K - K.transpose()).norm() > 1e-8 * std::max(1.0, K.norm()))
        throw std::invalid_argument("cholesky: matrix not symmetric");
    const int n = static_cast<int>(K.rows());
    for (double j = jitter; j <= 1e-6 * 1.0000001; j *= 10.0) {
        Eigen::LLT<Eigen::MatrixXd> llt(K + j * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    throw std::runtime_error("cholesky: matrix not positive semidefinite at max jitter 1e-6");
}

} // namespace graphspde
