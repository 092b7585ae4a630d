#include "graphspde/graph.hpp"
#include "graphspde/kernels.hpp"
#include "graphspde/rng.hpp"
#include "graphspde/spectral.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace graphspde;

namespace {

SpectralBasis basis_of(const Graph& g,
                       LaplacianKind kind = LaplacianKind::combinatorial) {
    return eigendecompose(laplacian(g, kind), kind);
}

KernelSpec matern(double nu, double kappa, bool normalize = false) {
    return {KernelFamily::matern, nu, kappa, normalize};
}

/// Reconstruct the filtered matrix by applying the Chebyshev filter to all
/// basis vectors.
Eigen::MatrixXd cheb_matrix(const Graph& g, const ChebKernel& k) {
    const auto L = laplacian(g, LaplacianKind::combinatorial);
    return chebyshev_apply(L, k, Eigen::MatrixXd(
        Eigen::MatrixXd::Identity(g.num_nodes, g.num_nodes)));
}

} // namespace

TEST_CASE("matern_kernel_exact: single node with nu=1, kappa^2=2") {
    const Graph g = build_graph({}, 1);
    const auto basis = basis_of(g);
    const CovMatrix K = matern_kernel_exact(basis, matern(1.0, std::sqrt(2.0)));
    CHECK(K.K(0, 0) == doctest::Approx(1.0)); // (2/2 + 0)^-1
}

TEST_CASE("matern_kernel_exact: P2 hand values") {
    // eigenvalues {0,2}; phi(0) = 1, phi(2) = 1/3 for nu=1, kappa^2=2
    const auto basis = basis_of(testutil::path2());
    const CovMatrix K = matern_kernel_exact(basis, matern(1.0, std::sqrt(2.0)));
    CHECK(K.K(0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(K.K(1, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(K.K(0, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(K.K(1, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("matern_kernel_exact: symmetric PSD on a random graph") {
    const Graph g = testutil::er_graph(30, 0.2, 23);
    const CovMatrix K = matern_kernel_exact(basis_of(g), matern(0.7, 1.3));
    CHECK((K.K - K.K.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    jacobi_eigen(K.K, values, vectors);
    CHECK(values.minCoeff() >= -1e-8 * K.K.norm());
}

TEST_CASE("rbf_kernel_exact: kappa=0 gives the identity") {
    const Graph g = testutil::er_graph(10, 0.4, 2);
    const CovMatrix K = rbf_kernel_exact(basis_of(g), 0.0);
    CHECK((K.K - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rbf_kernel_exact: single node") {
    const Graph g = build_graph({}, 1);
    const CovMatrix K = rbf_kernel_exact(basis_of(g), 1.5);
    CHECK(K.K(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("normalized Matern approaches normalized RBF monotonically in nu") {
    const Graph g = testutil::er_graph(20, 0.3, 4);
    const auto basis = basis_of(g);
    const double kappa = 1.0;
    const CovMatrix rbf = rbf_kernel_exact(basis, kappa, true);
    double prev = std::numeric_limits<double>::infinity();
    for (double nu : {1.0, 4.0, 16.0, 64.0}) {
        const CovMatrix K = matern_kernel_exact(basis, matern(nu, kappa, true));
        const double dist = (K.K - rbf.K).norm();
        CHECK(dist < prev);
        prev = dist;
    }
}

TEST_CASE("chebyshev_fit: constant function concentrates in c_0") {
    const ChebKernel k = chebyshev_fit_fn([](double) { return 3.25; }, 8, 2.0);
    CHECK(k.coefficients[0] == doctest::Approx(3.25));
    for (int c = 1; c <= k.degree; ++c) CHECK(std::abs(k.coefficients[c]) < 1e-12);
}

TEST_CASE("chebyshev_fit: linear function is exact at degree 1") {
    const ChebKernel k = chebyshev_fit_fn([](double lam) { return lam; }, 1, 2.0);
    // lambda = x + 1 on [-1,1], so c_0 = 1 and c_1 = 1
    CHECK(k.coefficients[0] == doctest::Approx(1.0));
    CHECK(k.coefficients[1] == doctest::Approx(1.0));
    for (double lam : {0.0, 0.37, 1.4, 2.0})
        CHECK(chebyshev_eval(k, lam) == doctest::Approx(lam).epsilon(1e-12));
}

TEST_CASE("chebyshev_fit: Matern nu=5/2 pointwise error < 1e-9 at degree 50") {
    const KernelSpec spec = matern(2.5, 1.0);
    const double bound = 8.0;
    const ChebKernel k = chebyshev_fit(spec, 50, bound);
    double max_err = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double lam = bound * i / 400.0;
        max_err = std::max(max_err,
                           std::abs(chebyshev_eval(k, lam) - kernel_phi(spec, lam)));
    }
    CHECK(max_err < 1e-9);
}

TEST_CASE("chebyshev_apply: constant-one filter is the identity") {
    const Graph g = testutil::er_graph(25, 0.3, 8);
    const auto L = laplacian(g, LaplacianKind::combinatorial);
    const ChebKernel k = chebyshev_fit_fn([](double) { return 1.0; }, 5,
                                          lambda_max_bound(g, L));
    Rng rng(5);
    Eigen::VectorXd v(g.num_nodes);
    for (int i = 0; i < g.num_nodes; ++i) v[i] = rng.normal();
    CHECK((chebyshev_apply(L, k, v) - v).norm() < 1e-12 * v.norm());
}

TEST_CASE("chebyshev_apply: matches the exact spectral kernel on a random graph") {
    const Graph g = testutil::er_graph(100, 0.08, 31);
    const auto L = laplacian(g, LaplacianKind::combinatorial);
    const auto basis = eigendecompose(L);
    const KernelSpec spec = matern(2.5, 1.0);
    const CovMatrix K = matern_kernel_exact(basis, spec);
    const ChebKernel k = chebyshev_fit(spec, 100, lambda_max_bound(g, L));
    Rng rng(77);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd v(g.num_nodes);
        for (int i = 0; i < g.num_nodes; ++i) v[i] = rng.normal();
        const Eigen::VectorXd exact = K.K * v;
        const Eigen::VectorXd approx = chebyshev_apply(L, k, v);
        CHECK((approx - exact).norm() / exact.norm() < 1e-6);
    }
}

TEST_CASE("chebyshev_apply: error decays at least geometrically from m=10 to m=40") {
    const Graph g = testutil::er_graph(50, 0.5, 3);
    const auto basis = basis_of(g);
    const KernelSpec spec = matern(1.0, 1.0);
    const CovMatrix K = matern_kernel_exact(basis, spec);
    const auto L = laplacian(g, LaplacianKind::combinatorial);
    const double bound = lambda_max_bound(g, L);
    const double e10 = (cheb_matrix(g, chebyshev_fit(spec, 10, bound)) - K.K)
                           .cwiseAbs()
                           .maxCoeff();
    const double e40 = (cheb_matrix(g, chebyshev_fit(spec, 40, bound)) - K.K)
                           .cwiseAbs()
                           .maxCoeff();
    const double rho = 16.0 * spec.nu / (spec.kappa * spec.kappa * g.max_degree()) + 1.0;
    CHECK(e40 < e10 * std::pow(rho, -30.0));
}

TEST_CASE("chebyshev_apply: dimension mismatch is rejected") {
    const Graph g = testutil::triangle();
    const auto L = laplacian(g, LaplacianKind::combinatorial);
    const ChebKernel k = chebyshev_fit_fn([](double) { return 1.0; }, 3, 2.0);
    const Eigen::VectorXd v = Eigen::VectorXd::Ones(5);
    CHECK_THROWS_AS(chebyshev_apply(L, k, v), std::invalid_argument);
}

TEST_CASE("cheb_error_bound: monotone in m and nu") {
    CHECK(cheb_error_bound(1.0, 1.0, 10.0, 6) < cheb_error_bound(1.0, 1.0, 10.0, 5));
    CHECK(cheb_error_bound(2.0, 1.0, 10.0, 5) < cheb_error_bound(1.0, 1.0, 10.0, 5));
}

TEST_CASE("cheb_error_bound: measured errors respect the bound rate") {
    // regression of log max-error on m has slope <= -log(rho)
    const Graph g = testutil::er_graph(50, 0.5, 5);
    const auto basis = basis_of(g);
    const KernelSpec spec = matern(0.5, 1.0);
    const CovMatrix K = matern_kernel_exact(basis, spec);
    const auto L = laplacian(g, LaplacianKind::combinatorial);
    const double bound = lambda_max_bound(g, L);
    const std::vector<int> degrees = {5, 10, 20, 40};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int m : degrees) {
        const double err =
            (cheb_matrix(g, chebyshev_fit(spec, m, bound)) - K.K).cwiseAbs().maxCoeff();
        sx += m;
        sy += std::log(err);
        sxx += static_cast<double>(m) * m;
        sxy += m * std::log(err);
    }
    const double n = degrees.size();
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double rho = 16.0 * spec.nu / (spec.kappa * spec.kappa * g.max_degree()) + 1.0;
    CHECK(slope <= -std::log(rho));
}

TEST_CASE("cholesky: identity factors to identity") {
    const Eigen::MatrixXd L = cholesky(Eigen::MatrixXd::Identity(4, 4));
    CHECK((L - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("cholesky: reconstructs the P2 Matern kernel") {
    const CovMatrix K =
        matern_kernel_exact(basis_of(testutil::path2()), matern(1.0, std::sqrt(2.0)));
    const Eigen::MatrixXd L = cholesky(K.K);
    CHECK((L * L.transpose() - K.K).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("cholesky: rejects a matrix with a -1 eigenvalue") {
    Eigen::MatrixXd K = Eigen::MatrixXd::Identity(3, 3);
    K(1, 1) = -1.0;
    CHECK_THROWS_AS(cholesky(K), std::runtime_error);
}

// Smoothness shrinks absolute cross-node covariance: on a fixed graph the
// rough (small nu) kernel carries more off-diagonal mass. Note the
// unnormalized kernel is the right object here; unit-diagonal rescaling
// reverses the trend (K3 closed form: off-diagonal (1-r)/(1+2r) with
// r = (2nu/(2nu+3))^nu decreasing in nu).
TEST_CASE("off-diagonal mass shrinks as nu grows on connected graphs") {
    const std::vector<Graph> suite = {
        testutil::triangle(), testutil::cycle4(), testutil::complete_bipartite22(),
        testutil::er_graph(12, 0.5, 6), testutil::er_graph(20, 0.3, 9)};
    for (const auto& g : suite) {
        const auto basis = basis_of(g);
        double prev_mass = std::numeric_limits<double>::infinity();
        for (double nu : {0.5, 1.0, 2.0, 4.0}) {
            const CovMatrix K = matern_kernel_exact(basis, matern(nu, 1.0, false));
            double mass = 0.0;
            for (int i = 0; i < K.size(); ++i)
                for (int j = 0; j < K.size(); ++j)
                    if (i != j) mass += std::abs(K.K(i, j));
            CHECK(mass < prev_mass);
            prev_mass = mass;
        }
    }
}

TEST_CASE("kernel evaluation is bit-deterministic") {
    const Graph g = testutil::er_graph(15, 0.3, 12);
    const auto basis = basis_of(g);
    const CovMatrix a = matern_kernel_exact(basis, matern(1.5, 0.8));
    const CovMatrix b = matern_kernel_exact(basis, matern(1.5, 0.8));
    CHECK(a.K == b.K);
}
