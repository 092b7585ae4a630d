#include "graphspde/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace graphspde {

void jacobi_eigen(const Eigen::MatrixXd& A, Eigen::VectorXd& values,
                  Eigen::MatrixXd& vectors, double tol, int max_sweeps) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix not square");

    Eigen::MatrixXd M = 0.5 * (A + A.transpose()); // enforce exact symmetry
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
    const double scale = std::max(M.norm(), 1e-300);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * M(p, q) * M(p, q);
        if (std::sqrt(off) <= tol * scale) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = M(p, q);
                if (apq == 0.0) continue;
                const double app = M(p, p);
                const double aqq = M(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                // smaller-magnitude root of t^2 + 2 tau t - 1 = 0
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double mkp = M(k, p);
                    const double mkq = M(k, q);
                    M(k, p) = c * mkp - s * mkq;
                    M(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = M(p, k);
                    const double mqk = M(q, k);
                    M(p, k) = c * mpk - s * mqk;
                    M(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p);
                    const double vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return M(a, a) < M(b, b); });

    values.resize(n);
    vectors.resize(n, n);
    for (int k = 0; k < n; ++k) {
        values[k] = M(order[k], order[k]);
        vectors.col(k) = V.col(order[k]);
    }
}

SpectralBasis eigendecompose(const Eigen::SparseMatrix<double>& L,
                             LaplacianKind kind, int cap) {
    const int n = static_cast<int>(L.rows());
    if (n > cap)
        throw std::runtime_error(
            "eigendecompose: " + std::to_string(n) + " nodes exceeds the dense cap of " +
            std::to_string(cap) + "; use the Chebyshev filter path");

    SpectralBasis basis;
    basis.laplacian_kind = kind;
    jacobi_eigen(Eigen::MatrixXd(L), basis.eigenvalues, basis.eigenvectors);
    for (int k = 0; k < n; ++k)
        if (basis.eigenvalues[k] < 0.0 && basis.eigenvalues[k] > -1e-10)
            basis.eigenvalues[k] = 0.0;
    return basis;
}

} // namespace graphspde
