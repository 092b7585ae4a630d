#include "graphspde/bench.hpp"

#include "graphspde/graph.hpp"
#include "graphspde/kernels.hpp"
#include "graphspde/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace graphspde {

namespace {

/// Seeded random graph with a target average degree (sparse G(n, p)).
Graph random_graph(int n, double avg_degree, std::uint64_t seed) {
    Rng rng(seed);
    const double p = std::min(avg_degree / (n - 1.0), 1.0);
    // geometric skipping over the n(n-1)/2 pair stream
    std::vector<std::pair<int, int>> edges;
    const double log1mp = std::log(1.0 - p);
    std::int64_t pair_index = -1;
    const std::int64_t total = static_cast<std::int64_t>(n) * (n - 1) / 2;
    while (true) {
        const double u = std::max(rng.uniform(), 1e-16);
        pair_index += 1 + static_cast<std::int64_t>(std::floor(std::log(u) / log1mp));
        if (pair_index >= total) break;
        // invert the (i, j) pair index, row-major over i < j
        std::int64_t idx = pair_index;
        int i = 0;
        std::int64_t row = n - 1;
        while (idx >= row) {
            idx -= row;
            ++i;
            --row;
        }
        edges.emplace_back(i, i + 1 + static_cast<int>(idx));
    }
    return build_graph(edges, n);
}

double time_apply(const Eigen::SparseMatrix<double>& L, const ChebKernel& k,
                  const Eigen::VectorXd& v, int reps) {
    volatile double sink = 0.0;
    // batch applications until one measurement spans >= ~10 ms of work
    int inner = 1;
    {
        const auto start = std::chrono::steady_clock::now();
        Eigen::VectorXd out = chebyshev_apply(L, k, v);
        sink = sink + out.sum();
        const double once =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        inner = std::max(1, static_cast<int>(std::ceil(0.01 / std::max(once, 1e-7))));
    }
    std::vector<double> times;
    times.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        for (int i = 0; i < inner; ++i) {
            Eigen::VectorXd out = chebyshev_apply(L, k, v);
            sink = sink + out.sum();
        }
        const auto stop = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(stop - start).count() / inner);
    }
    (void)sink;
    // minimum over reps: least-contended measurement
    return *std::min_element(times.begin(), times.end());
}

} // namespace

std::vector<BenchPoint> bench_chebyshev(int base_nodes, int base_avg_degree,
                                        int base_cheb_degree, int sweep_points,
                                        int reps, std::uint64_t seed) {
    std::vector<BenchPoint> points;
    const KernelSpec spec{KernelFamily::matern, 1.0, 1.0, false};

    // degree sweep: fixed graph, m doubling
    {
        Graph g = random_graph(base_nodes, base_avg_degree * 4, derive_seed(seed, 1));
        const auto L = laplacian(g, LaplacianKind::combinatorial);
        const double bound = lambda_max_bound(g, L);
        Rng rng(derive_seed(seed, 2));
        Eigen::VectorXd v(g.num_nodes);
        for (int i = 0; i < g.num_nodes; ++i) v[i] = rng.normal();
        int m = base_cheb_degree;
        for (int s = 0; s < sweep_points; ++s, m *= 2) {
            const ChebKernel k = chebyshev_fit(spec, m, bound);
            time_apply(L, k, v, 2); // warmup
            points.push_back({"degree", m, g.num_edges(), time_apply(L, k, v, reps)});
        }
    }
    // edge sweep: fixed m and average degree, node count doubling so the
    // edge count doubles per point
    {
        int n = base_nodes;
        for (int s = 0; s < sweep_points; ++s, n *= 2) {
            Graph g = random_graph(n, base_avg_degree * 2, derive_seed(seed, 100 + s));
            const auto L = laplacian(g, LaplacianKind::combinatorial);
            const ChebKernel k = chebyshev_fit(spec, base_cheb_degree * 4,
                                               lambda_max_bound(g, L));
            Rng rng(derive_seed(seed, 200 + s));
            Eigen::VectorXd v(g.num_nodes);
            for (int i = 0; i < g.num_nodes; ++i) v[i] = rng.normal();
            time_apply(L, k, v, 2);
            points.push_back({"edges", base_cheb_degree * 4, g.num_edges(),
                              time_apply(L, k, v, reps)});
        }
    }
    return points;
}

double bench_loglog_slope(const std::vector<BenchPoint>& points,
                          const std::string& sweep) {
    std::vector<double> xs, ys;
    for (const auto& p : points) {
        if (p.sweep != sweep) continue;
        xs.push_back(std::log(sweep == "degree" ? p.cheb_degree : p.num_edges));
        ys.push_back(std::log(p.seconds));
    }
    if (xs.size() < 2) throw std::invalid_argument("bench_loglog_slope: too few points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_bench_csv(const std::vector<BenchPoint>& points, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_bench_csv: cannot open " + path);
    out << "sweep,cheb_degree,num_edges,seconds\n";
    out.precision(9);
    for (const auto& p : points)
        out << p.sweep << "," << p.cheb_degree << "," << p.num_edges << ","
            << p.seconds << "\n";
}

} // namespace graphspde
