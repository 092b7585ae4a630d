#pragma once

#include <string>
#include <vector>

namespace graphspde {

struct BenchPoint {
    std::string sweep; // "degree" (m) or "edges"
    int cheb_degree;
    int num_edges;
    double seconds;
};

/// Wall-time of chebyshev_apply across a Chebyshev-degree sweep (fixed graph)
/// and an edge-count sweep (fixed degree). Each point is the median of
/// `reps` runs on seeded random graphs.
std::vector<BenchPoint> bench_chebyshev(int base_nodes = 3000, int base_avg_degree = 8,
                                        int base_cheb_degree = 25, int sweep_points = 4,
                                        int reps = 7, std::uint64_t seed = 7);

/// Least-squares slope of log(seconds) vs log(x) for one sweep.
double bench_loglog_slope(const std::vector<BenchPoint>& points,
                          const std::string& sweep);

void write_bench_csv(const std::vector<BenchPoint>& points, const std::string& path);

} // namespace graphspde
