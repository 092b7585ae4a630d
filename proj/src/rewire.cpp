#include "graphspde/rewire.hpp"

#include "graphspde/ood.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace graphspde {

void RewireSpec::validate() const {
    if (prune_percentile < 0 || prune_percentile > 100 || add_percentile < 0 ||
        add_percentile > 100)
        throw std::invalid_argument("RewireSpec: percentiles must lie in [0,100]");
    if (max_added_edges < 0)
        throw std::invalid_argument("RewireSpec: max_added_edges must be >= 0");
}

namespace {

/// Linear-interpolation percentile over a sorted copy, numpy-style.
double percentile(std::vector<double> vals, double q) {
    if (vals.empty()) throw std::invalid_argument("percentile: empty pool");
    std::sort(vals.begin(), vals.end());
    if (vals.size() == 1) return vals.front();
    const double pos = q / 100.0 * (vals.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return vals[lo] + (pos - lo) * (vals[hi] - vals[lo]);
}

struct Candidate {
    double value;
    int i, j;
    bool operator<(const Candidate& other) const {
        if (value != other.value) return value > other.value; // highest first
        if (i != other.i) return i < other.i;
        return j < other.j;
    }
};

} // namespace

Graph rewire_by_covariance(const Graph& g, const CovMatrix& K, const RewireSpec& spec) {
    spec.validate();
    if (K.size() != g.num_nodes)
        throw std::invalid_argument("rewire_by_covariance: covariance dimension mismatch");
    const int n = g.num_nodes;
    const auto edges = g.edge_list();

    std::set<std::pair<int, int>> kept;
    if (!edges.empty()) {
        std::vector<double> edge_vals;
        edge_vals.reserve(edges.size());
        for (const auto& [u, v] : edges) edge_vals.push_back(K.K(u, v));
        const double prune_thr = percentile(edge_vals, spec.prune_percentile);
        for (const auto& [u, v] : edges)
            if (!(K.K(u, v) < prune_thr)) kept.emplace(u, v);
    }

    if (spec.max_added_edges > 0) {
        std::vector<Candidate> pool;
        if (n <= spec.exact_scan_limit) {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (!g.has_edge(i, j)) pool.push_back({K.K(i, j), i, j});
        } else {
            // approximate pool: top-k covariances per node
            std::set<std::pair<int, int>> seen;
            for (int i = 0; i < n; ++i) {
                std::vector<Candidate> row;
                row.reserve(n - 1);
                for (int j = 0; j < n; ++j)
                    if (j != i && !g.has_edge(i, j))
                        row.push_back({K.K(i, j), std::min(i, j), std::max(i, j)});
                const auto k = std::min<std::size_t>(spec.candidate_top_k, row.size());
                std::partial_sort(row.begin(), row.begin() + k, row.end());
                for (std::size_t r = 0; r < k; ++r)
                    if (seen.emplace(row[r].i, row[r].j).second) pool.push_back(row[r]);
            }
        }
        if (!pool.empty()) {
            std::vector<double> pool_vals;
            pool_vals.reserve(pool.size());
            for (const auto& c : pool) pool_vals.push_back(c.value);
            const double add_thr = percentile(pool_vals, spec.add_percentile);
            std::vector<Candidate> winners;
            for (const auto& c : pool)
                if (c.value > add_thr) winners.push_back(c);
            std::sort(winners.begin(), winners.end());
            const auto cap = std::min<std::size_t>(spec.max_added_edges, winners.size());
            for (std::size_t r = 0; r < cap; ++r)
                kept.emplace(winners[r].i, winners[r].j);
        }
    }

    std::vector<std::pair<int, int>> new_edges(kept.begin(), kept.end());
    Graph out = build_graph(new_edges, n);
    out.features = g.features;
    out.labels = g.labels;
    return out;
}

RewireReport rewire_report(const Graph& g, const Graph& rewired,
                           const std::vector<int>& labels) {
    const auto before = g.edge_list();
    const auto after = rewired.edge_list();
    const std::set<std::pair<int, int>> before_set(before.begin(), before.end());
    const std::set<std::pair<int, int>> after_set(after.begin(), after.end());

    RewireReport report;
    for (const auto& e : before)
        if (!after_set.count(e)) ++report.edges_removed;
    for (const auto& e : after)
        if (!before_set.count(e)) ++report.edges_added;
    report.li_before = label_informativeness(g, labels);
    report.li_after = label_informativeness(rewired, labels);
    report.homophily_before = edge_homophily(g, labels);
    report.homophily_after = edge_homophily(rewired, labels);
    return report;
}

} // namespace graphspde
