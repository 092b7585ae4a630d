#pragma once

#include "graphspde/graph.hpp"
#include "graphspde/kernels.hpp"

#include <vector>

namespace graphspde {

struct RewireSpec {
    double prune_percentile = 0.0; // edges with K_ij strictly below this percentile go
    double add_percentile = 100.0; // non-edges strictly above this percentile come in
    int max_added_edges = 0;
    int candidate_top_k = 32; // per-node candidate pool for large graphs
    int exact_scan_limit = 1500; // full O(n^2) non-edge scan below this size

    void validate() const;
};

/// Covariance-threshold rewiring: prunes existing edges whose covariance lies
/// strictly below the prune percentile of the edge-covariance pool, then
/// inserts non-edges strictly above the add percentile of the non-edge pool,
/// highest covariance first up to the cap. Ties break lexicographically by
/// (i, j). Percentiles use linear interpolation; the diagonal never enters a
/// pool. Above `exact_scan_limit` nodes the candidate pool is approximated by
/// the top-k covariances per node.
Graph rewire_by_covariance(const Graph& g, const CovMatrix& K, const RewireSpec& spec);

struct RewireReport {
    int edges_removed = 0;
    int edges_added = 0;
    double li_before = 0.0, li_after = 0.0;
    double homophily_before = 0.0, homophily_after = 0.0;
};

RewireReport rewire_report(const Graph& g, const Graph& rewired,
                           const std::vector<int>& labels);

} // namespace graphspde
