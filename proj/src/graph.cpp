#include "graphspde/graph.hpp"

#include "graphspde/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace graphspde {

int Graph::max_degree() const {
    int d = 0;
    for (int i = 0; i < num_nodes; ++i) d = std::max(d, degree(i));
    return d;
}

bool Graph::has_edge(int i, int j) const {
    auto begin = col_idx.begin() + row_ptr[i];
    auto end = col_idx.begin() + row_ptr[i + 1];
    return std::binary_search(begin, end, j);
}

std::vector<std::pair<int, int>> Graph::edge_list() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(num_edges());
    for (int i = 0; i < num_nodes; ++i)
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
            if (i < col_idx[k]) out.emplace_back(i, col_idx[k]);
    return out;
}

int Graph::num_classes() const {
    if (!labels || labels->empty()) return 0;
    return *std::max_element(labels->begin(), labels->end()) + 1;
}

Graph build_graph(const std::vector<std::pair<int, int>>& edges, int num_nodes) {
    if (num_nodes < 0) throw std::invalid_argument("build_graph: negative node count");
    std::set<std::pair<int, int>> dedup;
    for (const auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes)
            throw std::out_of_range("build_graph: node id out of range: (" +
                                    std::to_string(u) + ", " + std::to_string(v) + ")");
        if (u == v)
            throw std::invalid_argument("build_graph: self-loop rejected at node " +
                                        std::to_string(u));
        dedup.emplace(std::min(u, v), std::max(u, v));
    }
    Graph g;
    g.num_nodes = num_nodes;
    std::vector<std::vector<int>> adj(num_nodes);
    for (const auto& [u, v] : dedup) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    g.row_ptr.assign(num_nodes + 1, 0);
    for (int i = 0; i < num_nodes; ++i) {
        std::sort(adj[i].begin(), adj[i].end());
        g.row_ptr[i + 1] = g.row_ptr[i] + static_cast<int>(adj[i].size());
    }
    g.col_idx.reserve(g.row_ptr[num_nodes]);
    for (auto& nbrs : adj) g.col_idx.insert(g.col_idx.end(), nbrs.begin(), nbrs.end());
    return g;
}

Eigen::SparseMatrix<double> laplacian(const Graph& g, LaplacianKind kind) {
    if (g.num_nodes == 0) throw std::invalid_argument("laplacian: empty graph");
    const int n = g.num_nodes;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.col_idx.size() + n);
    if (kind == LaplacianKind::combinatorial) {
        for (int i = 0; i < n; ++i) {
            trip.emplace_back(i, i, static_cast<double>(g.degree(i)));
            for (int k = g.row_ptr[i]; k < g.row_ptr[i + 1]; ++k)
                trip.emplace_back(i, g.col_idx[k], -1.0);
        }
    } else {
        for (int i = 0; i < n; ++i) {
            trip.emplace_back(i, i, 1.0);
            const double di = g.degree(i);
            if (di == 0) continue; // identity row for isolated nodes
            for (int k = g.row_ptr[i]; k < g.row_ptr[i + 1]; ++k) {
                const int j = g.col_idx[k];
                trip.emplace_back(i, j, -1.0 / std::sqrt(di * g.degree(j)));
            }
        }
    }
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    L.makeCompressed();
    return L;
}

Graph sbm_generate(const std::vector<int>& block_sizes, double p_in,
                   double p_out, std::uint64_t seed) {
    if (p_in < 0 || p_in > 1 || p_out < 0 || p_out > 1)
        throw std::invalid_argument("sbm_generate: probability outside [0,1]");
    const std::vector<int> block = sbm_block_labels(block_sizes);
    const int n = static_cast<int>(block.size());
    Rng rng(derive_seed(seed, 0x5b3));
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double p = block[i] == block[j] ? p_in : p_out;
            if (rng.uniform() < p) edges.emplace_back(i, j);
        }
    }
    return build_graph(edges, n);
}

std::vector<int> sbm_block_labels(const std::vector<int>& block_sizes) {
    std::vector<int> block;
    for (std::size_t b = 0; b < block_sizes.size(); ++b) {
        if (block_sizes[b] < 0) throw std::invalid_argument("sbm: negative block size");
        block.insert(block.end(), block_sizes[b], static_cast<int>(b));
    }
    return block;
}

Eigen::MatrixXd make_cluster_features(const std::vector<int>& labels, int dim,
                                      double mean_scale, double noise_sigma,
                                      std::uint64_t seed) {
    const int n = static_cast<int>(labels.size());
    const int num_classes = n == 0 ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    Rng mean_rng(derive_seed(seed, 0xc1a55));
    Eigen::MatrixXd means(num_classes, dim);
    for (int c = 0; c < num_classes; ++c) {
        for (int d = 0; d < dim; ++d) means(c, d) = mean_rng.normal();
        const double norm = means.row(c).norm();
        if (norm > 0) means.row(c) *= mean_scale / norm;
    }
    Eigen::MatrixXd X(n, dim);
    for (int i = 0; i < n; ++i) {
        Rng row_rng(derive_seed(seed, 0xfea70000ULL + static_cast<std::uint64_t>(i)));
        for (int d = 0; d < dim; ++d)
            X(i, d) = means(labels[i], d) + noise_sigma * row_rng.normal();
    }
    return X;
}

} // namespace graphspde
