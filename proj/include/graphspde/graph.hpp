#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace graphspde {

/// Undirected simple graph in CSR form. Immutable after construction;
/// neighbor lists are sorted and the adjacency is symmetric with no stored
/// self-loops. Optional per-node features and integer class labels.
struct Graph {
    int num_nodes = 0;
    std::vector<int> row_ptr; // size num_nodes + 1
    std::vector<int> col_idx; // sorted within each row
    std::optional<Eigen::MatrixXd> features; // num_nodes x feature_dim
    std::optional<std::vector<int>> labels;  // class ids in [0, C)

    int num_edges() const { return static_cast<int>(col_idx.size()) / 2; }
    int degree(int i) const { return row_ptr[i + 1] - row_ptr[i]; }
    int max_degree() const;
    bool has_edge(int i, int j) const;

    /// Unique undirected edges as (i, j) with i < j, sorted.
    std::vector<std::pair<int, int>> edge_list() const;

    /// Number of label classes (max label + 1); 0 when unlabeled.
    int num_classes() const;
};

enum class LaplacianKind { combinatorial, sym_normalized };

/// Builds a Graph from an edge list: symmetrizes, deduplicates, sorts.
/// Rejects out-of-range node ids and self-loops.
Graph build_graph(const std::vector<std::pair<int, int>>& edges, int num_nodes);

/// D - A, or I - D^{-1/2} A D^{-1/2} with zero-degree rows mapped to the
/// identity row.
Eigen::SparseMatrix<double> laplacian(const Graph& g, LaplacianKind kind);

/// Stochastic block model: intra-block pairs connected with p_in,
/// inter-block with p_out. Pure function of (block_sizes, p_in, p_out, seed).
Graph sbm_generate(const std::vector<int>& block_sizes, double p_in,
                   double p_out, std::uint64_t seed);

/// Block id per node for the sbm_generate node ordering.
std::vector<int> sbm_block_labels(const std::vector<int>& block_sizes);

/// Gaussian class-cluster features: each class gets a seeded random mean of
/// norm mean_scale, nodes draw mean + N(0, noise_sigma^2) per dimension.
Eigen::MatrixXd make_cluster_features(const std::vector<int>& labels, int dim,
                                      double mean_scale, double noise_sigma,
                                      std::uint64_t seed);

} // namespace graphspde
