#pragma once

#include "graphspde/graph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace graphspde {

/// Edge label informativeness LI = I(y_i, y_j) / H(y_i) over the empirical
/// distribution of ordered edge endpoints (each undirected edge counted in
/// both directions). Plug-in entropies with 0 log 0 = 0. Throws when the
/// graph has no edges or all endpoints share one class (H = 0, LI undefined).
double label_informativeness(const Graph& g, const std::vector<int>& labels);

/// Fraction of edges whose endpoints share a label.
double edge_homophily(const Graph& g, const std::vector<int>& labels);

struct OODSplit {
    std::vector<std::uint8_t> ind_mask; // in-distribution nodes
    std::vector<std::uint8_t> ood_mask;
    std::vector<int> train_idx, val_idx, test_idx; // subsets of IND
    std::string shift_kind;
    std::optional<Graph> shifted_graph;     // structure / feature shifts
    std::optional<std::vector<int>> relabeled; // labels re-indexed to IND classes (-1 for OOD)
    int num_ind_classes = 0;
};

/// Nodes of the given classes become OOD; the rest are shuffled (seeded) into
/// train/val/test by fraction. Training labels are re-indexed to the IND
/// class set.
OODSplit make_label_leaveout(const Graph& g, const std::vector<int>& ood_classes,
                             double train_frac, double val_frac, std::uint64_t seed);

/// Appends an SBM-generated block of n_ood nodes: OOD-OOD pairs connected
/// with p_in, OOD-original pairs with p_out. OOD features are resampled per
/// dimension from the original graph's empirical feature marginals.
OODSplit make_structure_shift(const Graph& g, int n_ood, double p_in, double p_out,
                              double train_frac, double val_frac, std::uint64_t seed);

/// Perturbs round(fraction * n) node features with i.i.d. N(0, sigma^2) and
/// flags those nodes OOD. Structure is unchanged.
OODSplit make_feature_shift(const Graph& g, double sigma, double fraction,
                            double train_frac, double val_frac, std::uint64_t seed);

struct OODReport {
    std::vector<double> scores;
    std::vector<std::uint8_t> is_ood;
    double auc = 0.0;     // rank statistic, ties count 1/2
    double fpr95 = 0.0;   // FPR where TPR (OOD recall) first reaches 0.95
    double det_acc = 0.0; // best-threshold balanced accuracy
};

/// Higher score = more OOD-like. Requires both classes present.
OODReport ood_metrics(const std::vector<double>& scores,
                      const std::vector<std::uint8_t>& is_ood);

} // namespace graphspde
