#include "graphspde/ood.hpp"

#include "graphspde/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace graphspde {

namespace {

double entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double q : p)
        if (q > 0) h -= q * std::log(q);
    return h;
}

/// Seeded Fisher-Yates shuffle of 0..n-1.
std::vector<int> shuffled_indices(int n, std::uint64_t seed) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform() * (i + 1));
        std::swap(idx[i], idx[std::min(j, i)]);
    }
    return idx;
}

void split_ind_nodes(OODSplit& split, const std::vector<int>& ind_nodes,
                     double train_frac, double val_frac, std::uint64_t seed) {
    if (train_frac < 0 || val_frac < 0 || train_frac + val_frac > 1.0)
        throw std::invalid_argument("split fractions must be nonnegative with sum <= 1");
    const int n_ind = static_cast<int>(ind_nodes.size());
    const auto order = shuffled_indices(n_ind, derive_seed(seed, 0x59117));
    const int n_train = static_cast<int>(std::round(train_frac * n_ind));
    const int n_val = static_cast<int>(std::round(val_frac * n_ind));
    for (int r = 0; r < n_ind; ++r) {
        const int node = ind_nodes[order[r]];
        if (r < n_train)
            split.train_idx.push_back(node);
        else if (r < n_train + n_val)
            split.val_idx.push_back(node);
        else
            split.test_idx.push_back(node);
    }
    std::sort(split.train_idx.begin(), split.train_idx.end());
    std::sort(split.val_idx.begin(), split.val_idx.end());
    std::sort(split.test_idx.begin(), split.test_idx.end());
}

} // namespace

double label_informativeness(const Graph& g, const std::vector<int>& labels) {
    if (g.num_edges() == 0)
        throw std::invalid_argument("label_informativeness: graph has no edges");
    if (static_cast<int>(labels.size()) != g.num_nodes)
        throw std::invalid_argument("label_informativeness: label count mismatch");
    const int num_classes = *std::max_element(labels.begin(), labels.end()) + 1;

    // joint over ordered endpoints; both directions of each undirected edge
    std::vector<double> joint(num_classes * num_classes, 0.0);
    double total = 0.0;
    for (int i = 0; i < g.num_nodes; ++i)
        for (int k = g.row_ptr[i]; k < g.row_ptr[i + 1]; ++k) {
            joint[labels[i] * num_classes + labels[g.col_idx[k]]] += 1.0;
            total += 1.0;
        }
    for (double& v : joint) v /= total;

    std::vector<double> marginal(num_classes, 0.0);
    for (int a = 0; a < num_classes; ++a)
        for (int b = 0; b < num_classes; ++b) marginal[a] += joint[a * num_classes + b];

    const double h_marginal = entropy(marginal);
    if (h_marginal <= 0.0)
        throw std::domain_error(
            "label_informativeness: undefined, single-class edge endpoints (H = 0)");
    const double h_joint = entropy(joint);
    // I(y_i, y_j) = 2 H(marginal) - H(joint) for the symmetric edge distribution
    double li = (2.0 * h_marginal - h_joint) / h_marginal;
    if (li < 0.0 && li > -1e-12) li = 0.0;
    if (li > 1.0 && li < 1.0 + 1e-12) li = 1.0;
    return li;
}

double edge_homophily(const Graph& g, const std::vector<int>& labels) {
    if (g.num_edges() == 0)
        throw std::invalid_argument("edge_homophily: graph has no edges");
    if (static_cast<int>(labels.size()) != g.num_nodes)
        throw std::invalid_argument("edge_homophily: label count mismatch");
    int same = 0;
    const auto edges = g.edge_list();
    for (const auto& [u, v] : edges) same += labels[u] == labels[v];
    return static_cast<double>(same) / edges.size();
}

OODSplit make_label_leaveout(const Graph& g, const std::vector<int>& ood_classes,
                             double train_frac, double val_frac, std::uint64_t seed) {
    if (!g.labels) throw std::invalid_argument("make_label_leaveout: graph has no labels");
    if (ood_classes.empty())
        throw std::invalid_argument("make_label_leaveout: empty OOD class set");
    const auto& labels = *g.labels;
    const std::set<int> present(labels.begin(), labels.end());
    const std::set<int> ood_set(ood_classes.begin(), ood_classes.end());
    std::vector<int> ind_classes;
    for (int c : present)
        if (!ood_set.count(c)) ind_classes.push_back(c);
    if (ind_classes.empty())
        throw std::invalid_argument("make_label_leaveout: all classes marked OOD");

    OODSplit split;
    split.shift_kind = "label-leaveout";
    split.ind_mask.assign(g.num_nodes, 0);
    split.ood_mask.assign(g.num_nodes, 0);
    std::vector<int> relabel_map(*present.rbegin() + 1, -1);
    for (std::size_t r = 0; r < ind_classes.size(); ++r) relabel_map[ind_classes[r]] = static_cast<int>(r);
    split.num_ind_classes = static_cast<int>(ind_classes.size());

    std::vector<int> ind_nodes;
    std::vector<int> relabeled(g.num_nodes, -1);
    for (int i = 0; i < g.num_nodes; ++i) {
        if (ood_set.count(labels[i])) {
            split.ood_mask[i] = 1;
        } else {
            split.ind_mask[i] = 1;
            ind_nodes.push_back(i);
            relabeled[i] = relabel_map[labels[i]];
        }
    }
    split.relabeled = std::move(relabeled);
    split_ind_nodes(split, ind_nodes, train_frac, val_frac, seed);
    return split;
}

OODSplit make_structure_shift(const Graph& g, int n_ood, double p_in, double p_out,
                              double train_frac, double val_frac, std::uint64_t seed) {
    if (n_ood < 0) throw std::invalid_argument("make_structure_shift: negative n_ood");
    const int n = g.num_nodes;
    const int n_total = n + n_ood;

    std::vector<std::pair<int, int>> edges = g.edge_list();
    Rng rng(derive_seed(seed, 0x57f0));
    for (int i = n; i < n_total; ++i)
        for (int j = i + 1; j < n_total; ++j)
            if (rng.uniform() < p_in) edges.emplace_back(i, j);
    for (int i = n; i < n_total; ++i)
        for (int j = 0; j < n; ++j)
            if (rng.uniform() < p_out) edges.emplace_back(j, i);

    Graph shifted = build_graph(edges, n_total);
    if (g.features) {
        const auto& X = *g.features;
        const int dim = static_cast<int>(X.cols());
        Eigen::MatrixXd Xs(n_total, dim);
        Xs.topRows(n) = X;
        Rng feat_rng(derive_seed(seed, 0xfea7));
        for (int i = n; i < n_total; ++i)
            for (int d = 0; d < dim; ++d) {
                const int src = std::min(static_cast<int>(feat_rng.uniform() * n), n - 1);
                Xs(i, d) = X(src, d);
            }
        shifted.features = std::move(Xs);
    }
    if (g.labels) {
        std::vector<int> labels = *g.labels;
        labels.resize(n_total, 0); // placeholder class for appended nodes
        shifted.labels = std::move(labels);
    }

    OODSplit split;
    split.shift_kind = "structure";
    split.ind_mask.assign(n_total, 0);
    split.ood_mask.assign(n_total, 0);
    std::vector<int> ind_nodes(n);
    std::iota(ind_nodes.begin(), ind_nodes.end(), 0);
    for (int i = 0; i < n; ++i) split.ind_mask[i] = 1;
    for (int i = n; i < n_total; ++i) split.ood_mask[i] = 1;
    split.num_ind_classes = g.num_classes();
    split.shifted_graph = std::move(shifted);
    split_ind_nodes(split, ind_nodes, train_frac, val_frac, seed);
    return split;
}

OODSplit make_feature_shift(const Graph& g, double sigma, double fraction,
                            double train_frac, double val_frac, std::uint64_t seed) {
    if (!g.features) throw std::invalid_argument("make_feature_shift: graph has no features");
    if (fraction <= 0.0 || fraction >= 1.0)
        throw std::invalid_argument("make_feature_shift: fraction must lie in (0,1)");
    const int n = g.num_nodes;
    const int n_shift = static_cast<int>(std::round(fraction * n));
    const auto order = shuffled_indices(n, derive_seed(seed, 0x00d5));

    Graph shifted = g;
    Eigen::MatrixXd X = *g.features;
    Rng rng(derive_seed(seed, 0x9015e));
    OODSplit split;
    split.shift_kind = "feature";
    split.ind_mask.assign(n, 1);
    split.ood_mask.assign(n, 0);
    for (int r = 0; r < n_shift; ++r) {
        const int node = order[r];
        for (int d = 0; d < X.cols(); ++d) X(node, d) += sigma * rng.normal();
        split.ood_mask[node] = 1;
        split.ind_mask[node] = 0;
    }
    shifted.features = std::move(X);
    split.shifted_graph = std::move(shifted);
    split.num_ind_classes = g.num_classes();

    std::vector<int> ind_nodes;
    for (int i = 0; i < n; ++i)
        if (split.ind_mask[i]) ind_nodes.push_back(i);
    split_ind_nodes(split, ind_nodes, train_frac, val_frac, seed);
    return split;
}

OODReport ood_metrics(const std::vector<double>& scores,
                      const std::vector<std::uint8_t>& is_ood) {
    if (scores.size() != is_ood.size())
        throw std::invalid_argument("ood_metrics: size mismatch");
    const int n = static_cast<int>(scores.size());
    const int n_pos = static_cast<int>(std::count(is_ood.begin(), is_ood.end(), 1));
    const int n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("ood_metrics: need both IND and OOD samples");

    OODReport report;
    report.scores = scores;
    report.is_ood = is_ood;

    // AUC via the rank statistic; ties contribute 1/2
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n);
    for (int i = 0; i < n;) {
        int j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * (i + j - 1) + 1.0; // 1-based mean rank of the tie group
        for (int k = i; k < j; ++k) rank[order[k]] = avg_rank;
        i = j;
    }
    double rank_sum_pos = 0.0;
    for (int i = 0; i < n; ++i)
        if (is_ood[i]) rank_sum_pos += rank[i];
    report.auc = (rank_sum_pos - 0.5 * n_pos * (n_pos + 1.0)) /
                 (static_cast<double>(n_pos) * n_neg);

    // sweep thresholds from strict to loose; classify OOD when score >= t
    std::vector<int> desc(order.rbegin(), order.rend());
    double fpr95 = 1.0;
    double best_balanced = 0.0;
    int tp = 0, fp = 0;
    bool hit95 = false;
    for (int i = 0; i < n;) {
        int j = i;
        while (j < n && scores[desc[j]] == scores[desc[i]]) {
            tp += is_ood[desc[j]] ? 1 : 0;
            fp += is_ood[desc[j]] ? 0 : 1;
            ++j;
        }
        const double tpr = static_cast<double>(tp) / n_pos;
        const double fpr = static_cast<double>(fp) / n_neg;
        if (!hit95 && tpr >= 0.95) {
            fpr95 = fpr;
            hit95 = true;
        }
        best_balanced = std::max(best_balanced, 0.5 * (tpr + (1.0 - fpr)));
        i = j;
    }
    report.fpr95 = fpr95;
    report.det_acc = best_balanced;
    return report;
}

} // namespace graphspde
