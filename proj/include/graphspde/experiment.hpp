#pragma once

#include "graphspde/graph.hpp"
#include "graphspde/model.hpp"
#include "graphspde/ood.hpp"
#include "graphspde/train.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace graphspde {

/// Everything one experiment run needs; every field has a default so a config
/// file can stay minimal. Flags override config values in the CLI layer.
struct RunConfig {
    // dataset: load from dataset_dir when set, otherwise a synthetic SBM with
    // block labels and Gaussian cluster features
    std::string dataset_dir;
    std::vector<int> sbm_blocks = {200, 200};
    double sbm_p_in = 0.05;
    double sbm_p_out = 0.005;
    std::uint64_t dataset_seed = 1;
    int feature_dim = 8;
    double feature_mean_scale = 2.0;
    double feature_noise = 0.7;
    // L2-normalize feature rows after any shift (standard GNN preprocessing)
    bool feature_row_normalize = false;

    std::string laplacian_kind = "combinatorial"; // or "sym-normalized"

    // kernel
    std::string kernel_family = "matern";
    double nu = 0.5;
    double kappa = 1.0;
    bool normalize_kernel = false;
    int cheb_degree = 50;
    int eigen_cap = 2000;

    // integrator
    double horizon = 1.0;
    int steps = 10;
    int noise_samples = 3;
    std::string noise_mode = "sispde-matern";

    // model
    int hidden_dim = 16;
    int gcn_layers = 1;
    double dropout = 0.0; // reserved; only 0 is accepted

    // optimizer
    double learning_rate = 0.01;
    double weight_decay = 5e-4;
    int max_epochs = 200;
    int patience = 30;

    // distribution shift
    std::string shift_kind = "feature"; // label-leaveout | structure | feature
    std::vector<int> ood_classes;       // label-leaveout
    double shift_sigma = 1.0;           // feature
    double shift_fraction = 0.3;
    int shift_n_ood = 100; // structure
    double shift_p_in = 0.1;
    double shift_p_out = 0.01;
    double train_frac = 0.4;
    double val_frac = 0.2;

    // evaluation
    int eval_samples = 8;
    std::string score_kind = "total"; // total | aleatoric | epistemic

    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::string out_dir = "out";
};

LaplacianKind laplacian_kind_from_string(const std::string& s);

struct SeedResult {
    std::uint64_t seed;
    double auc, fpr95, det_acc;
    int best_epoch;
    double best_val_loss;
    std::vector<EpochRecord> history;
    std::vector<int> eval_nodes;
    std::vector<double> eval_scores;
    std::vector<std::uint8_t> eval_is_ood;
};

struct ExperimentReport {
    std::vector<SeedResult> per_seed;
    double auc_mean, auc_std;
    double fpr95_mean, fpr95_std;
    double det_acc_mean, det_acc_std;
    std::vector<std::string> written_files;
};

/// Builds the configured base graph (loaded or synthetic with labels and
/// cluster features).
Graph build_base_graph(const RunConfig& cfg);

/// One full run per seed: split -> train -> score -> metrics, then aggregate
/// and write manifest.json / metrics.json / scores.csv / history.csv under
/// cfg.out_dir. `config_echo` is embedded verbatim in the manifest.
ExperimentReport run_experiment(const RunConfig& cfg, const std::string& config_echo = "");

/// FNV-1a content hash, hex-encoded; manifest records input files by hash.
std::string content_hash_hex(const std::string& path);

} // namespace graphspde
