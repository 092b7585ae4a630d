#pragma once

#include "graphspde/model.hpp"

#include <cstdint>
#include <vector>

namespace graphspde {

struct OptimizerConfig {
    double learning_rate = 1e-2;
    double weight_decay = 0.0; // decoupled (applied outside the Adam moments)
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int max_epochs = 200;
    int patience = 30; // early stopping on validation loss
};

struct EpochRecord {
    int epoch;
    double train_loss;
    double val_loss;
};

struct TrainResult {
    ModelParams params; // best-validation parameters
    std::vector<EpochRecord> history;
    int best_epoch = -1;
    double best_val_loss = 0.0;
};

/// Adam state per tensor.
class Adam {
public:
    Adam(const ModelParams& shape, const OptimizerConfig& cfg);
    void step(ModelParams& params, const ModelParams& grads);

private:
    OptimizerConfig cfg_;
    std::vector<Eigen::MatrixXd> m_, v_;
    int t_ = 0;
};

/// Full training loop: Adam with decoupled weight decay, per-epoch noise
/// reseeding, early stopping on validation loss. Deterministic for a given
/// seed. Masks must be disjoint; masked nodes need labels.
TrainResult train(const ModelContext& ctx, const Eigen::MatrixXd& X,
                  const std::vector<int>& labels, const std::vector<int>& train_mask,
                  const std::vector<int>& val_mask, const OptimizerConfig& opt,
                  std::uint64_t seed);

} // namespace graphspde
