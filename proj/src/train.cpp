#include "graphspde/train.hpp"

#include "graphspde/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace graphspde {

Adam::Adam(const ModelParams& shape, const OptimizerConfig& cfg) : cfg_(cfg) {
    for (const auto& [name, t] : shape.tensors()) {
        m_.push_back(Eigen::MatrixXd::Zero(t->rows(), t->cols()));
        v_.push_back(Eigen::MatrixXd::Zero(t->rows(), t->cols()));
    }
}

void Adam::step(ModelParams& params, const ModelParams& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    auto ps = params.tensors();
    auto gs = grads.tensors();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        Eigen::MatrixXd& p = *ps[i].second;
        const Eigen::MatrixXd& g = *gs[i].second;
        m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
        v_[i] = cfg_.beta2 * v_[i].array().matrix() +
                (1.0 - cfg_.beta2) * g.array().square().matrix();
        const Eigen::ArrayXXd m_hat = m_[i].array() / bc1;
        const Eigen::ArrayXXd v_hat = v_[i].array() / bc2;
        p.array() -= cfg_.learning_rate * m_hat / (v_hat.sqrt() + cfg_.epsilon);
        if (cfg_.weight_decay > 0.0)
            p.array() -= cfg_.learning_rate * cfg_.weight_decay * p.array();
    }
}

TrainResult train(const ModelContext& ctx, const Eigen::MatrixXd& X,
                  const std::vector<int>& labels, const std::vector<int>& train_mask,
                  const std::vector<int>& val_mask, const OptimizerConfig& opt,
                  std::uint64_t seed) {
    if (train_mask.empty() || val_mask.empty())
        throw std::invalid_argument("train: empty train or validation mask");
    {
        std::set<int> tr(train_mask.begin(), train_mask.end());
        for (int v : val_mask)
            if (tr.count(v))
                throw std::invalid_argument("train: train/val masks overlap at node " +
                                            std::to_string(v));
    }

    ModelConfig dims = ctx.dims;
    dims.feature_dim = static_cast<int>(X.cols());
    ModelParams params = init_params(dims, derive_seed(seed, 0x1217));
    Adam adam(params, opt);
    const int s_train = ctx.integ.noise_samples_train;
    const std::uint64_t val_seed = derive_seed(seed, 0x7a11da7eULL);

    TrainResult result;
    result.params = params;
    result.best_val_loss = std::numeric_limits<double>::infinity();
    int since_best = 0;

    for (int epoch = 0; epoch < opt.max_epochs; ++epoch) {
        const std::uint64_t epoch_seed = derive_seed(seed, 0xe90c0000ULL + epoch);
        const double train_loss =
            loss_value(params, ctx, X, labels, train_mask, s_train, epoch_seed);
        const ModelParams grads =
            gradients(params, ctx, X, labels, train_mask, s_train, epoch_seed);
        adam.step(params, grads);

        const double val_loss =
            loss_value(params, ctx, X, labels, val_mask, s_train, val_seed);
        result.history.push_back({epoch, train_loss, val_loss});

        if (val_loss < result.best_val_loss - 1e-12) {
            result.best_val_loss = val_loss;
            result.best_epoch = epoch;
            result.params = params;
            since_best = 0;
        } else if (++since_best >= opt.patience) {
            break;
        }
    }
    return result;
}

} // namespace graphspde
