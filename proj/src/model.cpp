#include "graphspde/model.hpp"

#include "graphspde/rng.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace graphspde {

NoiseMode noise_mode_from_string(const std::string& s) {
    if (s == "sispde-matern") return NoiseMode::sispde_matern;
    if (s == "sispde-rbf") return NoiseMode::sispde_rbf;
    if (s == "gnsd-qwiener") return NoiseMode::gnsd_qwiener;
    if (s == "deterministic") return NoiseMode::deterministic;
    throw std::invalid_argument("unknown noise mode '" + s + "'");
}

std::string to_string(NoiseMode m) {
    switch (m) {
        case NoiseMode::sispde_matern: return "sispde-matern";
        case NoiseMode::sispde_rbf: return "sispde-rbf";
        case NoiseMode::gnsd_qwiener: return "gnsd-qwiener";
        case NoiseMode::deterministic: return "deterministic";
    }
    return "?";
}

void IntegratorConfig::validate() const {
    if (steps < 1) throw std::invalid_argument("IntegratorConfig: steps must be >= 1");
    if (horizon <= 0) throw std::invalid_argument("IntegratorConfig: horizon must be > 0");
    if (noise_samples_train < 1)
        throw std::invalid_argument("IntegratorConfig: noise_samples_train must be >= 1");
}

std::vector<std::pair<std::string, Eigen::MatrixXd*>> ModelParams::tensors() {
    std::vector<std::pair<std::string, Eigen::MatrixXd*>> out = {
        {"encoder.weight", &enc_w}, {"encoder.bias", &enc_b},
        {"f.w1", &f_w1}, {"f.b1", &f_b1}, {"f.w2", &f_w2}, {"f.b2", &f_b2},
        {"g.w1", &g_w1}, {"g.b1", &g_b1}, {"g.w2", &g_w2}, {"g.b2", &g_b2},
        {"decoder.weight", &dec_w}, {"decoder.bias", &dec_b},
    };
    for (std::size_t l = 0; l < gcn_w.size(); ++l)
        out.emplace_back("gcn." + std::to_string(l) + ".weight", &gcn_w[l]);
    return out;
}

std::vector<std::pair<std::string, const Eigen::MatrixXd*>> ModelParams::tensors() const {
    auto mut = const_cast<ModelParams*>(this)->tensors();
    std::vector<std::pair<std::string, const Eigen::MatrixXd*>> out;
    out.reserve(mut.size());
    for (auto& [name, ptr] : mut) out.emplace_back(name, ptr);
    return out;
}

ModelParams ModelParams::zeros_like(const ModelParams& other) {
    ModelParams z = other;
    for (auto& [name, t] : z.tensors()) t->setZero();
    return z;
}

double ModelParams::grad_norm() const {
    double acc = 0.0;
    for (const auto& [name, t] : tensors()) acc += t->squaredNorm();
    return std::sqrt(acc);
}

namespace {

Eigen::MatrixXd glorot(int rows, int cols, Rng& rng) {
    const double limit = std::sqrt(6.0 / (rows + cols));
    Eigen::MatrixXd w(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) w(i, j) = (2.0 * rng.uniform() - 1.0) * limit;
    return w;
}

} // namespace

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
    if (cfg.feature_dim < 1 || cfg.hidden_dim < 1 || cfg.num_classes < 1 || cfg.gcn_layers < 1)
        throw std::invalid_argument("init_params: invalid model dimensions");
    ModelParams p;
    int stream = 0;
    auto next_rng = [&] { return Rng(derive_seed(seed, 0x11171u + stream++)); };
    const int h = cfg.hidden_dim;
    {
        Rng r = next_rng();
        p.enc_w = glorot(cfg.feature_dim, h, r);
    }
    p.enc_b = Eigen::MatrixXd::Zero(1, h);
    p.gcn_w.resize(cfg.gcn_layers);
    for (auto& w : p.gcn_w) {
        Rng r = next_rng();
        w = glorot(h, h, r);
    }
    {
        Rng r = next_rng();
        p.f_w1 = glorot(h, h, r);
    }
    p.f_b1 = Eigen::MatrixXd::Zero(1, h);
    {
        Rng r = next_rng();
        p.f_w2 = glorot(h, h, r);
    }
    p.f_b2 = Eigen::MatrixXd::Zero(1, h);
    {
        Rng r = next_rng();
        p.g_w1 = glorot(h, h, r);
    }
    p.g_b1 = Eigen::MatrixXd::Zero(1, h);
    {
        Rng r = next_rng();
        p.g_w2 = glorot(h, h, r);
    }
    p.g_b2 = Eigen::MatrixXd::Zero(1, h);
    {
        Rng r = next_rng();
        p.dec_w = glorot(h, cfg.num_classes, r);
    }
    p.dec_b = Eigen::MatrixXd::Zero(1, cfg.num_classes);
    return p;
}

Eigen::MatrixXd NoiseSampler::draw(int n, int channels, std::uint64_t seed) const {
    if (mode == NoiseMode::deterministic) return Eigen::MatrixXd::Zero(n, channels);
    Rng rng(seed);
    Eigen::MatrixXd z(n, channels);
    for (int c = 0; c < channels; ++c)
        for (int i = 0; i < n; ++i) z(i, c) = rng.normal();
    if (factor) return *factor * z;
    return chebyshev_apply(filter_laplacian, *half_filter, z);
}

NoiseSampler make_noise_sampler(const SpectralBasis& basis, const KernelSpec& spec,
                                NoiseMode mode) {
    NoiseSampler s;
    s.mode = mode;
    switch (mode) {
        case NoiseMode::deterministic:
            return s;
        case NoiseMode::sispde_matern: {
            KernelSpec ms = spec;
            ms.family = KernelFamily::matern;
            CovMatrix K = matern_kernel_exact(basis, ms);
            s.factor = cholesky(K.K);
            return s;
        }
        case NoiseMode::sispde_rbf: {
            CovMatrix K = rbf_kernel_exact(basis, spec.kappa, spec.normalize);
            s.factor = cholesky(K.K);
            return s;
        }
        case NoiseMode::gnsd_qwiener: {
            // covariance is the Laplacian itself: factor U diag(sqrt(lambda))
            const int n = basis.size();
            Eigen::VectorXd w(n);
            for (int k = 0; k < n; ++k)
                w[k] = basis.eigenvalues[k] > 0 ? std::sqrt(basis.eigenvalues[k]) : 0.0;
            s.factor = basis.eigenvectors * w.asDiagonal();
            return s;
        }
    }
    return s;
}

NoiseSampler make_noise_sampler_cheb(const Eigen::SparseMatrix<double>& L,
                                     const KernelSpec& spec, NoiseMode mode,
                                     int degree, double lambda_bound) {
    NoiseSampler s;
    s.mode = mode;
    if (mode == NoiseMode::deterministic) return s;
    if (spec.normalize)
        throw std::invalid_argument(
            "make_noise_sampler_cheb: kernel normalization needs the exact path");
    s.filter_laplacian = L;
    switch (mode) {
        case NoiseMode::sispde_matern: {
            KernelSpec ms = spec;
            ms.family = KernelFamily::matern;
            s.half_filter = chebyshev_fit(ms, degree, lambda_bound, 0.5);
            break;
        }
        case NoiseMode::sispde_rbf: {
            KernelSpec rs = spec;
            rs.family = KernelFamily::rbf;
            s.half_filter = chebyshev_fit(rs, degree, lambda_bound, 0.5);
            break;
        }
        case NoiseMode::gnsd_qwiener:
            s.half_filter = chebyshev_fit_fn(
                [](double lam) { return lam > 0 ? std::sqrt(lam) : 0.0; }, degree,
                lambda_bound);
            break;
        case NoiseMode::deterministic:
            break;
    }
    return s;
}

Eigen::SparseMatrix<double> gcn_adjacency(const Graph& g) {
    const int n = g.num_nodes;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.col_idx.size() + n);
    std::vector<double> inv_sqrt(n);
    for (int i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(1.0 + g.degree(i));
    for (int i = 0; i < n; ++i) {
        trip.emplace_back(i, i, inv_sqrt[i] * inv_sqrt[i]);
        for (int k = g.row_ptr[i]; k < g.row_ptr[i + 1]; ++k) {
            const int j = g.col_idx[k];
            trip.emplace_back(i, j, inv_sqrt[i] * inv_sqrt[j]);
        }
    }
    Eigen::SparseMatrix<double> a_hat(n, n);
    a_hat.setFromTriplets(trip.begin(), trip.end());
    a_hat.makeCompressed();
    return a_hat;
}

Eigen::MatrixXd gcn_forward(const Graph& g, const Eigen::MatrixXd& H,
                            const Eigen::MatrixXd& weights) {
    if (H.rows() != g.num_nodes || H.cols() != weights.rows())
        throw std::invalid_argument("gcn_forward: shape mismatch");
    return gcn_adjacency(g) * H * weights;
}

ModelContext make_context(const Graph& g, const ModelConfig& dims,
                          const IntegratorConfig& integ, NoiseSampler sampler) {
    integ.validate();
    ModelContext ctx;
    ctx.graph = &g;
    ctx.a_hat = gcn_adjacency(g);
    ctx.dims = dims;
    ctx.integ = integ;
    ctx.sampler = std::move(sampler);
    return ctx;
}

namespace {

struct StepCache {
    Eigen::MatrixXd H;      // state entering the step
    Eigen::MatrixXd Z1, Z2; // tanh activations of the F / G hidden layers
    Eigen::MatrixXd noise;  // dW/dt for this step
    std::vector<Eigen::MatrixXd> gcn_in; // inputs to each GCN layer
};

struct ForwardCache {
    Eigen::MatrixXd enc_out;
    std::vector<Eigen::MatrixXd> init_gcn_in;
    std::vector<StepCache> steps;
    Eigen::MatrixXd h_t;
    Eigen::MatrixXd probs;
};

Eigen::MatrixXd add_bias(const Eigen::MatrixXd& M, const Eigen::MatrixXd& b) {
    return M.rowwise() + b.row(0);
}

Eigen::MatrixXd gcn_stack(const Eigen::SparseMatrix<double>& a_hat,
                          const std::vector<Eigen::MatrixXd>& weights,
                          Eigen::MatrixXd H, std::vector<Eigen::MatrixXd>* cache) {
    for (const auto& w : weights) {
        if (cache) cache->push_back(H);
        H = a_hat * H * w;
    }
    return H;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd p = logits;
    for (int i = 0; i < p.rows(); ++i) {
        const double m = p.row(i).maxCoeff();
        p.row(i) = (p.row(i).array() - m).exp();
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

/// Euler loop shared by integrate / predict / gradients. H0 is the initial
/// ODE state; the Eq.-10-style initial graph convolution happens in the
/// predict composition, not here.
Eigen::MatrixXd run_euler(const ModelParams& params, const ModelContext& ctx,
                          const Eigen::MatrixXd& H0, std::uint64_t seed,
                          const std::vector<Eigen::MatrixXd>* forced_noise,
                          ForwardCache* cache) {
    const int n = ctx.graph->num_nodes;
    const int h = ctx.dims.hidden_dim;
    const int steps = ctx.integ.steps;
    const double dt = ctx.integ.horizon / steps;
    const double inv_sqrt_dt = 1.0 / std::sqrt(dt);

    if (forced_noise && static_cast<int>(forced_noise->size()) != steps)
        throw std::invalid_argument("integrate: forced noise length != steps");

    Eigen::MatrixXd H = H0;
    if (cache) cache->steps.reserve(steps);

    for (int k = 0; k < steps; ++k) {
        Eigen::MatrixXd noise;
        if (forced_noise) {
            noise = (*forced_noise)[k];
        } else if (ctx.sampler.mode == NoiseMode::deterministic) {
            noise = Eigen::MatrixXd::Zero(n, h);
        } else {
            // dW ~ N(0, dt K) per channel, used as dW/dt
            noise = inv_sqrt_dt * ctx.sampler.draw(n, h, step_noise_seed(seed, k));
        }

        const Eigen::MatrixXd z1 = add_bias(H * params.f_w1, params.f_b1).array().tanh();
        const Eigen::MatrixXd f = add_bias(z1 * params.f_w2, params.f_b2);
        const Eigen::MatrixXd z2 = add_bias(H * params.g_w1, params.g_b1).array().tanh();
        const Eigen::MatrixXd g = add_bias(z2 * params.g_w2, params.g_b2);
        const Eigen::MatrixXd u = f + g.cwiseProduct(noise);

        StepCache sc;
        if (cache) {
            sc.H = H;
            sc.Z1 = z1;
            sc.Z2 = z2;
            sc.noise = noise;
        }
        const Eigen::MatrixXd v =
            gcn_stack(ctx.a_hat, params.gcn_w, u, cache ? &sc.gcn_in : nullptr);
        H += dt * v;
        if (!H.allFinite())
            throw std::runtime_error("integrate: non-finite state at step " +
                                     std::to_string(k + 1) + " of " +
                                     std::to_string(steps));
        if (cache) cache->steps.push_back(std::move(sc));
    }
    return H;
}

Eigen::MatrixXd forward_probs(const ModelParams& params, const ModelContext& ctx,
                              const Eigen::MatrixXd& X, std::uint64_t sample_seed,
                              ForwardCache* cache) {
    const Eigen::MatrixXd enc = add_bias(X * params.enc_w, params.enc_b);
    if (cache) cache->enc_out = enc;
    // Eq.-10 composition: the ODE starts from the graph-convolved encoding
    const Eigen::MatrixXd h_init = gcn_stack(ctx.a_hat, params.gcn_w, enc,
                                             cache ? &cache->init_gcn_in : nullptr);
    const Eigen::MatrixXd h_t = run_euler(params, ctx, h_init, sample_seed, nullptr, cache);
    const Eigen::MatrixXd logits = add_bias(h_t * params.dec_w, params.dec_b);
    const Eigen::MatrixXd probs = softmax_rows(logits);
    if (cache) {
        cache->h_t = h_t;
        cache->probs = probs;
    }
    return probs;
}

int distinct_count(const std::vector<int>& mask) {
    return static_cast<int>(std::set<int>(mask.begin(), mask.end()).size());
}

} // namespace

std::uint64_t step_noise_seed(std::uint64_t seed, int step) {
    return derive_seed(seed, 0xd7a90000ULL + step);
}

Eigen::MatrixXd integrate(const ModelParams& params, const ModelContext& ctx,
                          const Eigen::MatrixXd& H0, std::uint64_t seed,
                          const std::vector<Eigen::MatrixXd>* forced_noise) {
    return run_euler(params, ctx, H0, seed, forced_noise, nullptr);
}

PredictiveSamples predict(const ModelParams& params, const ModelContext& ctx,
                          const Eigen::MatrixXd& X, int num_samples,
                          std::uint64_t seed) {
    if (num_samples < 1) throw std::invalid_argument("predict: num_samples must be >= 1");
    PredictiveSamples out;
    out.probs.reserve(num_samples);
    for (int s = 0; s < num_samples; ++s)
        out.probs.push_back(forward_probs(params, ctx, X, derive_seed(seed, s), nullptr));
    return out;
}

double loss(const PredictiveSamples& samples, const std::vector<int>& labels,
            const std::vector<int>& mask) {
    if (samples.probs.empty()) throw std::invalid_argument("loss: no samples");
    if (mask.empty()) throw std::invalid_argument("loss: empty mask");
    const int denom = distinct_count(mask);
    double acc = 0.0;
    for (const auto& p : samples.probs) {
        for (int node : mask) {
            const int y = labels[node];
            if (y < 0 || y >= p.cols())
                throw std::invalid_argument("loss: masked node " + std::to_string(node) +
                                            " lacks a valid label");
            acc += -std::log(std::max(p(node, y), 1e-12));
        }
    }
    return acc / (static_cast<double>(samples.probs.size()) * denom);
}

double loss_value(const ModelParams& params, const ModelContext& ctx,
                  const Eigen::MatrixXd& X, const std::vector<int>& labels,
                  const std::vector<int>& mask, int num_samples, std::uint64_t seed) {
    return loss(predict(params, ctx, X, num_samples, seed), labels, mask);
}

ModelParams gradients(const ModelParams& params, const ModelContext& ctx,
                      const Eigen::MatrixXd& X, const std::vector<int>& labels,
                      const std::vector<int>& mask, int num_samples,
                      std::uint64_t seed) {
    const int n = ctx.graph->num_nodes;
    const int steps = ctx.integ.steps;
    const double dt = ctx.integ.horizon / steps;
    const int layers = static_cast<int>(params.gcn_w.size());
    ModelParams grad = ModelParams::zeros_like(params);
    const double weight = 1.0 / (static_cast<double>(num_samples) * distinct_count(mask));

    for (int s = 0; s < num_samples; ++s) {
        ForwardCache cache;
        forward_probs(params, ctx, X, derive_seed(seed, s), &cache);

        // softmax cross-entropy head
        Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(n, ctx.dims.num_classes);
        for (int node : mask) {
            dlogits.row(node) += weight * cache.probs.row(node);
            dlogits(node, labels[node]) -= weight;
        }
        grad.dec_w.noalias() += cache.h_t.transpose() * dlogits;
        grad.dec_b.row(0) += dlogits.colwise().sum();
        Eigen::MatrixXd dH = dlogits * params.dec_w.transpose();

        // reverse the Euler steps
        for (int k = steps - 1; k >= 0; --k) {
            const StepCache& sc = cache.steps[k];
            Eigen::MatrixXd dV = dt * dH;
            // backward through the GCN stack applied to U
            for (int l = layers - 1; l >= 0; --l) {
                const Eigen::MatrixXd m = ctx.a_hat * sc.gcn_in[l];
                grad.gcn_w[l].noalias() += m.transpose() * dV;
                dV = ctx.a_hat * (dV * params.gcn_w[l].transpose());
            }
            const Eigen::MatrixXd& dU = dV;

            // F path
            {
                const Eigen::MatrixXd& dF = dU;
                grad.f_w2.noalias() += sc.Z1.transpose() * dF;
                grad.f_b2.row(0) += dF.colwise().sum();
                const Eigen::MatrixXd dZ1 = dF * params.f_w2.transpose();
                const Eigen::MatrixXd dP1 =
                    dZ1.array() * (1.0 - sc.Z1.array().square());
                grad.f_w1.noalias() += sc.H.transpose() * dP1;
                grad.f_b1.row(0) += dP1.colwise().sum();
                dH.noalias() += dP1 * params.f_w1.transpose();
            }
            // G path (gated by the fixed noise draw)
            {
                const Eigen::MatrixXd dG = dU.cwiseProduct(sc.noise);
                grad.g_w2.noalias() += sc.Z2.transpose() * dG;
                grad.g_b2.row(0) += dG.colwise().sum();
                const Eigen::MatrixXd dZ2 = dG * params.g_w2.transpose();
                const Eigen::MatrixXd dP2 =
                    dZ2.array() * (1.0 - sc.Z2.array().square());
                grad.g_w1.noalias() += sc.H.transpose() * dP2;
                grad.g_b1.row(0) += dP2.colwise().sum();
                dH.noalias() += dP2 * params.g_w1.transpose();
            }
        }

        // backward through the initial GCN stack
        for (int l = layers - 1; l >= 0; --l) {
            const Eigen::MatrixXd m = ctx.a_hat * cache.init_gcn_in[l];
            grad.gcn_w[l].noalias() += m.transpose() * dH;
            dH = ctx.a_hat * (dH * params.gcn_w[l].transpose());
        }

        // encoder
        grad.enc_w.noalias() += X.transpose() * dH;
        grad.enc_b.row(0) += dH.colwise().sum();
    }

    for (auto& [name, t] : grad.tensors())
        if (!t->allFinite())
            throw std::runtime_error("gradients: non-finite gradient in " + name);
    return grad;
}

UncertaintyScores uncertainty_scores(const PredictiveSamples& samples) {
    if (samples.probs.empty())
        throw std::invalid_argument("uncertainty_scores: no samples");
    const int n = static_cast<int>(samples.probs.front().rows());
    const int num_classes = static_cast<int>(samples.probs.front().cols());
    const int s_count = samples.num_samples();

    auto entropy_row = [&](const auto& row) {
        double acc = 0.0;
        for (int c = 0; c < num_classes; ++c) {
            const double p = row(c);
            if (p > 0) acc -= p * std::log(p);
        }
        return acc;
    };

    UncertaintyScores out;
    out.total.resize(n);
    out.aleatoric.resize(n);
    out.epistemic.resize(n);
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, num_classes);
    for (const auto& p : samples.probs) mean += p;
    mean /= static_cast<double>(s_count);

    for (int i = 0; i < n; ++i) {
        out.total[i] = entropy_row(mean.row(i));
        double alea = 0.0;
        for (const auto& p : samples.probs) alea += entropy_row(p.row(i));
        out.aleatoric[i] = alea / s_count;
        out.epistemic[i] = std::max(out.total[i] - out.aleatoric[i], 0.0);
    }
    return out;
}

} // namespace graphspde
