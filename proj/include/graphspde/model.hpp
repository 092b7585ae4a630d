#pragma once

#include "graphspde/graph.hpp"
#include "graphspde/kernels.hpp"
#include "graphspde/noise.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <string>
#include <vector>

namespace graphspde {

enum class NoiseMode { sispde_matern, sispde_rbf, gnsd_qwiener, deterministic };

NoiseMode noise_mode_from_string(const std::string& s);
std::string to_string(NoiseMode m);

struct IntegratorConfig {
    double horizon = 1.0; // T
    int steps = 10;
    int noise_samples_train = 3; // S
    NoiseMode noise_mode = NoiseMode::sispde_matern;

    void validate() const;
};

struct ModelConfig {
    int feature_dim = 0;
    int hidden_dim = 16;
    int num_classes = 2;
    int gcn_layers = 1;
};

/// All trainable weights. Biases are stored as 1 x dim matrices so every
/// tensor shares one type for the optimizer / gradient-check plumbing.
struct ModelParams {
    Eigen::MatrixXd enc_w, enc_b;
    std::vector<Eigen::MatrixXd> gcn_w;
    Eigen::MatrixXd f_w1, f_b1, f_w2, f_b2;
    Eigen::MatrixXd g_w1, g_b1, g_w2, g_b2;
    Eigen::MatrixXd dec_w, dec_b;

    std::vector<std::pair<std::string, Eigen::MatrixXd*>> tensors();
    std::vector<std::pair<std::string, const Eigen::MatrixXd*>> tensors() const;

    static ModelParams zeros_like(const ModelParams& other);
    double grad_norm() const;
};

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);

/// Per-step spatial noise source. The exact path holds a lower factor B with
/// B B^T = K (Cholesky); the filter path applies the half-power Chebyshev
/// polynomial to standard normals. Deterministic mode draws nothing.
struct NoiseSampler {
    NoiseMode mode = NoiseMode::deterministic;
    std::optional<Eigen::MatrixXd> factor;
    std::optional<ChebKernel> half_filter;
    Eigen::SparseMatrix<double> filter_laplacian;

    /// n x channels matrix with each column ~ N(0, K).
    Eigen::MatrixXd draw(int n, int channels, std::uint64_t seed) const;
};

/// Exact-path sampler: Cholesky factor of the mode's covariance
/// (Matern / RBF kernel, or the Laplacian itself for the Q-Wiener baseline).
NoiseSampler make_noise_sampler(const SpectralBasis& basis, const KernelSpec& spec,
                                NoiseMode mode);

/// Chebyshev-path sampler for graphs past the eigendecomposition cap.
NoiseSampler make_noise_sampler_cheb(const Eigen::SparseMatrix<double>& L,
                                     const KernelSpec& spec, NoiseMode mode,
                                     int degree, double lambda_bound);

/// Symmetric GCN propagation matrix D~^{-1/2} (A + I) D~^{-1/2}.
Eigen::SparseMatrix<double> gcn_adjacency(const Graph& g);

/// One linear graph convolution: A_hat H W.
Eigen::MatrixXd gcn_forward(const Graph& g, const Eigen::MatrixXd& H,
                            const Eigen::MatrixXd& weights);

/// Everything integrate/predict need per call site.
struct ModelContext {
    const Graph* graph = nullptr;
    Eigen::SparseMatrix<double> a_hat;
    ModelConfig dims;
    IntegratorConfig integ;
    NoiseSampler sampler;
};

ModelContext make_context(const Graph& g, const ModelConfig& dims,
                          const IntegratorConfig& integ, NoiseSampler sampler);

/// Seed of the step-k noise draw inside integrate (lets tests replay a step).
std::uint64_t step_noise_seed(std::uint64_t seed, int step);

/// Explicit Euler integration of the randomly forced graph ODE
///   H <- H + dt * GNN(F(H) + G(H) .* dW/dt),  dW ~ N(0, dt K) per channel,
/// starting from the given initial state. predict() follows the Eq.-10
/// composition and seeds this with the graph-convolved encoder output.
/// `forced_noise`, when given, supplies dW/dt per step and bypasses the
/// sampler (refinement tests). Throws on non-finite state, naming the step.
Eigen::MatrixXd integrate(const ModelParams& params, const ModelContext& ctx,
                          const Eigen::MatrixXd& H0, std::uint64_t seed,
                          const std::vector<Eigen::MatrixXd>* forced_noise = nullptr);

/// S per-sample class probability matrices (each n x C, rows sum to 1).
struct PredictiveSamples {
    std::vector<Eigen::MatrixXd> probs;
    int num_samples() const { return static_cast<int>(probs.size()); }
};

/// Runs S independent noise realizations; sample s uses derive_seed(seed, s).
PredictiveSamples predict(const ModelParams& params, const ModelContext& ctx,
                          const Eigen::MatrixXd& X, int num_samples,
                          std::uint64_t seed);

/// Expected cross-entropy over the predictive distribution: mean over samples
/// and masked nodes of -log p[label]. Mask entries may repeat; repeats weight
/// a node's term while the divisor counts distinct nodes. Probabilities are
/// floored at 1e-12 before the log.
double loss(const PredictiveSamples& samples, const std::vector<int>& labels,
            const std::vector<int>& mask);

/// Loss evaluated at (params, X) with the same seed derivation as predict;
/// the function gradients() differentiates.
double loss_value(const ModelParams& params, const ModelContext& ctx,
                  const Eigen::MatrixXd& X, const std::vector<int>& labels,
                  const std::vector<int>& mask, int num_samples, std::uint64_t seed);

/// Exact reverse-mode gradients of loss_value for the fixed noise realization
/// (pathwise; noise draws are constants given the seed).
ModelParams gradients(const ModelParams& params, const ModelContext& ctx,
                      const Eigen::MatrixXd& X, const std::vector<int>& labels,
                      const std::vector<int>& mask, int num_samples,
                      std::uint64_t seed);

struct UncertaintyScores {
    Eigen::VectorXd total;     // H[mean_s p]
    Eigen::VectorXd aleatoric; // mean_s H[p]
    Eigen::VectorXd epistemic; // total - aleatoric, clamped at 0
};

UncertaintyScores uncertainty_scores(const PredictiveSamples& samples);

} // namespace graphspde
