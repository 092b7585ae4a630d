#include "graphspde/graph.hpp"
#include "graphspde/kernels.hpp"
#include "graphspde/model.hpp"
#include "graphspde/rng.hpp"
#include "graphspde/spectral.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace graphspde;

namespace {

SpectralBasis basis_of(const Graph& g) {
    return eigendecompose(laplacian(g, LaplacianKind::combinatorial));
}

ModelContext context_for(const Graph& g, NoiseMode mode, int hidden, int classes,
                         int steps, double horizon, double nu = 1.0,
                         double kappa = 1.0, int layers = 1) {
    ModelConfig dims;
    dims.feature_dim = 0; // set by callers via X
    dims.hidden_dim = hidden;
    dims.num_classes = classes;
    dims.gcn_layers = layers;
    IntegratorConfig integ;
    integ.horizon = horizon;
    integ.steps = steps;
    integ.noise_mode = mode;
    NoiseSampler sampler;
    if (mode == NoiseMode::deterministic)
        sampler.mode = mode;
    else
        sampler = make_noise_sampler(basis_of(g), {KernelFamily::matern, nu, kappa, false},
                                     mode);
    return make_context(g, dims, integ, std::move(sampler));
}

ModelParams random_params(const ModelConfig& dims, std::uint64_t seed) {
    return init_params(dims, seed);
}

} // namespace

TEST_CASE("gcn_forward: edgeless graph with identity weights returns H") {
    const Graph g = build_graph({}, 3);
    Eigen::MatrixXd H(3, 2);
    H << 1, 2, 3, 4, 5, 6;
    const Eigen::MatrixXd out = gcn_forward(g, H, Eigen::MatrixXd::Identity(2, 2));
    CHECK((out - H).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gcn_forward: P2 hand mat-vec") {
    const Graph g = testutil::path2();
    Eigen::MatrixXd H(2, 1);
    H << 1, 0;
    Eigen::MatrixXd W(1, 1);
    W << 1;
    const Eigen::MatrixXd out = gcn_forward(g, H, W);
    CHECK(out(0, 0) == doctest::Approx(0.5));
    CHECK(out(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("gcn_forward: matches a dense oracle on a random case") {
    const Graph g = testutil::er_graph(12, 0.3, 44);
    Rng rng(3);
    Eigen::MatrixXd H(12, 4), W(4, 3);
    for (int i = 0; i < H.size(); ++i) H(i / 4, i % 4) = rng.normal();
    for (int i = 0; i < W.size(); ++i) W(i / 3, i % 3) = rng.normal();

    // dense oracle: build A+I and the degree scaling by hand
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(12, 12);
    for (const auto& [u, v] : g.edge_list()) A(u, v) = A(v, u) = 1.0;
    Eigen::VectorXd dinv = A.rowwise().sum().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd a_hat = dinv.asDiagonal() * A * dinv.asDiagonal();
    CHECK((gcn_forward(g, H, W) - a_hat * H * W).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gcn_forward: shape mismatch is rejected") {
    const Graph g = testutil::path2();
    CHECK_THROWS_AS(gcn_forward(g, Eigen::MatrixXd::Ones(3, 2),
                                Eigen::MatrixXd::Identity(2, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(gcn_forward(g, Eigen::MatrixXd::Ones(2, 3),
                                Eigen::MatrixXd::Identity(2, 2)),
                    std::invalid_argument);
}

TEST_CASE("integrate: zero vector field leaves the state unchanged") {
    const Graph g = testutil::er_graph(6, 0.5, 10);
    ModelContext ctx = context_for(g, NoiseMode::deterministic, 3, 2, 16, 1.0);
    ModelConfig dims = ctx.dims;
    dims.feature_dim = 3;
    ModelParams p = ModelParams::zeros_like(random_params(dims, 1));
    Rng rng(9);
    Eigen::MatrixXd H0(6, 3);
    for (int i = 0; i < H0.size(); ++i) H0(i / 3, i % 3) = rng.normal();
    const Eigen::MatrixXd HT = integrate(p, ctx, H0, 5);
    CHECK((HT - H0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("integrate: bit-identical across runs for a fixed seed") {
    const Graph g = testutil::er_graph(6, 0.5, 12);
    ModelContext ctx = context_for(g, NoiseMode::sispde_matern, 4, 2, 8, 1.0);
    ModelConfig dims = ctx.dims;
    dims.feature_dim = 4;
    const ModelParams p = random_params(dims, 7);
    Rng rng(11);
    Eigen::MatrixXd H0(6, 4);
    for (int i = 0; i < H0.size(); ++i) H0(i / 4, i % 4) = rng.normal();
    const Eigen::MatrixXd a = integrate(p, ctx, H0, 21);
    const Eigen::MatrixXd b = integrate(p, ctx, H0, 21);
    CHECK(a == b);
}

TEST_CASE("integrate: one q-wiener step equals the hand-coded update rule") {
    const Graph g = testutil::er_graph(5, 0.6, 14);
    ModelContext ctx = context_for(g, NoiseMode::gnsd_qwiener, 3, 2, 1, 0.25);
    ModelConfig dims = ctx.dims;
    dims.feature_dim = 3;
    const ModelParams p = random_params(dims, 3);
    Rng rng(2);
    Eigen::MatrixXd H0(5, 3);
    for (int i = 0; i < H0.size(); ++i) H0(i / 3, i % 3) = rng.normal();

    const double dt = 0.25;
    const Eigen::MatrixXd a_hat(gcn_adjacency(g));
    const Eigen::MatrixXd& H = H0;
    const Eigen::MatrixXd noise =
        ctx.sampler.draw(5, 3, step_noise_seed(21, 0)) / std::sqrt(dt);
    const Eigen::MatrixXd z1 = ((H * p.f_w1).rowwise() + p.f_b1.row(0)).array().tanh();
    const Eigen::MatrixXd f = (z1 * p.f_w2).rowwise() + p.f_b2.row(0);
    const Eigen::MatrixXd z2 = ((H * p.g_w1).rowwise() + p.g_b1.row(0)).array().tanh();
    const Eigen::MatrixXd gg = (z2 * p.g_w2).rowwise() + p.g_b2.row(0);
    const Eigen::MatrixXd expected =
        H + dt * (a_hat * (f + gg.cwiseProduct(noise)) * p.gcn_w[0]);

    const Eigen::MatrixXd got = integrate(p, ctx, H0, 21);
    CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("integrate: deterministic mode with G=0 is the heat-style update") {
    const Graph g = testutil::er_graph(5, 0.6, 15);
    ModelContext ctx = context_for(g, NoiseMode::deterministic, 3, 2, 1, 0.5);
    ModelConfig dims = ctx.dims;
    dims.feature_dim = 3;
    ModelParams p = random_params(dims, 4);
    p.g_w1.setZero();
    p.g_b1.setZero();
    p.g_w2.setZero();
    p.g_b2.setZero();
    Rng rng(6);
    Eigen::MatrixXd H0(5, 3);
    for (int i = 0; i < H0.size(); ++i) H0(i / 3, i % 3) = rng.normal();

    const Eigen::MatrixXd a_hat(gcn_adjacency(g));
    const Eigen::MatrixXd& H = H0;
    const Eigen::MatrixXd z1 = ((H * p.f_w1).rowwise() + p.f_b1.row(0)).array().tanh();
    const Eigen::MatrixXd f = (z1 * p.f_w2).rowwise() + p.f_b2.row(0);
    const Eigen::MatrixXd expected = H + 0.5 * (a_hat * f * p.gcn_w[0]);
    CHECK((integrate(p, ctx, H0, 3) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("integrate: Euler-Maruyama self-refinement on a linear additive system") {
    // GNN = identity, F approximately linear (epsilon-scaled tanh), G constant.
    const Graph g = testutil::er_graph(6, 0.5, 16);
    const int h = 3;
    const double eps = 1e-6;
    Rng rng(8);
    Eigen::MatrixXd M1(h, h), M2(h, h);
    for (int i = 0; i < h * h; ++i) M1(i / h, i % h) = 0.4 * rng.normal();
    M2.setIdentity();

    ModelConfig dims{h, h, 2, 1};
    auto make_params = [&] {
        ModelParams p = ModelParams::zeros_like(init_params(dims, 1));
        p.gcn_w[0].setIdentity();
        p.f_w1 = eps * M1;
        p.f_w2 = M2 / eps;
        p.g_b2.setConstant(0.5); // constant diffusion gate
        return p;
    };
    const ModelParams p = make_params();

    const auto basis = basis_of(g);
    const CovMatrix K = matern_kernel_exact(basis, {KernelFamily::matern, 1.0, 1.0, false});
    const Eigen::MatrixXd factor = cholesky(K.K);

    Eigen::MatrixXd H0(6, h);
    for (int i = 0; i < H0.size(); ++i) H0(i / h, i % h) = rng.normal();

    const int ref_steps = 4096;
    const double T = 1.0;
    const int paths = 12;
    std::vector<double> errors;
    const std::vector<int> coarse = {16, 64, 256};
    std::vector<std::vector<double>> per_res(coarse.size());

    for (int path = 0; path < paths; ++path) {
        // one shared Brownian path at the fine resolution
        Rng prng(derive_seed(1000, path));
        std::vector<Eigen::MatrixXd> fine(ref_steps);
        const double fine_dt = T / ref_steps;
        for (int k = 0; k < ref_steps; ++k) {
            Eigen::MatrixXd z(6, h);
            for (int c = 0; c < h; ++c)
                for (int i = 0; i < 6; ++i) z(i, c) = prng.normal();
            fine[k] = std::sqrt(fine_dt) * (factor * z); // dW increment
        }
        auto run_at = [&](int steps) {
            IntegratorConfig integ;
            integ.horizon = T;
            integ.steps = steps;
            NoiseSampler sampler;
            sampler.mode = NoiseMode::sispde_matern; // forced noise bypasses draws
            ModelContext ctx = make_context(g, dims, integ, std::move(sampler));
            const int ratio = ref_steps / steps;
            const double dt = T / steps;
            std::vector<Eigen::MatrixXd> forcing(steps, Eigen::MatrixXd::Zero(6, h));
            for (int k = 0; k < steps; ++k) {
                for (int r = 0; r < ratio; ++r) forcing[k] += fine[k * ratio + r];
                forcing[k] /= dt; // dW/dt over the coarse window
            }
            return integrate(p, ctx, H0, 0, &forcing);
        };
        const Eigen::MatrixXd ref = run_at(ref_steps);
        for (std::size_t r = 0; r < coarse.size(); ++r)
            per_res[r].push_back((run_at(coarse[r]) - ref).norm());
    }

    std::vector<double> strong(coarse.size(), 0.0);
    for (std::size_t r = 0; r < coarse.size(); ++r) {
        for (double e : per_res[r]) strong[r] += e;
        strong[r] /= paths;
    }
    CHECK(strong[0] > strong[1]);
    CHECK(strong[1] > strong[2]);
    // slope of log error vs log dt should be at least ~1/2
    const double slope = (std::log(strong[0]) - std::log(strong[2])) /
                         (std::log(T / coarse[0]) - std::log(T / coarse[2]));
    CHECK(slope >= 0.45);
}

TEST_CASE("integrate: divergence names the failing step") {
    const Graph g = testutil::er_graph(4, 0.6, 11);
    ModelContext ctx = context_for(g, NoiseMode::deterministic, 2, 2, 4, 1.0);
    ModelConfig dims = ctx.dims;
    dims.feature_dim = 2;
    ModelParams p = random_params(dims, 2);
    p.f_b2.setConstant(1e200); // 1e200 drift through 1e200 GCN weights overflows
    p.gcn_w[0].setConstant(1e200);
    Eigen::MatrixXd H0 = Eigen::MatrixXd::Ones(4, 2);
    CHECK_THROWS_WITH_AS(integrate(p, ctx, H0, 1), doctest::Contains("step"),
                         std::runtime_error);
}

TEST_CASE("predict: deterministic mode gives identical samples, rows sum to 1") {
    const Graph g = testutil::er_graph(6, 0.5, 18);
    ModelContext ctx = context_for(g, NoiseMode::deterministic, 4, 3, 6, 1.0);
    ModelConfig dims = ctx.dims;
    dims.feature_dim = 2;
    const ModelParams p = random_params(dims, 5);
    Rng rng(4);
    Eigen::MatrixXd X(6, 2);
    for (int i = 0; i < X.size(); ++i) X(i / 2, i % 2) = rng.normal();
    const PredictiveSamples samples = predict(p, ctx, X, 4, 9);
    for (const auto& probs : samples.probs) {
        CHECK((probs - samples.probs.front()).cwiseAbs().maxCoeff() == 0.0);
        for (int i = 0; i < probs.rows(); ++i) {
            CHECK(probs.row(i).sum() == doctest::Approx(1.0).epsilon(1e-6));
            CHECK(probs.row(i).minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("predict: S=2 stochastic samples differ") {
    const Graph g = testutil::er_graph(6, 0.5, 19);
    ModelContext ctx = context_for(g, NoiseMode::sispde_matern, 4, 2, 6, 1.0);
    ModelConfig dims = ctx.dims;
    dims.feature_dim = 2;
    const ModelParams p = random_params(dims, 6);
    Rng rng(5);
    Eigen::MatrixXd X(6, 2);
    for (int i = 0; i < X.size(); ++i) X(i / 2, i % 2) = rng.normal();
    const PredictiveSamples samples = predict(p, ctx, X, 2, 9);
    CHECK((samples.probs[0] - samples.probs[1]).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("predict: S=2 on a 2-node graph matches a scalar-arithmetic trace") {
    const Graph g = build_graph({{0, 1}}, 2);
    ModelContext ctx = context_for(g, NoiseMode::gnsd_qwiener, 2, 2, 1, 0.5);
    ModelConfig dims = ctx.dims;
    dims.feature_dim = 2;
    const ModelParams p = random_params(dims, 41);
    Eigen::MatrixXd X(2, 2);
    X << 0.3, -0.7, 1.1, 0.4;
    const std::uint64_t seed = 23;
    const PredictiveSamples got = predict(p, ctx, X, 2, seed);

    // oracle: same formulas evaluated with plain scalar loops
    const double dt = 0.5;
    auto a_hat_entry = [](int i, int j) { return 0.5; }; // P2: D~=2I, A+I all-ones
    for (int s = 0; s < 2; ++s) {
        const std::uint64_t sample_seed = derive_seed(seed, s);
        double E[2][2], H[2][2];
        for (int i = 0; i < 2; ++i)
            for (int c = 0; c < 2; ++c) {
                E[i][c] = p.enc_b(0, c);
                for (int d = 0; d < 2; ++d) E[i][c] += X(i, d) * p.enc_w(d, c);
            }
        for (int i = 0; i < 2; ++i)
            for (int c = 0; c < 2; ++c) {
                double agg = 0.0;
                for (int j = 0; j < 2; ++j)
                    for (int d = 0; d < 2; ++d)
                        agg += a_hat_entry(i, j) * E[j][d] * p.gcn_w[0](d, c);
                H[i][c] = agg;
            }
        const Eigen::MatrixXd noise =
            ctx.sampler.draw(2, 2, step_noise_seed(sample_seed, 0)) / std::sqrt(dt);
        double Hn[2][2];
        for (int i = 0; i < 2; ++i)
            for (int c = 0; c < 2; ++c) {
                double f = p.f_b2(0, c), gg = p.g_b2(0, c);
                for (int d = 0; d < 2; ++d) {
                    double t1 = p.f_b1(0, d), t2 = p.g_b1(0, d);
                    for (int e = 0; e < 2; ++e) {
                        t1 += H[i][e] * p.f_w1(e, d);
                        t2 += H[i][e] * p.g_w1(e, d);
                    }
                    f += std::tanh(t1) * p.f_w2(d, c);
                    gg += std::tanh(t2) * p.g_w2(d, c);
                }
                Hn[i][c] = f + gg * noise(i, c); // U before the GCN stack
            }
        double HT[2][2];
        for (int i = 0; i < 2; ++i)
            for (int c = 0; c < 2; ++c) {
                double agg = 0.0;
                for (int j = 0; j < 2; ++j)
                    for (int d = 0; d < 2; ++d)
                        agg += a_hat_entry(i, j) * Hn[j][d] * p.gcn_w[0](d, c);
                HT[i][c] = H[i][c] + dt * agg;
            }
        for (int i = 0; i < 2; ++i) {
            double logits[2];
            for (int c = 0; c < 2; ++c) {
                logits[c] = p.dec_b(0, c);
                for (int d = 0; d < 2; ++d) logits[c] += HT[i][d] * p.dec_w(d, c);
            }
            const double m = std::max(logits[0], logits[1]);
            const double e0 = std::exp(logits[0] - m), e1 = std::exp(logits[1] - m);
            CHECK(got.probs[s](i, 0) == doctest::Approx(e0 / (e0 + e1)).epsilon(1e-12));
            CHECK(got.probs[s](i, 1) == doctest::Approx(e1 / (e0 + e1)).epsilon(1e-12));
        }
    }
}

TEST_CASE("loss: hand cases") {
    PredictiveSamples samples;
    Eigen::MatrixXd p1(1, 2), p2(1, 2);

    // perfect one-hot prediction
    p1 << 1.0, 0.0;
    samples.probs = {p1};
    CHECK(loss(samples, {0}, {0}) == doctest::Approx(0.0).epsilon(1e-9));

    // uniform prediction over C classes
    Eigen::MatrixXd u(1, 4);
    u.setConstant(0.25);
    samples.probs = {u};
    CHECK(loss(samples, {2}, {0}) == doctest::Approx(std::log(4.0)));

    // S=2 with probs 0.5 and 0.25 on the true class
    p1 << 0.5, 0.5;
    p2 << 0.25, 0.75;
    samples.probs = {p1, p2};
    CHECK(loss(samples, {0}, {0}) ==
          doctest::Approx(-(std::log(0.5) + std::log(0.25)) / 2.0));
}

TEST_CASE("loss: duplicated mask nodes double the loss") {
    PredictiveSamples samples;
    Eigen::MatrixXd p(2, 2);
    p << 0.4, 0.6, 0.7, 0.3;
    samples.probs = {p};
    const double base = loss(samples, {0, 0}, {0, 1});
    const double doubled = loss(samples, {0, 0}, {0, 0, 1, 1});
    CHECK(doubled == doctest::Approx(2.0 * base));
}

TEST_CASE("gradients: finite differences across all four noise modes") {
    const Graph g = testutil::er_graph(6, 0.5, 20);
    Rng rng(13);
    Eigen::MatrixXd X(6, 3);
    for (int i = 0; i < X.size(); ++i) X(i / 3, i % 3) = rng.normal();
    const std::vector<int> labels = {0, 1, 0, 1, 0, 1};
    const std::vector<int> mask = {0, 2, 3, 5};

    for (NoiseMode mode : {NoiseMode::sispde_matern, NoiseMode::sispde_rbf,
                           NoiseMode::gnsd_qwiener, NoiseMode::deterministic}) {
        CAPTURE(to_string(mode));
        ModelContext ctx = context_for(g, mode, 4, 2, 8, 0.5);
        ModelConfig dims = ctx.dims;
        dims.feature_dim = 3;
        ModelParams p = random_params(dims, 31);
        const int S = 2;
        const std::uint64_t seed = 17;
        ModelParams grad = gradients(p, ctx, X, labels, mask, S, seed);

        auto tensors = p.tensors();
        auto grads = grad.tensors();
        const double h = 1e-5;
        for (std::size_t t = 0; t < tensors.size(); ++t) {
            Eigen::MatrixXd& w = *tensors[t].second;
            const Eigen::MatrixXd& gw = *grads[t].second;
            for (int i = 0; i < w.rows(); ++i)
                for (int j = 0; j < w.cols(); ++j) {
                    const double orig = w(i, j);
                    w(i, j) = orig + h;
                    const double up = loss_value(p, ctx, X, labels, mask, S, seed);
                    w(i, j) = orig - h;
                    const double down = loss_value(p, ctx, X, labels, mask, S, seed);
                    w(i, j) = orig;
                    const double fd = (up - down) / (2.0 * h);
                    const double rel =
                        std::abs(gw(i, j) - fd) / (std::abs(gw(i, j)) + 1e-8);
                    CAPTURE(tensors[t].first);
                    CHECK(rel < 1e-4);
                }
        }
    }
}

TEST_CASE("gradients: zero loss at a perfect deterministic fit gives zero gradient") {
    // logits pushed to a perfect fit via a saturated decoder on an edgeless graph
    const Graph g = build_graph({}, 2);
    ModelContext ctx = context_for(g, NoiseMode::deterministic, 2, 2, 1, 1.0);
    ModelConfig dims = ctx.dims;
    dims.feature_dim = 2;
    ModelParams p = ModelParams::zeros_like(init_params(dims, 1));
    p.gcn_w[0].setIdentity();
    p.enc_w.setIdentity();
    p.dec_w << 60.0, -60.0, -60.0, 60.0; // softmax saturates to one-hot
    Eigen::MatrixXd X(2, 2);
    X << 1, 0, 0, 1;
    const std::vector<int> labels = {0, 1};
    const ModelParams grad = gradients(p, ctx, X, labels, {0, 1}, 1, 3);
    CHECK(grad.grad_norm() < 1e-8);
}

TEST_CASE("gradients: duplicated mask doubles the gradient") {
    const Graph g = testutil::er_graph(5, 0.5, 22);
    ModelContext ctx = context_for(g, NoiseMode::sispde_matern, 3, 2, 4, 0.5);
    ModelConfig dims = ctx.dims;
    dims.feature_dim = 2;
    const ModelParams p = random_params(dims, 8);
    Rng rng(14);
    Eigen::MatrixXd X(5, 2);
    for (int i = 0; i < X.size(); ++i) X(i / 2, i % 2) = rng.normal();
    const std::vector<int> labels = {0, 1, 0, 1, 0};
    const ModelParams g1 = gradients(p, ctx, X, labels, {1, 3}, 2, 5);
    const ModelParams g2 = gradients(p, ctx, X, labels, {1, 1, 3, 3}, 2, 5);
    auto t1 = g1.tensors();
    auto t2 = g2.tensors();
    for (std::size_t t = 0; t < t1.size(); ++t)
        CHECK((2.0 * *t1[t].second - *t2[t].second).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("uncertainty_scores: hand cases") {
    PredictiveSamples samples;
    Eigen::MatrixXd u(1, 3);
    u.setConstant(1.0 / 3.0);
    samples.probs = {u, u};
    UncertaintyScores s = uncertainty_scores(samples);
    CHECK(s.total[0] == doctest::Approx(std::log(3.0)));
    CHECK(s.epistemic[0] == doctest::Approx(0.0));

    Eigen::MatrixXd onehot(1, 3);
    onehot << 1.0, 0.0, 0.0;
    samples.probs = {onehot, onehot};
    s = uncertainty_scores(samples);
    CHECK(s.total[0] == doctest::Approx(0.0));
    CHECK(s.aleatoric[0] == doctest::Approx(0.0));
    CHECK(s.epistemic[0] == doctest::Approx(0.0));

    Eigen::MatrixXd p1(1, 2), p2(1, 2);
    p1 << 1.0, 0.0;
    p2 << 0.0, 1.0;
    samples.probs = {p1, p2};
    s = uncertainty_scores(samples);
    CHECK(s.total[0] == doctest::Approx(std::log(2.0)));
    CHECK(s.aleatoric[0] == doctest::Approx(0.0));
    CHECK(s.epistemic[0] == doctest::Approx(std::log(2.0)));
}

TEST_CASE("uncertainty_scores: epistemic stays nonnegative on random samples") {
    Rng rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        PredictiveSamples samples;
        const int S = 1 + static_cast<int>(rng.uniform() * 5);
        const int n = 3, C = 4;
        for (int s = 0; s < S; ++s) {
            Eigen::MatrixXd p(n, C);
            for (int i = 0; i < n; ++i) {
                double total = 0.0;
                for (int c = 0; c < C; ++c) {
                    p(i, c) = -std::log(std::max(rng.uniform(), 1e-12));
                    total += p(i, c);
                }
                p.row(i) /= total;
            }
            samples.probs.push_back(p);
        }
        const UncertaintyScores s = uncertainty_scores(samples);
        CHECK(s.epistemic.minCoeff() >= 0.0);
    }
}
