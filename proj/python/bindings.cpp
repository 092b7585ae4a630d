#include "graphspde/checkpoint.hpp"
#include "graphspde/dataset.hpp"
#include "graphspde/kernels.hpp"
#include "graphspde/model.hpp"
#include "graphspde/noise.hpp"
#include "graphspde/ood.hpp"
#include "graphspde/rewire.hpp"
#include "graphspde/rng.hpp"
#include "graphspde/spectral.hpp"
#include "graphspde/train.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace graphspde;

namespace {

LaplacianKind lap_kind(const std::string& s) {
    if (s == "combinatorial") return LaplacianKind::combinatorial;
    if (s == "sym-normalized" || s == "normalized") return LaplacianKind::sym_normalized;
    throw std::invalid_argument("unknown laplacian kind '" + s + "'");
}

KernelSpec make_spec(const std::string& family, double nu, double kappa, bool normalize) {
    KernelSpec spec;
    spec.family = family == "rbf" ? KernelFamily::rbf : KernelFamily::matern;
    spec.nu = nu;
    spec.kappa = kappa;
    spec.normalize = normalize;
    return spec;
}

/// Owns graph + context + trained parameters so Python callers need no
/// lifetime bookkeeping.
struct ModelHandle {
    Graph graph;
    ModelContext ctx;
    ModelParams params;
    std::vector<EpochRecord> history;

    std::vector<Eigen::MatrixXd> predict_probs(int num_samples, std::uint64_t seed) const {
        return predict(params, ctx, *graph.features, num_samples, seed).probs;
    }

    py::dict uncertainty(int num_samples, std::uint64_t seed) const {
        const PredictiveSamples samples =
            predict(params, ctx, *graph.features, num_samples, seed);
        const UncertaintyScores s = uncertainty_scores(samples);
        py::dict d;
        d["total"] = s.total;
        d["aleatoric"] = s.aleatoric;
        d["epistemic"] = s.epistemic;
        return d;
    }
};

std::unique_ptr<ModelHandle> train_model_py(
    const Graph& g, const std::string& noise_mode, double nu, double kappa,
    const std::vector<int>& train_idx, const std::vector<int>& val_idx, int hidden_dim,
    int steps, double horizon, int noise_samples, double learning_rate,
    double weight_decay, int max_epochs, int patience, std::uint64_t seed) {
    if (!g.features || !g.labels)
        throw std::invalid_argument("train_model: graph needs features and labels");
    auto handle = std::make_unique<ModelHandle>();
    handle->graph = g;

    const NoiseMode mode = noise_mode_from_string(noise_mode);
    const auto L = laplacian(handle->graph, LaplacianKind::combinatorial);
    NoiseSampler sampler;
    if (mode != NoiseMode::deterministic)
        sampler = make_noise_sampler(eigendecompose(L), make_spec("matern", nu, kappa, false),
                                     mode);

    ModelConfig dims;
    dims.feature_dim = static_cast<int>(handle->graph.features->cols());
    dims.hidden_dim = hidden_dim;
    dims.num_classes = handle->graph.num_classes();
    IntegratorConfig integ;
    integ.horizon = horizon;
    integ.steps = steps;
    integ.noise_samples_train = noise_samples;
    integ.noise_mode = mode;
    handle->ctx = make_context(handle->graph, dims, integ, std::move(sampler));
    handle->ctx.graph = &handle->graph;

    OptimizerConfig opt;
    opt.learning_rate = learning_rate;
    opt.weight_decay = weight_decay;
    opt.max_epochs = max_epochs;
    opt.patience = patience;
    TrainResult res = train(handle->ctx, *handle->graph.features, *handle->graph.labels,
                            train_idx, val_idx, opt, seed);
    handle->params = std::move(res.params);
    handle->history = std::move(res.history);
    return handle;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Graph Matern SPDE core: kernels, noise processes, the neural "
              "SDE model, and OOD evaluation metrics.";

    py::class_<Graph>(m, "Graph")
        .def(py::init([](const std::vector<std::pair<int, int>>& edges, int n) {
                 return build_graph(edges, n);
             }),
             py::arg("edges"), py::arg("num_nodes"))
        .def_readonly("num_nodes", &Graph::num_nodes)
        .def_property_readonly("num_edges", &Graph::num_edges)
        .def_property_readonly("max_degree", &Graph::max_degree)
        .def("degree", &Graph::degree)
        .def("has_edge", &Graph::has_edge)
        .def("edge_list", &Graph::edge_list)
        .def_property(
            "features",
            [](const Graph& g) -> py::object {
                if (!g.features) return py::none();
                return py::cast(*g.features);
            },
            [](Graph& g, const Eigen::MatrixXd& X) { g.features = X; })
        .def_property(
            "labels",
            [](const Graph& g) -> py::object {
                if (!g.labels) return py::none();
                return py::cast(*g.labels);
            },
            [](Graph& g, const std::vector<int>& y) { g.labels = y; });

    m.def("sbm_generate", &sbm_generate, py::arg("block_sizes"), py::arg("p_in"),
          py::arg("p_out"), py::arg("seed"));
    m.def("sbm_block_labels", &sbm_block_labels);
    m.def(
        "laplacian",
        [](const Graph& g, const std::string& kind) {
            return Eigen::MatrixXd(laplacian(g, lap_kind(kind)));
        },
        py::arg("graph"), py::arg("kind") = "combinatorial");
    m.def("load_dataset", &load_dataset);
    m.def("save_dataset", &save_dataset);

    py::class_<SpectralBasis>(m, "SpectralBasis")
        .def_readonly("eigenvalues", &SpectralBasis::eigenvalues)
        .def_readonly("eigenvectors", &SpectralBasis::eigenvectors);
    m.def(
        "eigendecompose",
        [](const Graph& g, const std::string& kind, int cap) {
            return eigendecompose(laplacian(g, lap_kind(kind)), lap_kind(kind), cap);
        },
        py::arg("graph"), py::arg("kind") = "combinatorial", py::arg("cap") = 2000);

    m.def(
        "matern_kernel",
        [](const SpectralBasis& basis, double nu, double kappa, bool normalize) {
            return matern_kernel_exact(basis, make_spec("matern", nu, kappa, normalize)).K;
        },
        py::arg("basis"), py::arg("nu"), py::arg("kappa"), py::arg("normalize") = false);
    m.def(
        "rbf_kernel",
        [](const SpectralBasis& basis, double kappa, bool normalize) {
            return rbf_kernel_exact(basis, kappa, normalize).K;
        },
        py::arg("basis"), py::arg("kappa"), py::arg("normalize") = false);

    py::class_<ChebKernel>(m, "ChebKernel")
        .def_readonly("degree", &ChebKernel::degree)
        .def_readonly("coefficients", &ChebKernel::coefficients)
        .def_readonly("lambda_max_bound", &ChebKernel::lambda_max_bound);
    m.def(
        "chebyshev_fit",
        [](const std::string& family, double nu, double kappa, int degree,
           double bound, double power) {
            return chebyshev_fit(make_spec(family, nu, kappa, false), degree, bound, power);
        },
        py::arg("family"), py::arg("nu"), py::arg("kappa"), py::arg("degree"),
        py::arg("lambda_max_bound"), py::arg("power") = 1.0);
    m.def(
        "chebyshev_apply",
        [](const Graph& g, const ChebKernel& k, const Eigen::MatrixXd& v,
           const std::string& kind) {
            return chebyshev_apply(laplacian(g, lap_kind(kind)), k, v);
        },
        py::arg("graph"), py::arg("kernel"), py::arg("v"),
        py::arg("kind") = "combinatorial");
    m.def("cheb_error_bound", &cheb_error_bound, py::arg("nu"), py::arg("kappa"),
          py::arg("d_max"), py::arg("m"));
    m.def(
        "lambda_max_bound",
        [](const Graph& g, const std::string& kind) {
            return lambda_max_bound(g, laplacian(g, lap_kind(kind)));
        },
        py::arg("graph"), py::arg("kind") = "combinatorial");
    m.def("cholesky", &cholesky, py::arg("K"), py::arg("jitter") = 1e-12);

    m.def(
        "sample_grf",
        [](const Eigen::MatrixXd& K, double scale, std::uint64_t seed) {
            CovMatrix cov;
            cov.K = K;
            return sample_grf(cov, scale, seed);
        },
        py::arg("K"), py::arg("scale"), py::arg("seed"));
    m.def(
        "simulate_phi_wiener",
        [](const SpectralBasis& basis, const std::string& family, double nu,
           double kappa, const std::vector<double>& times, std::uint64_t seed) {
            PhiSpec phi;
            if (family == "matern")
                phi = PhiSpec{PhiSpec::Family::matern, nu, kappa};
            else if (family == "rbf")
                phi = PhiSpec{PhiSpec::Family::rbf, nu, kappa};
            else if (family == "identity")
                phi = PhiSpec{PhiSpec::Family::identity, 0, 0};
            else
                throw std::invalid_argument("unknown phi family '" + family + "'");
            const NoisePath path = simulate_phi_wiener(basis, phi, times, seed);
            Eigen::MatrixXd values(path.values.size(), basis.size());
            for (std::size_t t = 0; t < path.values.size(); ++t)
                values.row(t) = path.values[t];
            return std::make_pair(path.times, values);
        },
        py::arg("basis"), py::arg("family"), py::arg("nu"), py::arg("kappa"),
        py::arg("times"), py::arg("seed"));
    m.def(
        "empirical_covariance",
        [](const Eigen::MatrixXd& samples) {
            std::vector<Eigen::VectorXd> rows(samples.rows());
            for (int i = 0; i < samples.rows(); ++i) rows[i] = samples.row(i);
            const CovEstimate est = empirical_covariance(rows);
            return std::make_pair(est.cov, est.se);
        },
        py::arg("samples"), "rows are samples; returns (cov, standard errors)");

    m.def("label_informativeness", &label_informativeness);
    m.def("edge_homophily", &edge_homophily);
    m.def(
        "ood_metrics",
        [](const std::vector<double>& scores, const std::vector<int>& is_ood) {
            std::vector<std::uint8_t> flags(is_ood.begin(), is_ood.end());
            const OODReport r = ood_metrics(scores, flags);
            py::dict d;
            d["auc"] = r.auc;
            d["fpr95"] = r.fpr95;
            d["det_acc"] = r.det_acc;
            return d;
        },
        py::arg("scores"), py::arg("is_ood"));

    m.def(
        "rewire_by_covariance",
        [](const Graph& g, const Eigen::MatrixXd& K, double prune_percentile,
           double add_percentile, int max_added_edges) {
            CovMatrix cov;
            cov.K = K;
            RewireSpec spec;
            spec.prune_percentile = prune_percentile;
            spec.add_percentile = add_percentile;
            spec.max_added_edges = max_added_edges;
            return rewire_by_covariance(g, cov, spec);
        },
        py::arg("graph"), py::arg("K"), py::arg("prune_percentile"),
        py::arg("add_percentile"), py::arg("max_added_edges"));
    m.def(
        "rewire_report",
        [](const Graph& g, const Graph& rewired, const std::vector<int>& labels) {
            const RewireReport r = rewire_report(g, rewired, labels);
            py::dict d;
            d["edges_removed"] = r.edges_removed;
            d["edges_added"] = r.edges_added;
            d["li_before"] = r.li_before;
            d["li_after"] = r.li_after;
            d["homophily_before"] = r.homophily_before;
            d["homophily_after"] = r.homophily_after;
            return d;
        });

    // compact train/predict surface for smoke use
    py::class_<ModelHandle>(m, "Model")
        .def("predict_probs", &ModelHandle::predict_probs, py::arg("num_samples"),
             py::arg("seed"))
        .def("uncertainty", &ModelHandle::uncertainty, py::arg("num_samples"),
             py::arg("seed"))
        .def_property_readonly("history", [](const ModelHandle& h) {
            std::vector<std::tuple<int, double, double>> rows;
            rows.reserve(h.history.size());
            for (const auto& r : h.history)
                rows.emplace_back(r.epoch, r.train_loss, r.val_loss);
            return rows;
        });
    m.def("train_model", &train_model_py, py::arg("graph"), py::arg("noise_mode"),
          py::arg("nu"), py::arg("kappa"), py::arg("train_idx"), py::arg("val_idx"),
          py::arg("hidden_dim") = 16, py::arg("steps") = 8, py::arg("horizon") = 1.0,
          py::arg("noise_samples") = 2, py::arg("learning_rate") = 0.01,
          py::arg("weight_decay") = 0.0, py::arg("max_epochs") = 60,
          py::arg("patience") = 20, py::arg("seed") = 1);
}
