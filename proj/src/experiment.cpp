#include "graphspde/experiment.hpp"

#include "graphspde/dataset.hpp"
#include "graphspde/rng.hpp"
#include "graphspde/spectral.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace graphspde {

LaplacianKind laplacian_kind_from_string(const std::string& s) {
    if (s == "combinatorial") return LaplacianKind::combinatorial;
    if (s == "sym-normalized" || s == "normalized") return LaplacianKind::sym_normalized;
    throw std::invalid_argument("unknown laplacian kind '" + s + "'");
}

Graph build_base_graph(const RunConfig& cfg) {
    if (!cfg.dataset_dir.empty()) return load_dataset(cfg.dataset_dir);
    Graph g = sbm_generate(cfg.sbm_blocks, cfg.sbm_p_in, cfg.sbm_p_out, cfg.dataset_seed);
    g.labels = sbm_block_labels(cfg.sbm_blocks);
    g.features = make_cluster_features(*g.labels, cfg.feature_dim,
                                       cfg.feature_mean_scale, cfg.feature_noise,
                                       derive_seed(cfg.dataset_seed, 0xfe));
    return g;
}

std::string content_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("content_hash_hex: cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

namespace {

void row_normalize(Eigen::MatrixXd& X) {
    for (int i = 0; i < X.rows(); ++i) {
        const double norm = X.row(i).norm();
        if (norm > 0) X.row(i) /= norm;
    }
}

OODSplit make_shift(const RunConfig& cfg, const Graph& g, std::uint64_t seed) {
    if (cfg.shift_kind == "label-leaveout") {
        std::vector<int> ood_classes = cfg.ood_classes;
        if (ood_classes.empty()) ood_classes.push_back(g.num_classes() - 1);
        return make_label_leaveout(g, ood_classes, cfg.train_frac, cfg.val_frac, seed);
    }
    if (cfg.shift_kind == "structure")
        return make_structure_shift(g, cfg.shift_n_ood, cfg.shift_p_in, cfg.shift_p_out,
                                    cfg.train_frac, cfg.val_frac, seed);
    if (cfg.shift_kind == "feature")
        return make_feature_shift(g, cfg.shift_sigma, cfg.shift_fraction,
                                  cfg.train_frac, cfg.val_frac, seed);
    throw std::invalid_argument("unknown shift kind '" + cfg.shift_kind + "'");
}

struct Stats {
    double mean, std;
};

Stats mean_std(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - m) * (x - m);
    var = xs.size() > 1 ? var / (xs.size() - 1) : 0.0;
    return {m, std::sqrt(var)};
}

ordered_json config_json(const RunConfig& cfg) {
    ordered_json j;
    j["dataset_dir"] = cfg.dataset_dir;
    j["sbm_blocks"] = cfg.sbm_blocks;
    j["sbm_p_in"] = cfg.sbm_p_in;
    j["sbm_p_out"] = cfg.sbm_p_out;
    j["dataset_seed"] = cfg.dataset_seed;
    j["feature_dim"] = cfg.feature_dim;
    j["feature_mean_scale"] = cfg.feature_mean_scale;
    j["feature_noise"] = cfg.feature_noise;
    j["feature_row_normalize"] = cfg.feature_row_normalize;
    j["laplacian_kind"] = cfg.laplacian_kind;
    j["kernel_family"] = cfg.kernel_family;
    j["nu"] = cfg.nu;
    j["kappa"] = cfg.kappa;
    j["normalize_kernel"] = cfg.normalize_kernel;
    j["cheb_degree"] = cfg.cheb_degree;
    j["eigen_cap"] = cfg.eigen_cap;
    j["horizon"] = cfg.horizon;
    j["steps"] = cfg.steps;
    j["noise_samples"] = cfg.noise_samples;
    j["noise_mode"] = cfg.noise_mode;
    j["hidden_dim"] = cfg.hidden_dim;
    j["gcn_layers"] = cfg.gcn_layers;
    j["dropout"] = cfg.dropout;
    j["learning_rate"] = cfg.learning_rate;
    j["weight_decay"] = cfg.weight_decay;
    j["max_epochs"] = cfg.max_epochs;
    j["patience"] = cfg.patience;
    j["shift_kind"] = cfg.shift_kind;
    j["ood_classes"] = cfg.ood_classes;
    j["shift_sigma"] = cfg.shift_sigma;
    j["shift_fraction"] = cfg.shift_fraction;
    j["shift_n_ood"] = cfg.shift_n_ood;
    j["shift_p_in"] = cfg.shift_p_in;
    j["shift_p_out"] = cfg.shift_p_out;
    j["train_frac"] = cfg.train_frac;
    j["val_frac"] = cfg.val_frac;
    j["eval_samples"] = cfg.eval_samples;
    j["score_kind"] = cfg.score_kind;
    j["seeds"] = cfg.seeds;
    j["out_dir"] = cfg.out_dir;
    return j;
}

} // namespace

ExperimentReport run_experiment(const RunConfig& cfg, const std::string& config_echo) {
    if (cfg.seeds.empty()) throw std::invalid_argument("run_experiment: no seeds");
    if (cfg.dropout != 0.0)
        throw std::invalid_argument("run_experiment: dropout is reserved, only 0 is accepted");
    const Graph base = build_base_graph(cfg);
    const LaplacianKind lap_kind = laplacian_kind_from_string(cfg.laplacian_kind);
    const NoiseMode mode = noise_mode_from_string(cfg.noise_mode);

    KernelSpec spec;
    spec.family = cfg.kernel_family == "rbf" ? KernelFamily::rbf : KernelFamily::matern;
    spec.nu = cfg.nu;
    spec.kappa = cfg.kappa;
    spec.normalize = cfg.normalize_kernel;

    ExperimentReport report;
    for (const std::uint64_t seed : cfg.seeds) {
        OODSplit split = make_shift(cfg, base, derive_seed(seed, 0x5917));
        Graph graph_storage;
        if (!split.shifted_graph) {
            graph_storage = base;
        } else {
            graph_storage = std::move(*split.shifted_graph);
            split.shifted_graph.reset();
        }
        const Graph& g = graph_storage;
        if (!g.features)
            throw std::runtime_error("run_experiment: graph has no features to train on");
        if (cfg.feature_row_normalize) row_normalize(*graph_storage.features);

        const std::vector<int>& labels =
            split.relabeled ? *split.relabeled : *g.labels;
        const int num_classes = split.relabeled ? split.num_ind_classes : g.num_classes();

        const auto L = laplacian(g, lap_kind);
        NoiseSampler sampler;
        if (mode == NoiseMode::deterministic) {
            sampler.mode = mode;
        } else if (g.num_nodes <= cfg.eigen_cap) {
            const SpectralBasis basis = eigendecompose(L, lap_kind, cfg.eigen_cap);
            sampler = make_noise_sampler(basis, spec, mode);
        } else {
            sampler = make_noise_sampler_cheb(L, spec, mode, cfg.cheb_degree,
                                              lambda_max_bound(g, L));
        }

        ModelConfig dims;
        dims.feature_dim = static_cast<int>(g.features->cols());
        dims.hidden_dim = cfg.hidden_dim;
        dims.num_classes = num_classes;
        dims.gcn_layers = cfg.gcn_layers;
        IntegratorConfig integ;
        integ.horizon = cfg.horizon;
        integ.steps = cfg.steps;
        integ.noise_samples_train = cfg.noise_samples;
        integ.noise_mode = mode;
        const ModelContext ctx = make_context(g, dims, integ, std::move(sampler));

        OptimizerConfig opt;
        opt.learning_rate = cfg.learning_rate;
        opt.weight_decay = cfg.weight_decay;
        opt.max_epochs = cfg.max_epochs;
        opt.patience = cfg.patience;

        const TrainResult trained =
            train(ctx, *g.features, labels, split.train_idx, split.val_idx, opt, seed);

        const PredictiveSamples samples =
            predict(trained.params, ctx, *g.features, cfg.eval_samples,
                    derive_seed(seed, 0xe7a1));
        const UncertaintyScores scores = uncertainty_scores(samples);
        const Eigen::VectorXd* chosen = &scores.total;
        if (cfg.score_kind == "aleatoric") chosen = &scores.aleatoric;
        else if (cfg.score_kind == "epistemic") chosen = &scores.epistemic;
        else if (cfg.score_kind != "total")
            throw std::invalid_argument("unknown score kind '" + cfg.score_kind + "'");

        SeedResult sr;
        sr.seed = seed;
        for (int node : split.test_idx) {
            sr.eval_nodes.push_back(node);
            sr.eval_scores.push_back((*chosen)[node]);
            sr.eval_is_ood.push_back(0);
        }
        for (int node = 0; node < g.num_nodes; ++node)
            if (split.ood_mask[node]) {
                sr.eval_nodes.push_back(node);
                sr.eval_scores.push_back((*chosen)[node]);
                sr.eval_is_ood.push_back(1);
            }
        const OODReport ood = ood_metrics(sr.eval_scores, sr.eval_is_ood);
        sr.auc = ood.auc;
        sr.fpr95 = ood.fpr95;
        sr.det_acc = ood.det_acc;
        sr.best_epoch = trained.best_epoch;
        sr.best_val_loss = trained.best_val_loss;
        sr.history = trained.history;
        report.per_seed.push_back(std::move(sr));
    }

    std::vector<double> aucs, fprs, accs;
    for (const auto& sr : report.per_seed) {
        aucs.push_back(sr.auc);
        fprs.push_back(sr.fpr95);
        accs.push_back(sr.det_acc);
    }
    const Stats auc_s = mean_std(aucs), fpr_s = mean_std(fprs), acc_s = mean_std(accs);
    report.auc_mean = auc_s.mean;
    report.auc_std = auc_s.std;
    report.fpr95_mean = fpr_s.mean;
    report.fpr95_std = fpr_s.std;
    report.det_acc_mean = acc_s.mean;
    report.det_acc_std = acc_s.std;

    // --- outputs ---
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);

    {
        ordered_json manifest;
        manifest["config"] = config_json(cfg);
        if (!config_echo.empty()) manifest["config_file_echo"] = config_echo;
        manifest["seeds"] = cfg.seeds;
        ordered_json inputs = ordered_json::object();
        if (!cfg.dataset_dir.empty())
            for (const char* f : {"nodes.txt", "edges.txt", "labels.txt", "features.csv"}) {
                const fs::path p = fs::path(cfg.dataset_dir) / f;
                if (fs::exists(p)) inputs[f] = content_hash_hex(p.string());
            }
        manifest["inputs"] = inputs;
        manifest["outputs"] = {"manifest.json", "metrics.json", "scores.csv", "history.csv"};
        std::ofstream f(out / "manifest.json");
        f << manifest.dump(2) << "\n";
        report.written_files.push_back((out / "manifest.json").string());
    }
    {
        ordered_json metrics;
        metrics["per_seed"] = ordered_json::array();
        for (const auto& sr : report.per_seed) {
            ordered_json row;
            row["seed"] = sr.seed;
            row["auc"] = sr.auc;
            row["fpr95"] = sr.fpr95;
            row["det_acc"] = sr.det_acc;
            row["best_epoch"] = sr.best_epoch;
            row["best_val_loss"] = sr.best_val_loss;
            metrics["per_seed"].push_back(row);
        }
        ordered_json agg;
        agg["auc_mean"] = report.auc_mean;
        agg["auc_std"] = report.auc_std;
        agg["fpr95_mean"] = report.fpr95_mean;
        agg["fpr95_std"] = report.fpr95_std;
        agg["det_acc_mean"] = report.det_acc_mean;
        agg["det_acc_std"] = report.det_acc_std;
        metrics["aggregate"] = agg;
        std::ofstream f(out / "metrics.json");
        f << metrics.dump(2) << "\n";
        report.written_files.push_back((out / "metrics.json").string());
    }
    {
        std::ofstream f(out / "scores.csv");
        f.precision(12);
        f << "seed,node,score,is_ood\n";
        for (const auto& sr : report.per_seed)
            for (std::size_t i = 0; i < sr.eval_nodes.size(); ++i)
                f << sr.seed << "," << sr.eval_nodes[i] << "," << sr.eval_scores[i]
                  << "," << static_cast<int>(sr.eval_is_ood[i]) << "\n";
        report.written_files.push_back((out / "scores.csv").string());
    }
    {
        std::ofstream f(out / "history.csv");
        f.precision(12);
        f << "seed,epoch,train_loss,val_loss\n";
        for (const auto& sr : report.per_seed)
            for (const auto& rec : sr.history)
                f << sr.seed << "," << rec.epoch << "," << rec.train_loss << ","
                  << rec.val_loss << "\n";
        report.written_files.push_back((out / "history.csv").string());
    }
    return report;
}

} // namespace graphspde
