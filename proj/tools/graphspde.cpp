// graphspde CLI: kernel | sample | train | eval-ood | li | rewire | bench | run
//
// Every subcommand accepts --config <ini file> (sections named after the
// subcommand) with flags taking precedence, plus --seed and --out.

#include "graphspde/bench.hpp"
#include "graphspde/checkpoint.hpp"
#include "graphspde/dataset.hpp"
#include "graphspde/experiment.hpp"
#include "graphspde/kernels.hpp"
#include "graphspde/model.hpp"
#include "graphspde/noise.hpp"
#include "graphspde/ood.hpp"
#include "graphspde/rewire.hpp"
#include "graphspde/rng.hpp"
#include "graphspde/spectral.hpp"
#include "graphspde/train.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace graphspde;
using ordered_json = nlohmann::ordered_json;

namespace {

struct CliState {
    RunConfig cfg;
    std::uint64_t seed = 1;
    bool seed_given = false;
    std::string checkpoint = "checkpoint.txt";
    // kernel subcommand extras
    std::vector<int> kernel_rows;
    // sample subcommand extras
    std::string phi_family = "matern";
    std::vector<double> times = {0.0, 0.5, 1.0};
    int num_samples = 1000;
    int dump_paths = 10;
    // rewire extras
    RewireSpec rewire_spec;
};

void add_dataset_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--dataset", cfg.dataset_dir, "dataset directory (see README layout)");
    sub->add_option("--sbm-blocks", cfg.sbm_blocks, "synthetic SBM block sizes");
    sub->add_option("--sbm-p-in", cfg.sbm_p_in, "SBM intra-block edge probability");
    sub->add_option("--sbm-p-out", cfg.sbm_p_out, "SBM inter-block edge probability");
    sub->add_option("--dataset-seed", cfg.dataset_seed, "synthetic generator seed");
    sub->add_option("--feature-dim", cfg.feature_dim, "synthetic feature dimension");
    sub->add_option("--feature-mean-scale", cfg.feature_mean_scale,
                    "class mean separation for synthetic features");
    sub->add_option("--feature-noise", cfg.feature_noise,
                    "per-node feature noise for synthetic features");
    sub->add_flag("--row-normalize", cfg.feature_row_normalize,
                  "L2-normalize feature rows after any shift");
    sub->add_option("--laplacian", cfg.laplacian_kind,
                    "laplacian kind: combinatorial | sym-normalized");
}

void add_kernel_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--family", cfg.kernel_family, "kernel family: matern | rbf");
    sub->add_option("--nu", cfg.nu, "Matern smoothness");
    sub->add_option("--kappa", cfg.kappa, "kernel length-scale");
    sub->add_flag("--normalize", cfg.normalize_kernel, "rescale K to unit mean diagonal");
    sub->add_option("--cheb-degree,-m", cfg.cheb_degree, "Chebyshev degree");
    sub->add_option("--eigen-cap", cfg.eigen_cap, "dense eigendecomposition node cap");
}

void add_model_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--noise-mode", cfg.noise_mode,
                    "sispde-matern | sispde-rbf | gnsd-qwiener | deterministic");
    sub->add_option("--horizon", cfg.horizon, "integration horizon T");
    sub->add_option("--steps", cfg.steps, "Euler steps");
    sub->add_option("--noise-samples", cfg.noise_samples, "noise samples S during training");
    sub->add_option("--hidden-dim", cfg.hidden_dim, "latent width");
    sub->add_option("--gcn-layers", cfg.gcn_layers, "GCN layers in the semigroup surrogate");
    sub->add_option("--dropout", cfg.dropout, "reserved, must stay 0");
    sub->add_option("--learning-rate", cfg.learning_rate, "Adam learning rate");
    sub->add_option("--weight-decay", cfg.weight_decay, "decoupled weight decay");
    sub->add_option("--max-epochs", cfg.max_epochs, "epoch budget");
    sub->add_option("--patience", cfg.patience, "early stopping patience");
}

void add_shift_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--shift", cfg.shift_kind, "label-leaveout | structure | feature");
    sub->add_option("--ood-classes", cfg.ood_classes, "classes left out as OOD");
    sub->add_option("--shift-sigma", cfg.shift_sigma, "feature shift noise scale");
    sub->add_option("--shift-fraction", cfg.shift_fraction, "feature shift node fraction");
    sub->add_option("--shift-n-ood", cfg.shift_n_ood, "structure shift OOD node count");
    sub->add_option("--shift-p-in", cfg.shift_p_in, "structure shift intra-block probability");
    sub->add_option("--shift-p-out", cfg.shift_p_out, "structure shift cross probability");
    sub->add_option("--train-frac", cfg.train_frac, "train fraction of IND nodes");
    sub->add_option("--val-frac", cfg.val_frac, "validation fraction of IND nodes");
    sub->add_option("--eval-samples", cfg.eval_samples, "noise samples S at evaluation");
    sub->add_option("--score", cfg.score_kind, "total | aleatoric | epistemic");
}

KernelSpec kernel_spec_of(const RunConfig& cfg) {
    KernelSpec spec;
    spec.family = cfg.kernel_family == "rbf" ? KernelFamily::rbf : KernelFamily::matern;
    spec.nu = cfg.nu;
    spec.kappa = cfg.kappa;
    spec.normalize = cfg.normalize_kernel;
    return spec;
}

int require_written(const std::vector<std::string>& files) {
    for (const auto& f : files)
        if (!fs::exists(f)) {
            std::cerr << "missing declared output " << f << "\n";
            return 1;
        }
    return 0;
}

int cmd_kernel(const CliState& st) {
    const Graph g = build_base_graph(st.cfg);
    const auto kind = laplacian_kind_from_string(st.cfg.laplacian_kind);
    const auto L = laplacian(g, kind);
    const SpectralBasis basis = eigendecompose(L, kind, st.cfg.eigen_cap);
    const CovMatrix K = kernel_exact(basis, kernel_spec_of(st.cfg));

    fs::create_directories(st.cfg.out_dir);
    const fs::path path = fs::path(st.cfg.out_dir) / "kernel.csv";
    std::ofstream out(path);
    out.precision(12);
    if (!st.kernel_rows.empty()) {
        out << "row,col,value\n";
        for (int i : st.kernel_rows)
            for (int j = 0; j < K.size(); ++j)
                out << i << "," << j << "," << K.K(i, j) << "\n";
    } else if (K.size() > 500) {
        out << "node,diag\n";
        for (int i = 0; i < K.size(); ++i) out << i << "," << K.K(i, i) << "\n";
    } else {
        for (int i = 0; i < K.size(); ++i) {
            for (int j = 0; j < K.size(); ++j) {
                if (j) out << ",";
                out << K.K(i, j);
            }
            out << "\n";
        }
    }
    out.close();
    std::cout << "wrote " << path.string() << "\n";
    return require_written({path.string()});
}

int cmd_sample(const CliState& st) {
    const Graph g = build_base_graph(st.cfg);
    const auto kind = laplacian_kind_from_string(st.cfg.laplacian_kind);
    const SpectralBasis basis = eigendecompose(laplacian(g, kind), kind, st.cfg.eigen_cap);

    PhiSpec phi;
    if (st.phi_family == "matern")
        phi = PhiSpec{PhiSpec::Family::matern, st.cfg.nu, st.cfg.kappa};
    else if (st.phi_family == "rbf")
        phi = PhiSpec{PhiSpec::Family::rbf, st.cfg.nu, st.cfg.kappa};
    else if (st.phi_family == "identity" || st.phi_family == "qwiener")
        phi = PhiSpec{PhiSpec::Family::identity, 0, 0};
    else
        throw std::invalid_argument("unknown phi family '" + st.phi_family + "'");

    fs::create_directories(st.cfg.out_dir);
    const fs::path paths_csv = fs::path(st.cfg.out_dir) / "paths.csv";
    const fs::path cov_csv = fs::path(st.cfg.out_dir) / "empirical_cov.csv";

    std::vector<Eigen::VectorXd> finals;
    finals.reserve(st.num_samples);
    {
        std::ofstream out(paths_csv);
        out.precision(12);
        out << "sample,time,node,value\n";
        for (int s = 0; s < st.num_samples; ++s) {
            const NoisePath path =
                simulate_phi_wiener(basis, phi, st.times, derive_seed(st.seed, s));
            finals.push_back(path.values.back());
            if (s < st.dump_paths)
                for (std::size_t t = 0; t < path.times.size(); ++t)
                    for (int i = 0; i < g.num_nodes; ++i)
                        out << s << "," << path.times[t] << "," << i << ","
                            << path.values[t][i] << "\n";
        }
    }
    {
        const CovEstimate est = empirical_covariance(finals);
        std::ofstream out(cov_csv);
        out.precision(12);
        out << "i,j,cov,se\n";
        for (int i = 0; i < est.cov.rows(); ++i)
            for (int j = 0; j < est.cov.cols(); ++j)
                out << i << "," << j << "," << est.cov(i, j) << "," << est.se(i, j) << "\n";
    }
    std::cout << "wrote " << paths_csv.string() << " and " << cov_csv.string() << "\n";
    return require_written({paths_csv.string(), cov_csv.string()});
}

/// Shared by train / eval-ood: build graph, split, context for one seed.
struct PreparedRun {
    Graph graph;
    OODSplit split;
    ModelContext ctx;
    std::vector<int> labels;
};

PreparedRun prepare_run(const RunConfig& cfg, std::uint64_t seed) {
    if (cfg.dropout != 0.0)
        throw std::invalid_argument("dropout is reserved, only 0 is accepted");
    PreparedRun pr;
    const Graph base = build_base_graph(cfg);
    OODSplit split = [&] {
        if (cfg.shift_kind == "label-leaveout") {
            std::vector<int> ood_classes = cfg.ood_classes;
            if (ood_classes.empty()) ood_classes.push_back(base.num_classes() - 1);
            return make_label_leaveout(base, ood_classes, cfg.train_frac, cfg.val_frac,
                                       derive_seed(seed, 0x5917));
        }
        if (cfg.shift_kind == "structure")
            return make_structure_shift(base, cfg.shift_n_ood, cfg.shift_p_in,
                                        cfg.shift_p_out, cfg.train_frac, cfg.val_frac,
                                        derive_seed(seed, 0x5917));
        return make_feature_shift(base, cfg.shift_sigma, cfg.shift_fraction,
                                  cfg.train_frac, cfg.val_frac, derive_seed(seed, 0x5917));
    }();
    pr.graph = split.shifted_graph ? *split.shifted_graph : base;
    split.shifted_graph.reset();
    if (cfg.feature_row_normalize && pr.graph.features)
        for (int i = 0; i < pr.graph.features->rows(); ++i) {
            const double norm = pr.graph.features->row(i).norm();
            if (norm > 0) pr.graph.features->row(i) /= norm;
        }
    pr.labels = split.relabeled ? *split.relabeled : *pr.graph.labels;
    const int num_classes =
        split.relabeled ? split.num_ind_classes : pr.graph.num_classes();

    const auto kind = laplacian_kind_from_string(cfg.laplacian_kind);
    const auto L = laplacian(pr.graph, kind);
    const NoiseMode mode = noise_mode_from_string(cfg.noise_mode);
    NoiseSampler sampler;
    if (mode == NoiseMode::deterministic) {
        sampler.mode = mode;
    } else if (pr.graph.num_nodes <= cfg.eigen_cap) {
        sampler = make_noise_sampler(eigendecompose(L, kind, cfg.eigen_cap),
                                     kernel_spec_of(cfg), mode);
    } else {
        sampler = make_noise_sampler_cheb(L, kernel_spec_of(cfg), mode, cfg.cheb_degree,
                                          lambda_max_bound(pr.graph, L));
    }
    ModelConfig dims;
    dims.feature_dim = static_cast<int>(pr.graph.features->cols());
    dims.hidden_dim = cfg.hidden_dim;
    dims.num_classes = num_classes;
    dims.gcn_layers = cfg.gcn_layers;
    IntegratorConfig integ;
    integ.horizon = cfg.horizon;
    integ.steps = cfg.steps;
    integ.noise_samples_train = cfg.noise_samples;
    integ.noise_mode = mode;
    pr.split = std::move(split);
    pr.ctx = make_context(pr.graph, dims, integ, std::move(sampler));
    pr.ctx.graph = &pr.graph;
    return pr;
}

int cmd_train(const CliState& st) {
    PreparedRun pr = prepare_run(st.cfg, st.seed);
    OptimizerConfig opt;
    opt.learning_rate = st.cfg.learning_rate;
    opt.weight_decay = st.cfg.weight_decay;
    opt.max_epochs = st.cfg.max_epochs;
    opt.patience = st.cfg.patience;
    const TrainResult res = train(pr.ctx, *pr.graph.features, pr.labels,
                                  pr.split.train_idx, pr.split.val_idx, opt, st.seed);

    fs::create_directories(st.cfg.out_dir);
    const fs::path ckpt = fs::path(st.cfg.out_dir) / st.checkpoint;
    save_checkpoint(res.params, pr.ctx.dims, ckpt.string());
    const fs::path hist = fs::path(st.cfg.out_dir) / "history.csv";
    {
        std::ofstream out(hist);
        out.precision(12);
        out << "seed,epoch,train_loss,val_loss\n";
        for (const auto& rec : res.history)
            out << st.seed << "," << rec.epoch << "," << rec.train_loss << ","
                << rec.val_loss << "\n";
    }
    std::cout << "best epoch " << res.best_epoch << " val loss " << res.best_val_loss
              << "\nwrote " << ckpt.string() << " and " << hist.string() << "\n";
    return require_written({ckpt.string(), hist.string()});
}

int cmd_eval_ood(const CliState& st) {
    PreparedRun pr = prepare_run(st.cfg, st.seed);
    auto [params, dims] = load_checkpoint(st.checkpoint);
    if (dims.feature_dim != pr.ctx.dims.feature_dim ||
        dims.num_classes != pr.ctx.dims.num_classes)
        throw std::runtime_error("eval-ood: checkpoint dims do not match the split");
    pr.ctx.dims = dims;

    const PredictiveSamples samples =
        predict(params, pr.ctx, *pr.graph.features, st.cfg.eval_samples,
                derive_seed(st.seed, 0xe7a1));
    const UncertaintyScores scores = uncertainty_scores(samples);
    const Eigen::VectorXd* chosen = &scores.total;
    if (st.cfg.score_kind == "aleatoric") chosen = &scores.aleatoric;
    if (st.cfg.score_kind == "epistemic") chosen = &scores.epistemic;

    std::vector<double> eval_scores;
    std::vector<std::uint8_t> is_ood;
    std::vector<int> nodes;
    for (int node : pr.split.test_idx) {
        nodes.push_back(node);
        eval_scores.push_back((*chosen)[node]);
        is_ood.push_back(0);
    }
    for (int node = 0; node < pr.graph.num_nodes; ++node)
        if (pr.split.ood_mask[node]) {
            nodes.push_back(node);
            eval_scores.push_back((*chosen)[node]);
            is_ood.push_back(1);
        }
    const OODReport report = ood_metrics(eval_scores, is_ood);

    fs::create_directories(st.cfg.out_dir);
    const fs::path metrics = fs::path(st.cfg.out_dir) / "metrics.json";
    const fs::path scores_csv = fs::path(st.cfg.out_dir) / "scores.csv";
    {
        ordered_json j;
        j["auc"] = report.auc;
        j["fpr95"] = report.fpr95;
        j["det_acc"] = report.det_acc;
        j["score_kind"] = st.cfg.score_kind;
        j["num_eval_nodes"] = nodes.size();
        std::ofstream f(metrics);
        f << j.dump(2) << "\n";
    }
    {
        std::ofstream f(scores_csv);
        f.precision(12);
        f << "node,score,is_ood\n";
        for (std::size_t i = 0; i < nodes.size(); ++i)
            f << nodes[i] << "," << eval_scores[i] << ","
              << static_cast<int>(is_ood[i]) << "\n";
    }
    std::cout << "auc " << report.auc << " fpr95 " << report.fpr95 << " det_acc "
              << report.det_acc << "\n";
    return require_written({metrics.string(), scores_csv.string()});
}

int cmd_li(const CliState& st) {
    const Graph g = build_base_graph(st.cfg);
    if (!g.labels) throw std::runtime_error("li: graph has no labels");
    std::cout.precision(12);
    std::cout << "label_informativeness " << label_informativeness(g, *g.labels) << "\n"
              << "edge_homophily " << edge_homophily(g, *g.labels) << "\n";
    return 0;
}

int cmd_rewire(const CliState& st) {
    const Graph g = build_base_graph(st.cfg);
    const auto kind = laplacian_kind_from_string(st.cfg.laplacian_kind);
    const SpectralBasis basis = eigendecompose(laplacian(g, kind), kind, st.cfg.eigen_cap);
    const CovMatrix K = kernel_exact(basis, kernel_spec_of(st.cfg));
    const Graph rewired = rewire_by_covariance(g, K, st.rewire_spec);

    fs::create_directories(st.cfg.out_dir);
    const fs::path edges = fs::path(st.cfg.out_dir) / "rewired_edges.txt";
    {
        std::ofstream out(edges);
        for (const auto& [u, v] : rewired.edge_list()) out << u << " " << v << "\n";
    }
    const fs::path report_path = fs::path(st.cfg.out_dir) / "rewire_report.json";
    ordered_json j;
    if (g.labels) {
        const RewireReport rep = rewire_report(g, rewired, *g.labels);
        j["edges_removed"] = rep.edges_removed;
        j["edges_added"] = rep.edges_added;
        j["li_before"] = rep.li_before;
        j["li_after"] = rep.li_after;
        j["homophily_before"] = rep.homophily_before;
        j["homophily_after"] = rep.homophily_after;
    }
    j["edges_before"] = g.num_edges();
    j["edges_after"] = rewired.num_edges();
    {
        std::ofstream f(report_path);
        f << j.dump(2) << "\n";
    }
    std::cout << j.dump(2) << "\n";
    return require_written({edges.string(), report_path.string()});
}

int cmd_bench(const CliState& st) {
    const auto points = bench_chebyshev();
    fs::create_directories(st.cfg.out_dir);
    const fs::path csv = fs::path(st.cfg.out_dir) / "bench.csv";
    write_bench_csv(points, csv.string());
    std::cout << "degree sweep log-log slope " << bench_loglog_slope(points, "degree")
              << "\nedge sweep log-log slope " << bench_loglog_slope(points, "edges")
              << "\nwrote " << csv.string() << "\n";
    return require_written({csv.string()});
}

int cmd_run(const CliState& st, const std::string& config_echo) {
    RunConfig cfg = st.cfg;
    if (st.seed_given) cfg.seeds = {st.seed};
    const ExperimentReport report = run_experiment(cfg, config_echo);
    for (const auto& sr : report.per_seed)
        std::cout << "seed " << sr.seed << ": auc " << sr.auc << " fpr95 " << sr.fpr95
                  << " det_acc " << sr.det_acc << "\n";
    std::cout << "aggregate: auc " << report.auc_mean << " +- " << report.auc_std
              << ", fpr95 " << report.fpr95_mean << " +- " << report.fpr95_std
              << ", det_acc " << report.det_acc_mean << " +- " << report.det_acc_std
              << "\n";
    if (!(std::isfinite(report.auc_mean) && std::isfinite(report.fpr95_mean) &&
          std::isfinite(report.det_acc_mean)))
        return 1;
    return require_written(report.written_files);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph Matern SPDE toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // lets `graphspde <sub> --config ...` reach the app option
    app.set_config("--config", "", "INI config with [subcommand] sections");

    CliState st;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", st.seed, "master seed")->each([&](const std::string&) {
            st.seed_given = true;
        });
        sub->add_option("--out", st.cfg.out_dir, "output directory");
    };

    auto* kernel = app.add_subcommand("kernel", "emit the covariance kernel as CSV");
    add_dataset_options(kernel, st.cfg);
    add_kernel_options(kernel, st.cfg);
    kernel->add_option("--rows", st.kernel_rows, "emit only these kernel rows");
    add_common(kernel);

    auto* sample = app.add_subcommand("sample", "simulate noise paths, emit CSV");
    add_dataset_options(sample, st.cfg);
    add_kernel_options(sample, st.cfg);
    sample->add_option("--phi", st.phi_family, "matern | rbf | identity");
    sample->add_option("--times", st.times, "sample times, ascending from 0");
    sample->add_option("--num-samples", st.num_samples, "Monte-Carlo sample count");
    sample->add_option("--dump-paths", st.dump_paths, "paths written to paths.csv");
    add_common(sample);

    auto* train_cmd = app.add_subcommand("train", "train one model, save a checkpoint");
    add_dataset_options(train_cmd, st.cfg);
    add_kernel_options(train_cmd, st.cfg);
    add_model_options(train_cmd, st.cfg);
    add_shift_options(train_cmd, st.cfg);
    train_cmd->add_option("--checkpoint", st.checkpoint, "checkpoint file name");
    add_common(train_cmd);

    auto* eval_cmd = app.add_subcommand("eval-ood", "score a checkpoint on an OOD split");
    add_dataset_options(eval_cmd, st.cfg);
    add_kernel_options(eval_cmd, st.cfg);
    add_model_options(eval_cmd, st.cfg);
    add_shift_options(eval_cmd, st.cfg);
    eval_cmd->add_option("--checkpoint", st.checkpoint, "checkpoint file to load");
    add_common(eval_cmd);

    auto* li_cmd = app.add_subcommand("li", "print label informativeness and homophily");
    add_dataset_options(li_cmd, st.cfg);
    add_common(li_cmd);

    auto* rewire_cmd = app.add_subcommand("rewire", "covariance-threshold rewiring");
    add_dataset_options(rewire_cmd, st.cfg);
    add_kernel_options(rewire_cmd, st.cfg);
    rewire_cmd->add_option("--prune-percentile", st.rewire_spec.prune_percentile,
                           "prune edges below this percentile of edge covariances");
    rewire_cmd->add_option("--add-percentile", st.rewire_spec.add_percentile,
                           "insert non-edges above this percentile");
    rewire_cmd->add_option("--max-added-edges", st.rewire_spec.max_added_edges,
                           "cap on inserted edges");
    rewire_cmd->add_option("--top-k", st.rewire_spec.candidate_top_k,
                           "per-node candidate pool on large graphs");
    add_common(rewire_cmd);

    auto* bench_cmd = app.add_subcommand("bench", "time chebyshev_apply scaling");
    add_common(bench_cmd);

    auto* run_cmd = app.add_subcommand("run", "full multi-seed OOD experiment");
    add_dataset_options(run_cmd, st.cfg);
    add_kernel_options(run_cmd, st.cfg);
    add_model_options(run_cmd, st.cfg);
    add_shift_options(run_cmd, st.cfg);
    run_cmd->add_option("--seeds", st.cfg.seeds, "experiment seeds");
    add_common(run_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (kernel->parsed()) return cmd_kernel(st);
        if (sample->parsed()) return cmd_sample(st);
        if (train_cmd->parsed()) return cmd_train(st);
        if (eval_cmd->parsed()) return cmd_eval_ood(st);
        if (li_cmd->parsed()) return cmd_li(st);
        if (rewire_cmd->parsed()) return cmd_rewire(st);
        if (bench_cmd->parsed()) return cmd_bench(st);
        if (run_cmd->parsed()) return cmd_run(st, app.config_to_str(false, false));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
