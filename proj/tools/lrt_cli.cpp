// lrt: learn low-rank transformations of subspace data, cluster and classify.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lrt/classify.hpp"
#include "lrt/cluster.hpp"
#include "lrt/data_io.hpp"
#include "lrt/matrix_core.hpp"
#include "lrt/model_io.hpp"
#include "lrt/transform_learn.hpp"

using nlohmann::json;
using namespace lrt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
    LearnConfig learn;
    int K = 6;
    double beta = -1;
    int sparsity = 10;
    int C = 0;
    int max_outer = 20;
};

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed config " + path + ": " + e.what());
    }
    return j;
}

// Flat JSON mirroring the module configs; unknown keys rejected.
RunConfig parse_run_config(const std::string& path) {
    RunConfig cfg;
    if (path.empty()) return cfg;
    json j = load_json(path);
    for (auto& [key, value] : j.items()) {
        if (key == "gamma") cfg.learn.gamma = value.get<double>();
        else if (key == "step_size") cfg.learn.step_size = value.get<double>();
        else if (key == "iterations") cfg.learn.iterations = value.get<int>();
        else if (key == "out_dim") cfg.learn.out_dim = value.get<int>();
        else if (key == "lambda") cfg.learn.lambda = value.get<double>();
        else if (key == "minibatches") cfg.learn.minibatches = value.get<int>();
        else if (key == "seed") cfg.learn.seed = value.get<std::uint64_t>();
        else if (key == "delta_rel") cfg.learn.delta_rel = value.get<double>();
        else if (key == "dc_outer_iterations") cfg.learn.dc_outer_iterations = value.get<int>();
        else if (key == "online_summed") cfg.learn.online_summed = value.get<bool>();
        else if (key == "K") cfg.K = value.get<int>();
        else if (key == "beta") cfg.beta = value.get<double>();
        else if (key == "sparsity") cfg.sparsity = value.get<int>();
        else if (key == "C") cfg.C = value.get<int>();
        else if (key == "max_outer") cfg.max_outer = value.get<int>();
        else throw std::invalid_argument("unknown config key '" + key + "' in " + path);
    }
    return cfg;
}

SyntheticSpec parse_synth_spec(const std::string& path) {
    SyntheticSpec spec;
    json j = load_json(path);
    for (auto& [key, value] : j.items()) {
        if (key == "ambient_dim") spec.ambient_dim = value.get<int>();
        else if (key == "subspace_dims") spec.subspace_dims = value.get<std::vector<int>>();
        else if (key == "angles") spec.angles = value.get<std::vector<double>>();
        else if (key == "points_per_subspace") spec.points_per_subspace = value.get<int>();
        else if (key == "sigma") spec.sigma = value.get<double>();
        else if (key == "outlier_fraction") spec.outlier_fraction = value.get<double>();
        else throw std::invalid_argument("unknown spec key '" + key + "' in " + path);
    }
    spec.validate();
    return spec;
}

MatrixFormat parse_format(const std::string& name) {
    if (name == "csv") return MatrixFormat::Csv;
    if (name == "binary") return MatrixFormat::Binary;
    throw std::invalid_argument("unknown format '" + name + "'");
}

LabeledDataset load_dataset(const std::string& data_path, const std::string& labels_path,
                            MatrixFormat format) {
    return assemble_dataset(load_matrix(data_path, format), load_labels(labels_path));
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// cluster bases at the numerical rank, for angle diagnostics
SubspaceBasis fitted_basis(const Matrix& Yc) {
    int k = std::max(1, numerical_rank(Yc));
    k = std::min<int>(k, std::min(Yc.rows(), Yc.cols()));
    return fit_subspace_basis(Yc, k);
}

void write_cluster_report(const std::string& path, const ClusteringResult& result,
                          const Matrix& TY, bool has_truth) {
    const int C = result.num_clusters;
    std::ostringstream out;
    out << "iteration,misclassification,lrsc_objective";
    for (int c = 0; c < C; ++c) out << ",nuclear_norm_" << c;
    for (int a = 0; a < C; ++a)
        for (int b = a + 1; b < C; ++b) out << ",smallest_angle_" << a << "_" << b;
    out << "\n";

    std::vector<SubspaceBasis> bases;
    for (int c = 0; c < C; ++c) {
        std::vector<int> idx;
        for (size_t i = 0; i < result.assignments.size(); ++i)
            if (result.assignments[i] == c) idx.push_back(static_cast<int>(i));
        Matrix Yc(TY.rows(), idx.size());
        for (size_t j = 0; j < idx.size(); ++j) Yc.col(j) = TY.col(idx[j]);
        bases.push_back(idx.empty() ? SubspaceBasis{Matrix::Zero(TY.rows(), 1)}
                                    : fitted_basis(Yc));
    }

    const int rows = std::max<int>(1, result.outer_iterations);
    for (int it = 0; it < rows; ++it) {
        out << it + 1 << ",";
        if (has_truth && it < static_cast<int>(result.misclassification_trace.size()))
            out << fmt(result.misclassification_trace[it]);
        out << ",";
        if (it < static_cast<int>(result.objective_trace.size()))
            out << fmt(result.objective_trace[it]);
        // final per-cluster norms and pairwise angles on the last row only
        if (it == rows - 1) {
            for (int c = 0; c < C; ++c)
                out << "," << fmt(result.per_cluster_nuclear_norms[c]);
            for (int a = 0; a < C; ++a)
                for (int b = a + 1; b < C; ++b)
                    out << "," << fmt(smallest_principal_angle(bases[a], bases[b]));
        } else {
            for (int c = 0; c < C + C * (C - 1) / 2; ++c) out << ",";
        }
        out << "\n";
    }
    atomic_write(path, out.str());
}

int cmd_synth(const std::string& spec_path, std::uint64_t seed,
              const std::string& out_matrix, const std::string& out_labels,
              const std::string& out_bases, const std::string& format_name) {
    SyntheticSpec spec = parse_synth_spec(spec_path);
    MatrixFormat format = parse_format(format_name);
    SyntheticData fx = generate_synthetic(spec, seed);
    save_matrix(out_matrix, fx.data.Y, format);
    save_labels(out_labels, fx.data.labels);
    if (!out_bases.empty())
        for (size_t c = 0; c < fx.bases.size(); ++c)
            save_matrix(out_bases + ".c" + std::to_string(c), fx.bases[c].basis, format);
    std::cout << "wrote " << fx.data.size() << " points in R^" << spec.ambient_dim
              << " across " << fx.bases.size() << " subspaces\n";
    return kExitOk;
}

int cmd_learn(const RunConfig& cfg, const std::string& data_path,
              const std::string& labels_path, const std::string& mode,
              const std::string& out_model, const std::string& trace_csv,
              const std::string& format_name) {
    LabeledDataset data =
        load_dataset(data_path, labels_path, parse_format(format_name));

    TransformModel model;
    if (mode == "global") model = learn_global(data, cfg.learn);
    else if (mode == "per-class") model = learn_per_class(data, cfg.learn);
    else if (mode == "online") model = learn_online(data, cfg.learn);
    else throw std::invalid_argument("unknown learn mode '" + mode + "'");

    if (!out_model.empty()) save_model(out_model, model);
    if (!trace_csv.empty()) {
        std::ostringstream out;
        out << "iteration,objective,spectral_norm_T\n";
        for (size_t i = 0; i < model.objective_trace.size(); ++i) {
            // after every projected step ||T||_2 = gamma; only the init differs
            double norm_t = i == 0 ? 1.0 : cfg.learn.gamma;
            out << i << "," << fmt(model.objective_trace[i]) << "," << fmt(norm_t)
                << "\n";
        }
        atomic_write(trace_csv, out.str());
    }
    std::cout << "final objective " << fmt(model.objective_trace.back()) << " after "
              << model.objective_trace.size() - 1 << " recorded steps\n";
    return kExitOk;
}

int cmd_cluster(const RunConfig& cfg, const std::string& data_path,
                const std::string& model_path, const std::string& method,
                bool use_lrsc, const std::string& truth_path,
                const std::string& out_assignments, const std::string& report_csv,
                const std::string& format_name) {
    if (method != "rssc") throw std::invalid_argument("unknown method '" + method + "'");
    if (cfg.C < 1) throw std::invalid_argument("cluster: -C must be >= 1");
    Matrix Y = load_matrix(data_path, parse_format(format_name));
    if (!model_path.empty()) Y = load_model(model_path).global() * Y;

    std::vector<int> truth;
    const std::vector<int>* truth_ptr = nullptr;
    if (!truth_path.empty()) {
        truth = load_labels(truth_path);
        if (static_cast<int>(truth.size()) != Y.cols())
            throw std::invalid_argument("truth label count does not match data");
        truth_ptr = &truth;
    }

    ClusteringResult result;
    Matrix TY = Y;
    if (use_lrsc) {
        ClustererSpec spec;
        spec.K = cfg.K;
        spec.beta = cfg.beta;
        LrscResult lr = lrsc(Y, cfg.C, spec, cfg.learn, cfg.max_outer, truth_ptr);
        result = std::move(lr.clustering);
        TY = lr.model.global() * Y;
    } else {
        result = rssc(Y, cfg.C, cfg.K, cfg.beta, cfg.learn.seed);
        result.objective_trace.push_back(
            lrsc_objective(Matrix::Identity(Y.rows(), Y.rows()), result.assignments, Y,
                           cfg.learn.lambda));
        if (truth_ptr)
            result.misclassification_trace.push_back(
                misclassification_rate(result.assignments, truth));
    }

    if (!out_assignments.empty()) save_labels(out_assignments, result.assignments);
    if (!report_csv.empty())
        write_cluster_report(report_csv, result, TY, truth_ptr != nullptr);
    if (truth_ptr)
        std::cout << "misclassification " << fmt(result.misclassification_trace.back())
                  << "\n";
    std::cout << (result.converged ? "converged" : "finished") << " after "
              << std::max(1, result.outer_iterations) << " outer iteration(s)\n";
    return kExitOk;
}

int cmd_classify(const RunConfig& cfg, const std::string& train_data,
                 const std::string& train_labels, const std::string& test_data,
                 const std::string& test_labels, const std::string& model_path,
                 const std::string& mode, const std::string& out_report,
                 const std::string& format_name) {
    MatrixFormat format = parse_format(format_name);
    LabeledDataset train = load_dataset(train_data, train_labels, format);
    LabeledDataset test = load_dataset(test_data, test_labels, format);

    TransformModel transform;
    if (!model_path.empty()) {
        transform = load_model(model_path);
    } else {
        transform.kind = TransformKind::Global;
        transform.transforms.push_back(Matrix::Identity(train.dim(), train.dim()));
    }

    ClassifyMode cmode;
    if (mode == "omp") cmode = ClassifyMode::OmpReconstruction;
    else if (mode == "nn") cmode = ClassifyMode::NearestNeighbor;
    else throw std::invalid_argument("unknown classify mode '" + mode + "'");

    ClassifierModel model =
        train_classifier(train, transform, cmode, cfg.sparsity, cfg.beta);

    int correct = 0;
    std::ostringstream out;
    out << "index,true,predicted,residual\n";
    for (int i = 0; i < test.size(); ++i) {
        auto [label, score] = classify_point(model, test.Y.col(i));
        if (label == test.labels[i]) ++correct;
        out << i << "," << test.labels[i] << "," << label << "," << fmt(score) << "\n";
    }
    if (!out_report.empty()) atomic_write(out_report, out.str());
    std::cout << "accuracy " << fmt(static_cast<double>(correct) / test.size()) << "\n";
    return kExitOk;
}

int cmd_angles(const std::string& data_path, const std::string& labels_path,
               const std::string& model_path, const std::string& out_csv,
               const std::string& format_name) {
    LabeledDataset data =
        load_dataset(data_path, labels_path, parse_format(format_name));
    const int C = data.num_classes();

    TransformModel transform;
    bool has_model = !model_path.empty();
    if (has_model) transform = load_model(model_path);

    auto diagnostics = [&](const Matrix& Y) {
        std::vector<SubspaceBasis> bases;
        std::vector<double> norms;
        for (int c = 0; c < C; ++c) {
            std::vector<int> idx = data.class_indices(c);
            Matrix Yc(Y.rows(), idx.size());
            for (size_t j = 0; j < idx.size(); ++j) Yc.col(j) = Y.col(idx[j]);
            bases.push_back(fitted_basis(Yc));
            norms.push_back(nuclear_norm(Yc));
        }
        return std::make_pair(bases, norms);
    };

    auto [bases_before, norms_before] = diagnostics(data.Y);
    std::vector<SubspaceBasis> bases_after;
    std::vector<double> norms_after;
    if (has_model) {
        Matrix TY = transform.global() * data.Y;
        std::tie(bases_after, norms_after) = diagnostics(TY);
    }

    // pair rows carry angles/cosines, class rows (empty b) carry nuclear norms
    std::ostringstream out;
    out << "kind,a,b,smallest_angle_before,mean_cosine_before,nuclear_norm_before,"
           "smallest_angle_after,mean_cosine_after,nuclear_norm_after\n";
    for (int a = 0; a < C; ++a)
        for (int b = a + 1; b < C; ++b) {
            out << "pair," << a << "," << b << ","
                << fmt(smallest_principal_angle(bases_before[a], bases_before[b])) << ","
                << fmt(mean_cosine_principal_angles(bases_before[a], bases_before[b]))
                << ",,";
            if (has_model)
                out << fmt(smallest_principal_angle(bases_after[a], bases_after[b]))
                    << ","
                    << fmt(mean_cosine_principal_angles(bases_after[a], bases_after[b]));
            else
                out << ",";
            out << ",\n";
        }
    for (int c = 0; c < C; ++c) {
        out << "class," << c << ",,,," << fmt(norms_before[c]) << ",,,";
        if (has_model) out << fmt(norms_after[c]);
        out << "\n";
    }
    atomic_write(out_csv, out.str());
    std::cout << "wrote angle diagnostics for " << C << " classes\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("LRT_THREADS")) {
        int n = std::atoi(threads);
        if (n > 0) Eigen::setNbThreads(n);
    }

    CLI::App app{"low-rank transformation learning for subspace clustering and "
                 "classification"};
    app.require_subcommand(1);

    std::string config_path, format_name = "csv";
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run config (flags override it)");
        sub->add_option("--format", format_name, "matrix file format: csv | binary")
            ->check(CLI::IsMember({"csv", "binary"}));
    };

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic subspace data");
    add_common(synth);
    std::string spec_path, out_matrix, out_labels, out_bases;
    std::uint64_t synth_seed = 42;
    synth->add_option("spec", spec_path, "SyntheticSpec JSON file")->required();
    synth->add_option("--seed", synth_seed, "root seed (default 42)");
    synth->add_option("--out-matrix", out_matrix, "output data file")->required();
    synth->add_option("--out-labels", out_labels, "output labels file")->required();
    synth->add_option("--out-bases", out_bases,
                      "ground-truth bases prefix (one file per subspace)");

    // learn
    auto* learn = app.add_subcommand("learn", "learn a low-rank transformation");
    add_common(learn);
    std::string learn_data, learn_labels, learn_mode = "global", out_model, trace_csv;
    learn->add_option("--data", learn_data)->required();
    learn->add_option("--labels", learn_labels)->required();
    learn->add_option("--mode", learn_mode, "global | per-class | online")
        ->check(CLI::IsMember({"global", "per-class", "online"}));
    learn->add_option("--out-model", out_model, "model manifest path");
    learn->add_option("--trace-csv", trace_csv,
                      "per-iteration CSV: iteration,objective,spectral_norm_T");
    double opt_gamma = -1, opt_step = -1, opt_lambda = -1, opt_delta = -1;
    int opt_iters = -1, opt_out_dim = -1, opt_minibatches = -1, opt_dc = -1;
    bool opt_summed = false;
    std::uint64_t opt_seed = 0;
    bool seed_given = false;
    learn->add_option("--gamma", opt_gamma, "spectral-norm constraint (default 1)");
    learn->add_option("--step-size", opt_step, "subgradient step (default 0.02)");
    learn->add_option("--iterations", opt_iters, "inner steps (default 100)");
    learn->add_option("--out-dim", opt_out_dim, "compressed rows r (default d)");
    learn->add_option("--lambda", opt_lambda, "per-class balance (default 1)");
    learn->add_option("--minibatches", opt_minibatches, "online batches (default 1)");
    learn->add_option("--dc-outer", opt_dc, "D.C. outer iterations (default 1)");
    learn->add_option("--delta-rel", opt_delta,
                      "subdifferential rank cut (default 1e-6)");
    learn->add_flag("--online-summed", opt_summed, "summed minibatch step");
    learn->add_option("--seed", opt_seed, "root seed (default 42)")
        ->each([&](const std::string&) { seed_given = true; });

    // cluster
    auto* cluster = app.add_subcommand("cluster", "R-SSC / LRSC subspace clustering");
    add_common(cluster);
    std::string cl_data, cl_model, cl_method = "rssc", cl_truth, cl_assignments,
                cl_report;
    int cl_C = 0, cl_K = -1, cl_max_outer = -1;
    double cl_beta = -2;
    bool cl_lrsc = false;
    std::uint64_t cl_seed = 0;
    bool cl_seed_given = false;
    cluster->add_option("--data", cl_data)->required();
    cluster->add_option("--model", cl_model, "apply this transform to the data first");
    cluster->add_option("--method", cl_method, "clustering method (rssc)");
    cluster->add_option("-C,--clusters", cl_C, "number of clusters")->required();
    cluster->add_option("-K,--neighbors", cl_K, "R-SSC neighbors (default 6)");
    cluster->add_option("--beta", cl_beta, "rpca beta (default 1/sqrt(max(m,n)))");
    cluster->add_flag("--lrsc", cl_lrsc, "alternate clustering and transform learning");
    cluster->add_option("--max-outer", cl_max_outer, "LRSC outer cap (default 20)");
    cluster->add_option("--truth", cl_truth, "ground-truth labels for reporting");
    cluster->add_option("--out-assignments", cl_assignments, "one cluster id per line");
    cluster->add_option("--report-csv", cl_report, "per-outer-iteration report");
    cluster->add_option("--seed", cl_seed, "root seed (default 42)")
        ->each([&](const std::string&) { cl_seed_given = true; });

    // classify
    auto* classify = app.add_subcommand("classify",
                                        "minimal-reconstruction-error classification");
    add_common(classify);
    std::string cf_train_data, cf_train_labels, cf_test_data, cf_test_labels,
                cf_model, cf_mode = "omp", cf_report;
    int cf_sparsity = -1;
    double cf_beta = -2;
    classify->add_option("--train-data", cf_train_data)->required();
    classify->add_option("--train-labels", cf_train_labels)->required();
    classify->add_option("--test-data", cf_test_data)->required();
    classify->add_option("--test-labels", cf_test_labels)->required();
    classify->add_option("--model", cf_model, "learned transform (identity if absent)");
    classify->add_option("--mode", cf_mode, "omp | nn")
        ->check(CLI::IsMember({"omp", "nn"}));
    classify->add_option("--sparsity", cf_sparsity, "OMP sparsity (default 10)");
    classify->add_option("--beta", cf_beta, "rpca beta for the class bases");
    classify->add_option("--out-report", cf_report,
                         "per-point CSV: index,true,predicted,residual");

    // angles
    auto* angles = app.add_subcommand("angles", "principal-angle diagnostics");
    add_common(angles);
    std::string an_data, an_labels, an_model, an_csv;
    angles->add_option("--data", an_data)->required();
    angles->add_option("--labels", an_labels)->required();
    angles->add_option("--model", an_model, "also report post-transform values");
    angles->add_option("--out-csv", an_csv, "diagnostics CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message
        return kExitUsage;
    }

    try {
        RunConfig cfg = parse_run_config(config_path);
        if (*synth)
            return cmd_synth(spec_path, synth_seed, out_matrix, out_labels, out_bases,
                             format_name);
        if (*learn) {
            if (opt_gamma >= 0) cfg.learn.gamma = opt_gamma;
            if (opt_step >= 0) cfg.learn.step_size = opt_step;
            if (opt_iters >= 0) cfg.learn.iterations = opt_iters;
            if (opt_out_dim >= 0) cfg.learn.out_dim = opt_out_dim;
            if (opt_lambda >= 0) cfg.learn.lambda = opt_lambda;
            if (opt_minibatches >= 0) cfg.learn.minibatches = opt_minibatches;
            if (opt_dc >= 0) cfg.learn.dc_outer_iterations = opt_dc;
            if (opt_delta >= 0) cfg.learn.delta_rel = opt_delta;
            if (opt_summed) cfg.learn.online_summed = true;
            if (seed_given) cfg.learn.seed = opt_seed;
            return cmd_learn(cfg, learn_data, learn_labels, learn_mode, out_model,
                             trace_csv, format_name);
        }
        if (*cluster) {
            cfg.C = cl_C;
            if (cl_K >= 0) cfg.K = cl_K;
            if (cl_beta > -2) cfg.beta = cl_beta;
            if (cl_max_outer >= 0) cfg.max_outer = cl_max_outer;
            if (cl_seed_given) cfg.learn.seed = cl_seed;
            return cmd_cluster(cfg, cl_data, cl_model, cl_method, cl_lrsc, cl_truth,
                               cl_assignments, cl_report, format_name);
        }
        if (*classify) {
            if (cf_sparsity >= 0) cfg.sparsity = cf_sparsity;
            if (cf_beta > -2) cfg.beta = cf_beta;
            return cmd_classify(cfg, cf_train_data, cf_train_labels, cf_test_data,
                                cf_test_labels, cf_model, cf_mode, cf_report,
                                format_name);
        }
        if (*angles) return cmd_angles(an_data, an_labels, an_model, an_csv, format_name);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        bool input_error = msg.find("parse error") != std::string::npos ||
                           msg.find("manifest") != std::string::npos ||
                           msg.find("cannot open") != std::string::npos;
        return input_error ? kExitUsage : kExitNumerical;
    }
    return kExitUsage;
}
