#include "mvfcm/cli.hpp"

#include "mvfcm/baselines.hpp"
#include "mvfcm/dataset.hpp"
#include "mvfcm/init.hpp"
#include "mvfcm/metrics.hpp"
#include "mvfcm/solver.hpp"
#include "mvfcm/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace mvfcm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> GridRange::values() const {
    const double span = (stop - start) / step;
    const auto count = static_cast<long>(std::floor(span + 1e-9 * std::max(1.0, std::abs(span)))) + 1;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
        out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
    return out;
}

GridRange parse_range(const std::string& text) {
    GridRange range{};
    double* fields[] = {&range.start, &range.stop, &range.step};
    std::string_view rest(text);
    for (int f = 0; f < 3; ++f) {
        const auto colon = rest.find(':');
        if ((f < 2) == (colon == std::string_view::npos)) throw InvalidInput("range must be START:STOP:STEP");
        const std::string piece(rest.substr(0, colon));
        std::size_t used = 0;
        try {
            *fields[f] = std::stod(piece, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != piece.size()) throw InvalidInput("range must be START:STOP:STEP");
        rest = colon == std::string_view::npos ? std::string_view{} : rest.substr(colon + 1);
    }
    if (!std::isfinite(range.start) || !std::isfinite(range.stop) || !std::isfinite(range.step)) {
        throw InvalidInput("range values must be finite");
    }
    if (!(range.step > 0.0) || range.stop < range.start) throw InvalidInput("empty or inverted range");
    return range;
}

namespace {

struct CommonOptions {
    std::string manifest;
    int k = 0;
    double gamma = 0.5;
    double m = 1.5;
    double epsilon = 1e-5;
    int max_iter = 100;
    std::string output;
    int workers = 1;
    bool emit_memberships = false;
    bool timing = false;
};

void add_solver_flags(CLI::App& cmd, CommonOptions& opts) {
    cmd.add_option("--manifest", opts.manifest, "Dataset manifest (JSON)")->required();
    cmd.add_option("--k", opts.k, "Number of clusters")->required();
    cmd.add_option("--gamma", opts.gamma, "View-weight exponent in [0, 1)")->capture_default_str();
    cmd.add_option("--m", opts.m, "Fuzzifier, > 1")->capture_default_str();
    cmd.add_option("--epsilon", opts.epsilon, "Stopping threshold on the membership change")->capture_default_str();
    cmd.add_option("--max-iter", opts.max_iter, "Iteration cap")->capture_default_str();
    cmd.add_option("--output", opts.output, "Result file (stdout when omitted)");
    cmd.add_option("--workers", opts.workers, "Worker threads")->capture_default_str();
    cmd.add_flag("--emit-memberships", opts.emit_memberships, "Include the K x N membership matrix");
    cmd.add_flag("--timing", opts.timing, "Record wall time (makes output run-dependent)");
}

SolverConfig make_config(const CommonOptions& opts, DistanceKind measure) {
    SolverConfig config;
    config.k = opts.k;
    config.gamma = opts.gamma;
    config.m = opts.m;
    config.epsilon = opts.epsilon;
    config.max_iter = opts.max_iter;
    config.measure = measure;
    config.threads = std::max(1, opts.workers);
    config.validate();
    return config;
}

struct LoadedDataset {
    MultiViewDataset data;  ///< normalized
    std::string hash;       ///< of the data as loaded, before normalization
};

LoadedDataset load(const CommonOptions& opts) {
    auto raw = load_manifest(opts.manifest);
    if (opts.k > raw.size()) {
        throw InvalidInput("K exceeds N (" + std::to_string(opts.k) + " > " + std::to_string(raw.size()) + ")");
    }
    std::string hash = content_hash(raw);
    return {apply_normalization(std::move(raw)), std::move(hash)};
}

json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const EvaluationReport& report) {
    return {{"accuracy", report.accuracy},
            {"nmi", report.nmi},
            {"f_measure", report.f_measure},
            {"matching", report.matching}};
}

json memberships_json(const FuzzyPartition& partition) {
    json rows = json::array();
    for (Index c = 0; c < partition.clusters(); ++c) rows.push_back(to_json(partition.u.row(c).transpose()));
    return rows;
}

json config_json(const SolverConfig& config, const CommonOptions& opts, const LoadedDataset& dataset) {
    return {{"k", config.k},
            {"gamma", config.gamma},
            {"m", config.m},
            {"epsilon", config.epsilon},
            {"max_iter", config.max_iter},
            {"distance", to_string(config.measure)},
            {"manifest", opts.manifest},
            {"dataset_hash", dataset.hash}};
}

json dataset_json(const MultiViewDataset& dataset) {
    json views = json::array();
    for (const auto& v : dataset.views) {
        views.push_back({{"name", v.name}, {"dim", v.dim()}, {"normalization", to_string(v.normalization)}});
    }
    return {{"name", dataset.name}, {"objects", dataset.size()}, {"views", views}};
}

/// One MinimaxFCM run as written by `fit` and embedded per grid point by `sweep`.
json run_record(const LoadedDataset& dataset, const InitialState& initial, const SolverConfig& config,
                const CommonOptions& opts) {
    const auto started = std::chrono::steady_clock::now();
    const auto result = fit(dataset.data, config, initial);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    json record;
    record["schema"] = "mvfcm.run/1";
    record["algorithm"] = {{"name", "minimaxfcm"}, {"version", kVersion}};
    record["config"] = config_json(config, opts, dataset);
    record["dataset"] = dataset_json(dataset.data);
    json body;
    body["iterations"] = result.iterations;
    body["converged"] = result.converged;
    body["labels"] = result.labels;
    body["alpha"] = to_json(result.weights.alpha);
    body["effective_weights"] = to_json(result.effective_weights);
    body["per_view_cost"] = to_json(result.per_view_cost);
    body["objective_trace"] = result.objective_trace;
    body["degenerate_clusters"] = result.degenerate_clusters;
    if (opts.emit_memberships) body["memberships"] = memberships_json(result.partition);
    record["result"] = std::move(body);
    if (dataset.data.labels) record["metrics"] = to_json(evaluate(result.labels, *dataset.data.labels));
    if (opts.timing) record["wall_time_seconds"] = seconds;
    return record;
}

void write_atomically(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

void emit(const std::string& output, const json& doc) {
    const std::string text = doc.dump(2) + "\n";
    if (output.empty()) {
        std::cout << text;
    } else {
        write_atomically(output, text);
    }
}

int cmd_fit(const CommonOptions& opts) {
    const auto dataset = load(opts);
    const auto config = make_config(opts, dataset.data.distance);
    const auto initial = make_initial_state(dataset.data, config.k, config.gamma);
    emit(opts.output, run_record(dataset, initial, config, opts));
    return kOk;
}

json fcm_json(const FcmResult& result, const std::optional<std::vector<int>>& truth, bool memberships) {
    json out;
    out["iterations"] = result.iterations;
    out["converged"] = result.converged;
    out["labels"] = result.labels;
    out["objective_trace"] = result.objective_trace;
    if (memberships) out["memberships"] = memberships_json(result.partition);
    if (truth) out["metrics"] = to_json(evaluate(result.labels, *truth));
    return out;
}

int cmd_baseline(const CommonOptions& opts, const std::string& mode) {
    const auto dataset = load(opts);
    const auto config = make_config(opts, dataset.data.distance);
    const auto& data = dataset.data;

    json doc;
    doc["schema"] = "mvfcm.baseline/1";
    doc["algorithm"] = {{"name", "fcm"}, {"version", kVersion}};
    doc["mode"] = mode;
    doc["config"] = config_json(config, opts, dataset);
    doc["config"].erase("gamma");
    doc["dataset"] = dataset_json(data);

    if (mode == "concat") {
        const auto joined = concatenate_views(data);
        const auto initial = select_initial_centroids(joined.data, config.k, data.distance);
        doc["result"] = fcm_json(fcm_fit(joined.data, config, initial), data.labels, opts.emit_memberships);
    } else {
        json per_view = json::array();
        for (const auto& view : data.views) {
            const auto initial = select_initial_centroids(view.data, config.k, data.distance);
            json entry = fcm_json(fcm_fit(view, config, initial), data.labels, opts.emit_memberships);
            entry["view"] = view.name;
            per_view.push_back(std::move(entry));
        }
        if (data.labels) {
            json worst, best;
            for (const char* metric : {"accuracy", "nmi", "f_measure"}) {
                double lo = 1.0, hi = 0.0;
                for (const auto& entry : per_view) {
                    const double value = entry["metrics"][metric].get<double>();
                    lo = std::min(lo, value);
                    hi = std::max(hi, value);
                }
                worst[metric] = lo;
                best[metric] = hi;
            }
            doc["worst"] = worst;
            doc["best"] = best;
        }
        doc["views"] = std::move(per_view);
    }
    emit(opts.output, doc);
    return kOk;
}

fs::path plot_path(const std::string& output, const std::string& plot) {
    if (!plot.empty()) return plot;
    if (output.empty()) return {};
    fs::path path(output);
    path.replace_extension(".plot.csv");
    return path;
}

int cmd_sweep(const CommonOptions& opts, const std::string& param, const std::string& range_text,
              const std::string& plot) {
    if (param != "gamma" && param != "m") throw InvalidInput("--param must be gamma or m");
    const auto grid = parse_range(range_text).values();
    const auto dataset = load(opts);
    const auto base = make_config(opts, dataset.data.distance);
    const auto initial = make_initial_state(dataset.data, base.k, base.gamma);

    std::vector<SolverConfig> configs;
    for (double value : grid) {
        SolverConfig config = base;
        config.threads = 1;
        (param == "gamma" ? config.gamma : config.m) = value;
        config.validate();
        configs.push_back(config);
    }

    // Grid points are independent; each worker claims the next unfinished index.
    std::vector<json> records(configs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    const auto work = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                records[i] = run_record(dataset, initial, configs[i], opts);
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const int workers = std::clamp(opts.workers, 1, static_cast<int>(configs.size()));
        for (int w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    if (failure) std::rethrow_exception(failure);

    json doc;
    doc["schema"] = "mvfcm.sweep/1";
    doc["param"] = param;
    doc["range"] = range_text;
    doc["grid"] = grid;
    doc["records"] = records;

    std::ostringstream csv;
    csv << param << ",accuracy,nmi,f_measure,iterations\n";
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& record = records[i];
        csv << json(grid[i]).dump();
        if (record.contains("metrics")) {
            const auto& metrics = record["metrics"];
            csv << ',' << metrics["accuracy"].dump() << ',' << metrics["nmi"].dump() << ','
                << metrics["f_measure"].dump();
            if (!best || metrics["nmi"].get<double>() > records[*best]["metrics"]["nmi"].get<double>()) best = i;
        } else {
            csv << ",,,";
        }
        csv << ',' << record["result"]["iterations"].dump() << '\n';
    }
    if (best) {
        doc["best"] = {{"index", *best}, {param, grid[*best]}, {"metrics", records[*best]["metrics"]}};
    } else {
        doc["best"] = nullptr;
    }
    emit(opts.output, doc);
    if (const auto path = plot_path(opts.output, plot); !path.empty()) write_atomically(path, csv.str());
    return kOk;
}

struct SynthOptions {
    std::string output;
    std::uint64_t seed = 0;
    int k = 2;
    int n_per_cluster = 100;
    int dim = 2;
    std::string views = "informative,informative";
    double separation = 10.0;
    double sigma = 1.0;
    std::string normalization = "unit_variance_inv_sqrt_dim";
    std::string distance = "euclidean";
};

int cmd_synth(const SynthOptions& opts) {
    SynthSpec spec;
    spec.k = opts.k;
    spec.n_per_cluster = opts.n_per_cluster;
    spec.separation = opts.separation;
    spec.sigma = opts.sigma;
    spec.seed = opts.seed;
    spec.distance = parse_distance(opts.distance);
    spec.views = parse_view_list(opts.views, opts.dim);
    const auto normalization = parse_normalization(opts.normalization);
    for (auto& v : spec.views) v.normalization = normalization;
    write_dataset(generate(spec), opts.output);
    return kOk;
}

int cmd_eval(const std::string& result_path, const std::string& manifest, const std::string& output) {
    std::ifstream in(result_path);
    if (!in) throw InvalidInput("missing file: " + result_path);
    json record;
    try {
        record = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidInput("malformed result file " + result_path + ": " + e.what());
    }
    if (!record.contains("result") || !record["result"].contains("labels")) {
        throw InvalidInput("result file " + result_path + " holds no labels");
    }
    const auto labels = record["result"]["labels"].get<std::vector<int>>();
    const auto dataset = load_manifest(manifest);
    if (!dataset.labels) throw InvalidInput("manifest " + manifest + " has no labels");
    json doc;
    doc["schema"] = "mvfcm.eval/1";
    doc["result"] = result_path;
    doc["manifest"] = manifest;
    doc["metrics"] = to_json(evaluate(labels, *dataset.labels));
    emit(output, doc);
    return kOk;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Multi-view fuzzy clustering with minimax view weighting"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonOptions fit_opts, base_opts, sweep_opts;
    auto* fit_cmd = app.add_subcommand("fit", "Cluster a dataset and write a run record");
    add_solver_flags(*fit_cmd, fit_opts);

    std::string mode = "single";
    auto* base_cmd = app.add_subcommand("baseline", "Run FCM on single views or on the concatenated view");
    add_solver_flags(*base_cmd, base_opts);
    base_cmd->add_option("--mode", mode, "single or concat")
        ->check(CLI::IsMember({"single", "concat"}))
        ->capture_default_str();

    std::string param = "gamma", range, plot;
    auto* sweep_cmd = app.add_subcommand("sweep", "Grid search over gamma or m");
    add_solver_flags(*sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--param", param, "gamma or m")->check(CLI::IsMember({"gamma", "m"}))->capture_default_str();
    sweep_cmd->add_option("--range", range, "START:STOP:STEP")->required();
    sweep_cmd->add_option("--plot", plot, "Plot-data CSV (defaults next to --output)");

    SynthOptions synth_opts;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic multi-view dataset");
    synth_cmd->add_option("--output", synth_opts.output, "Output directory")->required();
    synth_cmd->add_option("--seed", synth_opts.seed)->capture_default_str();
    synth_cmd->add_option("--k", synth_opts.k, "Number of clusters")->capture_default_str();
    synth_cmd->add_option("--n-per-cluster", synth_opts.n_per_cluster)->capture_default_str();
    synth_cmd->add_option("--dim", synth_opts.dim, "Default view dimension")->capture_default_str();
    synth_cmd->add_option("--views", synth_opts.views, "e.g. informative:4,noise:2,copy:0")->capture_default_str();
    synth_cmd->add_option("--separation", synth_opts.separation, "Center spacing in sigmas")->capture_default_str();
    synth_cmd->add_option("--sigma", synth_opts.sigma)->capture_default_str();
    synth_cmd->add_option("--normalization", synth_opts.normalization)
        ->check(CLI::IsMember({"none", "unit_variance_inv_sqrt_dim", "l1_rows"}))
        ->capture_default_str();
    synth_cmd->add_option("--distance", synth_opts.distance)
        ->check(CLI::IsMember({"euclidean", "cosine"}))
        ->capture_default_str();

    std::string eval_result, eval_manifest, eval_output;
    auto* eval_cmd = app.add_subcommand("eval", "Recompute metrics for a result file");
    eval_cmd->add_option("--result", eval_result, "Run record (JSON)")->required();
    eval_cmd->add_option("--manifest", eval_manifest, "Manifest providing ground-truth labels")->required();
    eval_cmd->add_option("--output", eval_output, "Output file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalidInput;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit_opts);
        if (*base_cmd) return cmd_baseline(base_opts, mode);
        if (*sweep_cmd) return cmd_sweep(sweep_opts, param, range, plot);
        if (*synth_cmd) return cmd_synth(synth_opts);
        if (*eval_cmd) return cmd_eval(eval_result, eval_manifest, eval_output);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kInvalidInput;
}

int run(std::vector<std::string> args) {
    std::vector<char*> argv;
    argv.reserve(args.size());
    for (auto& a : args) argv.push_back(a.data());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace mvfcm::cli
