#include "suitegauge/cli.hpp"

#include "suitegauge/core_data.hpp"
#include "suitegauge/csv.hpp"
#include "suitegauge/errors.hpp"
#include "suitegauge/generalization_eval.hpp"
#include "suitegauge/instance_selector.hpp"
#include "suitegauge/manifest.hpp"
#include "suitegauge/performance_tests.hpp"
#include "suitegauge/predictor.hpp"
#include "suitegauge/preprocessing.hpp"
#include "suitegauge/report.hpp"
#include "suitegauge/rng.hpp"
#include "suitegauge/suite_similarity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>

#ifndef SUITEGAUGE_VERSION
#define SUITEGAUGE_VERSION "dev"
#endif

namespace suitegauge::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::vector<std::string> features;
    std::vector<std::string> performance;
    int dimensionality = 0;
    std::string out_dir = "suitegauge-out";
    std::string config_file;
    std::uint64_t seed = 42;
    std::string seed_source = "default";
    std::size_t threads = 1;

    std::size_t permutations = 199;
    double alpha = 0.05;
    std::string scaling = "row";

    double log_base = 10.0;
    double log_floor = 1e-8;

    std::string algorithm;
    bool all_algorithms = false;
    bool raw_precision = false;

    double threshold = 0.9;
    std::size_t count = 5;
    bool scaled = false;
    std::vector<std::string> select_suites;

    std::size_t trees = 100;
    double max_features = 1.0;
    std::size_t min_samples_leaf = 1;
    std::size_t min_samples_split = 2;
    std::size_t max_depth = 0;
    bool no_bootstrap = false;
    double band = 3.0;
    std::string pvalues_file;
    std::string models_dir;
};

// ---------------------------------------------------------------------------
// Option wiring

void add_data_options(CLI::App* sub, Options& o, bool performance_required) {
    sub->add_option("--features", o.features, "Feature CSV (repeatable)")->required();
    auto* perf = sub->add_option("--performance", o.performance, "Performance CSV (repeatable)");
    if (performance_required) perf->required();
    sub->add_option("--dimensionality", o.dimensionality,
                    "Only keep rows with this problem dimensionality");
}

void add_run_options(CLI::App* sub, Options& o) {
    sub->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--config", o.config_file, "Flat key=value configuration file");
    sub->add_option("--seed", o.seed, "Master seed (fallback: $SUITEGAUGE_SEED)")->capture_default_str();
    sub->add_option("--threads", o.threads, "Worker threads; results do not depend on it")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

void add_log_options(CLI::App* sub, Options& o) {
    sub->add_option("--log-base", o.log_base, "Base of the target log transform")->capture_default_str();
    sub->add_option("--log-floor", o.log_floor, "Precision floor before taking logs")->capture_default_str();
}

void add_energy_options(CLI::App* sub, Options& o) {
    sub->add_option("--permutations", o.permutations, "Permutation replicates R")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--alpha", o.alpha, "Significance level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    sub->add_option("--scaling", o.scaling, "Standardize with the row suite's parameters (row) or not (none)")
        ->check(CLI::IsMember({"row", "none"}))
        ->capture_default_str();
}

void add_algorithm_options(CLI::App* sub, Options& o) {
    auto* alg = sub->add_option("--algorithm", o.algorithm, "Algorithm id");
    auto* all = sub->add_flag("--all-algorithms", o.all_algorithms, "Run for every algorithm in the data");
    alg->excludes(all);
}

// Applies key=value lines from the config file to options not given on the
// command line. Keys are long option names without the leading dashes.
void apply_config_file(CLI::App* sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#' || line[first] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(number) + ": expected key=value");
        }
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t");
            return s.substr(b, e - b + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key == "config") throw UsageError(path + ": nested config files are not supported");
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr) {
            throw UsageError(path + ":" + std::to_string(number) + ": unknown key '" + key +
                             "' for command " + sub->get_name());
        }
        if (opt->count() > 0) continue;
        opt->add_result(value);
        opt->run_callback();
    }
}

void resolve_seed(CLI::App* sub, Options& o, bool seed_from_flag) {
    CLI::Option* opt = sub->get_option_no_throw("--seed");
    if (opt == nullptr) return;
    if (seed_from_flag) {
        o.seed_source = "flag";
    } else if (opt->count() > 0) {
        o.seed_source = "config";
    } else if (const char* env = std::getenv("SUITEGAUGE_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            o.seed = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
            throw UsageError(std::string("SUITEGAUGE_SEED is not an unsigned integer: '") + env + "'");
        }
        o.seed_source = "env";
    }
}

// ---------------------------------------------------------------------------
// Shared pipeline pieces

std::string file_token(const std::string& id) {
    std::string out;
    for (char c : id) {
        const bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        out.push_back(safe ? c : '_');
    }
    return out.empty() ? "_" : out;
}

LogTargetConfig log_config(const Options& o) {
    LogTargetConfig cfg{o.log_floor, o.log_base};
    cfg.validate();
    return cfg;
}

PermutationConfig permutation_config(const Options& o) {
    return PermutationConfig{o.permutations, o.seed, o.alpha, o.threads};
}

ForestConfig forest_config(const Options& o) {
    ForestConfig cfg;
    cfg.n_trees = o.trees;
    cfg.max_features = o.max_features;
    cfg.min_samples_leaf = o.min_samples_leaf;
    cfg.min_samples_split = o.min_samples_split;
    if (o.max_depth > 0) cfg.max_depth = o.max_depth;
    cfg.bootstrap = !o.no_bootstrap;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    cfg.validate();
    return cfg;
}

struct LoadedData {
    Dataset raw;
    Dataset dataset;
    DropReport drops;
};

LoadedData load_data(const Options& o) {
    IngestConfig ingest;
    if (o.dimensionality > 0) ingest.dimensionality = o.dimensionality;
    LoadedData data;
    for (const auto& path : o.features) merge_features(data.raw, load_features(path, ingest));
    for (const auto& path : o.performance) attach_performance(data.raw, load_performance(path));
    if (data.raw.suites.empty()) throw InsufficientDataError("no feature rows were loaded");
    auto [validated, drops] = validate_and_drop_incomplete(data.raw);
    validated.performance = log_transform_targets(std::move(validated.performance), log_config(o));
    data.dataset = std::move(validated);
    data.drops = std::move(drops);
    return data;
}

std::vector<std::string> algorithms_to_run(const Options& o, const Dataset& dataset) {
    if (o.all_algorithms) {
        if (dataset.algorithms.empty()) throw InsufficientDataError("no performance records loaded");
        return dataset.algorithms;
    }
    if (o.algorithm.empty()) throw UsageError("one of --algorithm or --all-algorithms is required");
    if (std::find(dataset.algorithms.begin(), dataset.algorithms.end(), o.algorithm) == dataset.algorithms.end()) {
        throw LookupError("algorithm '" + o.algorithm + "' does not occur in the performance data");
    }
    return {o.algorithm};
}

json data_config(const Options& o) {
    return json{{"features", o.features},
                {"performance", o.performance},
                {"dimensionality", o.dimensionality > 0 ? json(o.dimensionality) : json(nullptr)},
                {"out", o.out_dir},
                {"config_file", o.config_file.empty() ? json(nullptr) : json(o.config_file)},
                {"seed", o.seed},
                {"seed_source", o.seed_source},
                {"log_base", o.log_base},
                {"log_floor", o.log_floor}};
}

json energy_config(const Options& o) {
    return json{{"permutations", o.permutations}, {"alpha", o.alpha}, {"scaling", o.scaling}};
}

json forest_config_json(const Options& o) {
    return json{{"trees", o.trees},
                {"max_features", o.max_features},
                {"min_samples_leaf", o.min_samples_leaf},
                {"min_samples_split", o.min_samples_split},
                {"max_depth", o.max_depth > 0 ? json(o.max_depth) : json(nullptr)},
                {"bootstrap", !o.no_bootstrap}};
}

void print_suite_summary(std::ostream& out, const LoadedData& data) {
    for (const auto& s : data.dataset.suites) {
        const auto* raw = data.raw.find_suite(s.suite_id);
        out << "  " << s.suite_id << ": " << s.k() << " instances";
        if (raw && raw->k() != s.k()) out << " (" << raw->k() - s.k() << " dropped)";
        out << '\n';
    }
}

struct CommandContext {
    Options& options;
    OutputDirectory& dir;
    RunManifest& manifest;
    std::ostream& out;
};

// ---------------------------------------------------------------------------
// Commands

void cmd_validate(CommandContext& ctx) {
    auto& o = ctx.options;
    const auto data = load_data(o);
    report::write_drop_report_csv(data.drops, ctx.dir.output("drop_report.csv"));

    json suites = json::array();
    for (const auto& s : data.dataset.suites) {
        suites.push_back(json{{"suite_id", s.suite_id},
                              {"instances_in", data.raw.suite(s.suite_id).k()},
                              {"instances_kept", s.k()}});
    }
    report::write_json(json{{"kind", "validation"},
                            {"feature_count", data.dataset.feature_names.size()},
                            {"suites", std::move(suites)},
                            {"algorithms", data.dataset.algorithms},
                            {"performance_records", data.dataset.performance.size()},
                            {"dropped", report::to_json(data.drops)}},
                       ctx.dir.output("validation.json"));

    ctx.manifest.resolved_config = data_config(o);
    ctx.out << "validated " << data.dataset.suites.size() << " suites, "
            << data.dataset.feature_names.size() << " features, " << data.drops.dropped.size()
            << " instance(s) dropped\n";
    print_suite_summary(ctx.out, data);
}

void cmd_compare_features(CommandContext& ctx) {
    auto& o = ctx.options;
    const auto data = load_data(o);
    const auto matrix =
        suite_comparison_matrix(data.dataset, permutation_config(o), parse_scaling_mode(o.scaling));

    report::write_json(report::to_json(matrix), ctx.dir.output("feature_pvalues.json"));
    report::write_pvalue_csv(matrix, ctx.dir.output("feature_pvalues.csv"));
    report::emit_heatmap_data(report::heatmap_cells(matrix), ctx.dir.output("feature_pvalues_heatmap.csv"));

    ctx.manifest.resolved_config = data_config(o);
    ctx.manifest.resolved_config["energy"] = energy_config(o);

    ctx.out << "energy test p-values (rows: suite whose scaling is used), R = " << o.permutations << '\n';
    for (const auto& row : matrix.suite_ids) {
        ctx.out << "  " << std::left << std::setw(12) << row;
        for (const auto& col : matrix.suite_ids) {
            if (row == col) {
                ctx.out << std::setw(10) << "/";
                continue;
            }
            const auto& r = matrix.at(row, col);
            ctx.out << std::setw(10) << (csv::format_double(r.p_value) + (r.significant ? "*" : ""));
        }
        ctx.out << '\n';
    }
}

void cmd_compare_performance(CommandContext& ctx) {
    auto& o = ctx.options;
    const auto data = load_data(o);
    const auto target = o.raw_precision ? KsTarget::raw_precision : KsTarget::log_target;
    for (const auto& alg : algorithms_to_run(o, data.dataset)) {
        const auto matrix = performance_ks_matrix(data.dataset, alg, o.alpha, target);
        const std::string stem = "ks_" + file_token(alg);
        report::write_json(report::to_json(matrix), ctx.dir.output(stem + ".json"));
        report::write_ks_csv(matrix, ctx.dir.output(stem + ".csv"));
        report::emit_heatmap_data(report::heatmap_cells(matrix), ctx.dir.output(stem + "_heatmap.csv"));
        std::size_t significant = 0;
        for (const auto& r : matrix.upper) significant += r.significant ? 1 : 0;
        ctx.out << alg << ": " << significant << " of " << matrix.upper.size()
                << " suite pairs differ at alpha " << o.alpha << '\n';
    }
    ctx.manifest.resolved_config = data_config(o);
    ctx.manifest.resolved_config["alpha"] = o.alpha;
    ctx.manifest.resolved_config["ks_target"] = o.raw_precision ? "raw_precision" : "log_target";
    ctx.manifest.resolved_config["ks_p_value_method"] = kKsPValueMethod;
}

void cmd_select(CommandContext& ctx) {
    auto& o = ctx.options;
    const auto data = load_data(o);
    const auto& ds = data.dataset;

    std::vector<InstanceRecord> instances;
    for (const auto& s : ds.suites) {
        if (!o.select_suites.empty() &&
            std::find(o.select_suites.begin(), o.select_suites.end(), s.suite_id) == o.select_suites.end()) {
            continue;
        }
        instances.insert(instances.end(), s.rows.begin(), s.rows.end());
    }
    for (const auto& wanted : o.select_suites) ds.suite(wanted);
    if (instances.empty()) throw InsufficientDataError("no instances to select from");

    std::vector<InstanceRecord> graph_input = instances;
    if (o.scaled) {
        Matrix pooled(0, ds.feature_names.size());
        for (const auto& inst : instances) pooled.append_row(inst.features);
        const auto params = fit_scaler(pooled, ds.feature_names, "pooled");
        const auto scaled = apply_scaler(params, pooled);
        for (std::size_t i = 0; i < graph_input.size(); ++i) {
            graph_input[i].features.assign(scaled.row(i).begin(), scaled.row(i).end());
        }
    }

    const auto graph = build_similarity_graph(graph_input, o.threshold);
    const auto sampled = sample_suites(graph, o.count, o.seed);

    report::write_selection_csv(sampled, ctx.dir.output("selection.csv"));
    report::write_overlap_csv(sampled, ctx.dir.output("overlap.csv"));
    json summary = report::to_json(sampled);
    summary["kind"] = "selection";
    summary["threshold"] = o.threshold;
    summary["graph"] = json{{"nodes", graph.node_count()},
                            {"edges", graph.edge_count()},
                            {"max_degree", graph.max_degree()}};
    report::write_json(summary, ctx.dir.output("selection.json"));

    // Selected suites in the ingestion format, so they can be compared and
    // evaluated directly. Instance ids get a suite prefix only when the
    // source suites share ids.
    std::set<std::string> ids;
    bool collision = false;
    for (const auto& inst : instances) collision |= !ids.insert(inst.instance_id).second;
    auto new_id = [&](const InstanceKey& key) {
        return collision ? key.suite_id + "/" + key.instance_id : key.instance_id;
    };

    Dataset selected;
    selected.feature_names = ds.feature_names;
    std::vector<PerformanceRecord> selected_perf;
    for (const auto& s : sampled.suites) {
        SuiteMatrix suite{s.suite_label, ds.feature_names, {}};
        for (std::size_t idx : s.selected) {
            InstanceRecord rec = instances[idx];
            rec.instance_id = new_id({instances[idx].instance_id, instances[idx].suite_id});
            rec.suite_id = s.suite_label;
            suite.rows.push_back(std::move(rec));
        }
        selected.suites.push_back(std::move(suite));
        for (std::size_t idx : s.selected) {
            for (const auto& p : ds.performance) {
                if (p.instance_id != instances[idx].instance_id || p.suite_id != instances[idx].suite_id) continue;
                PerformanceRecord rec = p;
                rec.instance_id = new_id({p.instance_id, p.suite_id});
                rec.suite_id = s.suite_label;
                selected_perf.push_back(std::move(rec));
            }
        }
    }
    report::write_features_csv(selected, ctx.dir.output("selected_features.csv"));
    if (!o.performance.empty()) {
        report::write_performance_csv(selected_perf, ctx.dir.output("selected_performance.csv"));
    }

    ctx.manifest.resolved_config = data_config(o);
    ctx.manifest.resolved_config["threshold"] = o.threshold;
    ctx.manifest.resolved_config["count"] = o.count;
    ctx.manifest.resolved_config["scaled"] = o.scaled;
    ctx.manifest.resolved_config["suites"] = o.select_suites;

    ctx.out << "similarity graph: " << graph.node_count() << " nodes, " << graph.edge_count() << " edges\n";
    for (const auto& s : sampled.suites) {
        ctx.out << "  " << s.suite_label << ": " << s.selected.size() << " instances\n";
    }
    for (const auto& ov : sampled.overlaps) {
        ctx.out << "  overlap " << ov.suite_a << "/" << ov.suite_b << ": " << ov.overlap << '\n';
    }
}

void cmd_evaluate(CommandContext& ctx) {
    auto& o = ctx.options;
    const auto data = load_data(o);
    const auto forest = forest_config(o);
    const auto logs = log_config(o);

    PValueMatrix pvalues;
    if (!o.pvalues_file.empty()) {
        pvalues = report::pvalue_matrix_from_json(report::read_json(o.pvalues_file));
        ctx.manifest.inputs.push_back(o.pvalues_file);
    } else {
        pvalues = suite_comparison_matrix(data.dataset, permutation_config(o), parse_scaling_mode(o.scaling));
    }

    if (!o.models_dir.empty()) {
        std::error_code ec;
        fs::create_directories(o.models_dir, ec);
        if (ec) throw IoError("cannot create models directory '" + o.models_dir + "'");
    }

    for (const auto& alg : algorithms_to_run(o, data.dataset)) {
        const std::string token = file_token(alg);
        ModelCache cache;
        if (!o.models_dir.empty()) {
            auto model_path = [&](const std::string& suite) {
                return (fs::path(o.models_dir) / (token + "__" + file_token(suite) + ".json")).string();
            };
            cache.lookup = [&, model_path](const std::string& suite) -> std::optional<ForestModel> {
                const auto path = model_path(suite);
                if (!fs::exists(path)) return std::nullopt;
                ForestModel m = load_forest(path);
                ForestConfig expected = forest;
                expected.seed = derive_seed(derive_seed(forest.seed, alg), suite);
                expected.threads = m.config.threads;
                if (!(m.config == expected)) return std::nullopt;
                ctx.manifest.inputs.push_back(path);
                return m;
            };
            cache.on_fit = [&, model_path](const std::string& suite, const ForestModel& m) {
                const auto path = model_path(suite);
                save_forest(m, path);
                ctx.manifest.outputs.push_back(path);
            };
        }
        const auto errors = cross_suite_evaluate(data.dataset, alg, forest, logs, o.models_dir.empty() ? nullptr : &cache);
        const auto alignment = alignment_report(pvalues, errors, o.band);

        report::emit_heatmap_data(report::heatmap_cells(errors), ctx.dir.output("mdae_" + token + ".csv"));
        report::write_training_errors_csv(errors, ctx.dir.output("training_errors_" + token + ".csv"));
        report::write_abs_errors_csv(errors, ctx.dir.output("abs_errors_" + token + ".csv"));
        report::write_json(report::to_json(errors), ctx.dir.output("evaluation_" + token + ".json"));
        report::write_json(report::to_json(alignment), ctx.dir.output("alignment_" + token + ".json"));

        ctx.out << alg << ": training MDAE";
        for (const auto& s : errors.train_suites) {
            ctx.out << ' ' << s << '=' << csv::format_double(errors.training_mdae(s));
        }
        ctx.out << "; alignment " << alignment.agreeing << " agree / " << alignment.disagreeing
                << " disagree (band " << o.band << ")\n";
    }

    ctx.manifest.resolved_config = data_config(o);
    ctx.manifest.resolved_config["forest"] = forest_config_json(o);
    ctx.manifest.resolved_config["band"] = o.band;
    ctx.manifest.resolved_config["pvalues"] =
        o.pvalues_file.empty() ? json{{"source", "computed"}, {"energy", energy_config(o)}}
                               : json{{"source", o.pvalues_file}};
    ctx.manifest.resolved_config["models_dir"] = o.models_dir.empty() ? json(nullptr) : json(o.models_dir);
}

void cmd_report(CommandContext& ctx) {
    auto& o = ctx.options;
    const fs::path root = ctx.dir.root();
    const fs::path pvalue_path = o.pvalues_file.empty() ? root / "feature_pvalues.json" : fs::path(o.pvalues_file);
    if (!fs::exists(pvalue_path)) {
        throw LookupError("missing " + pvalue_path.string() + "; run compare-features first");
    }
    std::vector<fs::path> evaluations;
    for (const auto& entry : fs::directory_iterator(root)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("evaluation_", 0) == 0 && entry.path().extension() == ".json") {
            evaluations.push_back(entry.path());
        }
    }
    std::sort(evaluations.begin(), evaluations.end());
    if (evaluations.empty()) throw LookupError("no evaluation_*.json in " + root.string() + "; run evaluate first");

    const auto pvalues = report::pvalue_matrix_from_json(report::read_json(pvalue_path.string()));
    ctx.manifest.inputs.push_back(pvalue_path.string());

    json table = json::object();
    for (const auto& row : pvalues.suite_ids) {
        json cols = json::object();
        for (const auto& col : pvalues.suite_ids) {
            if (row == col) continue;
            cols[col] = pvalues.at(row, col).p_value;
        }
        table[row] = std::move(cols);
    }

    json algorithms = json::array();
    std::size_t agreeing = 0;
    std::size_t disagreeing = 0;
    for (const auto& path : evaluations) {
        ctx.manifest.inputs.push_back(path.string());
        const auto errors = report::error_matrix_from_json(report::read_json(path.string()));
        const auto alignment = alignment_report(pvalues, errors, o.band);
        agreeing += alignment.agreeing;
        disagreeing += alignment.disagreeing;

        json mdae = json::object();
        json training = json::object();
        for (const auto& train : errors.train_suites) {
            training[train] = errors.training_mdae(train);
            json cols = json::object();
            for (const auto& test : errors.train_suites) {
                if (train != test) cols[test] = errors.at(train, test).mdae;
            }
            mdae[train] = std::move(cols);
        }
        algorithms.push_back(json{{"algorithm_id", errors.algorithm_id},
                                  {"mdae", std::move(mdae)},
                                  {"training_mdae", std::move(training)},
                                  {"alignment", report::to_json(alignment)}});
    }

    report::write_json(json{{"kind", "report"},
                            {"feature_pvalues",
                             {{"scaling", to_string(pvalues.scaling_mode)},
                              {"alpha", pvalues.alpha},
                              {"suite_ids", pvalues.suite_ids},
                              {"table", std::move(table)}}},
                            {"algorithms", std::move(algorithms)},
                            {"summary",
                             {{"band", o.band},
                              {"agreeing_pairs", agreeing},
                              {"disagreeing_pairs", disagreeing}}}},
                       ctx.dir.output("report.json"));

    ctx.manifest.resolved_config = json{{"out", o.out_dir}, {"band", o.band}};
    ctx.out << "report: " << evaluations.size() << " algorithm(s), " << agreeing << " agreeing / "
            << disagreeing << " disagreeing suite pairs\n";
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Statistical similarity of benchmark suites and cross-suite generalization of "
                 "performance predictors",
                 "suitegauge"};
    app.set_version_flag("--version", SUITEGAUGE_VERSION);
    app.require_subcommand(1, 1);
    app.failure_message(CLI::FailureMessage::help);

    auto* validate = app.add_subcommand("validate", "Load inputs, drop incomplete instances, write a drop report");
    add_data_options(validate, o, false);
    add_run_options(validate, o);
    add_log_options(validate, o);

    auto* compare_features = app.add_subcommand(
        "compare-features", "Energy two-sample test between every ordered pair of suites");
    add_data_options(compare_features, o, false);
    add_run_options(compare_features, o);
    add_log_options(compare_features, o);
    add_energy_options(compare_features, o);

    auto* compare_performance = app.add_subcommand(
        "compare-performance", "Kolmogorov-Smirnov test of an algorithm's performance across suites");
    add_data_options(compare_performance, o, true);
    add_run_options(compare_performance, o);
    add_log_options(compare_performance, o);
    add_algorithm_options(compare_performance, o);
    compare_performance->add_option("--alpha", o.alpha, "Significance level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    compare_performance->add_flag("--raw-precision", o.raw_precision, "Test raw precision instead of log targets");

    auto* select = app.add_subcommand("select", "Sample diverse suites via cosine graph + maximal independent set");
    add_data_options(select, o, false);
    add_run_options(select, o);
    add_log_options(select, o);
    select->add_option("--threshold", o.threshold, "Cosine similarity at or above which instances are linked")
        ->check(CLI::Range(-1.0, 1.0))
        ->capture_default_str();
    select->add_option("--count", o.count, "Number of suites to sample")->check(CLI::PositiveNumber)->capture_default_str();
    select->add_flag("--scaled", o.scaled, "Standardize features (pooled) before cosine similarity");
    select->add_option("--suite", o.select_suites, "Restrict the pool to these suites (repeatable)");

    auto* evaluate = app.add_subcommand("evaluate", "Cross-suite random-forest evaluation and alignment report");
    add_data_options(evaluate, o, true);
    add_run_options(evaluate, o);
    add_log_options(evaluate, o);
    add_algorithm_options(evaluate, o);
    add_energy_options(evaluate, o);
    evaluate->add_option("--trees", o.trees, "Trees per forest")->check(CLI::PositiveNumber)->capture_default_str();
    evaluate->add_option("--max-features", o.max_features, "Fraction of features tried per split")->capture_default_str();
    evaluate->add_option("--min-samples-leaf", o.min_samples_leaf)->capture_default_str();
    evaluate->add_option("--min-samples-split", o.min_samples_split)->capture_default_str();
    evaluate->add_option("--max-depth", o.max_depth, "0 = unlimited")->capture_default_str();
    evaluate->add_flag("--no-bootstrap", o.no_bootstrap, "Fit every tree on the full training suite");
    evaluate->add_option("--band", o.band, "Test MDAE within band x training MDAE counts as generalizing")
        ->capture_default_str();
    evaluate->add_option("--pvalues", o.pvalues_file, "Reuse feature_pvalues.json instead of recomputing");
    evaluate->add_option("--models-dir", o.models_dir, "Load/save fitted forests as JSON here");

    auto* report_cmd = app.add_subcommand("report", "Join compare-features and evaluate outputs into report.json");
    add_run_options(report_cmd, o);
    report_cmd->add_option("--band", o.band, "Alignment band multiplier")->capture_default_str();
    report_cmd->add_option("--pvalues", o.pvalues_file, "p-value document (default: <out>/feature_pvalues.json)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    CLI::App* sub = nullptr;
    try {
        app.parse(reversed);
        sub = app.get_subcommands().front();
        const auto* seed_opt = sub->get_option_no_throw("--seed");
        const bool seed_from_flag = seed_opt != nullptr && seed_opt->count() > 0;
        if (!o.config_file.empty()) apply_config_file(sub, o.config_file);
        resolve_seed(sub, o, seed_from_flag);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsageError;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n" << (sub ? sub->help() : app.help());
        return kUsageError;
    }

    const auto started_wall = std::chrono::system_clock::now();
    const auto started = std::chrono::steady_clock::now();
    try {
        OutputDirectory dir(o.out_dir);
        RunManifest manifest;
        manifest.tool_version = SUITEGAUGE_VERSION;
        manifest.command = sub->get_name();
        manifest.run_key = manifest.command;
        manifest.started = started_wall;
        manifest.inputs = o.features;
        manifest.inputs.insert(manifest.inputs.end(), o.performance.begin(), o.performance.end());
        if (!o.config_file.empty()) manifest.inputs.push_back(o.config_file);
        if (sub->get_option_no_throw("--all-algorithms") != nullptr) {
            manifest.run_key += ":" + (o.all_algorithms ? std::string("all") : o.algorithm);
        }

        CommandContext ctx{o, dir, manifest, out};
        const std::string& name = manifest.command;
        if (name == "validate") {
            cmd_validate(ctx);
        } else if (name == "compare-features") {
            cmd_compare_features(ctx);
        } else if (name == "compare-performance") {
            cmd_compare_performance(ctx);
        } else if (name == "select") {
            cmd_select(ctx);
        } else if (name == "evaluate") {
            cmd_evaluate(ctx);
        } else {
            cmd_report(ctx);
        }

        const auto dir_outputs = dir.outputs();
        manifest.outputs.insert(manifest.outputs.begin(), dir_outputs.begin(), dir_outputs.end());
        manifest.resolved_config["threads"] = o.threads;
        manifest.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        write_manifest(dir.root(), manifest);
        return kSuccess;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
}

}  // namespace suitegauge::cli
