#include "suitegauge/generalization_eval.hpp"

#include "suitegauge/errors.hpp"
#include "suitegauge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace suitegauge {

double median(std::vector<double> values) {
    if (values.empty()) throw ShapeError("median of an empty vector");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return lower + (upper - lower) / 2.0;
}

double mdae(std::span<const double> predictions, std::span<const double> truths) {
    if (predictions.size() != truths.size()) {
        throw ShapeError("mdae of " + std::to_string(predictions.size()) + " predictions and " +
                         std::to_string(truths.size()) + " truths");
    }
    if (predictions.empty()) throw ShapeError("mdae of empty vectors");
    std::vector<double> errors(predictions.size());
    for (std::size_t i = 0; i < errors.size(); ++i) errors[i] = std::abs(predictions[i] - truths[i]);
    return median(std::move(errors));
}

const ErrorCell& ErrorMatrix::at(const std::string& train, const std::string& test) const {
    if (train == test) {
        const auto it = training.find(train);
        if (it != training.end()) return it->second;
    } else {
        const auto it = cells.find({train, test});
        if (it != cells.end()) return it->second;
    }
    throw LookupError("no error cell for train '" + train + "', test '" + test + "'");
}

double ErrorMatrix::training_mdae(const std::string& train) const { return at(train, train).mdae; }

namespace {

struct SuiteData {
    const SuiteMatrix* suite;
    std::vector<double> targets;
};

ErrorCell score(const ForestModel& model, const Matrix& features, const SuiteData& data) {
    const auto predictions = predict(model, features);
    ErrorCell cell;
    cell.instance_ids = data.suite->instance_ids();
    cell.abs_errors.resize(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        cell.abs_errors[i] = std::abs(predictions[i] - data.targets[i]);
    }
    cell.mdae = median(cell.abs_errors);
    return cell;
}

}  // namespace

ErrorMatrix cross_suite_evaluate(const Dataset& dataset, const std::string& algorithm_id,
                                 const ForestConfig& forest_config, const LogTargetConfig& log_config,
                                 const ModelCache* cache) {
    forest_config.validate();
    log_config.validate();
    if (dataset.suites.size() < 2) throw InsufficientDataError("need at least 2 suites to evaluate");

    std::vector<SuiteData> suites;
    for (const auto& suite : dataset.suites) {
        SuiteData d{&suite, {}};
        for (const auto& rec : dataset.performance_for(algorithm_id, suite)) {
            d.targets.push_back(log_target(rec.median_target_precision, log_config));
        }
        suites.push_back(std::move(d));
    }

    ErrorMatrix out;
    out.algorithm_id = algorithm_id;
    out.train_suites = dataset.suite_ids();
    for (const auto& train : suites) {
        const auto& train_id = train.suite->suite_id;
        const ScalerParams scaler = fit_scaler(*train.suite);
        const Matrix train_features = apply_scaler(scaler, train.suite->feature_matrix());

        std::optional<ForestModel> model;
        if (cache && cache->lookup) model = cache->lookup(train_id);
        if (model && model->n_features != train_features.cols()) model.reset();
        if (!model) {
            ForestConfig cfg = forest_config;
            cfg.seed = derive_seed(derive_seed(forest_config.seed, algorithm_id), train_id);
            model = fit_forest(train_features, train.targets, cfg);
            if (cache && cache->on_fit) cache->on_fit(train_id, *model);
        }

        out.training.emplace(train_id, score(*model, train_features, train));
        for (const auto& test : suites) {
            if (&test == &train) continue;
            const Matrix test_features = apply_scaler(scaler, test.suite->feature_matrix());
            out.cells.emplace(std::pair{train_id, test.suite->suite_id},
                              score(*model, test_features, test));
        }
    }
    return out;
}

AlignmentReport alignment_report(const PValueMatrix& pvalues, const ErrorMatrix& errors, double band) {
    if (!(band > 0.0)) throw ConfigError("alignment band must be positive");
    const std::set<std::string> p_suites(pvalues.suite_ids.begin(), pvalues.suite_ids.end());
    const std::set<std::string> e_suites(errors.train_suites.begin(), errors.train_suites.end());
    if (p_suites != e_suites) {
        throw SchemaError("p-value matrix and error matrix cover different suites");
    }

    AlignmentReport report;
    report.algorithm_id = errors.algorithm_id;
    report.band = band;
    report.alpha = pvalues.alpha;
    for (const auto& train : errors.train_suites) {
        const double training = errors.training_mdae(train);
        for (const auto& test : errors.train_suites) {
            if (test == train) continue;
            const auto& test_result = pvalues.at(train, test);
            AlignmentEntry e;
            e.train_suite = train;
            e.test_suite = test;
            e.p_value = test_result.p_value;
            e.significant = test_result.significant;
            e.mdae = errors.at(train, test).mdae;
            e.training_mdae = training;
            if (training > 0.0) e.ratio = e.mdae / training;
            e.within_band = e.mdae <= band * training;
            e.agrees = e.within_band != e.significant;
            (e.agrees ? report.agreeing : report.disagreeing) += 1;
            report.entries.push_back(std::move(e));
        }
    }
    return report;
}

std::vector<LabeledErrors> boxplot_data(const ErrorMatrix& errors, const std::string& train_suite) {
    const auto it = errors.training.find(train_suite);
    if (it == errors.training.end()) throw LookupError("unknown train suite '" + train_suite + "'");
    std::vector<LabeledErrors> out;
    out.push_back({train_suite, true, it->second.instance_ids, it->second.abs_errors});
    for (const auto& test : errors.train_suites) {
        if (test == train_suite) continue;
        const auto& cell = errors.at(train_suite, test);
        out.push_back({test, false, cell.instance_ids, cell.abs_errors});
    }
    return out;
}

}  // namespace suitegauge
