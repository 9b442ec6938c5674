#pragma once

#include "suitegauge/core_data.hpp"
#include "suitegauge/predictor.hpp"
#include "suitegauge/preprocessing.hpp"
#include "suitegauge/suite_similarity.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace suitegauge {

// Median with the midpoint convention for even lengths. Throws ShapeError on
// empty input.
double median(std::vector<double> values);

// Median absolute error; throws ShapeError on empty or unequal inputs.
double mdae(std::span<const double> predictions, std::span<const double> truths);

struct ErrorCell {
    double mdae = 0.0;
    std::vector<std::string> instance_ids;
    std::vector<double> abs_errors;
};

struct ErrorMatrix {
    std::string algorithm_id;
    std::vector<std::string> train_suites;
    std::map<std::pair<std::string, std::string>, ErrorCell> cells;  // (train, test), off-diagonal
    std::map<std::string, ErrorCell> training;                       // resubstitution errors

    // The diagonal (train == test) returns the training cell.
    const ErrorCell& at(const std::string& train, const std::string& test) const;
    double training_mdae(const std::string& train) const;
};

// Hook for reusing previously fitted models: returns a model for the train
// suite or nullopt to fit a new one; `on_fit` receives freshly fitted models.
struct ModelCache {
    std::function<std::optional<ForestModel>(const std::string& train_suite)> lookup;
    std::function<void(const std::string& train_suite, const ForestModel&)> on_fit;
};

// For each train suite: fit a scaler on it, fit a forest on the scaled
// features and log targets, record the resubstitution error, then score every
// other suite through the same scaler and forest. Targets are recomputed from
// the raw precision with `log_config`.
ErrorMatrix cross_suite_evaluate(const Dataset& dataset, const std::string& algorithm_id,
                                 const ForestConfig& forest_config,
                                 const LogTargetConfig& log_config = {},
                                 const ModelCache* cache = nullptr);

struct AlignmentEntry {
    std::string train_suite;
    std::string test_suite;
    double p_value = 1.0;
    bool significant = false;
    double mdae = 0.0;
    double training_mdae = 0.0;
    // mdae / training_mdae; empty when the training error is zero.
    std::optional<double> ratio;
    bool within_band = false;  // mdae <= band * training_mdae
    bool agrees = false;       // within_band == !significant
};

struct AlignmentReport {
    std::string algorithm_id;
    double band = 3.0;
    double alpha = 0.05;
    std::vector<AlignmentEntry> entries;
    std::size_t agreeing = 0;
    std::size_t disagreeing = 0;
};

// Joins feature-space p-values with generalization errors per ordered pair.
// Throws SchemaError when the two matrices cover different suites.
AlignmentReport alignment_report(const PValueMatrix& pvalues, const ErrorMatrix& errors,
                                 double band = 3.0);

struct LabeledErrors {
    std::string label;       // suite id
    bool is_training = false;
    std::vector<std::string> instance_ids;
    std::vector<double> abs_errors;
};

// Training AE vector followed by one test AE vector per other suite.
// Throws LookupError for an unknown train suite.
std::vector<LabeledErrors> boxplot_data(const ErrorMatrix& errors, const std::string& train_suite);

}  // namespace suitegauge
