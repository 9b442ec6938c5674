#pragma once

#include "suitegauge/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace suitegauge {

// Regression forest settings; defaults follow scikit-learn's
// RandomForestRegressor.
struct ForestConfig {
    std::size_t n_trees = 100;
    double max_features = 1.0;  // fraction of features tried per split, (0, 1]
    std::size_t min_samples_leaf = 1;
    std::size_t min_samples_split = 2;
    std::optional<std::size_t> max_depth;
    bool bootstrap = true;
    std::uint64_t seed = 42;
    // Worker threads for tree fitting; the forest is identical for any value.
    std::size_t threads = 1;

    void validate() const;  // ConfigError

    friend bool operator==(const ForestConfig&, const ForestConfig&) = default;
};

// Binary CART regression tree in flat storage. Node 0 is the root; a node
// is a leaf when feature < 0. Samples with x[feature] <= threshold go left.
struct RegressionTree {
    std::vector<int> feature;
    std::vector<double> threshold;
    std::vector<int> left;
    std::vector<int> right;
    std::vector<double> value;
    std::vector<std::size_t> samples;

    std::size_t node_count() const noexcept { return feature.size(); }
    std::size_t depth() const;
    double predict(std::span<const double> x) const;

    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

struct ForestModel {
    std::vector<RegressionTree> trees;
    ForestConfig config;
    std::size_t n_features = 0;
    std::pair<double, double> train_target_range{0.0, 0.0};

    friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

// Fits one tree per bootstrap resample (when enabled). Tree t draws from a
// stream seeded by derive_seed(config.seed, t). Splits minimize the summed
// squared error of the children, thresholds sit halfway between consecutive
// distinct values, and equal-gain candidates resolve to the lowest feature
// index, then the lowest threshold.
// Throws InsufficientDataError when fewer than 2 rows, ShapeError when
// x.rows() != y.size(), DomainError on non-finite input.
ForestModel fit_forest(const Matrix& x, std::span<const double> y, const ForestConfig& config = {});

// Mean of the per-tree leaf values for every row. Throws SchemaError on a
// column count mismatch.
std::vector<double> predict(const ForestModel& model, const Matrix& x);

inline constexpr int kForestFormatVersion = 1;

std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const std::string& text);  // SchemaError on bad documents
void save_forest(const ForestModel& model, const std::string& path);
ForestModel load_forest(const std::string& path);

}  // namespace suitegauge
