#include "suitegauge/preprocessing.hpp"

#include "suitegauge/errors.hpp"

#include <algorithm>
#include <cmath>

namespace suitegauge {

void LogTargetConfig::validate() const {
    if (!(floor > 0.0) || !std::isfinite(floor)) {
        throw ConfigError("log floor must be a positive finite number");
    }
    if (!(base > 0.0) || base == 1.0 || !std::isfinite(base)) {
        throw ConfigError("log base must be positive and different from 1");
    }
}

ScalerParams fit_scaler(const Matrix& train, std::vector<std::string> feature_names,
                        std::string fitted_on) {
    const std::size_t k = train.rows();
    if (k < 2) {
        throw InsufficientDataError("scaler needs at least 2 rows, got " + std::to_string(k) +
                                    (fitted_on.empty() ? "" : " for suite '" + fitted_on + "'"));
    }
    if (feature_names.size() != train.cols()) {
        throw ShapeError("feature name count does not match matrix columns");
    }
    ScalerParams params;
    params.feature_names = std::move(feature_names);
    params.fitted_on = std::move(fitted_on);
    params.means.resize(train.cols());
    params.scales.resize(train.cols());
    for (std::size_t c = 0; c < train.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < k; ++r) sum += train(r, c);
        const double mean = sum / static_cast<double>(k);
        double squares = 0.0;
        for (std::size_t r = 0; r < k; ++r) {
            const double d = train(r, c) - mean;
            squares += d * d;
        }
        params.means[c] = mean;
        params.scales[c] = std::sqrt(squares / static_cast<double>(k));
    }
    return params;
}

ScalerParams fit_scaler(const SuiteMatrix& train) {
    return fit_scaler(train.feature_matrix(), train.feature_names, train.suite_id);
}

Matrix apply_scaler(const ScalerParams& params, const Matrix& features) {
    if (features.cols() != params.means.size()) {
        throw SchemaError("scaler fitted on " + std::to_string(params.means.size()) +
                          " features applied to a matrix with " + std::to_string(features.cols()));
    }
    Matrix out(features.rows(), features.cols());
    for (std::size_t r = 0; r < features.rows(); ++r) {
        for (std::size_t c = 0; c < features.cols(); ++c) {
            const double scale = params.scales[c];
            out(r, c) = scale == 0.0 ? 0.0 : (features(r, c) - params.means[c]) / scale;
        }
    }
    return out;
}

SuiteMatrix apply_scaler(const ScalerParams& params, const SuiteMatrix& suite) {
    if (suite.feature_names != params.feature_names) {
        throw SchemaError("suite '" + suite.suite_id +
                          "' feature names differ from those the scaler was fitted on");
    }
    return suite.with_features(apply_scaler(params, suite.feature_matrix()));
}

double log_target(double precision, const LogTargetConfig& config) {
    const double clamped = std::max(precision, config.floor);
    if (config.base == 10.0) return std::log10(clamped);
    if (config.base == 2.0) return std::log2(clamped);
    return std::log(clamped) / std::log(config.base);
}

std::vector<PerformanceRecord> log_transform_targets(std::vector<PerformanceRecord> records,
                                                     const LogTargetConfig& config) {
    config.validate();
    for (auto& rec : records) {
        if (!(rec.median_target_precision >= 0.0)) {
            throw DomainError("negative target precision for instance '" + rec.instance_id + "'");
        }
        rec.log_target = log_target(rec.median_target_precision, config);
    }
    return records;
}

}  // namespace suitegauge
