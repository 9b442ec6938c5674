#pragma once

#include "suitegauge/core_data.hpp"
#include "suitegauge/matrix.hpp"

#include <string>
#include <vector>

namespace suitegauge {

// Per-feature standardization parameters learned on a training suite.
struct ScalerParams {
    std::vector<std::string> feature_names;
    std::vector<double> means;
    std::vector<double> scales;  // population standard deviation; 0 for constant columns
    std::string fitted_on;
};

struct LogTargetConfig {
    double floor = 1e-8;
    double base = 10.0;

    void validate() const;  // ConfigError unless floor > 0 and base > 0, base != 1
};

// Column means and population (denominator k) standard deviations.
// Throws InsufficientDataError when train.k() < 2.
ScalerParams fit_scaler(const SuiteMatrix& train);
ScalerParams fit_scaler(const Matrix& train, std::vector<std::string> feature_names,
                        std::string fitted_on = {});

// x -> (x - mean) / scale per column; columns with scale 0 map to 0.
// Throws SchemaError when the feature names differ from the fitted ones.
SuiteMatrix apply_scaler(const ScalerParams& params, const SuiteMatrix& suite);
Matrix apply_scaler(const ScalerParams& params, const Matrix& features);

// log_base(max(precision, floor)); the original precision is kept.
std::vector<PerformanceRecord> log_transform_targets(std::vector<PerformanceRecord> records,
                                                     const LogTargetConfig& config = {});
double log_target(double precision, const LogTargetConfig& config = {});

}  // namespace suitegauge
