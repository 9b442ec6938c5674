#pragma once

#include "suitegauge/matrix.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace suitegauge {

// One problem instance described by its landscape feature vector.
struct InstanceRecord {
    std::string instance_id;
    std::string suite_id;
    int dimensionality = 0;
    // Missing cells are stored as NaN.
    std::vector<double> features;
    // Columns that were missing or non-finite in the input.
    std::vector<std::size_t> flagged_columns;

    bool complete() const noexcept { return flagged_columns.empty(); }

    friend bool operator==(const InstanceRecord&, const InstanceRecord&) = default;
};

// One benchmark suite: k instances by n features, rows in file order.
struct SuiteMatrix {
    std::string suite_id;
    std::vector<std::string> feature_names;
    std::vector<InstanceRecord> rows;

    std::size_t k() const noexcept { return rows.size(); }
    std::size_t n() const noexcept { return feature_names.size(); }

    Matrix feature_matrix() const;
    std::vector<std::string> instance_ids() const;

    // Copy of this suite with features replaced row by row; shapes must match.
    SuiteMatrix with_features(const Matrix& features) const;

    friend bool operator==(const SuiteMatrix&, const SuiteMatrix&) = default;
};

struct PerformanceRecord {
    std::string instance_id;
    std::string suite_id;
    std::string algorithm_id;
    double median_target_precision = 0.0;
    // Filled by log_transform_targets; NaN until then.
    double log_target = std::numeric_limits<double>::quiet_NaN();

    friend bool operator==(const PerformanceRecord& a, const PerformanceRecord& b) {
        const bool log_equal = (a.log_target == b.log_target) ||
                               (a.log_target != a.log_target && b.log_target != b.log_target);
        return a.instance_id == b.instance_id && a.suite_id == b.suite_id &&
               a.algorithm_id == b.algorithm_id &&
               a.median_target_precision == b.median_target_precision && log_equal;
    }
};

struct Dataset {
    std::vector<std::string> feature_names;
    // Suites in order of first appearance.
    std::vector<SuiteMatrix> suites;
    std::vector<PerformanceRecord> performance;
    // Algorithm ids in order of first appearance.
    std::vector<std::string> algorithms;

    const SuiteMatrix* find_suite(std::string_view suite_id) const noexcept;
    const SuiteMatrix& suite(std::string_view suite_id) const;  // LookupError if absent
    std::vector<std::string> suite_ids() const;

    // Records for one algorithm and suite, ordered like the suite's rows.
    // Throws CoverageError when an instance of the suite has no record.
    std::vector<PerformanceRecord> performance_for(std::string_view algorithm_id,
                                                   const SuiteMatrix& suite) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct IngestConfig {
    // Cell values treated as missing, compared after trimming whitespace.
    std::vector<std::string> missing_markers{"", "NA"};
    // When set, rows with a different dimensionality are skipped.
    std::optional<int> dimensionality;
};

// Reads a feature CSV with header
//   instance_id,suite_id,dimensionality,<feature_1>,...,<feature_n>
// Returns a dataset without performance data.
Dataset load_features(const std::string& path, const IngestConfig& config = {});

// Reads a performance CSV with columns instance_id, suite_id, algorithm_id,
// median_target_precision in any order.
std::vector<PerformanceRecord> load_performance(const std::string& path);

// Attaches performance records; every record must join to a feature row and
// (instance, suite, algorithm) must be unique. Throws IntegrityError otherwise.
void attach_performance(Dataset& dataset, std::vector<PerformanceRecord> records);

// Appends the suites of `other`; feature names must match exactly and suite
// ids must not collide.
void merge_features(Dataset& into, Dataset other);

struct DroppedInstance {
    std::string instance_id;
    std::string suite_id;
    std::string reason;

    friend bool operator==(const DroppedInstance&, const DroppedInstance&) = default;
};

struct DropReport {
    std::vector<DroppedInstance> dropped;
    bool empty() const noexcept { return dropped.empty(); }
};

// Removes instances with any missing or non-finite feature from both the
// features and the performance records. Throws SuiteTooSmallError when a
// suite is left with fewer than two instances.
std::pair<Dataset, DropReport> validate_and_drop_incomplete(const Dataset& dataset);

}  // namespace suitegauge
