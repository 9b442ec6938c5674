#pragma once

#include "suitegauge/core_data.hpp"
#include "suitegauge/generalization_eval.hpp"
#include "suitegauge/instance_selector.hpp"
#include "suitegauge/performance_tests.hpp"
#include "suitegauge/suite_similarity.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace suitegauge::report {

// One cell of a heatmap in long format.
struct HeatmapCell {
    std::string row;
    std::string col;
    double value = 0.0;
    std::string annotation;
};

// p-values, annotated "*" where significant; row-major in suite order.
std::vector<HeatmapCell> heatmap_cells(const PValueMatrix& matrix);
// Test MDAE per (train, test) pair; no annotation.
std::vector<HeatmapCell> heatmap_cells(const ErrorMatrix& matrix);
// KS p-values over the upper triangle, annotated "*" where significant.
std::vector<HeatmapCell> heatmap_cells(const KsMatrix& matrix);

// Writes row_suite,col_suite,value,annotation. An empty cell list yields a
// header-only file. Throws IoError when the path is not writable.
void emit_heatmap_data(const std::vector<HeatmapCell>& cells, const std::string& path);

nlohmann::json to_json(const EnergyTestResult& result);
nlohmann::json to_json(const PValueMatrix& matrix);
PValueMatrix pvalue_matrix_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ErrorMatrix& matrix);
ErrorMatrix error_matrix_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const AlignmentReport& report);
nlohmann::json to_json(const KsMatrix& matrix);
nlohmann::json to_json(const DropReport& report);
nlohmann::json to_json(const SampledSuites& suites);

// row_suite,col_suite,statistic,p_value,significant,permutations,seed
void write_pvalue_csv(const PValueMatrix& matrix, const std::string& path);
// suite_a,suite_b,n,m,statistic_d,p_value,significant
void write_ks_csv(const KsMatrix& matrix, const std::string& path);
// train_suite,mdae
void write_training_errors_csv(const ErrorMatrix& matrix, const std::string& path);
// train_suite,eval_suite,instance_id,abs_error; training rows first per suite
void write_abs_errors_csv(const ErrorMatrix& matrix, const std::string& path);
// instance_id,suite_id,reason
void write_drop_report_csv(const DropReport& report, const std::string& path);
// suite_label,instance_id,source_suite
void write_selection_csv(const SampledSuites& suites, const std::string& path);
// suite_a,suite_b,overlap
void write_overlap_csv(const SampledSuites& suites, const std::string& path);

// Feature / performance CSVs in the ingestion format.
void write_features_csv(const Dataset& dataset, const std::string& path);
void write_performance_csv(const std::vector<PerformanceRecord>& records, const std::string& path);

void write_json(const nlohmann::json& doc, const std::string& path);
nlohmann::json read_json(const std::string& path);

}  // namespace suitegauge::report
