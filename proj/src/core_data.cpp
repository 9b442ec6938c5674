#include "suitegauge/core_data.hpp"

#include "suitegauge/csv.hpp"
#include "suitegauge/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace suitegauge {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

// Parses a real number; returns false for text that is not a number at all.
bool parse_real(std::string_view text, double& out) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return false;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), out);
    return result.ec == std::errc{} && result.ptr == text.data() + text.size();
}

bool parse_positive_int(std::string_view text, int& out) {
    text = trim(text);
    const auto result = std::from_chars(text.data(), text.data() + text.size(), out);
    return result.ec == std::errc{} && result.ptr == text.data() + text.size() && out > 0;
}

constexpr std::string_view kIdColumns[] = {"instance_id", "suite_id", "dimensionality"};

}  // namespace

Matrix SuiteMatrix::feature_matrix() const {
    Matrix m(rows.size(), n());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::copy(rows[r].features.begin(), rows[r].features.end(), m.row(r).begin());
    }
    return m;
}

std::vector<std::string> SuiteMatrix::instance_ids() const {
    std::vector<std::string> ids;
    ids.reserve(rows.size());
    for (const auto& r : rows) ids.push_back(r.instance_id);
    return ids;
}

SuiteMatrix SuiteMatrix::with_features(const Matrix& features) const {
    if (features.rows() != k() || features.cols() != n()) {
        throw ShapeError("feature matrix shape does not match suite '" + suite_id + "'");
    }
    SuiteMatrix out = *this;
    for (std::size_t r = 0; r < out.rows.size(); ++r) {
        const auto src = features.row(r);
        out.rows[r].features.assign(src.begin(), src.end());
    }
    return out;
}

const SuiteMatrix* Dataset::find_suite(std::string_view suite_id) const noexcept {
    for (const auto& s : suites) {
        if (s.suite_id == suite_id) return &s;
    }
    return nullptr;
}

const SuiteMatrix& Dataset::suite(std::string_view suite_id) const {
    if (const auto* s = find_suite(suite_id)) return *s;
    throw LookupError("unknown suite '" + std::string(suite_id) + "'");
}

std::vector<std::string> Dataset::suite_ids() const {
    std::vector<std::string> ids;
    ids.reserve(suites.size());
    for (const auto& s : suites) ids.push_back(s.suite_id);
    return ids;
}

std::vector<PerformanceRecord> Dataset::performance_for(std::string_view algorithm_id,
                                                        const SuiteMatrix& suite) const {
    std::map<std::string_view, const PerformanceRecord*> by_instance;
    for (const auto& rec : performance) {
        if (rec.algorithm_id == algorithm_id && rec.suite_id == suite.suite_id) {
            by_instance.emplace(rec.instance_id, &rec);
        }
    }
    if (by_instance.empty()) throw CoverageError(suite.suite_id, std::string(algorithm_id));
    std::vector<PerformanceRecord> out;
    out.reserve(suite.k());
    for (const auto& row : suite.rows) {
        const auto it = by_instance.find(row.instance_id);
        if (it == by_instance.end()) {
            throw CoverageError(suite.suite_id, std::string(algorithm_id), row.instance_id);
        }
        out.push_back(*it->second);
    }
    return out;
}

Dataset load_features(const std::string& path, const IngestConfig& config) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) throw SchemaError(path + ": empty feature file (no header)");

    const auto& header = rows.front().fields;
    if (header.size() < 4) {
        throw SchemaError(path + ": header needs instance_id, suite_id, dimensionality and at "
                                 "least one feature column");
    }
    for (std::size_t c = 0; c < 3; ++c) {
        if (trim(header[c]) != kIdColumns[c]) {
            throw SchemaError(path + ": header column " + std::to_string(c + 1) + " must be '" +
                              std::string(kIdColumns[c]) + "', found '" + header[c] + "'");
        }
    }

    Dataset dataset;
    std::set<std::string> seen_names;
    for (std::size_t c = 3; c < header.size(); ++c) {
        std::string name(trim(header[c]));
        if (name.empty()) throw SchemaError(path + ": empty feature name in header");
        if (!seen_names.insert(name).second) {
            throw SchemaError(path + ": duplicate feature column '" + name + "'");
        }
        dataset.feature_names.push_back(std::move(name));
    }
    const std::size_t n = dataset.feature_names.size();

    auto is_missing = [&](std::string_view cell) {
        const auto t = trim(cell);
        return std::find(config.missing_markers.begin(), config.missing_markers.end(), t) !=
               config.missing_markers.end();
    };

    std::set<std::pair<std::string, std::string>> keys;
    std::map<std::string, std::size_t> suite_index;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != header.size()) {
            throw SchemaError(path + ":" + std::to_string(row.line) + ": expected " +
                              std::to_string(header.size()) + " columns, found " +
                              std::to_string(row.fields.size()));
        }
        InstanceRecord rec;
        rec.instance_id = std::string(trim(row.fields[0]));
        rec.suite_id = std::string(trim(row.fields[1]));
        if (rec.instance_id.empty() || rec.suite_id.empty()) {
            throw ParseError(path, row.line, "empty instance_id or suite_id");
        }
        if (!parse_positive_int(row.fields[2], rec.dimensionality)) {
            throw ParseError(path, row.line,
                             "dimensionality must be a positive integer, found '" + row.fields[2] +
                                 "'");
        }
        if (config.dimensionality && rec.dimensionality != *config.dimensionality) continue;

        rec.features.resize(n);
        for (std::size_t c = 0; c < n; ++c) {
            const auto& cell = row.fields[c + 3];
            if (is_missing(cell)) {
                rec.features[c] = std::numeric_limits<double>::quiet_NaN();
                rec.flagged_columns.push_back(c);
                continue;
            }
            if (!parse_real(cell, rec.features[c])) {
                throw ParseError(path, row.line,
                                 "feature '" + dataset.feature_names[c] + "' is not a number: '" +
                                     cell + "'");
            }
            if (!std::isfinite(rec.features[c])) rec.flagged_columns.push_back(c);
        }

        if (!keys.emplace(rec.instance_id, rec.suite_id).second) {
            throw IntegrityError(path + ":" + std::to_string(row.line) + ": duplicate instance '" +
                                 rec.instance_id + "' in suite '" + rec.suite_id + "'");
        }
        auto [it, inserted] = suite_index.emplace(rec.suite_id, dataset.suites.size());
        if (inserted) {
            dataset.suites.push_back(SuiteMatrix{rec.suite_id, dataset.feature_names, {}});
        }
        dataset.suites[it->second].rows.push_back(std::move(rec));
    }
    return dataset;
}

std::vector<PerformanceRecord> load_performance(const std::string& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) throw SchemaError(path + ": empty performance file (no header)");

    constexpr std::string_view required[] = {"instance_id", "suite_id", "algorithm_id",
                                             "median_target_precision"};
    std::map<std::string, std::size_t> column;
    for (std::size_t c = 0; c < rows.front().fields.size(); ++c) {
        std::string name(trim(rows.front().fields[c]));
        if (std::find(std::begin(required), std::end(required), name) == std::end(required)) {
            throw SchemaError(path + ": unknown column '" + name + "'");
        }
        if (!column.emplace(name, c).second) {
            throw SchemaError(path + ": duplicate column '" + name + "'");
        }
    }
    for (auto name : required) {
        if (!column.count(std::string(name))) {
            throw SchemaError(path + ": missing column '" + std::string(name) + "'");
        }
    }
    const auto width = rows.front().fields.size();
    const auto c_instance = column.at("instance_id");
    const auto c_suite = column.at("suite_id");
    const auto c_algorithm = column.at("algorithm_id");
    const auto c_precision = column.at("median_target_precision");

    std::vector<PerformanceRecord> records;
    records.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != width) {
            throw SchemaError(path + ":" + std::to_string(row.line) + ": expected " +
                              std::to_string(width) + " columns, found " +
                              std::to_string(row.fields.size()));
        }
        PerformanceRecord rec;
        rec.instance_id = std::string(trim(row.fields[c_instance]));
        rec.suite_id = std::string(trim(row.fields[c_suite]));
        rec.algorithm_id = std::string(trim(row.fields[c_algorithm]));
        if (rec.instance_id.empty() || rec.suite_id.empty() || rec.algorithm_id.empty()) {
            throw ParseError(path, row.line, "empty identifier");
        }
        const auto& cell = row.fields[c_precision];
        if (!parse_real(cell, rec.median_target_precision)) {
            throw ParseError(path, row.line, "median_target_precision is not a number: '" + cell + "'");
        }
        if (!std::isfinite(rec.median_target_precision) || rec.median_target_precision < 0.0) {
            throw DomainError(path + ":" + std::to_string(row.line) +
                              ": median_target_precision must be finite and >= 0, found " +
                              std::string(trim(cell)));
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void attach_performance(Dataset& dataset, std::vector<PerformanceRecord> records) {
    std::set<std::pair<std::string_view, std::string_view>> instances;
    for (const auto& s : dataset.suites) {
        for (const auto& r : s.rows) instances.emplace(r.instance_id, r.suite_id);
    }
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (const auto& rec : dataset.performance) {
        seen.emplace(rec.instance_id, rec.suite_id, rec.algorithm_id);
    }
    for (auto& rec : records) {
        if (!instances.count({rec.instance_id, rec.suite_id})) {
            throw IntegrityError("performance record for unknown instance '" + rec.instance_id +
                                 "' in suite '" + rec.suite_id + "'");
        }
        if (!seen.emplace(rec.instance_id, rec.suite_id, rec.algorithm_id).second) {
            throw IntegrityError("duplicate performance record for instance '" + rec.instance_id +
                                 "', suite '" + rec.suite_id + "', algorithm '" +
                                 rec.algorithm_id + "'");
        }
        if (std::find(dataset.algorithms.begin(), dataset.algorithms.end(), rec.algorithm_id) ==
            dataset.algorithms.end()) {
            dataset.algorithms.push_back(rec.algorithm_id);
        }
        dataset.performance.push_back(std::move(rec));
    }
}

void merge_features(Dataset& into, Dataset other) {
    if (into.suites.empty() && into.feature_names.empty()) {
        into.feature_names = other.feature_names;
    } else if (into.feature_names != other.feature_names) {
        throw SchemaError("feature columns differ between inputs; all suites must share the "
                          "same feature names in the same order");
    }
    for (auto& s : other.suites) {
        if (into.find_suite(s.suite_id)) {
            throw IntegrityError("suite '" + s.suite_id + "' appears in more than one input");
        }
        into.suites.push_back(std::move(s));
    }
    attach_performance(into, std::move(other.performance));
}

std::pair<Dataset, DropReport> validate_and_drop_incomplete(const Dataset& dataset) {
    Dataset out;
    out.feature_names = dataset.feature_names;
    DropReport report;
    std::set<std::pair<std::string_view, std::string_view>> dropped;

    for (const auto& suite : dataset.suites) {
        if (suite.feature_names != dataset.feature_names) {
            throw SchemaError("suite '" + suite.suite_id + "' has a different feature set");
        }
        SuiteMatrix kept{suite.suite_id, suite.feature_names, {}};
        for (const auto& row : suite.rows) {
            std::vector<std::size_t> bad = row.flagged_columns;
            for (std::size_t c = 0; c < row.features.size(); ++c) {
                if (!std::isfinite(row.features[c]) &&
                    std::find(bad.begin(), bad.end(), c) == bad.end()) {
                    bad.push_back(c);
                }
            }
            if (bad.empty()) {
                kept.rows.push_back(row);
                continue;
            }
            std::sort(bad.begin(), bad.end());
            std::string reason = "missing or non-finite feature(s): ";
            for (std::size_t i = 0; i < bad.size(); ++i) {
                if (i != 0) reason += ';';
                reason += suite.feature_names[bad[i]];
            }
            report.dropped.push_back({row.instance_id, row.suite_id, std::move(reason)});
            dropped.emplace(row.instance_id, row.suite_id);
        }
        if (kept.k() < 2) throw SuiteTooSmallError(suite.suite_id, kept.k());
        out.suites.push_back(std::move(kept));
    }

    for (const auto& rec : dataset.performance) {
        if (dropped.count({rec.instance_id, rec.suite_id})) continue;
        out.performance.push_back(rec);
    }
    for (const auto& alg : dataset.algorithms) {
        const bool present = std::any_of(out.performance.begin(), out.performance.end(),
                                         [&](const auto& r) { return r.algorithm_id == alg; });
        if (present) out.algorithms.push_back(alg);
    }
    return {std::move(out), std::move(report)};
}

}  // namespace suitegauge
