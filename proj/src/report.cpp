#include "suitegauge/report.hpp"

#include "suitegauge/csv.hpp"
#include "suitegauge/errors.hpp"

#include <fstream>
#include <sstream>

namespace suitegauge::report {
namespace {

using nlohmann::json;
using csv::format_double;

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

const char* yes_no(bool value) { return value ? "true" : "false"; }

}  // namespace

std::vector<HeatmapCell> heatmap_cells(const PValueMatrix& matrix) {
    std::vector<HeatmapCell> cells;
    for (const auto& row : matrix.suite_ids) {
        for (const auto& col : matrix.suite_ids) {
            if (row == col) continue;
            const auto it = matrix.cells.find({row, col});
            if (it == matrix.cells.end()) continue;
            cells.push_back({row, col, it->second.p_value, it->second.significant ? "*" : ""});
        }
    }
    return cells;
}

std::vector<HeatmapCell> heatmap_cells(const ErrorMatrix& matrix) {
    std::vector<HeatmapCell> cells;
    for (const auto& row : matrix.train_suites) {
        for (const auto& col : matrix.train_suites) {
            if (row == col) continue;
            const auto it = matrix.cells.find({row, col});
            if (it == matrix.cells.end()) continue;
            cells.push_back({row, col, it->second.mdae, ""});
        }
    }
    return cells;
}

std::vector<HeatmapCell> heatmap_cells(const KsMatrix& matrix) {
    std::vector<HeatmapCell> cells;
    for (const auto& r : matrix.upper) {
        cells.push_back({r.suite_a, r.suite_b, r.p_value, r.significant ? "*" : ""});
    }
    return cells;
}

void emit_heatmap_data(const std::vector<HeatmapCell>& cells, const std::string& path) {
    auto out = open_output(path);
    csv::write_row(out, {"row_suite", "col_suite", "value", "annotation"});
    for (const auto& c : cells) {
        csv::write_row(out, {c.row, c.col, format_double(c.value), c.annotation});
    }
    finish(out, path);
}

json to_json(const EnergyTestResult& r) {
    return json{{"statistic", r.statistic},       {"p_value", r.p_value},
                {"permutations", r.permutations}, {"seed", r.seed},
                {"significant", r.significant},   {"exceed_count", r.exceed_count}};
}

json to_json(const PValueMatrix& matrix) {
    json cells = json::array();
    for (const auto& row : matrix.suite_ids) {
        for (const auto& col : matrix.suite_ids) {
            const auto it = matrix.cells.find({row, col});
            if (row == col || it == matrix.cells.end()) continue;
            json cell = to_json(it->second);
            cell["row_suite"] = row;
            cell["col_suite"] = col;
            cells.push_back(std::move(cell));
        }
    }
    return json{{"kind", "feature_pvalues"},
                {"test", "multivariate energy two-sample permutation test"},
                {"suite_ids", matrix.suite_ids},
                {"scaling", to_string(matrix.scaling_mode)},
                {"alpha", matrix.alpha},
                {"cells", std::move(cells)}};
}

PValueMatrix pvalue_matrix_from_json(const json& doc) {
    try {
        PValueMatrix m;
        doc.at("suite_ids").get_to(m.suite_ids);
        m.scaling_mode = parse_scaling_mode(doc.at("scaling").get<std::string>());
        m.alpha = doc.at("alpha").get<double>();
        for (const auto& c : doc.at("cells")) {
            EnergyTestResult r;
            r.statistic = c.at("statistic").get<double>();
            r.p_value = c.at("p_value").get<double>();
            r.permutations = c.at("permutations").get<std::size_t>();
            r.seed = c.at("seed").get<std::uint64_t>();
            r.significant = c.at("significant").get<bool>();
            r.exceed_count = c.at("exceed_count").get<std::size_t>();
            m.cells.emplace(std::pair{c.at("row_suite").get<std::string>(),
                                      c.at("col_suite").get<std::string>()},
                            r);
        }
        return m;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed p-value document: ") + e.what());
    }
}

namespace {

json cell_to_json(const ErrorCell& cell) {
    return json{{"mdae", cell.mdae}, {"instance_ids", cell.instance_ids}, {"abs_errors", cell.abs_errors}};
}

ErrorCell cell_from_json(const json& j) {
    ErrorCell cell;
    cell.mdae = j.at("mdae").get<double>();
    j.at("instance_ids").get_to(cell.instance_ids);
    j.at("abs_errors").get_to(cell.abs_errors);
    if (cell.instance_ids.size() != cell.abs_errors.size()) {
        throw SchemaError("error cell has mismatched instance and error counts");
    }
    return cell;
}

}  // namespace

json to_json(const ErrorMatrix& matrix) {
    json training = json::array();
    json cells = json::array();
    for (const auto& train : matrix.train_suites) {
        if (const auto it = matrix.training.find(train); it != matrix.training.end()) {
            json t = cell_to_json(it->second);
            t["train_suite"] = train;
            training.push_back(std::move(t));
        }
        for (const auto& test : matrix.train_suites) {
            const auto it = matrix.cells.find({train, test});
            if (train == test || it == matrix.cells.end()) continue;
            json c = cell_to_json(it->second);
            c["train_suite"] = train;
            c["test_suite"] = test;
            cells.push_back(std::move(c));
        }
    }
    return json{{"kind", "cross_suite_errors"},
                {"algorithm_id", matrix.algorithm_id},
                {"suite_ids", matrix.train_suites},
                {"training", std::move(training)},
                {"cells", std::move(cells)}};
}

ErrorMatrix error_matrix_from_json(const json& doc) {
    try {
        ErrorMatrix m;
        m.algorithm_id = doc.at("algorithm_id").get<std::string>();
        doc.at("suite_ids").get_to(m.train_suites);
        for (const auto& t : doc.at("training")) {
            m.training.emplace(t.at("train_suite").get<std::string>(), cell_from_json(t));
        }
        for (const auto& c : doc.at("cells")) {
            m.cells.emplace(std::pair{c.at("train_suite").get<std::string>(),
                                      c.at("test_suite").get<std::string>()},
                            cell_from_json(c));
        }
        return m;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed error-matrix document: ") + e.what());
    }
}

json to_json(const AlignmentReport& report) {
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back(json{{"train_suite", e.train_suite},
                               {"test_suite", e.test_suite},
                               {"p_value", e.p_value},
                               {"significant", e.significant},
                               {"mdae", e.mdae},
                               {"training_mdae", e.training_mdae},
                               {"ratio", e.ratio ? json(*e.ratio) : json(nullptr)},
                               {"within_band", e.within_band},
                               {"agrees", e.agrees}});
    }
    return json{{"kind", "alignment"},
                {"algorithm_id", report.algorithm_id},
                {"band", report.band},
                {"alpha", report.alpha},
                {"rule", "agree when (not significant and mdae <= band * training_mdae) or "
                         "(significant and mdae > band * training_mdae)"},
                {"agreeing", report.agreeing},
                {"disagreeing", report.disagreeing},
                {"entries", std::move(entries)}};
}

json to_json(const KsMatrix& matrix) {
    json pairs = json::array();
    for (const auto& r : matrix.upper) {
        pairs.push_back(json{{"suite_a", r.suite_a},
                             {"suite_b", r.suite_b},
                             {"n", r.n},
                             {"m", r.m},
                             {"statistic_d", r.statistic_d},
                             {"p_value", r.p_value},
                             {"significant", r.significant}});
    }
    return json{{"kind", "performance_ks"},
                {"algorithm_id", matrix.algorithm_id},
                {"suite_ids", matrix.suite_ids},
                {"alpha", matrix.alpha},
                {"target", matrix.target == KsTarget::log_target ? "log_target" : "raw_precision"},
                {"p_value_method", kKsPValueMethod},
                {"pairs", std::move(pairs)}};
}

json to_json(const DropReport& report) {
    json dropped = json::array();
    for (const auto& d : report.dropped) {
        dropped.push_back(json{{"instance_id", d.instance_id}, {"suite_id", d.suite_id}, {"reason", d.reason}});
    }
    return dropped;
}

json to_json(const SampledSuites& suites) {
    json out = json::array();
    for (const auto& s : suites.suites) {
        json ids = json::array();
        for (const auto& key : s.selected_keys) {
            ids.push_back(json{{"instance_id", key.instance_id}, {"suite_id", key.suite_id}});
        }
        out.push_back(json{{"suite_label", s.suite_label},
                           {"seed", s.seed},
                           {"size", s.selected.size()},
                           {"instances", std::move(ids)}});
    }
    json overlaps = json::array();
    for (const auto& o : suites.overlaps) {
        overlaps.push_back(json{{"suite_a", o.suite_a}, {"suite_b", o.suite_b}, {"overlap", o.overlap}});
    }
    return json{{"suites", std::move(out)}, {"overlaps", std::move(overlaps)}};
}

void write_pvalue_csv(const PValueMatrix& matrix, const std::string& path) {
    auto out = open_output(path);
    csv::write_row(out, {"row_suite", "col_suite", "statistic", "p_value", "significant",
                         "permutations", "seed"});
    for (const auto& row : matrix.suite_ids) {
        for (const auto& col : matrix.suite_ids) {
            const auto it = matrix.cells.find({row, col});
            if (row == col || it == matrix.cells.end()) continue;
            const auto& r = it->second;
            csv::write_row(out, {row, col, format_double(r.statistic), format_double(r.p_value),
                                 yes_no(r.significant), std::to_string(r.permutations),
                                 std::to_string(r.seed)});
        }
    }
    finish(out, path);
}

void write_ks_csv(const KsMatrix& matrix, const std::string& path) {
    auto out = open_output(path);
    csv::write_row(out, {"suite_a", "suite_b", "n", "m", "statistic_d", "p_value", "significant"});
    for (const auto& r : matrix.upper) {
        csv::write_row(out, {r.suite_a, r.suite_b, std::to_string(r.n), std::to_string(r.m),
                             format_double(r.statistic_d), format_double(r.p_value),
                             yes_no(r.significant)});
    }
    finish(out, path);
}

void write_training_errors_csv(const ErrorMatrix& matrix, const std::string& path) {
    auto out = open_output(path);
    csv::write_row(out, {"train_suite", "mdae"});
    for (const auto& train : matrix.train_suites) {
        csv::write_row(out, {train, format_double(matrix.training_mdae(train))});
    }
    finish(out, path);
}

void write_abs_errors_csv(const ErrorMatrix& matrix, const std::string& path) {
    auto out = open_output(path);
    csv::write_row(out, {"train_suite", "eval_suite", "instance_id", "abs_error"});
    for (const auto& train : matrix.train_suites) {
        for (const auto& group : boxplot_data(matrix, train)) {
            for (std::size_t i = 0; i < group.abs_errors.size(); ++i) {
                csv::write_row(out, {train, group.label, group.instance_ids[i],
                                     format_double(group.abs_errors[i])});
            }
        }
    }
    finish(out, path);
}

void write_drop_report_csv(const DropReport& report, const std::string& path) {
    auto out = open_output(path);
    csv::write_row(out, {"instance_id", "suite_id", "reason"});
    for (const auto& d : report.dropped) csv::write_row(out, {d.instance_id, d.suite_id, d.reason});
    finish(out, path);
}

void write_selection_csv(const SampledSuites& suites, const std::string& path) {
    auto out = open_output(path);
    csv::write_row(out, {"suite_label", "instance_id", "source_suite"});
    for (const auto& s : suites.suites) {
        for (const auto& key : s.selected_keys) {
            csv::write_row(out, {s.suite_label, key.instance_id, key.suite_id});
        }
    }
    finish(out, path);
}

void write_overlap_csv(const SampledSuites& suites, const std::string& path) {
    auto out = open_output(path);
    csv::write_row(out, {"suite_a", "suite_b", "overlap"});
    for (const auto& o : suites.overlaps) {
        csv::write_row(out, {o.suite_a, o.suite_b, std::to_string(o.overlap)});
    }
    finish(out, path);
}

void write_features_csv(const Dataset& dataset, const std::string& path) {
    auto out = open_output(path);
    std::vector<std::string> header{"instance_id", "suite_id", "dimensionality"};
    header.insert(header.end(), dataset.feature_names.begin(), dataset.feature_names.end());
    csv::write_row(out, header);
    for (const auto& suite : dataset.suites) {
        for (const auto& row : suite.rows) {
            std::vector<std::string> fields{row.instance_id, row.suite_id,
                                            std::to_string(row.dimensionality)};
            for (double v : row.features) fields.push_back(format_double(v));
            csv::write_row(out, fields);
        }
    }
    finish(out, path);
}

void write_performance_csv(const std::vector<PerformanceRecord>& records, const std::string& path) {
    auto out = open_output(path);
    csv::write_row(out, {"instance_id", "suite_id", "algorithm_id", "median_target_precision"});
    for (const auto& r : records) {
        csv::write_row(out, {r.instance_id, r.suite_id, r.algorithm_id,
                             format_double(r.median_target_precision)});
    }
    finish(out, path);
}

void write_json(const json& doc, const std::string& path) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
    finish(out, path);
}

json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

}  // namespace suitegauge::report
