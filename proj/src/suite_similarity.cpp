#include "suitegauge/suite_similarity.hpp"

#include "suitegauge/errors.hpp"
#include "suitegauge/preprocessing.hpp"
#include "suitegauge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace suitegauge {
namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            compensation_ += (sum_ - t) + x;
        } else {
            compensation_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

void check_samples(const Matrix& p, const Matrix& q) {
    if (p.rows() == 0 || q.rows() == 0) throw ShapeError("energy statistic needs non-empty samples");
    if (p.cols() != q.cols()) {
        throw ShapeError("samples have " + std::to_string(p.cols()) + " and " +
                         std::to_string(q.cols()) + " columns");
    }
    for (const Matrix* m : {&p, &q}) {
        for (double v : m->data()) {
            if (!std::isfinite(v)) throw DomainError("non-finite value in energy statistic input");
        }
    }
}

}  // namespace

DistanceTable::DistanceTable(const Matrix& pooled)
    : size_(pooled.rows()), distances_(size_ * size_, 0.0) {
    for (std::size_t a = 0; a < size_; ++a) {
        const auto ra = pooled.row(a);
        for (std::size_t b = a + 1; b < size_; ++b) {
            const auto rb = pooled.row(b);
            double squares = 0.0;
            for (std::size_t c = 0; c < ra.size(); ++c) {
                const double d = ra[c] - rb[c];
                squares += d * d;
            }
            const double dist = std::sqrt(squares);
            distances_[a * size_ + b] = dist;
            distances_[b * size_ + a] = dist;
        }
    }
}

double DistanceTable::statistic(std::span<const std::size_t> first,
                                std::span<const std::size_t> second) const {
    const auto k1 = static_cast<double>(first.size());
    const auto k2 = static_cast<double>(second.size());

    CompensatedSum between;
    for (std::size_t i : first) {
        for (std::size_t m : second) between.add((*this)(i, m));
    }
    // Each within-sample sum runs over ordered pairs, so every unordered pair
    // is counted twice and the diagonal contributes zero.
    auto within = [this](std::span<const std::size_t> sample) {
        CompensatedSum sum;
        for (std::size_t a = 0; a < sample.size(); ++a) {
            for (std::size_t b = a + 1; b < sample.size(); ++b) sum.add((*this)(sample[a], sample[b]));
        }
        return 2.0 * sum.value();
    };

    const double mean_between = between.value() / (k1 * k2);
    const double mean_first = within(first) / (k1 * k1);
    const double mean_second = within(second) / (k2 * k2);
    const double bracket = 2.0 * mean_between - mean_first - mean_second;
    const double scale = std::max({mean_between, mean_first, mean_second});
    if (bracket <= 1e-12 * scale) return 0.0;
    return (k1 * k2 / (k1 + k2)) * bracket;
}

double energy_statistic(const Matrix& p, const Matrix& q) {
    check_samples(p, q);
    const DistanceTable table(stack_rows(p, q));
    std::vector<std::size_t> first(p.rows());
    std::vector<std::size_t> second(q.rows());
    std::iota(first.begin(), first.end(), std::size_t{0});
    std::iota(second.begin(), second.end(), p.rows());
    return table.statistic(first, second);
}

EnergyTestResult permutation_pvalue(const Matrix& p, const Matrix& q,
                                    const PermutationConfig& config) {
    if (config.permutations < 1) throw ConfigError("permutation count must be at least 1");
    check_samples(p, q);
    const std::size_t k1 = p.rows();
    const std::size_t total = k1 + q.rows();
    if (total < 4) {
        throw ShapeError("permutation test needs at least 4 pooled rows, got " +
                         std::to_string(total));
    }

    const DistanceTable table(stack_rows(p, q));
    std::vector<std::size_t> identity(total);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    const double observed =
        table.statistic(std::span(identity).first(k1), std::span(identity).subspan(k1));

    const std::size_t replicates = config.permutations;
    std::vector<unsigned char> exceeds(replicates, 0);
    auto run_range = [&](std::size_t begin, std::size_t end) {
        std::vector<std::size_t> order(total);
        for (std::size_t r = begin; r < end; ++r) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            Rng rng(derive_seed(config.seed, r));
            rng.shuffle(order);
            const double e = table.statistic(std::span(order).first(k1), std::span(order).subspan(k1));
            exceeds[r] = e >= observed ? 1 : 0;
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(config.threads, replicates));
    if (workers == 1) {
        run_range(0, replicates);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (replicates + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(replicates, begin + chunk);
            if (begin < end) pool.emplace_back(run_range, begin, end);
        }
    }

    EnergyTestResult result;
    result.statistic = observed;
    result.exceed_count = static_cast<std::size_t>(std::count(exceeds.begin(), exceeds.end(), 1));
    result.p_value = static_cast<double>(1 + result.exceed_count) / static_cast<double>(replicates + 1);
    result.permutations = replicates;
    result.seed = config.seed;
    result.significant = result.p_value <= config.alpha;
    return result;
}

std::string to_string(ScalingMode mode) {
    return mode == ScalingMode::row_fitted ? "row_fitted" : "none";
}

ScalingMode parse_scaling_mode(const std::string& text) {
    if (text == "row" || text == "row_fitted") return ScalingMode::row_fitted;
    if (text == "none") return ScalingMode::none;
    throw ConfigError("unknown scaling mode '" + text + "' (expected row or none)");
}

const EnergyTestResult& PValueMatrix::at(const std::string& row, const std::string& col) const {
    const auto it = cells.find({row, col});
    if (it == cells.end()) throw LookupError("no p-value cell for (" + row + ", " + col + ")");
    return it->second;
}

std::uint64_t pair_seed(std::uint64_t master, const std::string& row, const std::string& col) {
    return derive_seed(derive_seed(master, row), col);
}

PValueMatrix suite_comparison_matrix(const Dataset& dataset, const PermutationConfig& config,
                                     ScalingMode scaling) {
    if (dataset.suites.size() < 2) throw InsufficientDataError("need at least 2 suites to compare");
    for (const auto& s : dataset.suites) {
        if (s.k() < 2) throw SuiteTooSmallError(s.suite_id, s.k());
    }

    PValueMatrix out;
    out.suite_ids = dataset.suite_ids();
    out.scaling_mode = scaling;
    out.alpha = config.alpha;
    for (const auto& row : dataset.suites) {
        Matrix row_features = row.feature_matrix();
        ScalerParams params;
        if (scaling == ScalingMode::row_fitted) {
            params = fit_scaler(row);
            row_features = apply_scaler(params, row_features);
        }
        for (const auto& col : dataset.suites) {
            if (col.suite_id == row.suite_id) continue;
            Matrix col_features = col.feature_matrix();
            if (scaling == ScalingMode::row_fitted) {
                if (col.feature_names != params.feature_names) {
                    throw SchemaError("suites '" + row.suite_id + "' and '" + col.suite_id +
                                      "' have different feature sets");
                }
                col_features = apply_scaler(params, col_features);
            }
            PermutationConfig cell_config = config;
            cell_config.seed = pair_seed(config.seed, row.suite_id, col.suite_id);
            out.cells.emplace(std::pair{row.suite_id, col.suite_id},
                              permutation_pvalue(row_features, col_features, cell_config));
        }
    }
    return out;
}

}  // namespace suitegauge
