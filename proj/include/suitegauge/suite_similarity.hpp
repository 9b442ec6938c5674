#pragma once

#include "suitegauge/core_data.hpp"
#include "suitegauge/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace suitegauge {

// Multivariate energy two-sample statistic
//
//   E = k1 k2 / (k1 + k2) * ( 2/(k1 k2) sum_i sum_m |p_i - q_m|
//                             - 1/k1^2 sum_i sum_j |p_i - p_j|
//                             - 1/k2^2 sum_l sum_m |q_l - q_m| )
//
// with Euclidean norms. Sums are accumulated row-major with Neumaier
// compensation; values within 1e-12 (relative to the mean cross distance) of
// zero are reported as exactly 0.
// Throws ShapeError on empty inputs or column mismatch, DomainError on
// non-finite entries.
double energy_statistic(const Matrix& p, const Matrix& q);

// Pooled pairwise Euclidean distances, reused across permutation replicates.
class DistanceTable {
public:
    explicit DistanceTable(const Matrix& pooled);

    std::size_t size() const noexcept { return size_; }
    double operator()(std::size_t a, std::size_t b) const noexcept {
        return distances_[a * size_ + b];
    }

    // Statistic for the split where `first` holds the indices of sample one
    // and `second` those of sample two.
    double statistic(std::span<const std::size_t> first,
                     std::span<const std::size_t> second) const;

private:
    std::size_t size_;
    std::vector<double> distances_;
};

struct PermutationConfig {
    std::size_t permutations = 199;
    std::uint64_t seed = 42;
    double alpha = 0.05;
    // Worker threads for replicates; results are identical for any value.
    std::size_t threads = 1;
};

struct EnergyTestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t permutations = 0;
    std::uint64_t seed = 0;
    bool significant = false;
    // Number of replicates with statistic >= observed.
    std::size_t exceed_count = 0;
};

// Permutation test: replicate r re-splits the pooled rows with a Fisher-Yates
// shuffle seeded by derive_seed(seed, r), and p = (1 + #{E_r >= E_obs}) / (R + 1).
// Throws ConfigError when R < 1 and ShapeError when k1 + k2 < 4.
EnergyTestResult permutation_pvalue(const Matrix& p, const Matrix& q,
                                    const PermutationConfig& config);

enum class ScalingMode { row_fitted, none };

std::string to_string(ScalingMode mode);
ScalingMode parse_scaling_mode(const std::string& text);  // "row" | "row_fitted" | "none"

// Ordered-pair comparison matrix; the diagonal is absent.
struct PValueMatrix {
    std::vector<std::string> suite_ids;
    std::map<std::pair<std::string, std::string>, EnergyTestResult> cells;
    ScalingMode scaling_mode = ScalingMode::row_fitted;
    double alpha = 0.05;

    const EnergyTestResult& at(const std::string& row, const std::string& col) const;
};

// Seed used for the (row, col) cell of a comparison matrix.
std::uint64_t pair_seed(std::uint64_t master, const std::string& row, const std::string& col);

// For every ordered pair (A, B), A != B: with row_fitted scaling, standardize
// both suites with parameters fitted on A, then run the permutation test.
PValueMatrix suite_comparison_matrix(const Dataset& dataset, const PermutationConfig& config,
                                     ScalingMode scaling = ScalingMode::row_fitted);

}  // namespace suitegauge
