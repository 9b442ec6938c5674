#include "suitegauge/errors.hpp"
#include "suitegauge/preprocessing.hpp"
#include "suitegauge/rng.hpp"
#include "suitegauge/suite_similarity.hpp"

#include "oracles.hpp"
#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

using namespace suitegauge;

namespace {

oracle::Rows rows_of(const Matrix& m) {
    oracle::Rows out;
    for (std::size_t r = 0; r < m.rows(); ++r) out.emplace_back(m.row(r).begin(), m.row(r).end());
    return out;
}

Dataset four_suites(std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    ds.feature_names = synthetic::feature_names(3);
    const char* ids[] = {"W", "X", "Y", "Z"};
    for (int s = 0; s < 4; ++s) {
        ds.suites.push_back(synthetic::make_suite(ids[s], synthetic::gaussian_cloud(rng, 12, 3, 0.3 * s), ids[s]));
    }
    return ds;
}

}  // namespace

TEST(EnergyStatistic, HandComputedExamples) {
    EXPECT_DOUBLE_EQ(energy_statistic(Matrix{{0, 0}}, Matrix{{3, 4}}), 5.0);
    EXPECT_EQ(energy_statistic(Matrix{{1, 2}, {3, 4}}, Matrix{{1, 2}, {3, 4}}), 0.0);
    // 1-D: P = {0, 0}, Q = {2, 2}: 2*2/4 * (2*2 - 0 - 0) = 4.
    EXPECT_DOUBLE_EQ(energy_statistic(Matrix{{0}, {0}}, Matrix{{2}, {2}}), 4.0);
    // P = {0}, Q = {1, 3}: 2/3 * (2/2 * 4 - 0 - 4/4) = 2.
    EXPECT_DOUBLE_EQ(energy_statistic(Matrix{{0}}, Matrix{{1}, {3}}), 2.0);
}

TEST(EnergyStatistic, MatchesNaiveOracle) {
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(6);
        const auto p = synthetic::gaussian_cloud(rng, 1 + rng.uniform_index(15), n);
        const auto q = synthetic::gaussian_cloud(rng, 1 + rng.uniform_index(15), n, rng.uniform(-1, 1), 2.0);
        const double expected = oracle::energy(rows_of(p), rows_of(q));
        EXPECT_NEAR(energy_statistic(p, q), expected, 1e-9 * std::max(1.0, std::abs(expected)));
    }
}

TEST(EnergyStatistic, SymmetricAndNonNegative) {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = synthetic::gaussian_cloud(rng, 8, 3);
        const auto q = synthetic::gaussian_cloud(rng, 11, 3, 0.2);
        const double pq = energy_statistic(p, q);
        EXPECT_NEAR(pq, energy_statistic(q, p), 1e-12 * std::max(1.0, pq));
        EXPECT_GE(pq, 0.0);
    }
}

TEST(EnergyStatistic, InvariantUnderRigidMotion) {
    Rng rng(13);
    const auto p = synthetic::gaussian_cloud(rng, 10, 2);
    const auto q = synthetic::gaussian_cloud(rng, 9, 2, 0.5);
    const double theta = 0.7;
    auto move = [&](const Matrix& m) {
        Matrix out(m.rows(), 2);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            out(r, 0) = std::cos(theta) * m(r, 0) - std::sin(theta) * m(r, 1) + 4.0;
            out(r, 1) = std::sin(theta) * m(r, 0) + std::cos(theta) * m(r, 1) - 2.5;
        }
        return out;
    };
    EXPECT_NEAR(energy_statistic(p, q), energy_statistic(move(p), move(q)), 1e-10);
}

TEST(EnergyStatistic, InvariantUnderRowPermutation) {
    Rng rng(14);
    const auto p = synthetic::gaussian_cloud(rng, 10, 3);
    const auto q = synthetic::gaussian_cloud(rng, 7, 3, 1.0);
    std::vector<std::size_t> order(p.rows());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    EXPECT_NEAR(energy_statistic(p, q), energy_statistic(p.select_rows(order), q), 1e-12);
}

TEST(EnergyStatistic, ShapeAndDomainErrors) {
    EXPECT_THROW(energy_statistic(Matrix(0, 2), Matrix{{1, 2}}), ShapeError);
    EXPECT_THROW(energy_statistic(Matrix{{1, 2}}, Matrix{{1, 2, 3}}), ShapeError);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(energy_statistic(Matrix{{1, nan}}, Matrix{{1, 2}}), DomainError);
}

TEST(DistanceTable, StatisticMatchesDirectComputation) {
    Rng rng(15);
    const auto p = synthetic::gaussian_cloud(rng, 6, 2);
    const auto q = synthetic::gaussian_cloud(rng, 5, 2, 1.0);
    const DistanceTable table(stack_rows(p, q));
    std::vector<std::size_t> first{0, 1, 2, 3, 4, 5}, second{6, 7, 8, 9, 10};
    EXPECT_NEAR(table.statistic(first, second), energy_statistic(p, q), 1e-12);
}

TEST(PermutationPValue, GranularityAndRange) {
    Rng rng(16);
    const auto p = synthetic::gaussian_cloud(rng, 15, 3);
    const auto q = synthetic::gaussian_cloud(rng, 15, 3);
    for (std::size_t r : {1u, 9u, 99u}) {
        PermutationConfig cfg;
        cfg.permutations = r;
        const auto res = permutation_pvalue(p, q, cfg);
        EXPECT_GE(res.p_value, 1.0 / static_cast<double>(r + 1));
        EXPECT_LE(res.p_value, 1.0);
        EXPECT_DOUBLE_EQ(res.p_value, static_cast<double>(1 + res.exceed_count) / static_cast<double>(r + 1));
        EXPECT_EQ(res.permutations, r);
    }
}

TEST(PermutationPValue, FarApartSuitesHitTheFloor) {
    Rng rng(17);
    const auto p = synthetic::gaussian_cloud(rng, 20, 2);
    const auto q = synthetic::gaussian_cloud(rng, 20, 2, 10.0);
    PermutationConfig cfg;
    cfg.permutations = 99;
    const auto res = permutation_pvalue(p, q, cfg);
    EXPECT_DOUBLE_EQ(res.p_value, 0.01);
    EXPECT_TRUE(res.significant);
}

TEST(PermutationPValue, SignificanceUsesInclusiveAlpha) {
    Rng rng(17);
    const auto p = synthetic::gaussian_cloud(rng, 20, 2);
    const auto q = synthetic::gaussian_cloud(rng, 20, 2, 10.0);
    PermutationConfig cfg;
    cfg.permutations = 19;
    cfg.alpha = 0.05;
    const auto res = permutation_pvalue(p, q, cfg);
    EXPECT_DOUBLE_EQ(res.p_value, 0.05);
    EXPECT_TRUE(res.significant);
}

TEST(PermutationPValue, ConfigAndShapeErrors) {
    PermutationConfig cfg;
    cfg.permutations = 0;
    EXPECT_THROW(permutation_pvalue(Matrix{{1}, {2}}, Matrix{{3}, {4}}, cfg), ConfigError);
    EXPECT_THROW(permutation_pvalue(Matrix{{1}}, Matrix{{3}, {4}}, PermutationConfig{}), ShapeError);
}

TEST(PermutationPValue, DeterministicForSeedAndThreadCount) {
    Rng rng(18);
    const auto p = synthetic::gaussian_cloud(rng, 12, 3);
    const auto q = synthetic::gaussian_cloud(rng, 14, 3, 0.4);
    PermutationConfig cfg;
    cfg.permutations = 199;
    const auto a = permutation_pvalue(p, q, cfg);
    const auto b = permutation_pvalue(p, q, cfg);
    cfg.threads = 4;
    const auto c = permutation_pvalue(p, q, cfg);
    EXPECT_EQ(a.p_value, b.p_value);
    EXPECT_EQ(a.p_value, c.p_value);
    EXPECT_EQ(a.exceed_count, c.exceed_count);
}

TEST(ScalingMode, ParsesNames) {
    EXPECT_EQ(parse_scaling_mode("row"), ScalingMode::row_fitted);
    EXPECT_EQ(parse_scaling_mode("row_fitted"), ScalingMode::row_fitted);
    EXPECT_EQ(parse_scaling_mode("none"), ScalingMode::none);
    EXPECT_THROW(parse_scaling_mode("global"), ConfigError);
    EXPECT_EQ(parse_scaling_mode(to_string(ScalingMode::none)), ScalingMode::none);
}

TEST(ComparisonMatrix, FourSuitesGiveTwelveCells) {
    PermutationConfig cfg;
    cfg.permutations = 49;
    const auto ds = four_suites(19);
    const auto m = suite_comparison_matrix(ds, cfg);
    EXPECT_EQ(m.cells.size(), 12u);
    for (const auto& a : m.suite_ids) {
        for (const auto& b : m.suite_ids) {
            if (a == b) {
                EXPECT_THROW(m.at(a, b), LookupError);
                continue;
            }
            const auto& cell = m.at(a, b);
            EXPECT_EQ(cell.seed, pair_seed(cfg.seed, a, b));
            EXPECT_GE(cell.p_value, 0.02);
            EXPECT_LE(cell.p_value, 1.0);
        }
    }
}

TEST(ComparisonMatrix, RowFittedCellUsesRowSuiteScaler) {
    PermutationConfig cfg;
    cfg.permutations = 29;
    const auto ds = four_suites(20);
    const auto m = suite_comparison_matrix(ds, cfg);
    const auto params = fit_scaler(ds.suites[0]);
    const auto p = apply_scaler(params, ds.suites[0]).feature_matrix();
    const auto q = apply_scaler(params, ds.suites[2]).feature_matrix();
    PermutationConfig cell_cfg = cfg;
    cell_cfg.seed = pair_seed(cfg.seed, "W", "Y");
    const auto expected = permutation_pvalue(p, q, cell_cfg);
    EXPECT_EQ(m.at("W", "Y").statistic, expected.statistic);
    EXPECT_EQ(m.at("W", "Y").p_value, expected.p_value);
}

TEST(ComparisonMatrix, UnscaledModeUsesRawFeatures) {
    PermutationConfig cfg;
    cfg.permutations = 9;
    const auto ds = four_suites(21);
    const auto m = suite_comparison_matrix(ds, cfg, ScalingMode::none);
    EXPECT_EQ(m.scaling_mode, ScalingMode::none);
    EXPECT_NEAR(m.at("X", "Z").statistic,
                energy_statistic(ds.suites[1].feature_matrix(), ds.suites[3].feature_matrix()), 1e-12);
    // Without scaling the statistic is symmetric in the pair.
    EXPECT_NEAR(m.at("X", "Z").statistic, m.at("Z", "X").statistic, 1e-12);
}

TEST(ComparisonMatrix, ReproducibleAndThreadIndependent) {
    PermutationConfig cfg;
    cfg.permutations = 39;
    const auto ds = four_suites(22);
    const auto a = suite_comparison_matrix(ds, cfg);
    cfg.threads = 3;
    const auto b = suite_comparison_matrix(ds, cfg);
    for (const auto& [key, cell] : a.cells) {
        EXPECT_EQ(cell.p_value, b.cells.at(key).p_value);
        EXPECT_EQ(cell.statistic, b.cells.at(key).statistic);
    }
}

TEST(PairSeed, DependsOnOrder) {
    EXPECT_NE(pair_seed(42, "A", "B"), pair_seed(42, "B", "A"));
    EXPECT_EQ(pair_seed(42, "A", "B"), derive_seed(derive_seed(42, "A"), "B"));
}
