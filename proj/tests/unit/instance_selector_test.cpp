#include "suitegauge/errors.hpp"
#include "suitegauge/instance_selector.hpp"
#include "suitegauge/rng.hpp"

#include "oracles.hpp"
#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace suitegauge;

namespace {

InstanceRecord record(const std::string& id, std::vector<double> features) {
    return {id, "S", 10, std::move(features), {}};
}

using Edges = std::vector<std::pair<std::size_t, std::size_t>>;

std::set<std::vector<std::size_t>> outcomes(const SimilarityGraph& g, std::uint64_t seeds) {
    std::set<std::vector<std::size_t>> seen;
    for (std::uint64_t s = 0; s < seeds; ++s) seen.insert(maximal_independent_set(g, s).selected);
    return seen;
}

}  // namespace

TEST(CosineSimilarity, HandComputedExamples) {
    const std::vector<double> a{1, 0}, b{0, 1}, c{2, 0}, d{-1, 0}, e{1, 1};
    EXPECT_DOUBLE_EQ(cosine_similarity(a, b), 0.0);
    EXPECT_DOUBLE_EQ(cosine_similarity(a, c), 1.0);
    EXPECT_DOUBLE_EQ(cosine_similarity(a, d), -1.0);
    EXPECT_NEAR(cosine_similarity(a, e), std::sqrt(0.5), 1e-15);
}

TEST(CosineSimilarity, Errors) {
    const std::vector<double> zero{0, 0}, a{1, 0}, longer{1, 0, 0};
    EXPECT_THROW(cosine_similarity(zero, a), DomainError);
    EXPECT_THROW(cosine_similarity(a, longer), ShapeError);
}

TEST(SimilarityGraph, EdgesFollowThreshold) {
    const std::vector<InstanceRecord> inst{record("x", {1, 0}), record("y", {0, 1}), record("z", {3, 0})};
    const auto g = build_similarity_graph(inst, 0.9);
    EXPECT_TRUE(g.has_edge(0, 2));
    EXPECT_TRUE(g.has_edge(2, 0));
    EXPECT_FALSE(g.has_edge(0, 1));
    EXPECT_EQ(g.edge_count(), 1u);
    EXPECT_EQ(g.node_ids[2].instance_id, "z");
}

TEST(SimilarityGraph, ThresholdIsInclusive) {
    // (3,4) vs (4,3): cos = 24/25.
    const std::vector<InstanceRecord> inst{record("a", {3, 4}), record("b", {4, 3})};
    EXPECT_EQ(build_similarity_graph(inst, 0.96).edge_count(), 1u);
    EXPECT_EQ(build_similarity_graph(inst, 0.9600001).edge_count(), 0u);
}

TEST(SimilarityGraph, PositiveRescalingKeepsEdges) {
    Rng rng(41);
    std::vector<InstanceRecord> inst, scaled;
    for (int i = 0; i < 30; ++i) {
        std::vector<double> f{rng.uniform(0.5, 1), rng.uniform(0, 0.5), rng.uniform(0, 0.3)};
        inst.push_back(record("i" + std::to_string(i), f));
        const double s = rng.uniform(0.1, 100);
        for (double& v : f) v *= s;
        scaled.push_back(record("i" + std::to_string(i), f));
    }
    EXPECT_EQ(build_similarity_graph(inst).adjacency, build_similarity_graph(scaled).adjacency);
}

TEST(MaximalIndependentSet, EdgelessGraphSelectsEverything) {
    const auto g = SimilarityGraph::from_edges(5, {});
    EXPECT_EQ(maximal_independent_set(g, 1).selected, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(MaximalIndependentSet, CompleteGraphSelectsOneNode) {
    const Edges k4{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    const auto g = SimilarityGraph::from_edges(4, k4);
    const auto seen = outcomes(g, 64);
    const auto all = oracle::all_maximal_independent_sets(4, k4);
    EXPECT_EQ(seen, std::set<std::vector<std::size_t>>(all.begin(), all.end()));
}

TEST(MaximalIndependentSet, PathReachesBothMaximalSets) {
    const Edges p3{{0, 1}, {1, 2}};
    const auto g = SimilarityGraph::from_edges(3, p3);
    const auto seen = outcomes(g, 64);
    const auto all = oracle::all_maximal_independent_sets(3, p3);
    EXPECT_EQ(all.size(), 2u);
    EXPECT_EQ(seen, std::set<std::vector<std::size_t>>(all.begin(), all.end()));
}

TEST(MaximalIndependentSet, RandomGraphsGiveValidMaximalSets) {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(12);
        const double density = rng.uniform01();
        Edges edges;
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = u + 1; v < n; ++v)
                if (rng.uniform01() < density) edges.emplace_back(u, v);
        const auto g = SimilarityGraph::from_edges(n, edges);
        const auto res = maximal_independent_set(g, static_cast<std::uint64_t>(trial));
        EXPECT_TRUE(is_independent_set(g, res.selected));
        EXPECT_TRUE(is_maximal_independent_set(g, res.selected));
        EXPECT_TRUE(std::is_sorted(res.selected.begin(), res.selected.end()));
        EXPECT_GE(static_cast<double>(res.selected.size()),
                  static_cast<double>(n) / static_cast<double>(g.max_degree() + 1));
        const auto all = oracle::all_maximal_independent_sets(n, edges);
        EXPECT_NE(std::find(all.begin(), all.end(), res.selected), all.end());
    }
}

TEST(MaximalIndependentSet, SameSeedSameSelection) {
    const auto g = SimilarityGraph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
    EXPECT_EQ(maximal_independent_set(g, 7).selected, maximal_independent_set(g, 7).selected);
}

TEST(IndependenceChecks, DetectViolations) {
    const auto g = SimilarityGraph::from_edges(3, {{0, 1}, {1, 2}});
    const std::vector<std::size_t> adjacent{0, 1}, not_maximal{0}, good{0, 2};
    EXPECT_FALSE(is_independent_set(g, adjacent));
    EXPECT_TRUE(is_independent_set(g, not_maximal));
    EXPECT_FALSE(is_maximal_independent_set(g, not_maximal));
    EXPECT_TRUE(is_maximal_independent_set(g, good));
}

TEST(SampleSuites, LabelsSeedsAndOverlaps) {
    Rng rng(43);
    std::vector<InstanceRecord> inst;
    for (int i = 0; i < 40; ++i) {
        inst.push_back(record("i" + std::to_string(i), {rng.uniform(0.2, 1), rng.uniform(0.2, 1), rng.uniform(0.2, 1)}));
    }
    const auto a = sample_suites(inst, 0.95, 3, 100);
    ASSERT_EQ(a.suites.size(), 3u);
    EXPECT_EQ(a.suites[0].suite_label, "BS1");
    EXPECT_EQ(a.suites[2].suite_label, "BS3");
    EXPECT_EQ(a.suites[1].seed, derive_seed(100, 1));
    EXPECT_EQ(a.overlaps.size(), 3u);
    for (const auto& o : a.overlaps) {
        const auto idx = [&](const std::string& label) { return std::stoul(label.substr(2)) - 1; };
        const auto& x = a.suites[idx(o.suite_a)].selected;
        const auto& y = a.suites[idx(o.suite_b)].selected;
        std::vector<std::size_t> common;
        std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
        EXPECT_EQ(o.overlap, common.size());
    }
    const auto b = sample_suites(inst, 0.95, 3, 100);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.suites[i].selected, b.suites[i].selected);
    for (const auto& s : a.suites) {
        for (std::size_t i = 0; i < s.selected.size(); ++i) {
            EXPECT_EQ(s.selected_keys[i].instance_id, inst[s.selected[i]].instance_id);
        }
    }
}

TEST(SampleSuites, SingleDrawHasNoOverlaps) {
    const auto g = SimilarityGraph::from_edges(4, {{0, 1}});
    const auto s = sample_suites(g, 1, 5);
    EXPECT_EQ(s.suites.size(), 1u);
    EXPECT_TRUE(s.overlaps.empty());
}

TEST(SampleSuites, ZeroVectorIsDomainError) {
    const std::vector<InstanceRecord> inst{record("a", {0, 0}), record("b", {1, 0})};
    EXPECT_THROW(sample_suites(inst, 0.9, 1, 1), DomainError);
}
