#pragma once

#include "suitegauge/core_data.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace suitegauge {

// dot(u, v) / (|u| |v|), clamped to [-1, 1]. Throws DomainError for a zero
// vector and ShapeError for a length mismatch.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

struct InstanceKey {
    std::string instance_id;
    std::string suite_id;

    friend bool operator==(const InstanceKey&, const InstanceKey&) = default;
    friend auto operator<=>(const InstanceKey&, const InstanceKey&) = default;
};

// Undirected graph without self-loops; adjacency lists are sorted ascending.
struct SimilarityGraph {
    std::vector<InstanceKey> node_ids;
    std::vector<std::vector<std::size_t>> adjacency;
    double threshold = 0.9;

    std::size_t node_count() const noexcept { return adjacency.size(); }
    std::size_t edge_count() const noexcept;
    std::size_t max_degree() const noexcept;
    bool has_edge(std::size_t u, std::size_t v) const;

    // Graph over anonymous nodes, mainly for tests.
    static SimilarityGraph from_edges(std::size_t nodes,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& edges);
};

// Edge (u, v) iff cosine_similarity(u, v) >= threshold.
SimilarityGraph build_similarity_graph(std::span<const InstanceRecord> instances,
                                       double threshold = 0.9);

struct SelectionResult {
    std::vector<std::size_t> selected;  // node indices, ascending
    std::vector<InstanceKey> selected_keys;
    std::uint64_t seed = 0;
    std::string suite_label;
};

// Randomized greedy maximal independent set: shuffle the node order with the
// seed, sweep once and take every node without a selected neighbour.
SelectionResult maximal_independent_set(const SimilarityGraph& graph, std::uint64_t seed);

bool is_independent_set(const SimilarityGraph& graph, std::span<const std::size_t> nodes);
bool is_maximal_independent_set(const SimilarityGraph& graph, std::span<const std::size_t> nodes);

struct OverlapEntry {
    std::string suite_a;
    std::string suite_b;
    std::size_t overlap = 0;
};

struct SampledSuites {
    std::vector<SelectionResult> suites;  // labelled BS1..BS<count>
    std::vector<OverlapEntry> overlaps;   // every unordered pair
};

// `count` independent MIS draws with seeds derived from master_seed.
SampledSuites sample_suites(std::span<const InstanceRecord> instances, double threshold,
                            std::size_t count, std::uint64_t master_seed);
SampledSuites sample_suites(const SimilarityGraph& graph, std::size_t count,
                            std::uint64_t master_seed);

}  // namespace suitegauge
