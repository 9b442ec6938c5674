#include "suitegauge/instance_selector.hpp"

#include "suitegauge/errors.hpp"
#include "suitegauge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace suitegauge {

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw ShapeError("cosine similarity of vectors with different lengths");
    double dot = 0.0;
    double uu = 0.0;
    double vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) throw DomainError("cosine similarity of a zero vector");
    return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

std::size_t SimilarityGraph::edge_count() const noexcept {
    std::size_t degrees = 0;
    for (const auto& nb : adjacency) degrees += nb.size();
    return degrees / 2;
}

std::size_t SimilarityGraph::max_degree() const noexcept {
    std::size_t best = 0;
    for (const auto& nb : adjacency) best = std::max(best, nb.size());
    return best;
}

bool SimilarityGraph::has_edge(std::size_t u, std::size_t v) const {
    const auto& nb = adjacency.at(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

SimilarityGraph SimilarityGraph::from_edges(
    std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    SimilarityGraph g;
    g.adjacency.resize(nodes);
    g.node_ids.reserve(nodes);
    for (std::size_t i = 0; i < nodes; ++i) g.node_ids.push_back({std::to_string(i), ""});
    for (auto [u, v] : edges) {
        if (u >= nodes || v >= nodes) throw ShapeError("edge endpoint out of range");
        if (u == v) continue;
        g.adjacency[u].push_back(v);
        g.adjacency[v].push_back(u);
    }
    for (auto& nb : g.adjacency) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    return g;
}

SimilarityGraph build_similarity_graph(std::span<const InstanceRecord> instances, double threshold) {
    if (instances.empty()) throw InsufficientDataError("similarity graph needs at least one instance");
    if (!(threshold >= -1.0 && threshold <= 1.0)) {
        throw ConfigError("similarity threshold must lie in [-1, 1]");
    }
    const std::size_t k = instances.size();
    for (const auto& inst : instances) {
        const bool zero = std::all_of(inst.features.begin(), inst.features.end(),
                                      [](double v) { return v == 0.0; });
        if (zero) {
            throw DomainError("instance '" + inst.instance_id + "' of suite '" + inst.suite_id +
                              "' has an all-zero feature vector");
        }
    }

    SimilarityGraph g;
    g.threshold = threshold;
    g.adjacency.resize(k);
    g.node_ids.reserve(k);
    for (const auto& inst : instances) g.node_ids.push_back({inst.instance_id, inst.suite_id});
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            if (cosine_similarity(instances[a].features, instances[b].features) >= threshold) {
                g.adjacency[a].push_back(b);
                g.adjacency[b].push_back(a);
            }
        }
    }
    // Neighbours of a are appended in increasing order of b for b > a, and for
    // b < a during earlier outer iterations, so each list is already sorted.
    return g;
}

SelectionResult maximal_independent_set(const SimilarityGraph& graph, std::uint64_t seed) {
    const std::size_t k = graph.node_count();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<char> selected(k, 0);
    for (std::size_t node : order) {
        const auto& nb = graph.adjacency[node];
        const bool blocked = std::any_of(nb.begin(), nb.end(), [&](std::size_t v) { return selected[v]; });
        if (!blocked) selected[node] = 1;
    }

    SelectionResult result;
    result.seed = seed;
    for (std::size_t i = 0; i < k; ++i) {
        if (!selected[i]) continue;
        result.selected.push_back(i);
        if (i < graph.node_ids.size()) result.selected_keys.push_back(graph.node_ids[i]);
    }
    return result;
}

bool is_independent_set(const SimilarityGraph& graph, std::span<const std::size_t> nodes) {
    std::vector<char> in_set(graph.node_count(), 0);
    for (std::size_t v : nodes) {
        if (v >= graph.node_count() || in_set[v]) return false;
        in_set[v] = 1;
    }
    for (std::size_t v : nodes) {
        for (std::size_t u : graph.adjacency[v]) {
            if (in_set[u]) return false;
        }
    }
    return true;
}

bool is_maximal_independent_set(const SimilarityGraph& graph, std::span<const std::size_t> nodes) {
    if (!is_independent_set(graph, nodes)) return false;
    std::vector<char> in_set(graph.node_count(), 0);
    for (std::size_t v : nodes) in_set[v] = 1;
    for (std::size_t v = 0; v < graph.node_count(); ++v) {
        if (in_set[v]) continue;
        const auto& nb = graph.adjacency[v];
        if (std::none_of(nb.begin(), nb.end(), [&](std::size_t u) { return in_set[u]; })) return false;
    }
    return true;
}

SampledSuites sample_suites(const SimilarityGraph& graph, std::size_t count,
                            std::uint64_t master_seed) {
    if (count < 1) throw ConfigError("suite count must be at least 1");
    SampledSuites out;
    for (std::size_t i = 0; i < count; ++i) {
        auto selection = maximal_independent_set(graph, derive_seed(master_seed, i));
        selection.suite_label = "BS" + std::to_string(i + 1);
        out.suites.push_back(std::move(selection));
    }
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = a + 1; b < count; ++b) {
            const auto& sa = out.suites[a].selected;
            const auto& sb = out.suites[b].selected;
            std::vector<std::size_t> common;
            std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                                  std::back_inserter(common));
            out.overlaps.push_back({out.suites[a].suite_label, out.suites[b].suite_label, common.size()});
        }
    }
    return out;
}

SampledSuites sample_suites(std::span<const InstanceRecord> instances, double threshold,
                            std::size_t count, std::uint64_t master_seed) {
    if (count < 1) throw ConfigError("suite count must be at least 1");
    return sample_suites(build_similarity_graph(instances, threshold), count, master_seed);
}

}  // namespace suitegauge
