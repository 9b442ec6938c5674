#include "suitegauge/predictor.hpp"

#include "suitegauge/errors.hpp"
#include "suitegauge/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

namespace suitegauge {
namespace {

constexpr double kPureVariance = 1e-12;
constexpr double kTieTolerance = 1e-12;

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double proxy = -std::numeric_limits<double>::infinity();
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::span<const double> y, const ForestConfig& config, Rng& rng)
        : x_(x), y_(y), config_(config), rng_(rng) {
        const auto n = static_cast<double>(x.cols());
        features_per_split_ = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::ceil(config.max_features * n - 1e-9)), 1, x.cols());
        feature_pool_.resize(x.cols());
    }

    RegressionTree build(std::vector<std::size_t> samples) {
        samples_ = std::move(samples);
        grow(0, samples_.size(), 0);
        return std::move(tree_);
    }

private:
    int add_node(std::size_t count, double value) {
        tree_.feature.push_back(-1);
        tree_.threshold.push_back(0.0);
        tree_.left.push_back(-1);
        tree_.right.push_back(-1);
        tree_.value.push_back(value);
        tree_.samples.push_back(count);
        return static_cast<int>(tree_.feature.size() - 1);
    }

    int grow(std::size_t begin, std::size_t end, std::size_t depth) {
        const std::size_t count = end - begin;
        double sum = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = begin; i < end; ++i) {
            const double v = y_[samples_[i]];
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double mean = std::clamp(sum / static_cast<double>(count), lo, hi);
        double squares = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const double d = y_[samples_[i]] - mean;
            squares += d * d;
        }
        const int node = add_node(count, mean);

        const bool depth_reached = config_.max_depth && depth >= *config_.max_depth;
        if (count < config_.min_samples_split || count < 2 * config_.min_samples_leaf ||
            depth_reached || squares / static_cast<double>(count) < kPureVariance) {
            return node;
        }

        const SplitCandidate split = best_split(begin, end, mean);
        if (split.feature < 0) return node;

        const auto f = static_cast<std::size_t>(split.feature);
        const auto middle = std::stable_partition(
            samples_.begin() + static_cast<std::ptrdiff_t>(begin),
            samples_.begin() + static_cast<std::ptrdiff_t>(end),
            [&](std::size_t s) { return x_(s, f) <= split.threshold; });
        const auto mid = static_cast<std::size_t>(middle - samples_.begin());

        tree_.feature[node] = split.feature;
        tree_.threshold[node] = split.threshold;
        const int left = grow(begin, mid, depth + 1);
        tree_.left[node] = left;
        const int right = grow(mid, end, depth + 1);
        tree_.right[node] = right;
        return node;
    }

    std::vector<std::size_t> candidate_features() {
        std::iota(feature_pool_.begin(), feature_pool_.end(), std::size_t{0});
        if (features_per_split_ == feature_pool_.size()) return feature_pool_;
        for (std::size_t i = 0; i < features_per_split_; ++i) {
            const auto j = i + static_cast<std::size_t>(rng_.uniform_index(feature_pool_.size() - i));
            std::swap(feature_pool_[i], feature_pool_[j]);
        }
        std::vector<std::size_t> chosen(feature_pool_.begin(),
                                        feature_pool_.begin() + static_cast<std::ptrdiff_t>(features_per_split_));
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

    // Maximizes SL^2/nL + SR^2/nR over centred targets, which minimizes the
    // summed squared error of the two children.
    SplitCandidate best_split(std::size_t begin, std::size_t end, double mean) {
        const std::size_t count = end - begin;
        const std::size_t min_leaf = config_.min_samples_leaf;
        SplitCandidate best;
        std::vector<std::pair<double, double>> column(count);

        for (std::size_t f : candidate_features()) {
            for (std::size_t i = 0; i < count; ++i) {
                const std::size_t s = samples_[begin + i];
                column[i] = {x_(s, f), y_[s] - mean};
            }
            std::sort(column.begin(), column.end());
            if (column.front().first == column.back().first) continue;

            double total = 0.0;
            for (const auto& c : column) total += c.second;
            double left_sum = 0.0;
            for (std::size_t i = 1; i < count; ++i) {
                left_sum += column[i - 1].second;
                if (column[i - 1].first == column[i].first) continue;
                if (i < min_leaf || count - i < min_leaf) continue;
                const double right_sum = total - left_sum;
                const double proxy = left_sum * left_sum / static_cast<double>(i) +
                                     right_sum * right_sum / static_cast<double>(count - i);
                if (best.feature < 0 || proxy > best.proxy + kTieTolerance * best.proxy) {
                    double threshold = 0.5 * (column[i - 1].first + column[i].first);
                    if (threshold >= column[i].first) threshold = column[i - 1].first;
                    best = {static_cast<int>(f), threshold, proxy};
                }
            }
        }
        return best;
    }

    const Matrix& x_;
    std::span<const double> y_;
    const ForestConfig& config_;
    Rng& rng_;
    std::size_t features_per_split_ = 1;
    std::vector<std::size_t> feature_pool_;
    std::vector<std::size_t> samples_;
    RegressionTree tree_;
};

RegressionTree fit_tree(const Matrix& x, std::span<const double> y, const ForestConfig& config,
                        std::size_t tree_index) {
    Rng rng(derive_seed(config.seed, tree_index));
    const std::size_t k = x.rows();
    std::vector<std::size_t> samples(k);
    if (config.bootstrap) {
        for (auto& s : samples) s = static_cast<std::size_t>(rng.uniform_index(k));
        std::sort(samples.begin(), samples.end());
    } else {
        std::iota(samples.begin(), samples.end(), std::size_t{0});
    }
    return TreeBuilder(x, y, config, rng).build(std::move(samples));
}

}  // namespace

void ForestConfig::validate() const {
    if (n_trees < 1) throw ConfigError("forest needs at least one tree");
    if (!(max_features > 0.0 && max_features <= 1.0)) {
        throw ConfigError("max_features must lie in (0, 1]");
    }
    if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be at least 1");
    if (min_samples_split < 2) throw ConfigError("min_samples_split must be at least 2");
    if (max_depth && *max_depth < 1) throw ConfigError("max_depth must be positive");
}

std::size_t RegressionTree::depth() const {
    if (feature.empty()) return 0;
    std::size_t deepest = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [node, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        if (feature[node] >= 0) {
            stack.push_back({left[node], d + 1});
            stack.push_back({right[node], d + 1});
        }
    }
    return deepest;
}

double RegressionTree::predict(std::span<const double> x) const {
    int node = 0;
    while (feature[node] >= 0) {
        node = x[static_cast<std::size_t>(feature[node])] <= threshold[node] ? left[node] : right[node];
    }
    return value[node];
}

ForestModel fit_forest(const Matrix& x, std::span<const double> y, const ForestConfig& config) {
    config.validate();
    if (x.rows() != y.size()) {
        throw ShapeError("feature matrix has " + std::to_string(x.rows()) + " rows but " +
                         std::to_string(y.size()) + " targets were given");
    }
    if (x.rows() < 2) throw InsufficientDataError("forest needs at least 2 training rows");
    if (x.cols() < 1) throw ShapeError("forest needs at least one feature");
    for (double v : x.data()) {
        if (!std::isfinite(v)) throw DomainError("non-finite feature value in training data");
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw DomainError("non-finite target in training data");
    }

    ForestModel model;
    model.config = config;
    model.n_features = x.cols();
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    model.train_target_range = {*lo, *hi};
    model.trees.resize(config.n_trees);

    auto fit_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) model.trees[t] = fit_tree(x, y, config, t);
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(config.threads, config.n_trees));
    if (workers == 1) {
        fit_range(0, config.n_trees);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (config.n_trees + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(config.n_trees, begin + chunk);
            if (begin < end) pool.emplace_back(fit_range, begin, end);
        }
    }
    return model;
}

std::vector<double> predict(const ForestModel& model, const Matrix& x) {
    if (x.cols() != model.n_features) {
        throw SchemaError("model expects " + std::to_string(model.n_features) +
                          " features, got " + std::to_string(x.cols()));
    }
    if (model.trees.empty()) throw SchemaError("model has no trees");
    std::vector<double> out(x.rows());
    const auto [lo, hi] = model.train_target_range;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto row = x.row(r);
        double sum = 0.0;
        for (const auto& tree : model.trees) sum += tree.predict(row);
        // The average of leaf means cannot leave the training range; the clamp
        // only removes rounding drift.
        out[r] = std::clamp(sum / static_cast<double>(model.trees.size()), lo, hi);
    }
    return out;
}

namespace {

using nlohmann::json;

json tree_to_json(const RegressionTree& t) {
    return json{{"feature", t.feature}, {"threshold", t.threshold}, {"left", t.left},
                {"right", t.right},     {"value", t.value},         {"samples", t.samples}};
}

RegressionTree tree_from_json(const json& j) {
    RegressionTree t;
    j.at("feature").get_to(t.feature);
    j.at("threshold").get_to(t.threshold);
    j.at("left").get_to(t.left);
    j.at("right").get_to(t.right);
    j.at("value").get_to(t.value);
    j.at("samples").get_to(t.samples);
    const std::size_t n = t.feature.size();
    if (n == 0 || t.threshold.size() != n || t.left.size() != n || t.right.size() != n ||
        t.value.size() != n || t.samples.size() != n) {
        throw SchemaError("tree arrays have inconsistent lengths");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (t.feature[i] < 0) continue;
        const auto valid = [n](int child) { return child > 0 && static_cast<std::size_t>(child) < n; };
        if (!valid(t.left[i]) || !valid(t.right[i])) throw SchemaError("tree child index out of range");
    }
    return t;
}

}  // namespace

std::string forest_to_json(const ForestModel& model) {
    json trees = json::array();
    for (const auto& t : model.trees) trees.push_back(tree_to_json(t));
    const auto& c = model.config;
    json doc{
        {"format", "suitegauge-forest"},
        {"format_version", kForestFormatVersion},
        {"n_features", model.n_features},
        {"train_target_range", {model.train_target_range.first, model.train_target_range.second}},
        {"config",
         {{"n_trees", c.n_trees},
          {"max_features", c.max_features},
          {"min_samples_leaf", c.min_samples_leaf},
          {"min_samples_split", c.min_samples_split},
          {"max_depth", c.max_depth ? json(*c.max_depth) : json(nullptr)},
          {"bootstrap", c.bootstrap},
          {"seed", c.seed}}},
        {"trees", std::move(trees)},
    };
    return doc.dump();
}

ForestModel forest_from_json(const std::string& text) {
    try {
        const json doc = json::parse(text);
        if (doc.at("format") != "suitegauge-forest") throw SchemaError("not a forest document");
        if (doc.at("format_version").get<int>() != kForestFormatVersion) {
            throw SchemaError("unsupported forest format version " + doc.at("format_version").dump());
        }
        ForestModel model;
        model.n_features = doc.at("n_features").get<std::size_t>();
        const auto& range = doc.at("train_target_range");
        model.train_target_range = {range.at(0).get<double>(), range.at(1).get<double>()};
        const auto& c = doc.at("config");
        model.config.n_trees = c.at("n_trees").get<std::size_t>();
        model.config.max_features = c.at("max_features").get<double>();
        model.config.min_samples_leaf = c.at("min_samples_leaf").get<std::size_t>();
        model.config.min_samples_split = c.at("min_samples_split").get<std::size_t>();
        if (!c.at("max_depth").is_null()) model.config.max_depth = c.at("max_depth").get<std::size_t>();
        model.config.bootstrap = c.at("bootstrap").get<bool>();
        model.config.seed = c.at("seed").get<std::uint64_t>();
        for (const auto& t : doc.at("trees")) model.trees.push_back(tree_from_json(t));
        if (model.trees.size() != model.config.n_trees) {
            throw SchemaError("tree count does not match the stored configuration");
        }
        return model;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed forest document: ") + e.what());
    }
}

void save_forest(const ForestModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << forest_to_json(model) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

ForestModel load_forest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return forest_from_json(buffer.str());
}

}  // namespace suitegauge
