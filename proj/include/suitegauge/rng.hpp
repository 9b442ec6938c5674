#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace suitegauge {

// Seed plumbing. Every random stream in the library is derived from a master
// seed plus a stream key so that results do not depend on evaluation order or
// thread count. Derivation uses SplitMix64 and FNV-1a, both fully specified,
// so streams are identical across platforms and standard libraries.
std::uint64_t mix_seed(std::uint64_t value) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::string_view key) noexcept;
std::uint64_t fnv1a64(std::string_view text) noexcept;

// Thin wrapper over mt19937_64 with portable sampling helpers. The standard
// distributions are implementation-defined; these are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, bound) by rejection sampling; bound > 0.
    std::uint64_t uniform_index(std::uint64_t bound);

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01();

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via the Marsaglia polar method.
    double normal();

    template <typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_index(i));
            std::swap(values[i - 1], values[j]);
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        shuffle(std::span<T>(values));
    }

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace suitegauge
