#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace confsd {

// Seed splitting.
//
// Every random stream is addressed by a path of 64-bit counters below the
// master seed: derive_seed(derive_seed(master, trial), sample) and so on.
// Each step is one SplitMix64 finalisation of (parent ^ mix(stream)), so the
// seed of a stream depends only on its path, never on how many draws other
// streams consumed or on thread scheduling.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept;

/// Stream tags used with derive_seed so unrelated consumers never share a stream.
namespace stream {
inline constexpr std::uint64_t kGraph = 0x67726170ULL;
inline constexpr std::uint64_t kPool = 0x706f6f6cULL;
inline constexpr std::uint64_t kSplit = 0x73706c74ULL;
inline constexpr std::uint64_t kEstimator = 0x65737469ULL;
inline constexpr std::uint64_t kSimulation = 0x73696d75ULL;
} // namespace stream

/// Portable random source: mt19937_64 engine with hand-written distributions
/// (libstdc++/libc++ distributions differ, which would break dataset
/// reproducibility across platforms).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n), unbiased (rejection on the top range).
    std::uint64_t below(std::uint64_t n);

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t between(std::int64_t lo, std::int64_t hi);

    /// k distinct values from [0, n), sorted ascending.
    std::vector<std::int32_t> choose(std::int32_t n, std::int32_t k);

    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace confsd
