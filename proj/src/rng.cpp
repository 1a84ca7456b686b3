#include "confsd/rng.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace confsd {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept {
    return splitmix64(parent ^ splitmix64(stream ^ 0x5851f42d4c957f2dULL));
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: empty range");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw std::invalid_argument("Rng::between: hi < lo");
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

std::vector<std::int32_t> Rng::choose(std::int32_t n, std::int32_t k) {
    if (k < 0 || k > n) throw std::invalid_argument("Rng::choose: k out of range");
    // Partial Fisher-Yates over the index range.
    std::vector<std::int32_t> pool(static_cast<std::size_t>(n));
    for (std::int32_t i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (std::int32_t i = 0; i < k; ++i) {
        auto j = i + static_cast<std::int32_t>(below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace confsd
