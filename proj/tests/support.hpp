#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "confsd/conformal.hpp"
#include "confsd/rng.hpp"

namespace testing {

namespace fs = std::filesystem;

// Scratch directory removed on scope exit.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("confsd_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    fs::path operator/(const std::string& name) const { return path_ / name; }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---- generators for property tests ------------------------------------------

// Probabilities with frequent ties: a share of entries comes from the grid k/8.
inline confsd::ProbVector random_probs(confsd::Rng& rng, std::size_t n, double grid_share = 0.3) {
    std::vector<double> p(n);
    for (auto& x : p) {
        if (rng.uniform() < grid_share) x = static_cast<double>(rng.between(0, 8)) / 8.0;
        else x = rng.uniform();
    }
    if (std::all_of(p.begin(), p.end(), [](double x) { return x == 0.0; })) p[rng.below(n)] = 0.5;
    return confsd::ProbVector(std::move(p));
}

// Non-empty random subset of [0, n), ascending.
inline confsd::NodeSet random_subset(confsd::Rng& rng, std::size_t n) {
    auto k = static_cast<std::int32_t>(rng.between(1, static_cast<std::int64_t>(n)));
    return rng.choose(static_cast<std::int32_t>(n), k);
}

// Binomial check: |freq - p| <= 3 sd of the frequency.
inline bool within_3se(std::size_t hits, std::size_t trials, double p) {
    const double freq = static_cast<double>(hits) / static_cast<double>(trials);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    return std::abs(freq - p) <= 3.0 * se;
}

} // namespace testing
