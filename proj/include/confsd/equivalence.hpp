#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>

namespace confsd {

/// Mismatch counts from the randomized exact-equivalence suites:
///  - cqioc:   brute-force CQioC set vs prefix prediction set (all score kinds)
///  - crc:     CRC set vs s_min prediction set, and lambda_hat vs 1 + q_hat
///  - inclusion: Y subset of C  <=>  s(X, Y) <= q_hat
struct EquivalenceReport {
    std::size_t instances = 0;
    std::size_t cqioc_checks = 0;
    std::size_t cqioc_mismatches = 0;
    std::size_t crc_checks = 0;
    std::size_t crc_set_mismatches = 0;
    std::size_t crc_lambda_mismatches = 0;
    std::size_t inclusion_checks = 0;
    std::size_t inclusion_mismatches = 0;

    bool ok() const noexcept {
        return cqioc_mismatches == 0 && crc_set_mismatches == 0 && crc_lambda_mismatches == 0 &&
               inclusion_mismatches == 0;
    }
};

/// Runs `trials` random instances with 1..max_nodes nodes (max_nodes <= 16).
/// Probabilities are drawn partly from a coarse grid so ties are common, and
/// half of the thresholds are set exactly on a singleton score.
EquivalenceReport check_equivalences(std::size_t max_nodes, std::size_t trials, std::uint64_t seed);

void print_report(std::ostream& out, const EquivalenceReport& report);

} // namespace confsd
