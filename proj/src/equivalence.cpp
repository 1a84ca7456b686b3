#include "confsd/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "confsd/conformal.hpp"
#include "confsd/rng.hpp"

namespace confsd {

namespace {

ProbVector random_probs(Rng& rng, std::size_t n) {
    std::vector<double> p(n);
    for (auto& x : p)
        x = rng.bernoulli(0.3) ? static_cast<double>(rng.between(1, 8)) / 8.0 : rng.uniform(kProbFloor, 1.0);
    return ProbVector(std::move(p));
}

NodeSet random_subset(Rng& rng, std::size_t n) {
    auto k = static_cast<std::int32_t>(rng.between(1, static_cast<std::int64_t>(n)));
    return rng.choose(static_cast<std::int32_t>(n), k);
}

double random_threshold(Rng& rng, const RankedScores& ranked, ScoreKind kind) {
    const double u = rng.uniform();
    if (u < 0.05) return kInf;
    if (u < 0.55) return ranked.singleton_score(ranked.order()[rng.below(ranked.size())]);
    return kind == ScoreKind::Recall ? rng.uniform() : -rng.uniform();
}

} // namespace

EquivalenceReport check_equivalences(std::size_t max_nodes, std::size_t trials, std::uint64_t seed) {
    if (max_nodes < 1 || max_nodes > kMaxBruteForceNodes)
        throw ValidationError("oracle checks need 1 <= n <= " + std::to_string(kMaxBruteForceNodes));
    EquivalenceReport report;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, t));
        const auto n = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_nodes)));
        ++report.instances;

        // CQioC and inclusion equivalence on one test vector.
        const ProbVector pi = random_probs(rng, n);
        const NodeSet y = random_subset(rng, n);
        for (ScoreKind kind : kAllScoreKinds) {
            RankedScores ranked(kind, pi);
            const double q = random_threshold(rng, ranked, kind);
            ConformalModel model;
            model.score = kind;
            model.q_hat = q;
            model.n_cal = 1;
            const auto prefix = predict(model, pi).nodes;

            ++report.cqioc_checks;
            if (cqioc_bruteforce(pi, q, kind) != prefix) ++report.cqioc_mismatches;

            ++report.inclusion_checks;
            const bool contained = std::includes(prefix.begin(), prefix.end(), y.begin(), y.end());
            if (contained != (score(kind, pi, y) <= q)) ++report.inclusion_mismatches;
        }

        // CRC vs s_min on a random calibration set.
        const auto n_cal = static_cast<std::size_t>(rng.between(1, 40));
        std::vector<CalibrationSample> cal;
        for (std::size_t i = 0; i < n_cal; ++i) cal.push_back({random_probs(rng, n), random_subset(rng, n)});
        const double alpha = rng.uniform(0.02, 0.6);
        const double beta = static_cast<double>(rng.between(0, 7)) / 10.0;
        const NominalLevels levels(alpha, beta);
        const auto min_model = calibrate(cal, ScoreKind::Min, levels);
        const auto crc = crc_calibrate(cal, levels);
        const ProbVector test = random_probs(rng, n);
        ++report.crc_checks;
        if (crc_predict(crc, test) != predict(min_model, test).nodes) ++report.crc_set_mismatches;
        const double implied = 1.0 + min_model.q_hat;
        const bool same_lambda = (std::isinf(crc.lambda) && std::isinf(implied)) ||
                                 std::abs(crc.lambda - implied) <= 1e-12;
        if (!same_lambda) ++report.crc_lambda_mismatches;
    }
    return report;
}

void print_report(std::ostream& out, const EquivalenceReport& r) {
    out << "instances            " << r.instances << '\n'
        << "cqioc == prefix      " << r.cqioc_checks - r.cqioc_mismatches << '/' << r.cqioc_checks << '\n'
        << "crc set == s_min set " << r.crc_checks - r.crc_set_mismatches << '/' << r.crc_checks << '\n'
        << "lambda == 1 + q_hat  " << r.crc_checks - r.crc_lambda_mismatches << '/' << r.crc_checks << '\n'
        << "inclusion <=> score  " << r.inclusion_checks - r.inclusion_mismatches << '/' << r.inclusion_checks
        << '\n'
        << (r.ok() ? "PASS" : "FAIL") << '\n';
}

} // namespace confsd
