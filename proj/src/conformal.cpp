#include "confsd/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace confsd {

namespace {

constexpr double kCountSlack = 1e-9;

/// Neumaier summation; value() after k adds depends only on those k terms.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

bool ranks_before(const ProbVector& pi, NodeId a, NodeId b) {
    if (pi[a] != pi[b]) return pi[a] > pi[b];
    return a < b;
}

std::vector<NodeId> canonical_order(const ProbVector& pi) {
    std::vector<NodeId> order(pi.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return ranks_before(pi, a, b); });
    return order;
}

double total_mass(const ProbVector& pi, std::span<const NodeId> order) {
    CompensatedSum total;
    for (NodeId v : order) total.add(pi[v]);
    return total.value();
}

double formula(ScoreKind kind, double prefix_sum, std::size_t prefix_len, double last_prob, double total) {
    switch (kind) {
    case ScoreKind::Precision: return -(prefix_sum / static_cast<double>(prefix_len));
    case ScoreKind::Recall: return prefix_sum / total;
    case ScoreKind::Min: return -last_prob;
    }
    return 0.0;
}

void check_members(const ProbVector& pi, std::span<const NodeId> u, const char* what) {
    if (u.empty()) throw ValidationError(std::string(what) + ": node set must be non-empty");
    for (NodeId v : u)
        if (v < 0 || static_cast<std::size_t>(v) >= pi.size())
            throw ValidationError(std::string(what) + ": node " + std::to_string(v) + " out of range");
}

} // namespace

std::string_view to_string(ScoreKind kind) noexcept {
    switch (kind) {
    case ScoreKind::Precision: return "pre";
    case ScoreKind::Recall: return "rec";
    case ScoreKind::Min: return "min";
    }
    return "?";
}

ScoreKind parse_score_kind(std::string_view text) {
    if (text == "pre") return ScoreKind::Precision;
    if (text == "rec") return ScoreKind::Recall;
    if (text == "min") return ScoreKind::Min;
    throw ValidationError("unknown score kind '" + std::string(text) + "' (expected pre, rec or min)");
}

NominalLevels::NominalLevels(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must be in (0,1)");
    if (!(beta >= 0.0 && beta < 1.0)) throw ValidationError("beta must be in [0,1)");
}

std::size_t required_count(std::size_t n_sources, double beta) {
    if (!(beta >= 0.0 && beta < 1.0)) throw ValidationError("beta must be in [0,1)");
    double need = std::ceil((1.0 - beta) * static_cast<double>(n_sources) - kCountSlack);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(need, 1.0)), 1, std::max<std::size_t>(n_sources, 1));
}

NodeSet gamma(const ProbVector& pi, std::span<const NodeId> u) {
    check_members(pi, u, "gamma");
    double cut = pi[u[0]];
    for (NodeId z : u) cut = std::min(cut, pi[z]);
    NodeSet out;
    for (std::size_t v = 0; v < pi.size(); ++v)
        if (pi[static_cast<NodeId>(v)] >= cut) out.push_back(static_cast<NodeId>(v));
    return out;
}

RankedScores::RankedScores(ScoreKind kind, const ProbVector& pi)
    : kind_(kind), order_(canonical_order(pi)), rank_(pi.size()), by_rank_(pi.size()) {
    const std::size_t n = order_.size();
    for (std::size_t r = 0; r < n; ++r) rank_[static_cast<std::size_t>(order_[r])] = static_cast<std::uint32_t>(r);
    const double total = kind == ScoreKind::Recall ? total_mass(pi, order_) : 0.0;

    CompensatedSum prefix;
    double envelope = -kInf;
    std::size_t group_start = 0;
    for (std::size_t r = 0; r < n; ++r) {
        const double p = pi[order_[r]];
        prefix.add(p);
        const bool group_end = r + 1 == n || pi[order_[r + 1]] != p;
        if (!group_end) continue;
        envelope = std::max(envelope, formula(kind, prefix.value(), r + 1, p, total));
        std::fill(by_rank_.begin() + static_cast<std::ptrdiff_t>(group_start),
                  by_rank_.begin() + static_cast<std::ptrdiff_t>(r + 1), envelope);
        group_start = r + 1;
    }
}

double RankedScores::score(std::span<const NodeId> u) const {
    if (u.empty()) throw ValidationError("score: node set must be non-empty");
    std::size_t last = 0;
    for (NodeId v : u) {
        if (v < 0 || static_cast<std::size_t>(v) >= rank_.size())
            throw ValidationError("score: node " + std::to_string(v) + " out of range");
        last = std::max<std::size_t>(last, rank_[static_cast<std::size_t>(v)]);
    }
    return by_rank_[last];
}

std::size_t RankedScores::count_at_most(double q) const {
    return static_cast<std::size_t>(std::upper_bound(by_rank_.begin(), by_rank_.end(), q) - by_rank_.begin());
}

NodeSet RankedScores::at_most(double q) const {
    NodeSet out(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(count_at_most(q)));
    std::sort(out.begin(), out.end());
    return out;
}

double score(ScoreKind kind, const ProbVector& pi, std::span<const NodeId> u) {
    check_members(pi, u, "score");
    return RankedScores(kind, pi).score(u);
}

double direct_score(ScoreKind kind, const ProbVector& pi, std::span<const NodeId> u) {
    NodeSet g = gamma(pi, u);
    std::sort(g.begin(), g.end(), [&](NodeId a, NodeId b) { return ranks_before(pi, a, b); });
    CompensatedSum sum;
    for (NodeId v : g) sum.add(pi[v]);
    double total = 0.0;
    if (kind == ScoreKind::Recall) {
        auto order = canonical_order(pi);
        total = total_mass(pi, order);
    }
    return formula(kind, sum.value(), g.size(), pi[g.back()], total);
}

NodeSet shrink(const ProbVector& pi, std::span<const NodeId> y, double beta) {
    check_members(pi, y, "shrink");
    const std::size_t keep = required_count(y.size(), beta);
    NodeSet ranked(y.begin(), y.end());
    std::sort(ranked.begin(), ranked.end(), [&](NodeId a, NodeId b) { return ranks_before(pi, a, b); });
    ranked.resize(keep);
    std::sort(ranked.begin(), ranked.end());
    return ranked;
}

double finite_sample_quantile(std::span<const double> values, double alpha) {
    if (values.empty()) throw ValidationError("quantile of an empty set");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must be in (0,1)");
    const std::size_t n = values.size();
    double rank = std::ceil((1.0 - alpha) * static_cast<double>(n + 1) - kCountSlack);
    const std::size_t k = static_cast<std::size_t>(std::max(rank, 1.0));
    if (k > n) return kInf;
    std::vector<double> sorted(values.begin(), values.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
    return sorted[k - 1];
}

double calibration_score(const RankedScores& ranked, const ProbVector& pi, std::span<const NodeId> sources,
                         double beta) {
    return ranked.score(shrink(pi, sources, beta));
}

ConformalModel calibrate_from_scores(std::span<const double> scores, ScoreKind kind, NominalLevels levels) {
    if (scores.empty()) throw ValidationError("calibration set is empty");
    ConformalModel model;
    model.score = kind;
    model.levels = levels;
    model.q_hat = finite_sample_quantile(scores, levels.alpha());
    model.n_cal = scores.size();
    return model;
}

ConformalModel calibrate(std::span<const CalibrationSample> samples, ScoreKind kind, NominalLevels levels) {
    if (samples.empty()) throw ValidationError("calibration set is empty");
    std::vector<double> scores;
    scores.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.sources.empty()) throw ValidationError("calibration sample with empty source set");
        RankedScores ranked(kind, s.pi);
        scores.push_back(calibration_score(ranked, s.pi, s.sources, levels.beta()));
    }
    return calibrate_from_scores(scores, kind, levels);
}

PredictionSet predict(const ConformalModel& model, const ProbVector& pi) {
    PredictionSet out;
    out.threshold_used = model.q_hat;
    if (model.q_hat == kInf) {
        out.nodes.resize(pi.size());
        std::iota(out.nodes.begin(), out.nodes.end(), 0);
        return out;
    }
    out.nodes = RankedScores(model.score, pi).at_most(model.q_hat);
    return out;
}

// ---- conformal risk control ------------------------------------------------

CrcThreshold crc_calibrate(std::span<const CalibrationSample> samples, NominalLevels levels) {
    if (samples.empty()) throw ValidationError("calibration set is empty");
    const std::size_t n = samples.size();

    // Sample i meets the recall target exactly when the cut-off is at or below
    // the largest source probability tau_i that still admits enough sources.
    std::vector<double> tau(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = samples[i];
        if (s.sources.empty()) throw ValidationError("calibration sample with empty source set");
        std::vector<double> probs;
        for (NodeId v : s.sources) probs.push_back(s.pi[v]);
        std::sort(probs.begin(), probs.end(), std::greater<>());
        tau[i] = -kInf;
        for (double cut : probs) {
            std::size_t hits = 0;
            for (double p : probs) hits += p >= cut ? 1 : 0;
            if (hits >= required_count(probs.size(), levels.beta())) {
                tau[i] = cut;
                break;
            }
        }
    }

    // Candidates lambda = 1 - tau in increasing order, i.e. tau decreasing.
    std::sort(tau.begin(), tau.end(), std::greater<>());
    const double budget = levels.alpha() * static_cast<double>(n + 1) + kCountSlack;
    std::size_t meeting = 0;
    for (std::size_t i = 0; i < n;) {
        const double cut = tau[i];
        while (i < n && tau[i] == cut) ++meeting, ++i;
        const std::size_t failures = n - meeting;
        if (static_cast<double>(failures + 1) <= budget) return CrcThreshold{1.0 - cut, cut};
    }
    return CrcThreshold{};
}

NodeSet crc_predict(const CrcThreshold& threshold, const ProbVector& pi) {
    NodeSet out;
    for (std::size_t v = 0; v < pi.size(); ++v)
        if (pi[static_cast<NodeId>(v)] >= threshold.prob_cutoff) out.push_back(static_cast<NodeId>(v));
    return out;
}

// ---- brute-force CQioC -----------------------------------------------------

std::vector<double> cqioc_min_scores(const ProbVector& pi, ScoreKind kind) {
    const std::size_t n = pi.size();
    if (n == 0) throw ValidationError("cqioc: empty probability vector");
    if (n > kMaxBruteForceNodes)
        throw ValidationError("cqioc brute force refuses N = " + std::to_string(n) + " > " +
                              std::to_string(kMaxBruteForceNodes));
    std::vector<double> best(n, kInf);
    NodeSet subset;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        subset.clear();
        for (std::size_t v = 0; v < n; ++v)
            if (mask & (1u << v)) subset.push_back(static_cast<NodeId>(v));
        const double s = direct_score(kind, pi, subset);
        for (NodeId v : subset) best[static_cast<std::size_t>(v)] = std::min(best[static_cast<std::size_t>(v)], s);
    }
    return best;
}

NodeSet cqioc_bruteforce(const ProbVector& pi, double q_hat, ScoreKind kind) {
    auto best = cqioc_min_scores(pi, kind);
    NodeSet out;
    for (std::size_t v = 0; v < best.size(); ++v)
        if (best[v] <= q_hat) out.push_back(static_cast<NodeId>(v));
    return out;
}

// ---- evaluation ------------------------------------------------------------

SetEvaluation evaluate_set(std::span<const NodeId> c, std::span<const NodeId> y, double beta) {
    if (y.empty()) throw ValidationError("evaluate_set: source set must be non-empty");
    NodeSet cs(c.begin(), c.end()), ys(y.begin(), y.end());
    std::sort(cs.begin(), cs.end());
    std::sort(ys.begin(), ys.end());
    NodeSet common;
    std::set_intersection(cs.begin(), cs.end(), ys.begin(), ys.end(), std::back_inserter(common));
    SetEvaluation e;
    e.hits = common.size();
    e.precision = cs.empty() ? 0.0 : static_cast<double>(e.hits) / static_cast<double>(cs.size());
    e.recall = static_cast<double>(e.hits) / static_cast<double>(ys.size());
    e.included = e.hits >= required_count(ys.size(), beta);
    return e;
}

// ---- model files -----------------------------------------------------------

namespace {

std::string format_real(double x) {
    if (x == kInf) return "inf";
    if (x == -kInf) return "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_real(const std::string& text, const std::string& key) {
    if (text == "inf" || text == "+inf") return kInf;
    if (text == "-inf") return -kInf;
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("model field '" + key + "': not a number: '" + text + "'");
}

} // namespace

void write_model(std::ostream& out, const ConformalModel& model, const std::map<std::string, std::string>& extra,
                 const std::string& provenance) {
    out << "# " << (provenance.empty() ? std::string(kToolName) + " " + kToolVersion : provenance) << '\n';
    out << "score_kind=" << to_string(model.score) << '\n';
    out << "alpha=" << format_real(model.levels.alpha()) << '\n';
    out << "beta=" << format_real(model.levels.beta()) << '\n';
    out << "q_hat=" << format_real(model.q_hat) << '\n';
    out << "n_cal=" << model.n_cal << '\n';
    for (const auto& [k, v] : extra) out << k << '=' << v << '\n';
}

ConformalModel read_model(std::istream& in, std::map<std::string, std::string>* extra) {
    std::map<std::string, std::string> fields;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value", lineno);
        fields[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto take = [&](const std::string& key) {
        auto it = fields.find(key);
        if (it == fields.end()) throw ValidationError("model file is missing field '" + key + "'");
        auto value = it->second;
        fields.erase(it);
        return value;
    };
    ConformalModel model;
    model.score = parse_score_kind(take("score_kind"));
    double alpha = parse_real(take("alpha"), "alpha");
    double beta = parse_real(take("beta"), "beta");
    model.levels = NominalLevels(alpha, beta);
    model.q_hat = parse_real(take("q_hat"), "q_hat");
    if (std::isnan(model.q_hat) || model.q_hat == -kInf) throw ValidationError("model field 'q_hat' is invalid");
    auto n_cal = take("n_cal");
    try {
        std::size_t used = 0;
        model.n_cal = std::stoul(n_cal, &used);
        if (used != n_cal.size() || model.n_cal == 0) throw std::invalid_argument("n_cal");
    } catch (const std::exception&) {
        throw ValidationError("model field 'n_cal' must be a positive integer");
    }
    if (extra) *extra = std::move(fields);
    return model;
}

} // namespace confsd
