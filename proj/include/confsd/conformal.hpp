#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "confsd/estimator.hpp"
#include "confsd/graph.hpp"

namespace confsd {

/// Node sets are kept as ascending, duplicate-free id vectors.
using NodeSet = std::vector<NodeId>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ScoreKind {
    Precision, ///< s_pre(U) = -mean of pi over gamma(U)
    Recall,    ///< s_rec(U) = sum of pi over gamma(U) / sum of pi over V
    Min,       ///< s_min(U) = -min of pi over gamma(U)
};

inline constexpr std::array<ScoreKind, 3> kAllScoreKinds = {ScoreKind::Precision, ScoreKind::Recall,
                                                            ScoreKind::Min};

std::string_view to_string(ScoreKind kind) noexcept; // "pre", "rec", "min"
ScoreKind parse_score_kind(std::string_view text);

/// Target: recall >= 1 - beta with probability >= 1 - alpha.
/// alpha in (0,1), beta in [0,1). beta = 1 is rejected because the shrunken
/// set could then be empty, where no score is defined.
class NominalLevels {
public:
    NominalLevels(double alpha, double beta);

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }

private:
    double alpha_;
    double beta_;
};

/// Smallest number of true sources a set must contain to reach recall
/// 1 - beta, i.e. ceil((1 - beta) n). A 1e-9 slack absorbs the rounding of
/// (1 - beta) n, so 7 of 10 counts as recall 0.7 at beta = 0.3.
std::size_t required_count(std::size_t n_sources, double beta);

/// gamma(U) = {v : pi(v) >= min over U of pi}. Literal comparison: every node
/// tied with the minimum is included.
NodeSet gamma(const ProbVector& pi, std::span<const NodeId> u);

/// Scores of one probability vector under one score kind.
///
/// Nodes are ranked by (pi descending, id ascending). gamma(U) is always the
/// prefix of this order that ends with the last node tied with min_U pi, so
/// every score is a function of a prefix length. Prefix sums use Neumaier
/// summation in rank order, and the per-prefix values are passed through a
/// running maximum so the monotonicity s(U1) <= s(U2) whenever
/// gamma(U1) is a subset of gamma(U2) also holds bit-for-bit in floating point.
/// Calibration scores, test-time singleton scores and subset scores all come
/// from this table, so threshold comparisons see identical rounding.
class RankedScores {
public:
    RankedScores(ScoreKind kind, const ProbVector& pi);

    ScoreKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return order_.size(); }
    std::span<const NodeId> order() const noexcept { return order_; }
    std::size_t rank(NodeId v) const { return rank_[static_cast<std::size_t>(v)]; }

    /// s(X, {v}).
    double singleton_score(NodeId v) const { return by_rank_[rank(v)]; }
    /// s(X, U) = s(X, gamma(U)). U must be non-empty.
    double score(std::span<const NodeId> u) const;
    /// {v : s(X, {v}) <= q}: a prefix of the rank order, returned ascending.
    NodeSet at_most(double q) const;
    std::size_t count_at_most(double q) const;

private:
    ScoreKind kind_;
    std::vector<NodeId> order_;
    std::vector<std::uint32_t> rank_;
    std::vector<double> by_rank_; ///< score of gamma({order_[r]}), non-decreasing in r
};

/// s(X, U) for a single set.
double score(ScoreKind kind, const ProbVector& pi, std::span<const NodeId> u);

/// Reference evaluation without the prefix table: builds gamma(U) by literal
/// comparison and applies the formula to it directly (same summation order).
double direct_score(ScoreKind kind, const ProbVector& pi, std::span<const NodeId> u);

/// nu(Y): the ceil((1 - beta)|Y|) members of Y with the largest pi, ties
/// broken by smaller id.
NodeSet shrink(const ProbVector& pi, std::span<const NodeId> y, double beta);

/// Lower ceil((1 - alpha)(n + 1))-th order statistic of `values`; +inf when
/// that rank exceeds n.
double finite_sample_quantile(std::span<const double> values, double alpha);

struct CalibrationSample {
    ProbVector pi;
    NodeSet sources;
};

struct ConformalModel {
    ScoreKind score = ScoreKind::Recall;
    NominalLevels levels{0.1, 0.0};
    double q_hat = kInf; ///< +inf or exactly one of the calibration scores
    std::size_t n_cal = 0;
};

/// q_hat = finite_sample_quantile({s(X_i, nu(Y_i))}, alpha).
ConformalModel calibrate(std::span<const CalibrationSample> samples, ScoreKind kind, NominalLevels levels);

/// Same, from precomputed calibration scores.
ConformalModel calibrate_from_scores(std::span<const double> scores, ScoreKind kind, NominalLevels levels);

/// Calibration score of one sample: s(X, nu(X, Y)).
double calibration_score(const RankedScores& ranked, const ProbVector& pi, std::span<const NodeId> sources,
                         double beta);

struct PredictionSet {
    NodeSet nodes;
    double threshold_used = kInf;
};

/// {v : s(X, {v}) <= q_hat}; all nodes when q_hat is +inf.
PredictionSet predict(const ConformalModel& model, const ProbVector& pi);

// ---- conformal risk control ------------------------------------------------

/// Threshold of the family C_lambda(X) = {v : pi(v) >= 1 - lambda}. The
/// probability cut-off 1 - lambda is carried exactly as the pi value it came
/// from, so membership tests never see the rounding of 1 - (1 - pi).
struct CrcThreshold {
    double lambda = kInf;        ///< +inf: no finite lambda meets the risk bound
    double prob_cutoff = -kInf;  ///< C = {v : pi(v) >= prob_cutoff}
};

/// lambda_hat = inf{lambda : (1/(n+1)) sum_i 1[recall_i(lambda) < 1 - beta] + 1/(n+1) <= alpha},
/// found by scanning the candidate values 1 - pi_i(v), v in Y_i, upwards.
CrcThreshold crc_calibrate(std::span<const CalibrationSample> samples, NominalLevels levels);
NodeSet crc_predict(const CrcThreshold& threshold, const ProbVector& pi);

// ---- brute-force CQioC -----------------------------------------------------

inline constexpr std::size_t kMaxBruteForceNodes = 16;

/// {v : min over U containing v of s(X, U) <= q_hat}, by enumerating all
/// 2^N - 1 non-empty subsets with direct_score. Refuses N > 16.
NodeSet cqioc_bruteforce(const ProbVector& pi, double q_hat, ScoreKind kind);

/// min over U containing v of direct_score(U), for every v.
std::vector<double> cqioc_min_scores(const ProbVector& pi, ScoreKind kind);

// ---- evaluation ------------------------------------------------------------

struct SetEvaluation {
    double precision = 0.0; ///< 0 for an empty set
    double recall = 0.0;
    bool included = false;  ///< recall >= 1 - beta, via required_count
    std::size_t hits = 0;
};

SetEvaluation evaluate_set(std::span<const NodeId> c, std::span<const NodeId> y, double beta);

// ---- model files -----------------------------------------------------------

/// Text record, one "key=value" per line after a "# ..." provenance line:
///   score_kind=rec, alpha=..., beta=..., q_hat=<%.17g or inf>, n_cal=...
/// Extra keys (estimator settings, graph, seed) round-trip through `extra`.
void write_model(std::ostream& out, const ConformalModel& model,
                 const std::map<std::string, std::string>& extra = {}, const std::string& provenance = {});
ConformalModel read_model(std::istream& in, std::map<std::string, std::string>* extra = nullptr);

} // namespace confsd
