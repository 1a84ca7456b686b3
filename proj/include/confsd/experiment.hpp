#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "confsd/conformal.hpp"
#include "confsd/diffusion.hpp"
#include "confsd/estimator.hpp"

namespace confsd {

struct LevelPair {
    double alpha = 0.1;
    double beta = 0.0;
};

struct ExperimentConfig {
    std::string graph = "ba:200:3"; ///< generator spec or file:PATH
    std::uint64_t graph_seed = 1;
    DatasetSpec dataset;
    std::vector<LevelPair> levels;
    std::size_t n_cal = 500;
    std::size_t n_test = 200;
    std::size_t n_trials = 100;
    std::vector<EstimatorConfig> estimators;
    std::vector<ScoreKind> scores;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool record_timing = false; ///< off by default so reports are byte-reproducible
    bool keep_details = false;

    /// n_cal = 7600, n_test = 400, 50 trials; alpha {0.05,0.1,0.15} x beta {0.1,0.3,0.5,0.7};
    /// |Y| in [1,15], R0 in [1,15], sigma_rec in [0.1,0.4]; 774-node BA stand-in graph.
    static ExperimentConfig full_scale();
    /// n_cal = 500, n_test = 200, 100 trials on a 200-node BA graph with |Y| in [1,10].
    static ExperimentConfig desk_scale();

    void validate() const;

    /// JSON schema (all keys optional, unknown keys rejected):
    ///   graph, graph_seed, r0 ([lo,hi] or null), sigma_inf, sigma_rec ([lo,hi]),
    ///   sources ([lo,hi]), t1 ("adaptive" or integer), snapshots, stride, horizon,
    ///   levels ([[alpha,beta],...] or {"alpha":[...],"beta":[...]}),
    ///   n_cal, n_test, n_trials, estimators (["heuristic","mc:8","oracle:1"]),
    ///   scores (["pre","rec","min"]), seed, threads, record_timing, keep_details
    std::string to_json() const;
    static ExperimentConfig from_json(std::string_view text, const ExperimentConfig& base = desk_scale());
    static ExperimentConfig load(const std::filesystem::path& path);

    /// Hash of the canonical JSON, excluding `threads` (which never changes results).
    std::string hash() const;
};

struct TrialRecord {
    std::string estimator;
    ScoreKind score = ScoreKind::Recall;
    double alpha = 0.0;
    double beta = 0.0;
    std::size_t trial = 0;
    double inclusion_rate = 0.0;
    double mean_set_size = 0.0;
    double runtime_s = 0.0; ///< calibrate + predict wall time, when recorded
};

struct CellSummary {
    std::string estimator;
    ScoreKind score = ScoreKind::Recall;
    double alpha = 0.0;
    double beta = 0.0;
    std::size_t n_trials = 0;
    double inclusion_mean = 0.0;
    std::optional<double> inclusion_stderr; ///< empty when n_trials == 1
    double set_size_mean = 0.0;
    std::optional<double> set_size_stderr;
    double precision_mean = 0.0;
    double recall_mean = 0.0;
};

struct SampleDetail {
    std::string estimator;
    ScoreKind score = ScoreKind::Recall;
    double alpha = 0.0;
    double beta = 0.0;
    std::size_t trial = 0;
    std::uint64_t sample_id = 0;
    std::size_t n_sources = 0;
    std::size_t set_size = 0;
    std::size_t hits = 0;
    bool included = false;
};

struct TrialReport {
    std::string label; ///< sweep point, empty for a plain run
    std::string config_hash;
    std::uint64_t seed = 0;
    bool timed = false;
    std::vector<TrialRecord> trials;
    std::vector<CellSummary> cells;
    std::vector<SampleDetail> details;

    const CellSummary& cell(const std::string& estimator, ScoreKind score, double alpha, double beta) const;
};

/// Per trial: a fresh pool of n_cal + n_test samples is drawn from
/// derive_seed(seed, trial), split uniformly at random, every estimator is
/// run on the pool, and each (score, alpha, beta) cell is calibrated on the
/// calibration part and evaluated on the test part. Trials fan out over
/// `threads`; results are identical for any thread count.
TrialReport run_experiment(const ExperimentConfig& cfg);

enum class SweepAxis { Alpha, Beta, R0, NSources };

SweepAxis parse_sweep_axis(std::string_view text);
std::string_view to_string(SweepAxis axis) noexcept;

/// One run_experiment per axis value, all with the same master seed.
/// Scalars axes (alpha, beta) use lo == hi; alpha/beta values replace that
/// coordinate of every configured level pair.
std::vector<TrialReport> sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<RealRange>& values);

/// Columns: estimator,score,alpha,beta,trial,inclusion_rate,mean_set_size,runtime_s
/// preceded by a "# confsd <version> config_hash=<h> seed=<s>" line. With
/// several reports a leading "sweep" column carries each label.
void write_trials_csv(std::ostream& out, const std::vector<TrialReport>& reports);
/// Columns: estimator,score,alpha,beta,n_trials,inclusion_mean,inclusion_stderr,
/// set_size_mean,set_size_stderr,precision_mean,recall_mean ("NA" for a
/// missing stderr).
void write_summary_csv(std::ostream& out, const std::vector<TrialReport>& reports);
void write_details_csv(std::ostream& out, const std::vector<TrialReport>& reports);

} // namespace confsd
