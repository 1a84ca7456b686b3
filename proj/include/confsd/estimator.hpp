#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "confsd/diffusion.hpp"
#include "confsd/graph.hpp"

namespace confsd {

/// Floor for estimated source probabilities. Keeps the recall score finite on
/// nodes the estimator rules out while preserving the ranking.
inline constexpr double kProbFloor = 1e-6;

/// Per-node source probabilities pi(v), each in [0, 1], at least one > 0.
/// Entries are marginal estimates and need not sum to one.
class ProbVector {
public:
    ProbVector() = default;
    explicit ProbVector(std::vector<double> probs);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](NodeId v) const { return probs_[static_cast<std::size_t>(v)]; }
    std::span<const double> values() const noexcept { return probs_; }

    friend bool operator==(const ProbVector&, const ProbVector&) = default;

private:
    std::vector<double> probs_;
};

struct HeuristicWeights {
    double earliness = 0.5;
    double coverage = 0.4;
    double recovered = 0.1;
    double decay = 0.5; ///< earliness of a node first seen at column j is decay^j
};

/// Cheap evidence-based scorer. For nodes already I or R in the first
/// snapshot: earliness 1, plus the fraction of their neighbours that are I/R
/// there, plus a bonus for R (infected earlier still). Nodes first seen later
/// get only the decayed earliness term. Never-infected nodes get kProbFloor.
ProbVector estimate_heuristic(const SnapshotMatrix& x, const Graph& g, const HeuristicWeights& w = {});

/// Mean Jaccard similarity between the simulated I/R set from {candidate} and
/// the observed I/R set, over the observation times and k_sims runs.
double simulation_fitness(const SnapshotMatrix& x, const Graph& g, const SirParams& params,
                          NodeId candidate, int k_sims, std::uint64_t seed);

/// Candidates are the nodes I or R in the first snapshot (all nodes if there
/// are none). pi(c) = fitness(c) / max fitness, floored at kProbFloor;
/// non-candidates get the floor. Candidate c uses derive_seed(seed, c), so the
/// result is independent of `threads`.
ProbVector estimate_monte_carlo(const SnapshotMatrix& x, const Graph& g, const SirParams& params,
                                int k_sims, std::uint64_t seed, unsigned threads = 1);

/// Test double: pi(v) = (1 - noise) 1[v in Y] + noise u_v, u_v ~ U(0,1).
ProbVector estimate_oracle(const LabeledSample& sample, double noise, std::uint64_t seed);

/// Precomputed probabilities keyed by sample id. Text format:
///   # confsd-probs v1 n_nodes=<N>
///   <id> <p_0> ... <p_{N-1}>
/// one row per sample; '#' lines after the first are comments.
class ProbFile {
public:
    static ProbFile load(const std::filesystem::path& path);
    static void save(const std::filesystem::path& path, std::size_t n_nodes,
                     const std::map<std::uint64_t, ProbVector>& rows);

    std::size_t num_nodes() const noexcept { return n_nodes_; }
    std::size_t size() const noexcept { return rows_.size(); }
    const ProbVector& at(std::uint64_t id) const;

private:
    std::size_t n_nodes_ = 0;
    std::map<std::uint64_t, ProbVector> rows_;
};

enum class EstimatorKind { Heuristic, MonteCarlo, Oracle, File };

struct EstimatorConfig {
    EstimatorKind kind = EstimatorKind::Heuristic;
    double noise = 1.0;  ///< oracle only
    int k_sims = 20;     ///< monte carlo only
    std::string prob_file; ///< file only

    /// "heuristic", "mc:<k_sims>", "oracle:<noise>", "file:<path>"; a bare
    /// "mc"/"oracle" keeps the defaults.
    static EstimatorConfig parse(std::string_view text);
    std::string label() const;
};

/// Dispatches on the config. The Monte Carlo estimator uses the sample's own
/// generative parameters with the horizon cut at the last observed time.
ProbVector estimate(const EstimatorConfig& cfg, const LabeledSample& sample, const Graph& g,
                    std::uint64_t seed, const ProbFile* file = nullptr, unsigned threads = 1);

} // namespace confsd
