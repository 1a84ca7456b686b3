#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "confsd/graph.hpp"
#include "confsd/rng.hpp"

namespace confsd {

enum class Status : std::uint8_t { S = 0, I = 1, R = 2 };

char status_char(Status s) noexcept;
Status status_from_char(char c); // throws ParseError on anything but S/I/R

struct SirParams {
    double sigma_inf = 0.25;
    double sigma_rec = 0.0;
    int horizon = 40;
    std::optional<double> r0; ///< informational unless built via from_r0

    /// sigma_inf = r0 * sigma_rec / lambda1; must land in (0, 1].
    static SirParams from_r0(double r0, double sigma_rec, double lambda1, int horizon = 40);

    void validate() const;
};

/// Node statuses for t = 0..horizon, stored time-major.
class Trajectory {
public:
    Trajectory(std::size_t n_nodes, int horizon, std::vector<NodeId> sources);

    std::size_t num_nodes() const noexcept { return n_; }
    int horizon() const noexcept { return horizon_; }
    const std::vector<NodeId>& sources() const noexcept { return sources_; }

    std::span<const Status> at(int t) const {
        return {data_.data() + static_cast<std::size_t>(t) * n_, n_};
    }
    std::span<Status> at(int t) { return {data_.data() + static_cast<std::size_t>(t) * n_, n_}; }
    Status at(int t, NodeId v) const { return at(t)[static_cast<std::size_t>(v)]; }

private:
    std::size_t n_;
    int horizon_;
    std::vector<NodeId> sources_;
    std::vector<Status> data_;
};

/// Observed input: M snapshots of all N statuses at strictly increasing times.
class SnapshotMatrix {
public:
    SnapshotMatrix() = default;
    /// `statuses` holds M contiguous columns of length N. Validates shape,
    /// increasing times and per-node S->I->R monotonicity.
    SnapshotMatrix(std::size_t n_nodes, std::vector<int> times, std::vector<Status> statuses);

    std::size_t num_nodes() const noexcept { return n_; }
    std::size_t num_snapshots() const noexcept { return times_.size(); }
    const std::vector<int>& times() const noexcept { return times_; }
    std::span<const Status> column(std::size_t j) const { return {data_.data() + j * n_, n_}; }
    Status at(NodeId v, std::size_t j) const { return column(j)[static_cast<std::size_t>(v)]; }
    const std::vector<Status>& raw() const noexcept { return data_; }

    friend bool operator==(const SnapshotMatrix&, const SnapshotMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<int> times_;
    std::vector<Status> data_;
};

/// Discrete-time SIR stepping with reusable buffers. Each step reads the
/// statuses of the previous step: every node infected at t-1 recovers with
/// probability sigma_rec and makes one Bernoulli(sigma_inf) attempt on each
/// neighbour still susceptible (independent cascade). Nodes infected during a
/// step neither infect nor recover until the next one.
class SirStepper {
public:
    SirStepper(const Graph& g, const SirParams& params);

    void reset(std::span<const NodeId> sources);
    void step(Rng& rng);

    int time() const noexcept { return time_; }
    std::span<const Status> statuses() const noexcept { return status_; }
    std::size_t num_infected() const noexcept { return infected_.size(); }
    /// Every node that has been I at some step so far (I or R now).
    std::span<const NodeId> ever_infected() const noexcept { return ever_; }

private:
    const Graph* graph_;
    SirParams params_;
    int time_ = 0;
    std::vector<Status> status_;
    std::vector<NodeId> infected_;
    std::vector<NodeId> scratch_;
    std::vector<NodeId> ever_;
};

/// Deterministic for fixed seed. Throws ValidationError on an empty source
/// set, duplicate or out-of-range sources, or invalid params.
Trajectory simulate(const Graph& g, const SirParams& params, std::span<const NodeId> sources,
                    std::uint64_t seed);

/// Columns at t1, t1 + stride, ..., t1 + (m-1) stride.
SnapshotMatrix observe(const Trajectory& traj, int t1, int m = 16, int stride = 1);

// ---- datasets --------------------------------------------------------------

struct LabeledSample {
    std::uint64_t id = 0;
    SnapshotMatrix snapshots;
    std::vector<NodeId> sources; ///< ascending
    double sigma_inf = 0.0;
    double sigma_rec = 0.0;
    std::optional<double> r0;

    friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

struct RealRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct IntRange {
    int lo = 1;
    int hi = 1;
};

/// Per-sample parameters are drawn uniformly from these ranges. With `r0`
/// set, sigma_inf is derived from (r0, sigma_rec, lambda1); otherwise it is
/// drawn from `sigma_inf`.
struct ParamDistribution {
    std::optional<RealRange> r0;
    RealRange sigma_inf{0.25, 0.25};
    RealRange sigma_rec{0.1, 0.4};
};

/// Start of the observation window. The adaptive rule uses t1 = 2 when there
/// is a single source or R0 lies in [1, 15], else t1 = 1.
struct T1Rule {
    bool adaptive = true;
    int fixed_t1 = 1;

    int choose(std::size_t n_sources, std::optional<double> r0) const;
};

struct DatasetSpec {
    ParamDistribution params;
    IntRange source_count{1, 10};
    T1Rule t1;
    int snapshots = 16;
    int stride = 1;
    int horizon = 40;

    void validate(std::size_t n_nodes, double lambda1) const;
};

/// Sample i is generated from derive_seed(seed, i) alone, so the dataset is
/// identical for any thread count. Sources are drawn uniformly without
/// replacement. `lambda1` is computed when not supplied.
std::vector<LabeledSample> sample_dataset(const Graph& g, const DatasetSpec& spec,
                                          std::size_t n_samples, std::uint64_t seed,
                                          unsigned threads = 1,
                                          std::optional<double> lambda1 = std::nullopt);

} // namespace confsd
