#include "confsd/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confsd/parallel.hpp"

namespace confsd {

char status_char(Status s) noexcept {
    switch (s) {
    case Status::S: return 'S';
    case Status::I: return 'I';
    case Status::R: return 'R';
    }
    return '?';
}

Status status_from_char(char c) {
    switch (c) {
    case 'S': return Status::S;
    case 'I': return Status::I;
    case 'R': return Status::R;
    default: throw ParseError(std::string("invalid status character '") + c + "'", 0);
    }
}

SirParams SirParams::from_r0(double r0, double sigma_rec, double lambda1, int horizon) {
    if (!(lambda1 > 0.0)) throw ValidationError("R0 parametrisation needs a positive spectral radius");
    SirParams p;
    p.sigma_rec = sigma_rec;
    p.sigma_inf = r0 * sigma_rec / lambda1;
    p.horizon = horizon;
    p.r0 = r0;
    p.validate();
    return p;
}

void SirParams::validate() const {
    if (!(sigma_inf > 0.0 && sigma_inf <= 1.0))
        throw ValidationError("sigma_inf must be in (0,1], got " + std::to_string(sigma_inf));
    if (!(sigma_rec >= 0.0 && sigma_rec < 1.0))
        throw ValidationError("sigma_rec must be in [0,1), got " + std::to_string(sigma_rec));
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
}

Trajectory::Trajectory(std::size_t n_nodes, int horizon, std::vector<NodeId> sources)
    : n_(n_nodes),
      horizon_(horizon),
      sources_(std::move(sources)),
      data_(n_nodes * static_cast<std::size_t>(horizon + 1), Status::S) {}

SnapshotMatrix::SnapshotMatrix(std::size_t n_nodes, std::vector<int> times, std::vector<Status> statuses)
    : n_(n_nodes), times_(std::move(times)), data_(std::move(statuses)) {
    if (times_.empty()) throw ValidationError("snapshot matrix needs at least one snapshot");
    if (data_.size() != n_ * times_.size())
        throw ValidationError("snapshot matrix has " + std::to_string(data_.size()) +
                              " statuses, expected " + std::to_string(n_ * times_.size()));
    for (std::size_t j = 1; j < times_.size(); ++j)
        if (times_[j] <= times_[j - 1]) throw ValidationError("snapshot times must be strictly increasing");
    for (std::size_t j = 1; j < times_.size(); ++j)
        for (std::size_t v = 0; v < n_; ++v)
            if (data_[j * n_ + v] < data_[(j - 1) * n_ + v])
                throw ValidationError("node " + std::to_string(v) + " violates S->I->R order between snapshots " +
                                      std::to_string(j - 1) + " and " + std::to_string(j));
}

SirStepper::SirStepper(const Graph& g, const SirParams& params)
    : graph_(&g), params_(params), status_(g.num_nodes(), Status::S) {
    params_.validate();
    infected_.reserve(g.num_nodes());
    scratch_.reserve(g.num_nodes());
    ever_.reserve(g.num_nodes());
}

void SirStepper::reset(std::span<const NodeId> sources) {
    std::fill(status_.begin(), status_.end(), Status::S);
    infected_.clear();
    ever_.clear();
    time_ = 0;
    for (NodeId s : sources) {
        status_[static_cast<std::size_t>(s)] = Status::I;
        infected_.push_back(s);
        ever_.push_back(s);
    }
}

void SirStepper::step(Rng& rng) {
    ++time_;
    scratch_.clear();
    const std::size_t infected_before = infected_.size();
    const bool recovers = params_.sigma_rec > 0.0;
    // Updates happen in place. Nodes turned I in this step are appended to
    // infected_ past infected_before, so they are not iterated as infectors,
    // and the S check skips them as targets.
    for (std::size_t k = 0; k < infected_before; ++k) {
        NodeId u = infected_[k];
        for (NodeId v : graph_->neighbors(u)) {
            auto& sv = status_[static_cast<std::size_t>(v)];
            if (sv == Status::S && rng.bernoulli(params_.sigma_inf)) {
                sv = Status::I;
                infected_.push_back(v);
                ever_.push_back(v);
            }
        }
        if (recovers && rng.bernoulli(params_.sigma_rec)) {
            status_[static_cast<std::size_t>(u)] = Status::R;
        } else {
            scratch_.push_back(u);
        }
    }
    scratch_.insert(scratch_.end(), infected_.begin() + static_cast<std::ptrdiff_t>(infected_before),
                    infected_.end());
    infected_.swap(scratch_);
}

namespace {

void check_sources(const Graph& g, std::span<const NodeId> sources) {
    if (sources.empty()) throw ValidationError("source set must be non-empty");
    std::vector<NodeId> sorted(sources.begin(), sources.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ValidationError("source set contains duplicates");
    for (NodeId s : sorted)
        if (!g.contains(s)) throw ValidationError("source node " + std::to_string(s) + " out of range");
}

} // namespace

Trajectory simulate(const Graph& g, const SirParams& params, std::span<const NodeId> sources,
                    std::uint64_t seed) {
    params.validate();
    check_sources(g, sources);
    std::vector<NodeId> sorted(sources.begin(), sources.end());
    std::sort(sorted.begin(), sorted.end());

    Trajectory traj(g.num_nodes(), params.horizon, sorted);
    SirStepper stepper(g, params);
    stepper.reset(sorted);
    Rng rng(seed);
    auto write = [&](int t) { std::copy(stepper.statuses().begin(), stepper.statuses().end(), traj.at(t).begin()); };
    write(0);
    for (int t = 1; t <= params.horizon; ++t) {
        if (stepper.num_infected() == 0) {
            // Absorbed: nothing can change any more.
            auto prev = traj.at(t - 1);
            std::copy(prev.begin(), prev.end(), traj.at(t).begin());
            continue;
        }
        stepper.step(rng);
        write(t);
    }
    return traj;
}

SnapshotMatrix observe(const Trajectory& traj, int t1, int m, int stride) {
    if (t1 < 1) throw ValidationError("observation must start at t1 >= 1");
    if (m < 1) throw ValidationError("need at least one snapshot");
    if (stride < 1) throw ValidationError("stride must be >= 1");
    const long last = static_cast<long>(t1) + static_cast<long>(m - 1) * stride;
    if (last > traj.horizon())
        throw ValidationError("observation window ends at t=" + std::to_string(last) + " beyond horizon " +
                              std::to_string(traj.horizon()));
    std::vector<int> times;
    std::vector<Status> data;
    data.reserve(static_cast<std::size_t>(m) * traj.num_nodes());
    for (int j = 0; j < m; ++j) {
        int t = t1 + j * stride;
        times.push_back(t);
        auto col = traj.at(t);
        data.insert(data.end(), col.begin(), col.end());
    }
    return SnapshotMatrix(traj.num_nodes(), std::move(times), std::move(data));
}

int T1Rule::choose(std::size_t n_sources, std::optional<double> r0) const {
    if (!adaptive) return fixed_t1;
    if (n_sources == 1) return 2;
    if (r0 && *r0 >= 1.0 && *r0 <= 15.0) return 2;
    return 1;
}

void DatasetSpec::validate(std::size_t n_nodes, double lambda1) const {
    auto check_range = [](const RealRange& r, const char* name) {
        if (!(r.lo <= r.hi)) throw ValidationError(std::string(name) + " range has lo > hi");
    };
    check_range(params.sigma_rec, "sigma_rec");
    if (!(params.sigma_rec.lo >= 0.0 && params.sigma_rec.hi < 1.0))
        throw ValidationError("sigma_rec range must lie in [0,1)");
    if (params.r0) {
        check_range(*params.r0, "r0");
        if (!(params.r0->lo > 0.0 && params.sigma_rec.lo > 0.0))
            throw ValidationError("R0 parametrisation needs r0 > 0 and sigma_rec > 0");
        if (params.r0->hi * params.sigma_rec.hi / lambda1 > 1.0)
            throw ValidationError("r0 and sigma_rec ranges can give sigma_inf > 1 on this graph (lambda1 = " +
                                  std::to_string(lambda1) + ")");
    } else {
        check_range(params.sigma_inf, "sigma_inf");
        if (!(params.sigma_inf.lo > 0.0 && params.sigma_inf.hi <= 1.0))
            throw ValidationError("sigma_inf range must lie in (0,1]");
    }
    if (source_count.lo < 1 || source_count.lo > source_count.hi)
        throw ValidationError("source count range must satisfy 1 <= lo <= hi");
    if (static_cast<std::size_t>(source_count.hi) > n_nodes)
        throw ValidationError("source count " + std::to_string(source_count.hi) + " exceeds node count " +
                              std::to_string(n_nodes));
    if (snapshots < 1 || stride < 1) throw ValidationError("snapshots and stride must be >= 1");
    const int max_t1 = t1.adaptive ? 2 : t1.fixed_t1;
    if (!t1.adaptive && t1.fixed_t1 < 1) throw ValidationError("t1 must be >= 1");
    if (max_t1 + (snapshots - 1) * stride > horizon)
        throw ValidationError("observation window does not fit in horizon " + std::to_string(horizon));
}

std::vector<LabeledSample> sample_dataset(const Graph& g, const DatasetSpec& spec, std::size_t n_samples,
                                          std::uint64_t seed, unsigned threads,
                                          std::optional<double> lambda1) {
    const double l1 = lambda1 ? *lambda1 : spectral_radius(g);
    spec.validate(g.num_nodes(), l1);
    std::vector<LabeledSample> out(n_samples);
    parallel_for(n_samples, threads, [&](std::size_t i) {
        const std::uint64_t sample_seed = derive_seed(seed, i);
        Rng rng(sample_seed);
        auto k = static_cast<std::int32_t>(rng.between(spec.source_count.lo, spec.source_count.hi));
        auto sources = rng.choose(static_cast<std::int32_t>(g.num_nodes()), k);

        SirParams params;
        params.horizon = spec.horizon;
        params.sigma_rec = rng.uniform(spec.params.sigma_rec.lo, spec.params.sigma_rec.hi);
        if (spec.params.r0) {
            double r0 = rng.uniform(spec.params.r0->lo, spec.params.r0->hi);
            params = SirParams::from_r0(r0, params.sigma_rec, l1, spec.horizon);
        } else {
            params.sigma_inf = rng.uniform(spec.params.sigma_inf.lo, spec.params.sigma_inf.hi);
            if (params.sigma_rec > 0.0) params.r0 = params.sigma_inf * l1 / params.sigma_rec;
        }
        int t1 = spec.t1.choose(sources.size(), params.r0);
        auto traj = simulate(g, params, sources, derive_seed(sample_seed, stream::kSimulation));

        LabeledSample& s = out[i];
        s.id = i;
        s.snapshots = observe(traj, t1, spec.snapshots, spec.stride);
        s.sources = std::move(sources);
        s.sigma_inf = params.sigma_inf;
        s.sigma_rec = params.sigma_rec;
        s.r0 = params.r0;
    });
    return out;
}

} // namespace confsd
