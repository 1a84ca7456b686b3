#include "confsd/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "confsd/parallel.hpp"

namespace confsd {

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
    bool positive = false;
    for (std::size_t v = 0; v < probs_.size(); ++v) {
        double p = probs_[v];
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("probability of node " + std::to_string(v) + " is outside [0,1]");
        positive = positive || p > 0.0;
    }
    if (!positive) throw ValidationError("probability vector needs at least one positive entry");
}

namespace {

bool infected(Status s) { return s != Status::S; }

} // namespace

ProbVector estimate_heuristic(const SnapshotMatrix& x, const Graph& g, const HeuristicWeights& w) {
    const std::size_t n = x.num_nodes();
    if (g.num_nodes() != n) throw ValidationError("snapshot width does not match graph size");
    std::vector<double> probs(n, kProbFloor);
    auto first = x.column(0);
    for (std::size_t v = 0; v < n; ++v) {
        const auto node = static_cast<NodeId>(v);
        double score = 0.0;
        if (infected(first[v])) {
            std::size_t hit = 0;
            auto nb = g.neighbors(node);
            for (NodeId u : nb) hit += infected(first[static_cast<std::size_t>(u)]) ? 1 : 0;
            double coverage = nb.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(nb.size());
            score = w.earliness + w.coverage * coverage + (first[v] == Status::R ? w.recovered : 0.0);
        } else {
            for (std::size_t j = 1; j < x.num_snapshots(); ++j) {
                if (infected(x.at(node, j))) {
                    score = w.earliness * std::pow(w.decay, static_cast<double>(j));
                    break;
                }
            }
        }
        probs[v] = std::clamp(std::max(score, kProbFloor), 0.0, 1.0);
    }
    return ProbVector(std::move(probs));
}

namespace {

// Observed I/R membership per snapshot plus set sizes, shared by all candidates.
struct ObservedSets {
    std::vector<std::vector<std::uint8_t>> member;
    std::vector<std::size_t> size;

    explicit ObservedSets(const SnapshotMatrix& x) {
        for (std::size_t j = 0; j < x.num_snapshots(); ++j) {
            auto col = x.column(j);
            std::vector<std::uint8_t> m(col.size());
            std::size_t count = 0;
            for (std::size_t v = 0; v < col.size(); ++v) {
                m[v] = infected(col[v]) ? 1 : 0;
                count += m[v];
            }
            member.push_back(std::move(m));
            size.push_back(count);
        }
    }
};

double fitness_with(const SnapshotMatrix& x, const ObservedSets& obs, SirStepper& stepper,
                    NodeId candidate, int k_sims, std::uint64_t seed) {
    Rng rng(seed);
    const auto& times = x.times();
    double total = 0.0;
    const NodeId start[1] = {candidate};
    for (int k = 0; k < k_sims; ++k) {
        stepper.reset(start);
        for (std::size_t j = 0; j < times.size(); ++j) {
            while (stepper.time() < times[j]) {
                if (stepper.num_infected() == 0) break;
                stepper.step(rng);
            }
            auto ever = stepper.ever_infected();
            std::size_t inter = 0;
            for (NodeId v : ever) inter += obs.member[j][static_cast<std::size_t>(v)];
            std::size_t uni = ever.size() + obs.size[j] - inter;
            total += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
        }
    }
    return total / (static_cast<double>(k_sims) * static_cast<double>(times.size()));
}

SirParams window_params(const SnapshotMatrix& x, SirParams params) {
    params.horizon = x.times().back();
    return params;
}

} // namespace

double simulation_fitness(const SnapshotMatrix& x, const Graph& g, const SirParams& params,
                          NodeId candidate, int k_sims, std::uint64_t seed) {
    if (k_sims < 1) throw ValidationError("k_sims must be >= 1");
    if (!g.contains(candidate)) throw ValidationError("candidate out of range");
    ObservedSets obs(x);
    SirStepper stepper(g, window_params(x, params));
    return fitness_with(x, obs, stepper, candidate, k_sims, seed);
}

ProbVector estimate_monte_carlo(const SnapshotMatrix& x, const Graph& g, const SirParams& params,
                                int k_sims, std::uint64_t seed, unsigned threads) {
    if (k_sims < 1) throw ValidationError("k_sims must be >= 1");
    const std::size_t n = x.num_nodes();
    if (g.num_nodes() != n) throw ValidationError("snapshot width does not match graph size");
    const auto sim_params = window_params(x, params);
    sim_params.validate();

    std::vector<NodeId> candidates;
    auto first = x.column(0);
    for (std::size_t v = 0; v < n; ++v)
        if (infected(first[v])) candidates.push_back(static_cast<NodeId>(v));
    if (candidates.empty())
        for (std::size_t v = 0; v < n; ++v) candidates.push_back(static_cast<NodeId>(v));

    ObservedSets obs(x);
    std::vector<double> fitness(candidates.size());
    if (threads <= 1) {
        SirStepper stepper(g, sim_params);
        for (std::size_t i = 0; i < candidates.size(); ++i)
            fitness[i] = fitness_with(x, obs, stepper, candidates[i], k_sims, derive_seed(seed, static_cast<std::uint64_t>(candidates[i])));
    } else {
        parallel_for(candidates.size(), threads, [&](std::size_t i) {
            SirStepper stepper(g, sim_params);
            fitness[i] = fitness_with(x, obs, stepper, candidates[i], k_sims, derive_seed(seed, static_cast<std::uint64_t>(candidates[i])));
        });
    }

    std::vector<double> probs(n, kProbFloor);
    const double best = *std::max_element(fitness.begin(), fitness.end());
    if (best > 0.0)
        for (std::size_t i = 0; i < candidates.size(); ++i)
            probs[static_cast<std::size_t>(candidates[i])] = std::clamp(fitness[i] / best, kProbFloor, 1.0);
    return ProbVector(std::move(probs));
}

ProbVector estimate_oracle(const LabeledSample& sample, double noise, std::uint64_t seed) {
    if (!(noise >= 0.0 && noise <= 1.0)) throw ValidationError("oracle noise must be in [0,1]");
    const std::size_t n = sample.snapshots.num_nodes();
    std::vector<double> probs(n);
    Rng rng(seed);
    for (std::size_t v = 0; v < n; ++v) probs[v] = noise * rng.uniform();
    for (NodeId s : sample.sources) probs[static_cast<std::size_t>(s)] += 1.0 - noise;
    for (auto& p : probs) p = std::min(p, 1.0);
    // noise == 1 with every draw exactly 0 is the only way to get an all-zero vector.
    if (std::all_of(probs.begin(), probs.end(), [](double p) { return p == 0.0; }))
        for (auto& p : probs) p = kProbFloor;
    return ProbVector(std::move(probs));
}

// ---- file-backed -----------------------------------------------------------

ProbFile ProbFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open probability file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("probability file is empty");
    ProbFile file;
    {
        std::istringstream head(line);
        std::string hash, tag, version, count;
        head >> hash >> tag >> version >> count;
        if (hash != "#" || tag != "confsd-probs" || version != "v1" || !count.starts_with("n_nodes="))
            throw ParseError("expected header '# confsd-probs v1 n_nodes=<N>'", 1);
        try {
            file.n_nodes_ = std::stoul(count.substr(8));
        } catch (const std::exception&) {
            throw ParseError("bad n_nodes in header", 1);
        }
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.front() == '#') continue;
        std::istringstream row(line);
        std::uint64_t id = 0;
        if (!(row >> id)) throw ParseError("row must start with a sample id", lineno);
        std::vector<double> probs;
        probs.reserve(file.n_nodes_);
        double p = 0.0;
        while (row >> p) probs.push_back(p);
        if (!row.eof()) throw ParseError("non-numeric probability", lineno);
        if (probs.size() != file.n_nodes_)
            throw ParseError("row has " + std::to_string(probs.size()) + " values, expected " +
                                 std::to_string(file.n_nodes_),
                             lineno);
        try {
            if (!file.rows_.emplace(id, ProbVector(std::move(probs))).second)
                throw ParseError("duplicate sample id " + std::to_string(id), lineno);
        } catch (const ParseError&) {
            throw;
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return file;
}

void ProbFile::save(const std::filesystem::path& path, std::size_t n_nodes,
                    const std::map<std::uint64_t, ProbVector>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write probability file: " + path.string());
    out << "# confsd-probs v1 n_nodes=" << n_nodes << '\n';
    out.precision(17);
    for (const auto& [id, pv] : rows) {
        if (pv.size() != n_nodes) throw ValidationError("probability vector width mismatch");
        out << id;
        for (double p : pv.values()) out << ' ' << p;
        out << '\n';
    }
}

const ProbVector& ProbFile::at(std::uint64_t id) const {
    auto it = rows_.find(id);
    if (it == rows_.end()) throw ValidationError("no probabilities for sample id " + std::to_string(id));
    return it->second;
}

// ---- dispatch --------------------------------------------------------------

EstimatorConfig EstimatorConfig::parse(std::string_view text) {
    EstimatorConfig cfg;
    auto colon = text.find(':');
    auto kind = text.substr(0, colon);
    std::string arg = colon == std::string_view::npos ? std::string() : std::string(text.substr(colon + 1));
    auto number = [&](auto convert) {
        try {
            std::size_t used = 0;
            auto value = convert(arg, &used);
            if (used == arg.size()) return value;
        } catch (const std::exception&) {
        }
        throw ValidationError("bad estimator argument in '" + std::string(text) + "'");
    };
    if (kind == "heuristic" && arg.empty()) {
        cfg.kind = EstimatorKind::Heuristic;
    } else if (kind == "mc") {
        cfg.kind = EstimatorKind::MonteCarlo;
        if (!arg.empty()) cfg.k_sims = number([](const std::string& s, std::size_t* u) { return std::stoi(s, u); });
        if (cfg.k_sims < 1) throw ValidationError("mc estimator needs k_sims >= 1");
    } else if (kind == "oracle") {
        cfg.kind = EstimatorKind::Oracle;
        if (!arg.empty()) cfg.noise = number([](const std::string& s, std::size_t* u) { return std::stod(s, u); });
        if (!(cfg.noise >= 0.0 && cfg.noise <= 1.0)) throw ValidationError("oracle noise must be in [0,1]");
    } else if (kind == "file" && !arg.empty()) {
        cfg.kind = EstimatorKind::File;
        cfg.prob_file = arg;
    } else {
        throw ValidationError("unknown estimator '" + std::string(text) +
                              "' (expected heuristic, mc[:K], oracle[:NOISE] or file:PATH)");
    }
    return cfg;
}

std::string EstimatorConfig::label() const {
    std::ostringstream os;
    switch (kind) {
    case EstimatorKind::Heuristic: os << "heuristic"; break;
    case EstimatorKind::MonteCarlo: os << "mc:" << k_sims; break;
    case EstimatorKind::Oracle: os << "oracle:" << noise; break;
    case EstimatorKind::File: os << "file:" << prob_file; break;
    }
    return os.str();
}

ProbVector estimate(const EstimatorConfig& cfg, const LabeledSample& sample, const Graph& g,
                    std::uint64_t seed, const ProbFile* file, unsigned threads) {
    switch (cfg.kind) {
    case EstimatorKind::Heuristic: return estimate_heuristic(sample.snapshots, g);
    case EstimatorKind::MonteCarlo: {
        SirParams params;
        params.sigma_inf = sample.sigma_inf;
        params.sigma_rec = sample.sigma_rec;
        return estimate_monte_carlo(sample.snapshots, g, params, cfg.k_sims, seed, threads);
    }
    case EstimatorKind::Oracle: return estimate_oracle(sample, cfg.noise, seed);
    case EstimatorKind::File:
        if (!file) throw ValidationError("file estimator needs a loaded probability file");
        if (file->num_nodes() != sample.snapshots.num_nodes())
            throw ValidationError("probability file width does not match the dataset");
        return file->at(sample.id);
    }
    throw Error("unreachable estimator kind");
}

} // namespace confsd
