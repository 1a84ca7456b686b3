#include "confsd/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "confsd/dataset_io.hpp"
#include "confsd/parallel.hpp"

namespace confsd {

using nlohmann::json;

namespace {

std::vector<LevelPair> grid(std::initializer_list<double> alphas, std::initializer_list<double> betas) {
    std::vector<LevelPair> out;
    for (double b : betas)
        for (double a : alphas) out.push_back({a, b});
    return out;
}

std::vector<EstimatorConfig> default_estimators(int k_sims) {
    EstimatorConfig mc;
    mc.kind = EstimatorKind::MonteCarlo;
    mc.k_sims = k_sims;
    EstimatorConfig oracle;
    oracle.kind = EstimatorKind::Oracle;
    oracle.noise = 1.0;
    return {EstimatorConfig{}, mc, oracle};
}

} // namespace

ExperimentConfig ExperimentConfig::desk_scale() {
    ExperimentConfig cfg;
    cfg.graph = "ba:200:3";
    cfg.dataset.params.r0 = RealRange{1.0, 15.0};
    cfg.dataset.params.sigma_rec = {0.1, 0.4};
    cfg.dataset.source_count = {1, 10};
    cfg.levels = grid({0.05, 0.1, 0.15}, {0.1, 0.3, 0.5, 0.7});
    cfg.n_cal = 500;
    cfg.n_test = 200;
    cfg.n_trials = 100;
    cfg.estimators = default_estimators(2);
    cfg.scores = {kAllScoreKinds.begin(), kAllScoreKinds.end()};
    return cfg;
}

ExperimentConfig ExperimentConfig::full_scale() {
    ExperimentConfig cfg = desk_scale();
    cfg.graph = "ba:774:10";
    cfg.dataset.source_count = {1, 15};
    cfg.n_cal = 7600;
    cfg.n_test = 400;
    cfg.n_trials = 50;
    cfg.estimators = default_estimators(8);
    return cfg;
}

void ExperimentConfig::validate() const {
    if (n_cal < 1) throw ValidationError("n_cal must be >= 1");
    if (n_test < 1) throw ValidationError("n_test must be >= 1");
    if (n_trials < 1) throw ValidationError("n_trials must be >= 1");
    if (levels.empty()) throw ValidationError("levels: at least one (alpha, beta) pair is required");
    for (const auto& l : levels) NominalLevels(l.alpha, l.beta);
    if (estimators.empty()) throw ValidationError("estimators: at least one estimator is required");
    for (const auto& e : estimators)
        if (e.kind == EstimatorKind::File)
            throw ValidationError("estimators: file-backed estimates cannot follow freshly simulated pools");
    if (scores.empty()) throw ValidationError("scores: at least one score kind is required");
}

// ---- JSON config -----------------------------------------------------------

namespace {

json range_json(const RealRange& r) { return json::array({r.lo, r.hi}); }

RealRange range_from(const json& j, const char* key) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ValidationError(std::string("config field '") + key + "' must be [lo, hi]");
    return {j[0].get<double>(), j[1].get<double>()};
}

template <class T>
T field_as(const json& j, const char* key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("config field '") + key + "' has the wrong type");
    }
}

} // namespace

std::string ExperimentConfig::to_json() const {
    json j;
    j["graph"] = graph;
    j["graph_seed"] = graph_seed;
    j["r0"] = dataset.params.r0 ? range_json(*dataset.params.r0) : json(nullptr);
    j["sigma_inf"] = range_json(dataset.params.sigma_inf);
    j["sigma_rec"] = range_json(dataset.params.sigma_rec);
    j["sources"] = json::array({dataset.source_count.lo, dataset.source_count.hi});
    j["t1"] = dataset.t1.adaptive ? json("adaptive") : json(dataset.t1.fixed_t1);
    j["snapshots"] = dataset.snapshots;
    j["stride"] = dataset.stride;
    j["horizon"] = dataset.horizon;
    json lv = json::array();
    for (const auto& l : levels) lv.push_back(json::array({l.alpha, l.beta}));
    j["levels"] = lv;
    j["n_cal"] = n_cal;
    j["n_test"] = n_test;
    j["n_trials"] = n_trials;
    json est = json::array();
    for (const auto& e : estimators) est.push_back(e.label());
    j["estimators"] = est;
    json sc = json::array();
    for (auto s : scores) sc.push_back(std::string(to_string(s)));
    j["scores"] = sc;
    j["seed"] = seed;
    j["threads"] = threads;
    j["record_timing"] = record_timing;
    j["keep_details"] = keep_details;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text, const ExperimentConfig& base) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    ExperimentConfig cfg = base;
    for (const auto& [key, v] : j.items()) {
        const char* k = key.c_str();
        if (key == "graph") cfg.graph = field_as<std::string>(v, k);
        else if (key == "graph_seed") cfg.graph_seed = field_as<std::uint64_t>(v, k);
        else if (key == "r0") cfg.dataset.params.r0 = v.is_null() ? std::nullopt : std::optional(range_from(v, k));
        else if (key == "sigma_inf") cfg.dataset.params.sigma_inf = range_from(v, k);
        else if (key == "sigma_rec") cfg.dataset.params.sigma_rec = range_from(v, k);
        else if (key == "sources") {
            auto r = range_from(v, k);
            cfg.dataset.source_count = {static_cast<int>(r.lo), static_cast<int>(r.hi)};
        } else if (key == "t1") {
            if (v.is_string() && v.get<std::string>() == "adaptive") {
                cfg.dataset.t1.adaptive = true;
            } else {
                cfg.dataset.t1.adaptive = false;
                cfg.dataset.t1.fixed_t1 = field_as<int>(v, k);
            }
        } else if (key == "snapshots") cfg.dataset.snapshots = field_as<int>(v, k);
        else if (key == "stride") cfg.dataset.stride = field_as<int>(v, k);
        else if (key == "horizon") cfg.dataset.horizon = field_as<int>(v, k);
        else if (key == "levels") {
            cfg.levels.clear();
            if (v.is_object()) {
                for (const auto& [sub, _] : v.items())
                    if (sub != "alpha" && sub != "beta")
                        throw ValidationError("config field 'levels." + sub + "' is not recognised");
                auto alphas = field_as<std::vector<double>>(v.value("alpha", json::array()), "levels.alpha");
                auto betas = field_as<std::vector<double>>(v.value("beta", json::array()), "levels.beta");
                for (double b : betas)
                    for (double a : alphas) cfg.levels.push_back({a, b});
            } else if (v.is_array()) {
                for (const auto& pair : v) {
                    auto r = range_from(pair, k);
                    cfg.levels.push_back({r.lo, r.hi});
                }
            } else {
                throw ValidationError("config field 'levels' must be a list of pairs or an alpha/beta grid");
            }
        } else if (key == "n_cal") cfg.n_cal = field_as<std::size_t>(v, k);
        else if (key == "n_test") cfg.n_test = field_as<std::size_t>(v, k);
        else if (key == "n_trials") cfg.n_trials = field_as<std::size_t>(v, k);
        else if (key == "estimators") {
            cfg.estimators.clear();
            for (const auto& e : field_as<std::vector<std::string>>(v, k)) cfg.estimators.push_back(EstimatorConfig::parse(e));
        } else if (key == "scores") {
            cfg.scores.clear();
            for (const auto& s : field_as<std::vector<std::string>>(v, k)) cfg.scores.push_back(parse_score_kind(s));
        } else if (key == "seed") cfg.seed = field_as<std::uint64_t>(v, k);
        else if (key == "threads") cfg.threads = field_as<unsigned>(v, k);
        else if (key == "record_timing") cfg.record_timing = field_as<bool>(v, k);
        else if (key == "keep_details") cfg.keep_details = field_as<bool>(v, k);
        else throw ValidationError("config field '" + key + "' is not recognised");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string ExperimentConfig::hash() const {
    ExperimentConfig canon = *this;
    canon.threads = 1;
    return config_hash(canon.to_json());
}

const CellSummary& TrialReport::cell(const std::string& estimator, ScoreKind score, double alpha, double beta) const {
    for (const auto& c : cells)
        if (c.estimator == estimator && c.score == score && c.alpha == alpha && c.beta == beta) return c;
    throw ValidationError("no cell for " + estimator + "/" + std::string(to_string(score)));
}

// ---- running ---------------------------------------------------------------

namespace {

struct CellAccumulator {
    double precision_sum = 0.0;
    double recall_sum = 0.0;
};

struct TrialOutcome {
    std::vector<TrialRecord> records; // cell-major, one per cell
    std::vector<CellAccumulator> extra;
    std::vector<SampleDetail> details;
};

TrialOutcome run_trial(const ExperimentConfig& cfg, const Graph& g, double lambda1, std::size_t trial) {
    const std::uint64_t trial_seed = derive_seed(cfg.seed, trial);
    const std::size_t pool_size = cfg.n_cal + cfg.n_test;
    auto pool = sample_dataset(g, cfg.dataset, pool_size, derive_seed(trial_seed, stream::kPool), 1, lambda1);

    std::vector<std::size_t> perm(pool_size);
    std::iota(perm.begin(), perm.end(), 0);
    Rng split_rng(derive_seed(trial_seed, stream::kSplit));
    split_rng.shuffle(std::span<std::size_t>(perm));
    const std::span<const std::size_t> cal_idx(perm.data(), cfg.n_cal);
    const std::span<const std::size_t> test_idx(perm.data() + cfg.n_cal, cfg.n_test);

    TrialOutcome out;
    const std::uint64_t est_root = derive_seed(trial_seed, stream::kEstimator);
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
        const auto& est = cfg.estimators[e];
        const std::string label = est.label();
        const std::uint64_t est_seed = derive_seed(est_root, e);
        std::vector<ProbVector> probs;
        probs.reserve(pool_size);
        for (std::size_t i = 0; i < pool_size; ++i) probs.push_back(estimate(est, pool[i], g, derive_seed(est_seed, i)));

        for (ScoreKind kind : cfg.scores) {
            std::vector<RankedScores> ranked;
            ranked.reserve(pool_size);
            for (const auto& p : probs) ranked.emplace_back(kind, p);

            for (const auto& lv : cfg.levels) {
                const NominalLevels levels(lv.alpha, lv.beta);
                const auto start = std::chrono::steady_clock::now();
                std::vector<double> scores;
                scores.reserve(cal_idx.size());
                for (std::size_t i : cal_idx)
                    scores.push_back(calibration_score(ranked[i], probs[i], pool[i].sources, lv.beta));
                const auto model = calibrate_from_scores(scores, kind, levels);

                std::size_t included = 0;
                double size_sum = 0.0;
                CellAccumulator acc;
                for (std::size_t i : test_idx) {
                    const NodeSet set = ranked[i].at_most(model.q_hat);
                    const auto ev = evaluate_set(set, pool[i].sources, lv.beta);
                    included += ev.included ? 1 : 0;
                    size_sum += static_cast<double>(set.size());
                    acc.precision_sum += ev.precision;
                    acc.recall_sum += ev.recall;
                    if (cfg.keep_details)
                        out.details.push_back({label, kind, lv.alpha, lv.beta, trial, pool[i].id, pool[i].sources.size(),
                                               set.size(), ev.hits, ev.included});
                }
                const auto stop = std::chrono::steady_clock::now();
                TrialRecord rec;
                rec.estimator = label;
                rec.score = kind;
                rec.alpha = lv.alpha;
                rec.beta = lv.beta;
                rec.trial = trial;
                rec.inclusion_rate = static_cast<double>(included) / static_cast<double>(cfg.n_test);
                rec.mean_set_size = size_sum / static_cast<double>(cfg.n_test);
                rec.runtime_s = cfg.record_timing ? std::chrono::duration<double>(stop - start).count() : 0.0;
                out.records.push_back(std::move(rec));
                out.extra.push_back(acc);
            }
        }
    }
    return out;
}

std::optional<double> stderr_of(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return std::nullopt;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
}

} // namespace

TrialReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const Graph g = make_graph(cfg.graph, cfg.graph_seed);
    const double lambda1 = spectral_radius(g);
    cfg.dataset.validate(g.num_nodes(), lambda1);

    std::vector<TrialOutcome> outcomes(cfg.n_trials);
    parallel_for(cfg.n_trials, cfg.threads, [&](std::size_t t) { outcomes[t] = run_trial(cfg, g, lambda1, t); });

    TrialReport report;
    report.config_hash = cfg.hash();
    report.seed = cfg.seed;
    report.timed = cfg.record_timing;
    const std::size_t n_cells = outcomes.front().records.size();
    for (std::size_t c = 0; c < n_cells; ++c) {
        std::vector<double> rates, sizes;
        double precision = 0.0, recall = 0.0;
        for (std::size_t t = 0; t < cfg.n_trials; ++t) {
            const auto& rec = outcomes[t].records[c];
            report.trials.push_back(rec);
            rates.push_back(rec.inclusion_rate);
            sizes.push_back(rec.mean_set_size);
            precision += outcomes[t].extra[c].precision_sum;
            recall += outcomes[t].extra[c].recall_sum;
        }
        const auto& first = outcomes.front().records[c];
        CellSummary s;
        s.estimator = first.estimator;
        s.score = first.score;
        s.alpha = first.alpha;
        s.beta = first.beta;
        s.n_trials = cfg.n_trials;
        const double n = static_cast<double>(cfg.n_trials);
        s.inclusion_mean = std::accumulate(rates.begin(), rates.end(), 0.0) / n;
        s.set_size_mean = std::accumulate(sizes.begin(), sizes.end(), 0.0) / n;
        s.inclusion_stderr = stderr_of(rates, s.inclusion_mean);
        s.set_size_stderr = stderr_of(sizes, s.set_size_mean);
        const double evaluated = n * static_cast<double>(cfg.n_test);
        s.precision_mean = precision / evaluated;
        s.recall_mean = recall / evaluated;
        report.cells.push_back(std::move(s));
    }
    if (cfg.keep_details)
        for (auto& o : outcomes)
            report.details.insert(report.details.end(), std::make_move_iterator(o.details.begin()),
                                  std::make_move_iterator(o.details.end()));
    return report;
}

SweepAxis parse_sweep_axis(std::string_view text) {
    if (text == "alpha") return SweepAxis::Alpha;
    if (text == "beta") return SweepAxis::Beta;
    if (text == "r0") return SweepAxis::R0;
    if (text == "n_sources") return SweepAxis::NSources;
    throw ValidationError("unknown sweep axis '" + std::string(text) + "' (expected alpha, beta, r0 or n_sources)");
}

std::string_view to_string(SweepAxis axis) noexcept {
    switch (axis) {
    case SweepAxis::Alpha: return "alpha";
    case SweepAxis::Beta: return "beta";
    case SweepAxis::R0: return "r0";
    case SweepAxis::NSources: return "n_sources";
    }
    return "?";
}

namespace {

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::vector<LevelPair> replace_coordinate(const std::vector<LevelPair>& levels, bool alpha, double value) {
    std::vector<LevelPair> out;
    std::set<double> seen;
    for (const auto& l : levels) {
        double other = alpha ? l.beta : l.alpha;
        if (seen.insert(other).second) out.push_back(alpha ? LevelPair{value, other} : LevelPair{other, value});
    }
    return out;
}

} // namespace

std::vector<TrialReport> sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<RealRange>& values) {
    if (values.empty()) throw ValidationError("sweep: no axis values given");
    std::vector<TrialReport> reports;
    for (const auto& v : values) {
        ExperimentConfig point = cfg;
        std::string label = std::string(to_string(axis)) + "=";
        switch (axis) {
        case SweepAxis::Alpha:
            point.levels = replace_coordinate(cfg.levels, true, v.lo);
            label += format_number(v.lo);
            break;
        case SweepAxis::Beta:
            point.levels = replace_coordinate(cfg.levels, false, v.lo);
            label += format_number(v.lo);
            break;
        case SweepAxis::R0:
            point.dataset.params.r0 = v;
            label += "[" + format_number(v.lo) + ";" + format_number(v.hi) + "]";
            break;
        case SweepAxis::NSources:
            if (v.lo != std::floor(v.lo) || v.hi != std::floor(v.hi))
                throw ValidationError("sweep: n_sources values must be integers");
            point.dataset.source_count = {static_cast<int>(v.lo), static_cast<int>(v.hi)};
            label += "[" + format_number(v.lo) + ";" + format_number(v.hi) + "]";
            break;
        }
        auto report = run_experiment(point);
        report.label = std::move(label);
        reports.push_back(std::move(report));
    }
    return reports;
}

// ---- CSV -------------------------------------------------------------------

namespace {

void provenance_line(std::ostream& out, const std::vector<TrialReport>& reports) {
    out << "# " << kToolName << ' ' << kToolVersion;
    if (!reports.empty()) out << " config_hash=" << reports.front().config_hash << " seed=" << reports.front().seed;
    for (std::size_t i = 1; i < reports.size(); ++i) out << " config_hash[" << i << "]=" << reports[i].config_hash;
    out << '\n';
}

bool labelled(const std::vector<TrialReport>& reports) {
    return std::any_of(reports.begin(), reports.end(), [](const auto& r) { return !r.label.empty(); });
}

std::string optional_number(const std::optional<double>& x) { return x ? format_number(*x) : "NA"; }

} // namespace

void write_trials_csv(std::ostream& out, const std::vector<TrialReport>& reports) {
    provenance_line(out, reports);
    const bool with_label = labelled(reports);
    if (with_label) out << "sweep,";
    out << "estimator,score,alpha,beta,trial,inclusion_rate,mean_set_size,runtime_s\n";
    for (const auto& r : reports)
        for (const auto& t : r.trials) {
            if (with_label) out << r.label << ',';
            out << t.estimator << ',' << to_string(t.score) << ',' << format_number(t.alpha) << ','
                << format_number(t.beta) << ',' << t.trial << ',' << format_number(t.inclusion_rate) << ','
                << format_number(t.mean_set_size) << ',' << (r.timed ? format_number(t.runtime_s) : "NA") << '\n';
        }
}

void write_summary_csv(std::ostream& out, const std::vector<TrialReport>& reports) {
    provenance_line(out, reports);
    const bool with_label = labelled(reports);
    if (with_label) out << "sweep,";
    out << "estimator,score,alpha,beta,n_trials,inclusion_mean,inclusion_stderr,set_size_mean,set_size_stderr,"
           "precision_mean,recall_mean\n";
    for (const auto& r : reports)
        for (const auto& c : r.cells) {
            if (with_label) out << r.label << ',';
            out << c.estimator << ',' << to_string(c.score) << ',' << format_number(c.alpha) << ','
                << format_number(c.beta) << ',' << c.n_trials << ',' << format_number(c.inclusion_mean) << ','
                << optional_number(c.inclusion_stderr) << ',' << format_number(c.set_size_mean) << ','
                << optional_number(c.set_size_stderr) << ',' << format_number(c.precision_mean) << ','
                << format_number(c.recall_mean) << '\n';
        }
}

void write_details_csv(std::ostream& out, const std::vector<TrialReport>& reports) {
    provenance_line(out, reports);
    const bool with_label = labelled(reports);
    if (with_label) out << "sweep,";
    out << "estimator,score,alpha,beta,trial,sample_id,n_sources,set_size,hits,included\n";
    for (const auto& r : reports)
        for (const auto& d : r.details) {
            if (with_label) out << r.label << ',';
            out << d.estimator << ',' << to_string(d.score) << ',' << format_number(d.alpha) << ','
                << format_number(d.beta) << ',' << d.trial << ',' << d.sample_id << ',' << d.n_sources << ','
                << d.set_size << ',' << d.hits << ',' << (d.included ? 1 : 0) << '\n';
        }
}

} // namespace confsd
