#include "confsd/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "confsd/conformal.hpp"
#include "confsd/dataset_io.hpp"
#include "confsd/equivalence.hpp"
#include "confsd/error.hpp"
#include "confsd/estimator.hpp"
#include "confsd/experiment.hpp"
#include "confsd/parallel.hpp"

namespace confsd {

namespace {

namespace fs = std::filesystem;

double parse_real(std::string_view text, const std::string& flag) {
    double x = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc() || p != text.data() + text.size())
        throw ValidationError(flag + ": '" + std::string(text) + "' is not a number");
    return x;
}

int parse_int(std::string_view text, const std::string& flag) {
    int x = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc() || p != text.data() + text.size())
        throw ValidationError(flag + ": '" + std::string(text) + "' is not an integer");
    return x;
}

// "lo" or "lo:hi"
RealRange parse_real_range(std::string_view text, const std::string& flag) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        double x = parse_real(text, flag);
        return {x, x};
    }
    RealRange r{parse_real(text.substr(0, colon), flag), parse_real(text.substr(colon + 1), flag)};
    if (r.lo > r.hi) throw ValidationError(flag + ": range '" + std::string(text) + "' has lo > hi");
    return r;
}

IntRange parse_int_range(std::string_view text, const std::string& flag) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        int x = parse_int(text, flag);
        return {x, x};
    }
    IntRange r{parse_int(text.substr(0, colon), flag), parse_int(text.substr(colon + 1), flag)};
    if (r.lo > r.hi) throw ValidationError(flag + ": range '" + std::string(text) + "' has lo > hi");
    return r;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string provenance(std::string_view hash, std::uint64_t seed) {
    std::ostringstream s;
    s << kToolName << ' ' << kToolVersion << " config_hash=" << hash << " seed=" << seed;
    return s.str();
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write output file: " + path.string());
    return out;
}

std::string read_text(const fs::path& path, const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + what + ": " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Per-sample estimates. Sample `id` uses the same seed path as estimator 0
/// for pool index `id` inside run_experiment.
std::vector<ProbVector> estimate_all(const EstimatorConfig& est, const std::vector<LabeledSample>& samples,
                                     const Graph& g, std::uint64_t seed, unsigned threads) {
    std::unique_ptr<ProbFile> file;
    if (est.kind == EstimatorKind::File) file = std::make_unique<ProbFile>(ProbFile::load(est.prob_file));
    const std::uint64_t est_seed = derive_seed(derive_seed(seed, stream::kEstimator), 0);
    std::vector<ProbVector> probs(samples.size());
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        probs[i] = estimate(est, samples[i], g, derive_seed(est_seed, samples[i].id), file.get());
    });
    return probs;
}

Graph graph_for(const std::string& source, std::uint64_t graph_seed, std::size_t n_nodes) {
    if (source.empty()) throw ValidationError("--graph: no graph recorded in the input and none given");
    Graph g = make_graph(source, graph_seed);
    if (n_nodes != 0 && g.num_nodes() != n_nodes)
        throw ValidationError("--graph: graph has " + std::to_string(g.num_nodes()) + " nodes but the data has " +
                              std::to_string(n_nodes));
    return g;
}

std::uint64_t parse_u64(const std::string& text, const std::string& field) {
    std::uint64_t x = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc() || p != text.data() + text.size())
        throw ValidationError("model field '" + field + "' is not an unsigned integer");
    return x;
}

struct LoadedModel {
    ConformalModel model;
    std::map<std::string, std::string> extra;
    std::string hash;
};

LoadedModel load_model(const fs::path& path) {
    const std::string text = read_text(path, "model");
    std::istringstream in(text);
    LoadedModel m;
    m.model = read_model(in, &m.extra);
    m.hash = config_hash(text);
    for (const char* key : {"estimator", "estimator_seed", "graph", "graph_seed", "n_nodes"})
        if (!m.extra.count(key)) throw ValidationError(std::string("model field '") + key + "' is missing");
    return m;
}

// ---- subcommands -----------------------------------------------------------

struct SimulateOpts {
    std::string graph = "ba:200:3";
    std::uint64_t graph_seed = 1;
    std::string sigma_inf = "0.25";
    std::string r0;
    std::string sigma_rec = "0.1:0.4";
    std::string sources = "1:10";
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::string t1 = "auto";
    int snapshots = 16;
    int stride = 1;
    int horizon = 40;
    std::string out;
    unsigned threads = 1;
};

int cmd_simulate(const SimulateOpts& o, std::ostream& log) {
    DatasetSpec spec;
    spec.params.sigma_inf = parse_real_range(o.sigma_inf, "--sigma-inf");
    if (!o.r0.empty()) spec.params.r0 = parse_real_range(o.r0, "--r0");
    spec.params.sigma_rec = parse_real_range(o.sigma_rec, "--sigma-rec");
    spec.source_count = parse_int_range(o.sources, "--sources");
    if (o.t1 == "auto") {
        spec.t1.adaptive = true;
    } else {
        spec.t1.adaptive = false;
        spec.t1.fixed_t1 = parse_int(o.t1, "--t1");
    }
    spec.snapshots = o.snapshots;
    spec.stride = o.stride;
    spec.horizon = o.horizon;
    if (o.samples == 0) throw ValidationError("--samples must be >= 1");

    const Graph g = make_graph(o.graph, o.graph_seed);
    const double lambda1 = spectral_radius(g);
    spec.validate(g.num_nodes(), lambda1);

    std::ostringstream canon;
    canon << "graph=" << o.graph << ";graph_seed=" << o.graph_seed << ";sigma_inf=" << o.sigma_inf
          << ";r0=" << o.r0 << ";sigma_rec=" << o.sigma_rec << ";sources=" << o.sources << ";samples=" << o.samples
          << ";t1=" << o.t1 << ";snapshots=" << o.snapshots << ";stride=" << o.stride << ";horizon=" << o.horizon;

    Dataset data;
    data.header.graph = o.graph;
    data.header.graph_seed = o.graph_seed;
    data.header.n_nodes = g.num_nodes();
    data.header.seed = o.seed;
    data.header.config_hash = config_hash(canon.str());
    data.samples = sample_dataset(g, spec, o.samples, o.seed, o.threads, lambda1);
    save_dataset(o.out, data);
    log << "wrote " << data.samples.size() << " samples to " << o.out << '\n';
    return 0;
}

struct CalibrateOpts {
    std::string data;
    std::string score = "rec";
    double alpha = 0.1;
    double beta = 0.0;
    std::string estimator = "heuristic";
    std::uint64_t seed = 0;
    std::string graph;
    std::uint64_t graph_seed = 0;
    bool graph_seed_given = false;
    std::string out;
    unsigned threads = 1;
};

int cmd_calibrate(const CalibrateOpts& o, std::ostream& log) {
    const ScoreKind kind = parse_score_kind(o.score);
    const NominalLevels levels(o.alpha, o.beta);
    const EstimatorConfig est = EstimatorConfig::parse(o.estimator);
    const Dataset data = load_dataset(o.data);
    if (data.samples.empty()) throw ValidationError("--data: the calibration set is empty");

    const std::string graph_src = o.graph.empty() ? data.header.graph : o.graph;
    const std::uint64_t graph_seed = o.graph_seed_given ? o.graph_seed : data.header.graph_seed;
    const Graph g = graph_for(graph_src, graph_seed, data.header.n_nodes);

    const auto probs = estimate_all(est, data.samples, g, o.seed, o.threads);
    std::vector<double> scores;
    scores.reserve(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        RankedScores ranked(kind, probs[i]);
        scores.push_back(calibration_score(ranked, probs[i], data.samples[i].sources, o.beta));
    }
    const ConformalModel model = calibrate_from_scores(scores, kind, levels);

    std::map<std::string, std::string> extra{
        {"estimator", est.label()},
        {"estimator_seed", std::to_string(o.seed)},
        {"graph", graph_src},
        {"graph_seed", std::to_string(graph_seed)},
        {"n_nodes", std::to_string(g.num_nodes())},
        {"data_hash", data.header.config_hash},
    };
    std::ostringstream canon;
    canon << "data=" << data.header.config_hash << ";data_seed=" << data.header.seed << ";score=" << to_string(kind)
          << ";alpha=" << format_real(o.alpha) << ";beta=" << format_real(o.beta) << ";estimator=" << est.label()
          << ";graph=" << graph_src << ";graph_seed=" << graph_seed;
    auto out = open_output(o.out);
    write_model(out, model, extra, provenance(config_hash(canon.str()), o.seed));
    log << "q_hat=" << format_real(model.q_hat) << " n_cal=" << model.n_cal << '\n';
    return 0;
}

struct PredictOpts {
    std::string model;
    std::string sample;
    std::string graph;
    std::string out;
    unsigned threads = 1;
};

struct Predictions {
    LoadedModel model;
    Dataset data;
    std::vector<NodeSet> sets;
};

Predictions run_predictions(const std::string& model_path, const std::string& data_path,
                            const std::string& graph_override, unsigned threads) {
    Predictions p;
    p.model = load_model(model_path);
    p.data = load_dataset(data_path);
    const auto& ex = p.model.extra;
    const std::size_t n_nodes = static_cast<std::size_t>(parse_u64(ex.at("n_nodes"), "n_nodes"));
    if (p.data.header.n_nodes != 0 && p.data.header.n_nodes != n_nodes)
        throw ValidationError("data has " + std::to_string(p.data.header.n_nodes) + " nodes but the model expects " +
                              std::to_string(n_nodes));
    const Graph g = graph_for(graph_override.empty() ? ex.at("graph") : graph_override,
                              parse_u64(ex.at("graph_seed"), "graph_seed"), n_nodes);
    const EstimatorConfig est = EstimatorConfig::parse(ex.at("estimator"));
    const auto probs = estimate_all(est, p.data.samples, g, parse_u64(ex.at("estimator_seed"), "estimator_seed"),
                                    threads);
    p.sets.resize(probs.size());
    parallel_for(probs.size(), threads, [&](std::size_t i) { p.sets[i] = predict(p.model.model, probs[i]).nodes; });
    return p;
}

int cmd_predict(const PredictOpts& o, std::ostream& out, std::ostream& log) {
    const Predictions p = run_predictions(o.model, o.sample, o.graph, o.threads);
    std::ostringstream body;
    body << "# " << provenance(p.model.hash, p.data.header.seed) << '\n';
    body << "# id\tsize\tnodes\n";
    for (std::size_t i = 0; i < p.sets.size(); ++i) {
        body << p.data.samples[i].id << '\t' << p.sets[i].size() << '\t';
        for (std::size_t k = 0; k < p.sets[i].size(); ++k) body << (k ? "," : "") << p.sets[i][k];
        body << '\n';
    }
    if (o.out.empty()) {
        out << body.str();
    } else {
        auto f = open_output(o.out);
        f << body.str();
        log << "wrote " << p.sets.size() << " prediction sets to " << o.out << '\n';
    }
    return 0;
}

struct EvaluateOpts {
    std::string model;
    std::string data;
    std::string graph;
    std::string out;
    unsigned threads = 1;
};

int cmd_evaluate(const EvaluateOpts& o, std::ostream& out) {
    const Predictions p = run_predictions(o.model, o.data, o.graph, o.threads);
    if (p.sets.empty()) throw ValidationError("--data: the test set is empty");
    const double beta = p.model.model.levels.beta();
    std::size_t included = 0;
    double size_sum = 0.0, precision_sum = 0.0, recall_sum = 0.0;
    std::ostringstream rows;
    rows << "# " << provenance(p.model.hash, p.data.header.seed) << '\n';
    rows << "id,n_sources,set_size,hits,precision,recall,included\n";
    for (std::size_t i = 0; i < p.sets.size(); ++i) {
        const auto& sample = p.data.samples[i];
        const auto ev = evaluate_set(p.sets[i], sample.sources, beta);
        included += ev.included ? 1 : 0;
        size_sum += static_cast<double>(p.sets[i].size());
        precision_sum += ev.precision;
        recall_sum += ev.recall;
        rows << sample.id << ',' << sample.sources.size() << ',' << p.sets[i].size() << ',' << ev.hits << ','
             << format_real(ev.precision) << ',' << format_real(ev.recall) << ',' << (ev.included ? 1 : 0) << '\n';
    }
    const double n = static_cast<double>(p.sets.size());
    if (!o.out.empty()) {
        auto f = open_output(o.out);
        f << rows.str();
    }
    out << "n_test=" << p.sets.size() << " inclusion_rate=" << format_real(static_cast<double>(included) / n)
        << " mean_set_size=" << format_real(size_sum / n) << " precision=" << format_real(precision_sum / n)
        << " recall=" << format_real(recall_sum / n) << '\n';
    return 0;
}

struct SweepOpts {
    std::string config;
    std::string preset = "desk";
    std::string axis = "none";
    std::string values;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> n_cal;
    std::optional<std::size_t> n_test;
    std::optional<unsigned> threads;
    std::string graph;
    std::string estimators;
    std::string scores;
    bool details = false;
    bool timing = false;
};

int cmd_sweep(const SweepOpts& o, std::ostream& log) {
    ExperimentConfig base;
    if (o.preset == "desk") base = ExperimentConfig::desk_scale();
    else if (o.preset == "full") base = ExperimentConfig::full_scale();
    else throw ValidationError("--preset: expected desk or full, got '" + o.preset + "'");
    ExperimentConfig cfg = o.config.empty() ? base : ExperimentConfig::from_json(read_text(o.config, "config"), base);
    if (o.seed) cfg.seed = *o.seed;
    if (o.trials) cfg.n_trials = *o.trials;
    if (o.n_cal) cfg.n_cal = *o.n_cal;
    if (o.n_test) cfg.n_test = *o.n_test;
    if (o.threads) cfg.threads = *o.threads;
    if (!o.graph.empty()) cfg.graph = o.graph;
    if (!o.estimators.empty()) {
        cfg.estimators.clear();
        for (const auto& e : split(o.estimators, ',')) cfg.estimators.push_back(EstimatorConfig::parse(e));
    }
    if (!o.scores.empty()) {
        cfg.scores.clear();
        for (const auto& s : split(o.scores, ',')) cfg.scores.push_back(parse_score_kind(s));
    }
    if (o.details) cfg.keep_details = true;
    if (o.timing) cfg.record_timing = true;
    cfg.validate();

    std::vector<TrialReport> reports;
    if (o.axis == "none") {
        if (!o.values.empty()) throw ValidationError("--values given without --axis");
        reports.push_back(run_experiment(cfg));
    } else {
        const SweepAxis axis = parse_sweep_axis(o.axis);
        if (o.values.empty()) throw ValidationError("--values: required with --axis");
        std::vector<RealRange> values;
        for (const auto& v : split(o.values, ',')) values.push_back(parse_real_range(v, "--values"));
        reports = sweep(cfg, axis, values);
    }

    const fs::path dir(o.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("--out-dir: cannot create " + dir.string());
    {
        auto f = open_output(dir / "config.json");
        f << cfg.to_json() << '\n';
    }
    {
        auto f = open_output(dir / "trials.csv");
        write_trials_csv(f, reports);
    }
    {
        auto f = open_output(dir / "summary.csv");
        write_summary_csv(f, reports);
    }
    if (cfg.keep_details) {
        auto f = open_output(dir / "details.csv");
        write_details_csv(f, reports);
    }
    log << "wrote " << reports.size() << " report(s) to " << dir.string() << '\n';
    return 0;
}

struct OracleOpts {
    std::size_t n = 10;
    std::size_t trials = 200;
    std::uint64_t seed = 0;
};

int cmd_oracle_check(const OracleOpts& o, std::ostream& out) {
    if (o.n < 1 || o.n > kMaxBruteForceNodes)
        throw ValidationError("--n must lie in [1, " + std::to_string(kMaxBruteForceNodes) + "]");
    const auto report = check_equivalences(o.n, o.trials, o.seed);
    print_report(out, report);
    return report.ok() ? 0 : 2;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Conformal multi-source detection on networks", std::string(kToolName)};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

    SimulateOpts sim;
    auto* s = app.add_subcommand("simulate", "Simulate SIR/SI cascades and write a labelled dataset");
    s->add_option("--graph", sim.graph, "Graph: complete:N, er:N:P, ba:N:M or file:PATH")->capture_default_str();
    s->add_option("--graph-seed", sim.graph_seed, "Seed of the graph generator")->capture_default_str();
    s->add_option("--sigma-inf", sim.sigma_inf, "Infection probability, value or lo:hi (ignored with --r0)")
        ->capture_default_str();
    s->add_option("--r0", sim.r0, "Reproduction number lo[:hi]; sets sigma_inf = r0 sigma_rec / lambda1");
    s->add_option("--sigma-rec", sim.sigma_rec, "Recovery probability, value or lo:hi (0 gives SI)")
        ->capture_default_str();
    s->add_option("--sources", sim.sources, "Number of sources, k or lo:hi")->capture_default_str();
    s->add_option("--samples", sim.samples, "Number of samples")->required();
    s->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
    s->add_option("--t1", sim.t1, "First observation time: auto or an integer")->capture_default_str();
    s->add_option("--snapshots", sim.snapshots, "Snapshots per sample")->capture_default_str();
    s->add_option("--stride", sim.stride, "Steps between snapshots")->capture_default_str();
    s->add_option("--horizon", sim.horizon, "Simulation horizon")->capture_default_str();
    s->add_option("--out", sim.out, "Output dataset (.jsonl, or .bin for binary)")->required();
    s->add_option("--threads", sim.threads, "Worker threads (results do not depend on it)")->capture_default_str();

    CalibrateOpts cal;
    auto* c = app.add_subcommand("calibrate", "Calibrate a conformal threshold on a labelled dataset");
    c->add_option("--data", cal.data, "Calibration dataset")->required();
    c->add_option("--score", cal.score, "Score kind: pre, rec or min")->capture_default_str();
    c->add_option("--alpha", cal.alpha, "Miscoverage level in (0,1)")->capture_default_str();
    c->add_option("--beta", cal.beta, "Allowed missed fraction of sources in [0,1)")->capture_default_str();
    c->add_option("--estimator", cal.estimator, "heuristic, mc[:K], oracle[:NOISE] or file:PATH")
        ->capture_default_str();
    c->add_option("--seed", cal.seed, "Seed of randomized estimators")->capture_default_str();
    c->add_option("--graph", cal.graph, "Graph override (default: the one recorded in the dataset)");
    c->add_option("--graph-seed", cal.graph_seed, "Graph seed override");
    c->add_option("--out", cal.out, "Output model file")->required();
    c->add_option("--threads", cal.threads, "Worker threads")->capture_default_str();

    PredictOpts pred;
    auto* p = app.add_subcommand("predict", "Write prediction sets for every sample of a dataset");
    p->add_option("--model", pred.model, "Model file from calibrate")->required();
    p->add_option("--sample", pred.sample, "Dataset with the observations to predict on")->required();
    p->add_option("--graph", pred.graph, "Graph override (default: the one recorded in the model)");
    p->add_option("--out", pred.out, "Set file (default: stdout); rows are id, size, comma-separated nodes");
    p->add_option("--threads", pred.threads, "Worker threads")->capture_default_str();

    EvaluateOpts ev;
    auto* e = app.add_subcommand("evaluate", "Measure inclusion rate and set size on a labelled test set");
    e->add_option("--model", ev.model, "Model file from calibrate")->required();
    e->add_option("--data", ev.data, "Labelled test dataset")->required();
    e->add_option("--graph", ev.graph, "Graph override (default: the one recorded in the model)");
    e->add_option("--out", ev.out, "Optional per-sample CSV");
    e->add_option("--threads", ev.threads, "Worker threads")->capture_default_str();

    SweepOpts sw;
    std::uint64_t sw_seed = 0;
    std::size_t sw_trials = 0, sw_cal = 0, sw_test = 0;
    unsigned sw_threads = 1;
    auto* w = app.add_subcommand("sweep", "Run repeated random-split experiments, optionally along an axis");
    w->add_option("--config", sw.config, "JSON experiment config (keys override the preset)");
    w->add_option("--preset", sw.preset, "Base configuration: desk or full")->capture_default_str();
    w->add_option("--axis", sw.axis, "none, alpha, beta, r0 or n_sources")->capture_default_str();
    w->add_option("--values", sw.values, "Comma-separated axis values; ranges as lo:hi");
    w->add_option("--out-dir", sw.out_dir, "Directory for config.json, trials.csv, summary.csv")
        ->capture_default_str();
    auto* o_seed = w->add_option("--seed", sw_seed, "Master seed override");
    auto* o_trials = w->add_option("--trials", sw_trials, "Number of trials override");
    auto* o_cal = w->add_option("--n-cal", sw_cal, "Calibration size override");
    auto* o_test = w->add_option("--n-test", sw_test, "Test size override");
    auto* o_threads = w->add_option("--threads", sw_threads, "Worker threads");
    w->add_option("--graph", sw.graph, "Graph override");
    w->add_option("--estimators", sw.estimators, "Comma-separated estimators override");
    w->add_option("--scores", sw.scores, "Comma-separated score kinds override");
    w->add_flag("--details", sw.details, "Also write details.csv with one row per test sample");
    w->add_flag("--timing", sw.timing, "Record calibrate+predict wall time in trials.csv");

    OracleOpts orc;
    auto* q = app.add_subcommand("oracle-check", "Run the exact set-equivalence checks on random small instances");
    q->add_option("--n", orc.n, "Maximum number of nodes (<= 16)")->capture_default_str();
    q->add_option("--trials", orc.trials, "Number of random instances")->capture_default_str();
    q->add_option("--seed", orc.seed, "Seed")->capture_default_str();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        if (!rev.empty()) rev.pop_back(); // program name
        app.parse(rev);
    } catch (const CLI::ParseError& ex) {
        if (ex.get_exit_code() == 0) {
            app.exit(ex, out, err);
            return 0;
        }
        err << kToolName << ": error: " << ex.what() << '\n';
        return 1;
    }

    try {
        if (s->parsed()) return cmd_simulate(sim, err);
        if (c->parsed()) {
            cal.graph_seed_given = c->get_option("--graph-seed")->count() > 0;
            return cmd_calibrate(cal, err);
        }
        if (p->parsed()) return cmd_predict(pred, out, err);
        if (e->parsed()) return cmd_evaluate(ev, out);
        if (w->parsed()) {
            if (o_seed->count()) sw.seed = sw_seed;
            if (o_trials->count()) sw.trials = sw_trials;
            if (o_cal->count()) sw.n_cal = sw_cal;
            if (o_test->count()) sw.n_test = sw_test;
            if (o_threads->count()) sw.threads = sw_threads;
            return cmd_sweep(sw, err);
        }
        if (q->parsed()) return cmd_oracle_check(orc, out);
    } catch (const ValidationError& ex) {
        err << kToolName << ": error: " << ex.what() << '\n';
        return 1;
    } catch (const std::exception& ex) {
        err << kToolName << ": runtime error: " << ex.what() << '\n';
        return 2;
    }
    return 1;
}

} // namespace confsd
