#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "confsd/cli.hpp"
#include "confsd/conformal.hpp"
#include "confsd/diffusion.hpp"
#include "confsd/equivalence.hpp"
#include "confsd/estimator.hpp"
#include "confsd/experiment.hpp"
#include "confsd/graph.hpp"

namespace py = pybind11;
using namespace confsd;

namespace {

std::vector<std::string> snapshot_strings(const SnapshotMatrix& x) {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < x.num_snapshots(); ++j) {
        std::string col;
        for (auto s : x.column(j)) col.push_back(status_char(s));
        out.push_back(std::move(col));
    }
    return out;
}

SnapshotMatrix snapshots_from(const std::vector<int>& times, const std::vector<std::string>& columns) {
    if (columns.empty()) throw ValidationError("need at least one snapshot");
    std::vector<Status> data;
    for (const auto& col : columns) {
        if (col.size() != columns.front().size()) throw ValidationError("snapshot strings differ in length");
        for (char c : col) data.push_back(status_from_char(c));
    }
    return SnapshotMatrix(columns.front().size(), times, std::move(data));
}

std::vector<double> values(const ProbVector& p) { return {p.values().begin(), p.values().end()}; }

py::dict summary_dict(const CellSummary& c) {
    py::dict d;
    d["estimator"] = c.estimator;
    d["score"] = std::string(to_string(c.score));
    d["alpha"] = c.alpha;
    d["beta"] = c.beta;
    d["n_trials"] = c.n_trials;
    d["inclusion_mean"] = c.inclusion_mean;
    d["inclusion_stderr"] = c.inclusion_stderr ? py::cast(*c.inclusion_stderr) : py::none();
    d["set_size_mean"] = c.set_size_mean;
    d["set_size_stderr"] = c.set_size_stderr ? py::cast(*c.set_size_stderr) : py::none();
    d["precision_mean"] = c.precision_mean;
    d["recall_mean"] = c.recall_mean;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Conformal multi-source detection on networks";
    m.attr("__version__") = kToolVersion;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    py::class_<Graph>(m, "Graph")
        .def_static(
            "from_edges",
            [](std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& pairs) {
                std::vector<Edge> edges;
                for (auto [u, v] : pairs) edges.push_back({u, v});
                return Graph::from_edges(n, edges);
            },
            py::arg("n_nodes"), py::arg("edges"))
        .def_property_readonly("num_nodes", &Graph::num_nodes)
        .def_property_readonly("num_edges", &Graph::num_edges)
        .def("neighbors",
             [](const Graph& g, NodeId v) {
                 if (!g.contains(v)) throw ValidationError("node out of range");
                 auto nb = g.neighbors(v);
                 return std::vector<NodeId>(nb.begin(), nb.end());
             })
        .def("edges", [](const Graph& g) {
            std::vector<std::pair<NodeId, NodeId>> out;
            for (auto e : g.edges()) out.emplace_back(e.u, e.v);
            return out;
        });

    m.def("make_graph", [](const std::string& spec, std::uint64_t seed) { return make_graph(spec, seed); },
          py::arg("spec"), py::arg("seed") = 1, "Graph from 'complete:N', 'er:N:P', 'ba:N:M' or 'file:PATH'.");
    m.def("spectral_radius", [](const Graph& g) { return spectral_radius(g); });

    py::class_<LabeledSample>(m, "Sample")
        .def_readonly("id", &LabeledSample::id)
        .def_readonly("sources", &LabeledSample::sources)
        .def_readonly("sigma_inf", &LabeledSample::sigma_inf)
        .def_readonly("sigma_rec", &LabeledSample::sigma_rec)
        .def_readonly("r0", &LabeledSample::r0)
        .def_property_readonly("times", [](const LabeledSample& s) { return s.snapshots.times(); })
        .def_property_readonly("snapshots", [](const LabeledSample& s) { return snapshot_strings(s.snapshots); });

    m.def(
        "simulate_dataset",
        [](const Graph& g, std::size_t n_samples, std::uint64_t seed, std::optional<std::pair<double, double>> r0,
           std::pair<double, double> sigma_inf, std::pair<double, double> sigma_rec, std::pair<int, int> sources,
           unsigned threads) {
            DatasetSpec spec;
            if (r0) spec.params.r0 = RealRange{r0->first, r0->second};
            spec.params.sigma_inf = {sigma_inf.first, sigma_inf.second};
            spec.params.sigma_rec = {sigma_rec.first, sigma_rec.second};
            spec.source_count = {sources.first, sources.second};
            return sample_dataset(g, spec, n_samples, seed, threads);
        },
        py::arg("graph"), py::arg("n_samples"), py::arg("seed") = 0, py::arg("r0") = std::nullopt,
        py::arg("sigma_inf") = std::pair{0.25, 0.25}, py::arg("sigma_rec") = std::pair{0.1, 0.4},
        py::arg("sources") = std::pair{1, 10}, py::arg("threads") = 1);

    m.def(
        "estimate_heuristic",
        [](const std::vector<int>& times, const std::vector<std::string>& snapshots, const Graph& g) {
            return values(estimate_heuristic(snapshots_from(times, snapshots), g));
        },
        py::arg("times"), py::arg("snapshots"), py::arg("graph"));
    m.def(
        "estimate",
        [](const std::string& estimator, const LabeledSample& s, const Graph& g, std::uint64_t seed) {
            return values(estimate(EstimatorConfig::parse(estimator), s, g, seed));
        },
        py::arg("estimator"), py::arg("sample"), py::arg("graph"), py::arg("seed") = 0,
        "estimator: 'heuristic', 'mc:K' or 'oracle:NOISE'");

    m.def("gamma", [](const std::vector<double>& pi, const NodeSet& u) { return gamma(ProbVector(pi), u); });
    m.def("score", [](const std::string& kind, const std::vector<double>& pi, const NodeSet& u) {
        return score(parse_score_kind(kind), ProbVector(pi), u);
    });
    m.def("shrink", [](const std::vector<double>& pi, const NodeSet& y, double beta) {
        return shrink(ProbVector(pi), y, beta);
    });
    m.def("finite_sample_quantile",
          [](const std::vector<double>& values, double alpha) { return finite_sample_quantile(values, alpha); });

    py::class_<ConformalModel>(m, "ConformalModel")
        .def_readonly("q_hat", &ConformalModel::q_hat)
        .def_readonly("n_cal", &ConformalModel::n_cal)
        .def_property_readonly("score", [](const ConformalModel& c) { return std::string(to_string(c.score)); })
        .def_property_readonly("alpha", [](const ConformalModel& c) { return c.levels.alpha(); })
        .def_property_readonly("beta", [](const ConformalModel& c) { return c.levels.beta(); })
        .def("predict", [](const ConformalModel& c, const std::vector<double>& pi) {
            return predict(c, ProbVector(pi)).nodes;
        });

    auto to_samples = [](const std::vector<std::vector<double>>& probs, const std::vector<NodeSet>& sources) {
        if (probs.size() != sources.size()) throw ValidationError("probs and sources differ in length");
        std::vector<CalibrationSample> out;
        for (std::size_t i = 0; i < probs.size(); ++i) out.push_back({ProbVector(probs[i]), sources[i]});
        return out;
    };
    m.def(
        "calibrate",
        [to_samples](const std::vector<std::vector<double>>& probs, const std::vector<NodeSet>& sources,
                     const std::string& kind, double alpha, double beta) {
            return calibrate(to_samples(probs, sources), parse_score_kind(kind), NominalLevels(alpha, beta));
        },
        py::arg("probs"), py::arg("sources"), py::arg("score") = "rec", py::arg("alpha") = 0.1,
        py::arg("beta") = 0.0);
    m.def(
        "crc_predict",
        [to_samples](const std::vector<std::vector<double>>& probs, const std::vector<NodeSet>& sources, double alpha,
                     double beta, const std::vector<double>& pi) {
            auto t = crc_calibrate(to_samples(probs, sources), NominalLevels(alpha, beta));
            return py::make_tuple(t.lambda, crc_predict(t, ProbVector(pi)));
        },
        py::arg("probs"), py::arg("sources"), py::arg("alpha"), py::arg("beta"), py::arg("pi"),
        "Returns (lambda_hat, prediction set).");
    m.def("cqioc_bruteforce", [](const std::vector<double>& pi, double q_hat, const std::string& kind) {
        return cqioc_bruteforce(ProbVector(pi), q_hat, parse_score_kind(kind));
    });
    m.def(
        "evaluate_set",
        [](const NodeSet& c, const NodeSet& y, double beta) {
            auto e = evaluate_set(c, y, beta);
            py::dict d;
            d["precision"] = e.precision;
            d["recall"] = e.recall;
            d["included"] = e.included;
            d["hits"] = e.hits;
            return d;
        },
        py::arg("prediction"), py::arg("sources"), py::arg("beta") = 0.0);

    m.def(
        "check_equivalences",
        [](std::size_t max_nodes, std::size_t trials, std::uint64_t seed) {
            auto r = check_equivalences(max_nodes, trials, seed);
            std::ostringstream out;
            print_report(out, r);
            return py::make_tuple(r.ok(), out.str());
        },
        py::arg("max_nodes") = 10, py::arg("trials") = 200, py::arg("seed") = 0);

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            auto cfg = ExperimentConfig::from_json(config_json);
            TrialReport r;
            {
                py::gil_scoped_release release;
                r = run_experiment(cfg);
            }
            py::list cells;
            for (const auto& c : r.cells) cells.append(summary_dict(c));
            return cells;
        },
        py::arg("config_json") = "{}",
        "Runs the repeated-split experiment; keys of the JSON override the desk-scale preset.");

    m.def(
        "cli",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> full{"confsd"};
            full.insert(full.end(), args.begin(), args.end());
            std::ostringstream out, err;
            int code = run_cli(full, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        "Runs a confsd subcommand in-process; returns (exit_code, stdout, stderr).");
}
