#include "confsd/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "confsd/rng.hpp"

namespace confsd {

Graph Graph::from_edges(std::size_t n_nodes, std::span<const Edge> edges, std::size_t* dropped) {
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (const auto& e : edges) {
        if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n_nodes ||
            static_cast<std::size_t>(e.v) >= n_nodes)
            throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                  ") outside node range [0," + std::to_string(n_nodes) + ")");
        if (e.u == e.v) continue;
        canon.push_back(e.u < e.v ? e : Edge{e.v, e.u});
    }
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
    if (dropped) *dropped = edges.size() - canon.size();

    Graph g;
    g.offsets_.assign(n_nodes + 1, 0);
    for (const auto& e : canon) {
        ++g.offsets_[static_cast<std::size_t>(e.u) + 1];
        ++g.offsets_[static_cast<std::size_t>(e.v) + 1];
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    g.adjacency_.resize(2 * canon.size());
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& e : canon) {
        g.adjacency_[fill[static_cast<std::size_t>(e.u)]++] = e.v;
        g.adjacency_[fill[static_cast<std::size_t>(e.v)]++] = e.u;
    }
    for (std::size_t v = 0; v < n_nodes; ++v)
        std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
                  g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]));
    return g;
}

std::size_t Graph::max_degree() const {
    std::size_t best = 0;
    for (std::size_t v = 0; v < num_nodes(); ++v)
        best = std::max(best, offsets_[v + 1] - offsets_[v]);
    return best;
}

double Graph::average_degree() const {
    return num_nodes() == 0 ? 0.0
                            : static_cast<double>(adjacency_.size()) / static_cast<double>(num_nodes());
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    if (!contains(u) || !contains(v)) return false;
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (std::size_t u = 0; u < num_nodes(); ++u)
        for (NodeId v : neighbors(static_cast<NodeId>(u)))
            if (static_cast<NodeId>(u) < v) out.push_back({static_cast<NodeId>(u), v});
    return out;
}

// ---- edge-list files -------------------------------------------------------

namespace {

struct RawEdgeList {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    std::size_t declared_nodes = 0;
    bool has_declared = false;
};

std::string_view trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::uint64_t parse_id(std::string_view token, std::size_t line) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError("expected a non-negative integer node id, got '" + std::string(token) + "'",
                         line);
    return value;
}

RawEdgeList read_raw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open edge list: " + path.string());
    RawEdgeList raw;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = trim(line);
        if (body.empty()) continue;
        if (body.front() == '#') {
            auto rest = trim(body.substr(1));
            constexpr std::string_view key = "nodes:";
            if (rest.starts_with(key)) {
                raw.declared_nodes = parse_id(trim(rest.substr(key.size())), lineno);
                raw.has_declared = true;
            }
            continue;
        }
        std::istringstream fields{std::string(body)};
        std::string a, b, extra;
        if (!(fields >> a >> b) || (fields >> extra))
            throw ParseError("expected exactly two node ids", lineno);
        raw.pairs.emplace_back(parse_id(a, lineno), parse_id(b, lineno));
    }
    if (raw.pairs.empty() && !raw.has_declared)
        throw ValidationError("edge list is empty: " + path.string());
    return raw;
}

constexpr std::uint64_t kMaxNodes = 1ULL << 30;

} // namespace

EdgeListLoad load_edge_list(const std::filesystem::path& path) {
    auto raw = read_raw(path);
    std::uint64_t n = 0;
    for (auto [u, v] : raw.pairs) n = std::max({n, u + 1, v + 1});
    if (raw.has_declared) {
        if (raw.declared_nodes < n)
            throw ValidationError("header declares " + std::to_string(raw.declared_nodes) +
                                  " nodes but ids reach " + std::to_string(n - 1));
        n = raw.declared_nodes;
    }
    if (n > kMaxNodes) throw ValidationError("node id too large for dense indexing; use remapping");
    std::vector<Edge> edges;
    edges.reserve(raw.pairs.size());
    for (auto [u, v] : raw.pairs) edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    EdgeListLoad out;
    out.graph = Graph::from_edges(static_cast<std::size_t>(n), edges, &out.dropped);
    return out;
}

EdgeListLoad load_edge_list_remapped(const std::filesystem::path& path,
                                     const std::filesystem::path& id_map_path) {
    auto raw = read_raw(path);
    std::unordered_map<std::uint64_t, NodeId> dense;
    std::vector<std::uint64_t> original;
    auto id_of = [&](std::uint64_t x) {
        auto [it, inserted] = dense.try_emplace(x, static_cast<NodeId>(original.size()));
        if (inserted) original.push_back(x);
        return it->second;
    };
    std::vector<Edge> edges;
    edges.reserve(raw.pairs.size());
    for (auto [u, v] : raw.pairs) {
        NodeId a = id_of(u);
        NodeId b = id_of(v);
        edges.push_back({a, b});
    }
    std::ofstream map_out(id_map_path);
    if (!map_out) throw Error("cannot write id map: " + id_map_path.string());
    map_out << "# original_id dense_id\n";
    for (std::size_t i = 0; i < original.size(); ++i) map_out << original[i] << ' ' << i << '\n';

    EdgeListLoad out;
    out.graph = Graph::from_edges(original.size(), edges, &out.dropped);
    return out;
}

void save_edge_list(const Graph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write edge list: " + path.string());
    out << "# nodes: " << g.num_nodes() << '\n';
    for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

// ---- generators ------------------------------------------------------------

namespace {

void check(const Complete& model) {
    if (model.n < 2) throw ValidationError("complete graph needs n >= 2");
}

void check(const ErdosRenyi& model) {
    if (model.n < 2) throw ValidationError("erdos-renyi graph needs n >= 2");
    if (!(model.p > 0.0 && model.p <= 1.0)) throw ValidationError("erdos-renyi p must be in (0,1]");
}

void check(const BarabasiAlbert& model) {
    if (model.n < 2) throw ValidationError("barabasi-albert graph needs n >= 2");
    if (model.m < 1 || model.m >= model.n) throw ValidationError("barabasi-albert needs 1 <= m < n");
}

Graph generate(const Complete& model, std::uint64_t) {
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < model.n; ++u)
        for (std::size_t v = u + 1; v < model.n; ++v)
            edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    return Graph::from_edges(model.n, edges);
}

Graph generate(const ErdosRenyi& model, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < model.n; ++u)
        for (std::size_t v = u + 1; v < model.n; ++v)
            if (rng.bernoulli(model.p)) edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    return Graph::from_edges(model.n, edges);
}

Graph generate(const BarabasiAlbert& model, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Edge> edges;
    // Every edge endpoint appears once here, so a uniform pick is a
    // degree-proportional pick.
    std::vector<NodeId> endpoints;
    for (std::size_t u = 0; u < model.m; ++u)
        for (std::size_t v = u + 1; v < model.m; ++v) {
            edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
            endpoints.push_back(static_cast<NodeId>(u));
            endpoints.push_back(static_cast<NodeId>(v));
        }
    std::vector<NodeId> targets;
    for (std::size_t node = model.m; node < model.n; ++node) {
        targets.clear();
        while (targets.size() < model.m) {
            // With m == 1 the seed clique has no edges; fall back to uniform.
            NodeId t = endpoints.empty()
                           ? static_cast<NodeId>(rng.below(node))
                           : endpoints[rng.below(endpoints.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
        }
        for (NodeId t : targets) {
            edges.push_back({t, static_cast<NodeId>(node)});
            endpoints.push_back(t);
            endpoints.push_back(static_cast<NodeId>(node));
        }
    }
    return Graph::from_edges(model.n, edges);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::size_t to_count(std::string_view s, std::string_view spec) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ValidationError("bad integer '" + std::string(s) + "' in graph spec '" + std::string(spec) + "'");
    return v;
}

double to_real(std::string_view s, std::string_view spec) {
    try {
        std::size_t used = 0;
        double v = std::stod(std::string(s), &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("bad number '" + std::string(s) + "' in graph spec '" + std::string(spec) + "'");
}

} // namespace

Graph generate_graph(const GraphModel& model, std::uint64_t seed) {
    return std::visit(
        [seed](const auto& m) {
            check(m);
            return generate(m, seed);
        },
        model);
}

GraphModel parse_graph_model(std::string_view spec) {
    auto parts = split(spec, ':');
    const auto& kind = parts[0];
    auto checked = [](auto model) -> GraphModel {
        check(model);
        return model;
    };
    if (kind == "complete" && parts.size() == 2) return checked(Complete{to_count(parts[1], spec)});
    if ((kind == "er" || kind == "erdos_renyi") && parts.size() == 3)
        return checked(ErdosRenyi{to_count(parts[1], spec), to_real(parts[2], spec)});
    if ((kind == "ba" || kind == "barabasi_albert") && parts.size() == 3)
        return checked(BarabasiAlbert{to_count(parts[1], spec), to_count(parts[2], spec)});
    throw ValidationError("unknown graph spec '" + std::string(spec) +
                          "' (expected complete:N, er:N:P, ba:N:M or file:PATH)");
}

std::string to_string(const GraphModel& model) {
    struct Visitor {
        std::string operator()(const Complete& m) const { return "complete:" + std::to_string(m.n); }
        std::string operator()(const ErdosRenyi& m) const {
            std::ostringstream os;
            os.precision(17);
            os << "er:" << m.n << ':' << m.p;
            return os.str();
        }
        std::string operator()(const BarabasiAlbert& m) const {
            return "ba:" + std::to_string(m.n) + ':' + std::to_string(m.m);
        }
    };
    return std::visit(Visitor{}, model);
}

Graph make_graph(std::string_view source, std::uint64_t seed) {
    constexpr std::string_view file_prefix = "file:";
    if (source.starts_with(file_prefix))
        return load_edge_list(std::filesystem::path(std::string(source.substr(file_prefix.size())))).graph;
    return generate_graph(parse_graph_model(source), seed);
}

// ---- spectrum --------------------------------------------------------------

ConvergenceError::ConvergenceError(double estimate, std::vector<double> last_iterate)
    : Error("power iteration did not converge (last estimate " + std::to_string(estimate) + ")"),
      estimate_(estimate),
      last_iterate_(std::move(last_iterate)) {}

double spectral_radius(const Graph& g, SpectralOptions options) {
    const std::size_t n = g.num_nodes();
    if (n == 0) throw ValidationError("spectral_radius: empty graph");
    if (!(options.tol > 0.0)) throw ValidationError("spectral_radius: tol must be positive");

    // Shifting by I makes lambda_1 + 1 strictly dominant even on bipartite
    // graphs, where -lambda_1 is also an eigenvalue of A.
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (std::size_t v = 0; v < n; ++v) {
            double acc = x[v];
            for (NodeId u : g.neighbors(static_cast<NodeId>(v))) acc += x[static_cast<std::size_t>(u)];
            y[v] = acc;
        }
    };
    auto norm = [](const std::vector<double>& x) {
        double s = 0.0;
        for (double xi : x) s += xi * xi;
        return std::sqrt(s);
    };

    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> y(n);
    double rho = 0.0;
    for (int iter = 0; iter < options.max_iter; ++iter) {
        apply(x, y);
        rho = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
        double residual = 0.0;
        for (std::size_t v = 0; v < n; ++v) residual += (y[v] - rho * x[v]) * (y[v] - rho * x[v]);
        if (std::sqrt(residual) <= options.tol) return rho - 1.0;
        double ny = norm(y);
        for (std::size_t v = 0; v < n; ++v) x[v] = y[v] / ny;
    }
    throw ConvergenceError(rho - 1.0, std::move(x));
}

} // namespace confsd
