#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "confsd/error.hpp"

namespace confsd {

using NodeId = std::int32_t;

struct Edge {
    NodeId u = 0;
    NodeId v = 0;
    auto operator<=>(const Edge&) const = default;
};

/// Undirected simple graph with dense 0-based node ids, stored as CSR with
/// ascending neighbor lists. Immutable after construction.
class Graph {
public:
    Graph() = default;

    /// Builds a graph from an arbitrary edge list. Self-loops and repeated
    /// edges (in either orientation) are dropped; `dropped`, when given,
    /// receives how many input pairs were discarded.
    static Graph from_edges(std::size_t n_nodes, std::span<const Edge> edges,
                            std::size_t* dropped = nullptr);

    std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t num_edges() const noexcept { return adjacency_.size() / 2; }

    std::span<const NodeId> neighbors(NodeId v) const {
        auto b = offsets_[static_cast<std::size_t>(v)];
        auto e = offsets_[static_cast<std::size_t>(v) + 1];
        return {adjacency_.data() + b, e - b};
    }
    std::size_t degree(NodeId v) const { return neighbors(v).size(); }
    std::size_t max_degree() const;
    double average_degree() const;
    bool has_edge(NodeId u, NodeId v) const;
    bool contains(NodeId v) const noexcept {
        return v >= 0 && static_cast<std::size_t>(v) < num_nodes();
    }

    /// Edges with u < v, in lexicographic order.
    std::vector<Edge> edges() const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> adjacency_;
};

// ---- edge-list files -------------------------------------------------------

struct EdgeListLoad {
    Graph graph;
    std::size_t dropped = 0; ///< self-loops and duplicate pairs discarded
};

/// Reads "u v" pairs, one per line. Lines starting with '#' are comments,
/// except "# nodes: N" which fixes the node count (otherwise 1 + max id).
EdgeListLoad load_edge_list(const std::filesystem::path& path);

/// Same format, but ids may be sparse or arbitrary non-negative integers.
/// They are remapped to dense ids in order of first appearance and the
/// "original_id dense_id" table is written to `id_map_path`.
EdgeListLoad load_edge_list_remapped(const std::filesystem::path& path,
                                     const std::filesystem::path& id_map_path);

void save_edge_list(const Graph& g, const std::filesystem::path& path);

// ---- generators ------------------------------------------------------------

struct ErdosRenyi {
    std::size_t n = 0;
    double p = 0.0;
};

/// Starts from a clique on m nodes; every later node attaches to m distinct
/// existing nodes chosen proportionally to degree. Edge count is
/// m(m-1)/2 + m(n-m).
struct BarabasiAlbert {
    std::size_t n = 0;
    std::size_t m = 0;
};

struct Complete {
    std::size_t n = 0;
};

using GraphModel = std::variant<ErdosRenyi, BarabasiAlbert, Complete>;

Graph generate_graph(const GraphModel& model, std::uint64_t seed);

/// "complete:N", "er:N:P", "ba:N:M".
GraphModel parse_graph_model(std::string_view spec);
std::string to_string(const GraphModel& model);

/// A graph given either as a generator spec or as "file:<path>".
Graph make_graph(std::string_view source, std::uint64_t seed);

// ---- spectrum --------------------------------------------------------------

struct SpectralOptions {
    double tol = 1e-9;
    int max_iter = 10000;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(double estimate, std::vector<double> last_iterate);

    double estimate() const noexcept { return estimate_; }
    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

private:
    double estimate_;
    std::vector<double> last_iterate_;
};

/// Largest adjacency eigenvalue by power iteration on A + I from the all-ones
/// vector. Stops once the eigen-residual ||Ax - rho x|| drops below tol, which
/// bounds the distance from rho to the spectrum by tol.
double spectral_radius(const Graph& g, SpectralOptions options = {});

} // namespace confsd
