#pragma once

#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>
#include <queue>

namespace drn {

/// Canonical organization / respondent identifier. The label doubles as the
/// stable id; labels are unique within a graph and must be nonempty.
using NodeId = std::string;

/// Undirected labeled graph. At most one edge per unordered pair, no
/// self-loops. Weights carry tie strength but all distances are hop counts.
class Graph {
public:
    Graph() = default;

    void add_node(const NodeId& v) {
        if (v.empty()) throw std::invalid_argument("node label must be nonempty");
        adj_.try_emplace(v);
    }

    /// Inserts (or re-weights) the undirected edge {u,v}. Missing endpoints
    /// are created. Self-loops are rejected.
    void add_edge(const NodeId& u, const NodeId& v, double w = 1.0) {
        if (u == v) throw std::invalid_argument("self-loop rejected: " + u);
        if (w < 0.0) throw std::invalid_argument("edge weight must be nonnegative");
        add_node(u);
        add_node(v);
        adj_[u][v] = w;
        adj_[v][u] = w;
    }

    bool has_node(const NodeId& v) const { return adj_.count(v) != 0; }

    bool has_edge(const NodeId& u, const NodeId& v) const {
        auto it = adj_.find(u);
        return it != adj_.end() && it->second.count(v) != 0;
    }

    std::optional<double> edge_weight(const NodeId& u, const NodeId& v) const {
        auto it = adj_.find(u);
        if (it == adj_.end()) return std::nullopt;
        auto jt = it->second.find(v);
        if (jt == it->second.end()) return std::nullopt;
        return jt->second;
    }

    std::size_t node_count() const { return adj_.size(); }

    std::size_t edge_count() const {
        std::size_t deg_sum = 0;
        for (const auto& [v, nbrs] : adj_) deg_sum += nbrs.size();
        return deg_sum / 2;
    }

    std::vector<NodeId> nodes() const {
        std::vector<NodeId> out;
        out.reserve(adj_.size());
        for (const auto& [v, nbrs] : adj_) out.push_back(v);
        return out;
    }

    const std::map<NodeId, double>& neighbors(const NodeId& v) const {
        auto it = adj_.find(v);
        if (it == adj_.end()) throw std::invalid_argument("unknown node: " + v);
        return it->second;
    }

    std::size_t degree(const NodeId& v) const { return neighbors(v).size(); }

    /// Edges as (u, v, w) with u < v, in lexicographic order.
    std::vector<std::tuple<NodeId, NodeId, double>> edges() const {
        std::vector<std::tuple<NodeId, NodeId, double>> out;
        for (const auto& [u, nbrs] : adj_)
            for (const auto& [v, w] : nbrs)
                if (u < v) out.emplace_back(u, v, w);
        return out;
    }

    bool operator==(const Graph& other) const { return adj_ == other.adj_; }

    /// Subgraph induced by `keep`: retained nodes plus every edge of this
    /// graph with both endpoints retained.
    Graph induced(const std::set<NodeId>& keep) const {
        Graph out;
        for (const auto& v : keep)
            if (has_node(v)) out.add_node(v);
        for (const auto& v : keep) {
            auto it = adj_.find(v);
            if (it == adj_.end()) continue;
            for (const auto& [u, w] : it->second)
                if (v < u && keep.count(u)) out.add_edge(v, u, w);
        }
        return out;
    }

private:
    std::map<NodeId, std::map<NodeId, double>> adj_;
};

/// Unweighted hop-count distances from `source` by BFS. Unreachable nodes map
/// to nullopt, never to a large number, so downstream rank statistics are
/// never fed sentinel magnitudes.
inline std::map<NodeId, std::optional<int>> geodesic_distances(const Graph& g,
                                                               const NodeId& source) {
    if (!g.has_node(source)) throw std::invalid_argument("unknown source: " + source);
    std::map<NodeId, std::optional<int>> dist;
    for (const auto& v : g.nodes()) dist[v] = std::nullopt;
    dist[source] = 0;
    std::queue<NodeId> frontier;
    frontier.push(source);
    while (!frontier.empty()) {
        NodeId v = frontier.front();
        frontier.pop();
        int d = *dist[v];
        for (const auto& [u, w] : g.neighbors(v)) {
            if (!dist[u]) {
                dist[u] = d + 1;
                frontier.push(u);
            }
        }
    }
    return dist;
}

/// Ego plus alters plus the ties among them: the subgraph induced by the
/// closed neighborhood of `ego`.
struct EgoNetwork {
    NodeId ego;
    Graph graph;

    std::size_t alter_count() const { return graph.degree(ego); }
};

inline EgoNetwork ego_network(const Graph& g, const NodeId& ego) {
    if (!g.has_node(ego)) throw std::invalid_argument("unknown ego: " + ego);
    std::set<NodeId> keep{ego};
    for (const auto& [u, w] : g.neighbors(ego)) keep.insert(u);
    return EgoNetwork{ego, g.induced(keep)};
}

// Edge-list text format: `label_u <TAB> label_v [<TAB> weight]`, one edge per
// line, `#` comment lines and blank lines ignored.

inline Graph read_edge_list(std::istream& in) {
    Graph g;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, '\t')) fields.push_back(field);
        if (fields.size() < 2 || fields.size() > 3)
            throw std::runtime_error("edge list line " + std::to_string(lineno) +
                                     ": expected 2 or 3 tab-separated fields");
        double w = 1.0;
        if (fields.size() == 3) w = std::stod(fields[2]);
        g.add_edge(fields[0], fields[1], w);
    }
    return g;
}

inline Graph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list: " + path);
    return read_edge_list(in);
}

inline void write_edge_list(const Graph& g, std::ostream& out) {
    for (const auto& [u, v, w] : g.edges()) {
        out << u << '\t' << v;
        if (w != 1.0) out << '\t' << w;
        out << '\n';
    }
}

}  // namespace drn
