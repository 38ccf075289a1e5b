#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "drn/graph.hpp"
#include "drn/rng.hpp"

namespace drn {

enum class CliqueKind { MaximalClique, NClique };

/// Result of a subgroup analysis: either the maximal cliques of a graph or
/// its maximal distance-n subgroups. Each member set is sorted, and the list
/// is sorted lexicographically.
struct CliqueSet {
    std::vector<std::vector<NodeId>> cliques;
    CliqueKind kind = CliqueKind::MaximalClique;
    int n = 1;  // distance bound, meaningful for NClique
};

namespace detail {

// Bron-Kerbosch with pivoting over bitset rows; |V| is bounded by the
// organization roster, far below any scale where this matters.
class CliqueEnumerator {
public:
    explicit CliqueEnumerator(const std::vector<std::vector<bool>>& adj) : adj_(adj) {
        n_ = adj.size();
    }

    std::vector<std::vector<int>> run() {
        std::vector<int> r, p(n_), x;
        for (std::size_t i = 0; i < n_; ++i) p[i] = static_cast<int>(i);
        expand(r, p, x);
        return std::move(found_);
    }

private:
    void expand(std::vector<int>& r, std::vector<int> p, std::vector<int> x) {
        if (p.empty() && x.empty()) {
            found_.push_back(r);
            return;
        }
        // pivot: vertex of P ∪ X with most neighbors in P
        int pivot = -1;
        std::size_t best = 0;
        for (const auto* cand : {&p, &x}) {
            for (int u : *cand) {
                std::size_t cnt = 0;
                for (int v : p)
                    if (adj_[u][v]) ++cnt;
                if (pivot == -1 || cnt > best) {
                    pivot = u;
                    best = cnt;
                }
            }
        }
        std::vector<int> candidates;
        for (int v : p)
            if (pivot == -1 || !adj_[pivot][v]) candidates.push_back(v);
        for (int v : candidates) {
            std::vector<int> p2, x2;
            for (int u : p)
                if (adj_[v][u]) p2.push_back(u);
            for (int u : x)
                if (adj_[v][u]) x2.push_back(u);
            r.push_back(v);
            expand(r, std::move(p2), std::move(x2));
            r.pop_back();
            p.erase(std::find(p.begin(), p.end(), v));
            x.push_back(v);
        }
    }

    const std::vector<std::vector<bool>>& adj_;
    std::size_t n_;
    std::vector<std::vector<int>> found_;
};

inline CliqueSet enumerate(const Graph& g, const std::vector<std::vector<bool>>& adj,
                           const std::vector<NodeId>& labels, CliqueKind kind, int n) {
    CliqueEnumerator en(adj);
    CliqueSet out;
    out.kind = kind;
    out.n = n;
    for (const auto& idx_clique : en.run()) {
        std::vector<NodeId> members;
        members.reserve(idx_clique.size());
        for (int i : idx_clique) members.push_back(labels[i]);
        std::sort(members.begin(), members.end());
        out.cliques.push_back(std::move(members));
    }
    std::sort(out.cliques.begin(), out.cliques.end());
    return out;
}

}  // namespace detail

/// Exact maximal clique enumeration; each clique sorted, list lexicographic.
inline CliqueSet maximal_cliques(const Graph& g) {
    std::vector<NodeId> labels = g.nodes();
    std::map<NodeId, int> index;
    for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = static_cast<int>(i);
    std::vector<std::vector<bool>> adj(labels.size(), std::vector<bool>(labels.size(), false));
    for (const auto& [u, v, w] : g.edges()) {
        adj[index[u]][index[v]] = true;
        adj[index[v]][index[u]] = true;
    }
    return detail::enumerate(g, adj, labels, CliqueKind::MaximalClique, 1);
}

/// Maximal vertex sets with pairwise full-graph distance <= n. These are
/// exactly the maximal cliques of the distance-n power graph, so the same
/// enumerator applies; n = 1 reduces to maximal_cliques.
inline CliqueSet n_cliques(const Graph& g, int n) {
    if (n < 1) throw std::invalid_argument("n_cliques: n must be >= 1");
    std::vector<NodeId> labels = g.nodes();
    std::vector<std::vector<bool>> adj(labels.size(), std::vector<bool>(labels.size(), false));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto dist = geodesic_distances(g, labels[i]);
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (i == j) continue;
            auto d = dist[labels[j]];
            if (d && *d <= n) adj[i][j] = true;
        }
    }
    CliqueSet out = detail::enumerate(g, adj, labels, CliqueKind::NClique, n);
    if (n == 1) out.kind = CliqueKind::MaximalClique;
    return out;
}

/// Pairwise subgroup co-membership counts; the diagonal counts the subgroups
/// containing each organization.
struct CoMembership {
    std::vector<NodeId> orgs;  // sorted index
    std::map<NodeId, std::map<NodeId, int>> matrix;

    int at(const NodeId& u, const NodeId& v) const {
        auto it = matrix.find(u);
        if (it == matrix.end()) return 0;
        auto jt = it->second.find(v);
        return jt == it->second.end() ? 0 : jt->second;
    }

    int diagonal(const NodeId& u) const { return at(u, u); }
};

inline CoMembership co_membership(const CliqueSet& cs) {
    CoMembership cm;
    std::set<NodeId> orgs;
    for (const auto& clique : cs.cliques)
        for (const auto& m : clique) orgs.insert(m);
    cm.orgs.assign(orgs.begin(), orgs.end());
    for (const auto& clique : cs.cliques)
        for (const auto& u : clique)
            for (const auto& v : clique) cm.matrix[u][v] += 1;
    return cm;
}

/// Predicted tier with the per-tier co-membership vote counts behind it.
struct TierAssignment {
    NodeId org;
    int predicted_tier = 0;
    std::map<int, int> evidence;  // tier -> summed co-membership with labeled orgs
};

/// Co-membership-weighted majority vote over labeled organizations; ties
/// break toward the smaller tier number.
inline TierAssignment predict_tier(const NodeId& org, const CoMembership& cm,
                                   const std::map<NodeId, int>& known) {
    TierAssignment out;
    out.org = org;
    out.evidence = {{1, 0}, {2, 0}, {3, 0}};
    bool any = false;
    for (const auto& [v, tier] : known) {
        if (v == org) continue;
        int c = cm.at(org, v);
        if (c > 0) {
            out.evidence[tier] += c;
            any = true;
        }
    }
    if (!any)
        throw std::runtime_error("insufficient subgroup evidence for " + org);
    out.predicted_tier = 1;
    for (int t : {2, 3})
        if (out.evidence[t] > out.evidence[out.predicted_tier]) out.predicted_tier = t;
    return out;
}

/// Uniform without-replacement sample of k clusters containing at least one
/// member of every required group, deterministic in the seed. Group
/// membership is tested against the provided group organization labels.
inline std::vector<std::vector<NodeId>> select_clusters(
    const CliqueSet& cs, const std::vector<std::set<NodeId>>& groups_required, std::size_t k,
    std::uint64_t seed) {
    std::vector<std::vector<NodeId>> eligible;
    for (const auto& clique : cs.cliques) {
        std::set<NodeId> members(clique.begin(), clique.end());
        bool ok = true;
        for (const auto& grp : groups_required) {
            bool hit = false;
            for (const auto& m : grp)
                if (members.count(m)) {
                    hit = true;
                    break;
                }
            if (!hit) {
                ok = false;
                break;
            }
        }
        if (ok) eligible.push_back(clique);
    }
    if (eligible.size() < k)
        throw std::runtime_error("select_clusters: only " + std::to_string(eligible.size()) +
                                 " eligible clusters, need " + std::to_string(k));
    Rng rng(seed);
    // partial Fisher-Yates over the lexicographically sorted eligible list
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + rng.below(eligible.size() - i);
        std::swap(eligible[i], eligible[j]);
    }
    eligible.resize(k);
    return eligible;
}

// Clique report: one clique per line, members comma separated, sorted.
inline void write_clique_report(const CliqueSet& cs, std::ostream& out) {
    out << cs.cliques.size() << " cliques found.\n";
    std::size_t i = 0;
    for (const auto& clique : cs.cliques) {
        out << ++i << ":\t";
        for (std::size_t j = 0; j < clique.size(); ++j) {
            if (j) out << ", ";
            out << clique[j];
        }
        out << '\n';
    }
}

inline void write_co_membership_csv(const CoMembership& cm, std::ostream& out) {
    out << "org";
    for (const auto& v : cm.orgs) out << ',' << v;
    out << '\n';
    for (const auto& u : cm.orgs) {
        out << u;
        for (const auto& v : cm.orgs) out << ',' << cm.at(u, v);
        out << '\n';
    }
}

}  // namespace drn
