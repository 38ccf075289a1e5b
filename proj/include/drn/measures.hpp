#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "drn/graph.hpp"
#include "drn/survey.hpp"

namespace drn {

/// The three independent connectedness scores of one respondent.
struct ConnectednessProfile {
    int degree = 0;
    double ego_betweenness = 0.0;
    std::optional<double> tie_strength;  // [0,5]
};

/// The three dependent coordination scores of one respondent.
struct CoordinationProfile {
    std::optional<int> readiness;   // 1..4, larger = more ready
    std::optional<double> quality;  // [2,4], mean usefulness over used sources
    int accessibility = 0;          // 0..12, count of sources used
};

inline int degree_centrality(const EgoNetwork& e) {
    return static_cast<int>(e.graph.degree(e.ego));
}

/// Freeman betweenness of the ego inside its own ego network: over unordered
/// alter pairs, the fraction of shortest paths passing through ego. Alters
/// adjacent to each other contribute nothing; in a pure star every pair
/// contributes 1.
inline double ego_betweenness(const EgoNetwork& e) {
    std::vector<NodeId> alters;
    for (const auto& [v, w] : e.graph.neighbors(e.ego)) alters.push_back(v);
    const std::size_t k = alters.size();
    if (k < 2) return 0.0;

    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        // BFS from alters[i] counting shortest paths, split by whether they
        // avoid the ego. Ego networks have diameter <= 2, but the count is
        // done generically.
        const NodeId& src = alters[i];
        std::map<NodeId, int> dist;
        std::map<NodeId, double> sigma;        // shortest path counts
        std::map<NodeId, double> sigma_noego;  // counts avoiding ego (ego itself excluded)
        for (const auto& v : e.graph.nodes()) {
            dist[v] = -1;
            sigma[v] = 0.0;
            sigma_noego[v] = 0.0;
        }
        dist[src] = 0;
        sigma[src] = 1.0;
        sigma_noego[src] = 1.0;
        std::vector<NodeId> frontier{src};
        while (!frontier.empty()) {
            std::vector<NodeId> next;
            for (const auto& v : frontier) {
                for (const auto& [u, w] : e.graph.neighbors(v)) {
                    if (dist[u] == -1) {
                        dist[u] = dist[v] + 1;
                        next.push_back(u);
                    }
                    if (dist[u] == dist[v] + 1) {
                        sigma[u] += sigma[v];
                        if (v != e.ego) sigma_noego[u] += sigma_noego[v];
                    }
                }
            }
            frontier = std::move(next);
        }
        for (std::size_t j = i + 1; j < k; ++j) {
            const NodeId& dst = alters[j];
            if (sigma[dst] > 0.0)
                total += (sigma[dst] - sigma_noego[dst]) / sigma[dst];
        }
    }
    return total;
}

/// Mean inverted contact-frequency code over answered items: weekly+ maps to
/// 5, never to 0. Missing when no frequency item was answered.
inline std::optional<double> tie_strength(const SurveyRecord& record) {
    if (record.frequency_codes.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& [col, code] : record.frequency_codes) sum += 6.0 - code;
    return sum / static_cast<double>(record.frequency_codes.size());
}

/// Inverted preparedness code: 1 ("very well prepared") becomes 4.
inline std::optional<int> readiness(const SurveyRecord& record) {
    if (!record.preparedness_code) return std::nullopt;
    return 5 - *record.preparedness_code;
}

/// Number of information sources used: usefulness code 2 or above. Missing
/// items count as not used.
inline int accessibility(const SurveyRecord& record) {
    int used = 0;
    for (const auto& [col, code] : record.usefulness_codes)
        if (code >= 2) ++used;
    return used;
}

/// Mean usefulness code over used sources; missing when no source was used.
inline std::optional<double> quality(const SurveyRecord& record) {
    double sum = 0.0;
    int used = 0;
    for (const auto& [col, code] : record.usefulness_codes) {
        if (code >= 2) {
            sum += code;
            ++used;
        }
    }
    if (used == 0) return std::nullopt;
    return sum / used;
}

/// One row of the profiles table: both variable families for one respondent.
struct RespondentProfile {
    std::string resp_id;
    AgencyGroup agency_group = AgencyGroup::SLE;
    ConnectednessProfile connectedness;
    CoordinationProfile coordination;
};

inline RespondentProfile compute_profile(const SurveyRecord& record, const Graph* aggregate,
                                         AlterTiesMode mode) {
    EgoNetwork ego = build_ego_network(record, aggregate, mode);
    RespondentProfile p;
    p.resp_id = record.resp_id;
    p.agency_group = record.agency_group;
    p.connectedness.degree = degree_centrality(ego);
    p.connectedness.ego_betweenness = ego_betweenness(ego);
    p.connectedness.tie_strength = tie_strength(record);
    p.coordination.readiness = readiness(record);
    p.coordination.quality = quality(record);
    p.coordination.accessibility = accessibility(record);
    return p;
}

inline std::vector<RespondentProfile> compute_profiles(const std::vector<SurveyRecord>& records,
                                                       const Graph* aggregate,
                                                       AlterTiesMode mode) {
    std::vector<RespondentProfile> out;
    out.reserve(records.size());
    for (const auto& rec : records) out.push_back(compute_profile(rec, aggregate, mode));
    return out;
}

// Profiles CSV: resp_id, agency_group, degree, ego_betweenness, tie_strength,
// readiness, quality, accessibility; missing rendered as empty cell.

inline void write_profiles_csv(const std::vector<RespondentProfile>& profiles,
                               std::ostream& out) {
    out << "resp_id,agency_group,degree,ego_betweenness,tie_strength,readiness,quality,"
           "accessibility\n";
    out.precision(17);
    for (const auto& p : profiles) {
        out << p.resp_id << ',' << to_string(p.agency_group) << ',' << p.connectedness.degree
            << ',' << p.connectedness.ego_betweenness << ',';
        if (p.connectedness.tie_strength) out << *p.connectedness.tie_strength;
        out << ',';
        if (p.coordination.readiness) out << *p.coordination.readiness;
        out << ',';
        if (p.coordination.quality) out << *p.coordination.quality;
        out << ',' << p.coordination.accessibility << '\n';
    }
}

inline std::vector<RespondentProfile> read_profiles_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("profiles csv: empty input");
    std::vector<RespondentProfile> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) f.push_back(field);
        f.resize(8);
        RespondentProfile p;
        p.resp_id = f[0];
        p.agency_group = agency_group_from(f[1]);
        p.connectedness.degree = std::stoi(f[2]);
        p.connectedness.ego_betweenness = std::stod(f[3]);
        if (!f[4].empty()) p.connectedness.tie_strength = std::stod(f[4]);
        if (!f[5].empty()) p.coordination.readiness = std::stoi(f[5]);
        if (!f[6].empty()) p.coordination.quality = std::stod(f[6]);
        p.coordination.accessibility = std::stoi(f[7]);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace drn
