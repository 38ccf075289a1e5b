#pragma once

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "drn/graph.hpp"

namespace drn {

enum class AgencyGroup { SLE, SES, LLE };

inline std::string to_string(AgencyGroup g) {
    switch (g) {
        case AgencyGroup::SLE: return "SLE";
        case AgencyGroup::SES: return "SES";
        case AgencyGroup::LLE: return "LLE";
    }
    throw std::logic_error("unreachable");
}

inline AgencyGroup agency_group_from(const std::string& s) {
    if (s == "SLE") return AgencyGroup::SLE;
    if (s == "SES") return AgencyGroup::SES;
    if (s == "LLE") return AgencyGroup::LLE;
    throw std::invalid_argument("unknown agency group code: " + s);
}

constexpr std::array<AgencyGroup, 3> kAgencyGroups{AgencyGroup::SLE, AgencyGroup::SES,
                                                   AgencyGroup::LLE};

struct RelationalVar {
    std::string canonical_label;
    std::optional<int> tier;  // 1..3 when the codebook knows it
};

/// Column-to-meaning map for the fixed-list survey instrument: which columns
/// are relational selections (with canonical organization labels and known
/// tiers), contact-frequency scales, usefulness scales, and the preparedness
/// item.
struct Codebook {
    std::string id_var;
    std::string group_var;
    std::map<std::string, RelationalVar> relational_vars;    // column -> label/tier
    std::vector<std::string> frequency_vars;                 // codes 1..6
    std::vector<std::string> usefulness_vars;                // codes 1..4
    std::string preparedness_var;                            // codes 1..4
    std::map<AgencyGroup, std::string> group_labels;         // canonical org label per group
    std::map<AgencyGroup, int> group_tiers;

    /// Canonical label -> tier, for every organization with a known tier
    /// (relational alters plus the three agency-group organizations).
    std::map<std::string, int> known_tiers() const {
        std::map<std::string, int> out;
        for (const auto& [col, rv] : relational_vars)
            if (rv.tier) out[rv.canonical_label] = *rv.tier;
        for (const auto& [g, label] : group_labels) {
            auto it = group_tiers.find(g);
            if (it != group_tiers.end()) out[label] = it->second;
        }
        return out;
    }

    std::set<std::string> canonical_labels() const {
        std::set<std::string> out;
        for (const auto& [col, rv] : relational_vars) out.insert(rv.canonical_label);
        for (const auto& [g, label] : group_labels) out.insert(label);
        return out;
    }

    void validate() const {
        if (id_var.empty() || group_var.empty())
            throw std::invalid_argument("codebook: id and group columns required");
        if (preparedness_var.empty())
            throw std::invalid_argument("codebook: preparedness column required");
        std::map<std::string, int> tier_by_label;
        for (const auto& [col, rv] : relational_vars) {
            if (rv.canonical_label.empty())
                throw std::invalid_argument("codebook: empty canonical label for " + col);
            if (rv.tier && (*rv.tier < 1 || *rv.tier > 3))
                throw std::invalid_argument("codebook: tier out of range for " + col);
            // The same organization may be reachable through several columns
            // (B9 and A20 overlap) but must carry one consistent tier.
            auto [it, fresh] = tier_by_label.try_emplace(rv.canonical_label, rv.tier.value_or(0));
            if (!fresh && rv.tier && it->second != 0 && it->second != *rv.tier)
                throw std::invalid_argument("codebook: conflicting tiers for " +
                                            rv.canonical_label);
        }
        if (group_labels.size() != 3)
            throw std::invalid_argument("codebook: all three agency group labels required");
    }
};

/// One respondent's coded answers. Relational selections are the union of the
/// coordination and joint-training questions, collapsed to canonical labels.
struct SurveyRecord {
    std::string resp_id;
    AgencyGroup agency_group = AgencyGroup::SLE;
    std::set<std::string> relational_selections;
    std::map<std::string, int> frequency_codes;    // 1..6
    std::map<std::string, int> usefulness_codes;   // 1..4
    std::optional<int> preparedness_code;          // 1..4

    bool operator==(const SurveyRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Codebook file: line oriented, tab separated.
//   id <TAB> COLUMN
//   group_var <TAB> COLUMN
//   group <TAB> SLE|SES|LLE <TAB> Canonical Label <TAB> tier
//   relational <TAB> COLUMN <TAB> Canonical Label <TAB> tier|?
//   frequency <TAB> COLUMN
//   usefulness <TAB> COLUMN
//   preparedness <TAB> COLUMN
// ---------------------------------------------------------------------------

inline Codebook read_codebook(std::istream& in) {
    Codebook cb;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, '\t')) f.push_back(field);
        auto need = [&](std::size_t k) {
            if (f.size() != k)
                throw std::runtime_error("codebook line " + std::to_string(lineno) +
                                         ": expected " + std::to_string(k) + " fields");
        };
        if (f[0] == "id") {
            need(2);
            cb.id_var = f[1];
        } else if (f[0] == "group_var") {
            need(2);
            cb.group_var = f[1];
        } else if (f[0] == "group") {
            need(4);
            AgencyGroup g = agency_group_from(f[1]);
            cb.group_labels[g] = f[2];
            cb.group_tiers[g] = std::stoi(f[3]);
        } else if (f[0] == "relational") {
            need(4);
            RelationalVar rv;
            rv.canonical_label = f[2];
            if (f[3] != "?") rv.tier = std::stoi(f[3]);
            cb.relational_vars[f[1]] = rv;
        } else if (f[0] == "frequency") {
            need(2);
            cb.frequency_vars.push_back(f[1]);
        } else if (f[0] == "usefulness") {
            need(2);
            cb.usefulness_vars.push_back(f[1]);
        } else if (f[0] == "preparedness") {
            need(2);
            cb.preparedness_var = f[1];
        } else {
            throw std::runtime_error("codebook line " + std::to_string(lineno) +
                                     ": unknown directive " + f[0]);
        }
    }
    cb.validate();
    return cb;
}

inline void write_codebook(const Codebook& cb, std::ostream& out) {
    out << "id\t" << cb.id_var << '\n';
    out << "group_var\t" << cb.group_var << '\n';
    for (const auto& [g, label] : cb.group_labels)
        out << "group\t" << to_string(g) << '\t' << label << '\t' << cb.group_tiers.at(g) << '\n';
    for (const auto& [col, rv] : cb.relational_vars) {
        out << "relational\t" << col << '\t' << rv.canonical_label << '\t';
        if (rv.tier) out << *rv.tier;
        else out << '?';
        out << '\n';
    }
    for (const auto& col : cb.frequency_vars) out << "frequency\t" << col << '\n';
    for (const auto& col : cb.usefulness_vars) out << "usefulness\t" << col << '\n';
    out << "preparedness\t" << cb.preparedness_var << '\n';
}

inline Codebook read_codebook_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open codebook: " + path);
    return read_codebook(in);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline int parse_code(const std::string& cell, int lo, int hi, std::size_t row,
                      const std::string& column) {
    int v;
    try {
        std::size_t pos = 0;
        v = std::stoi(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw std::runtime_error("row " + std::to_string(row) + ", column " + column +
                                 ": non-numeric code '" + cell + "'");
    }
    if (v < lo || v > hi)
        throw std::runtime_error("row " + std::to_string(row) + ", column " + column +
                                 ": code " + cell + " outside domain " + std::to_string(lo) +
                                 ".." + std::to_string(hi));
    return v;
}

}  // namespace detail

/// Parses the survey CSV against the codebook. Relational cells coded 1 become
/// selections, empty cells are missing, every scale code is domain checked
/// with row/column context in the error.
inline std::vector<SurveyRecord> parse_survey_csv(std::istream& in, const Codebook& cb) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("survey csv: empty input");
    std::vector<std::string> header = detail::split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;

    auto require = [&](const std::string& name) {
        auto it = col.find(name);
        if (it == col.end())
            throw std::runtime_error("survey csv: codebook column '" + name +
                                     "' missing from header");
        return it->second;
    };
    std::size_t id_col = require(cb.id_var);
    std::size_t group_col = require(cb.group_var);
    std::size_t prep_col = require(cb.preparedness_var);
    std::map<std::string, std::size_t> rel_cols, freq_cols, use_cols;
    for (const auto& [name, rv] : cb.relational_vars) rel_cols[name] = require(name);
    for (const auto& name : cb.frequency_vars) freq_cols[name] = require(name);
    for (const auto& name : cb.usefulness_vars) use_cols[name] = require(name);

    std::vector<SurveyRecord> out;
    std::set<std::string> seen_ids;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<std::string> f = detail::split_csv_line(line);
        auto cell = [&](std::size_t i) -> std::string {
            return i < f.size() ? f[i] : std::string();
        };
        SurveyRecord rec;
        rec.resp_id = cell(id_col);
        if (rec.resp_id.empty())
            throw std::runtime_error("row " + std::to_string(row) + ": empty respondent id");
        if (!seen_ids.insert(rec.resp_id).second)
            throw std::runtime_error("row " + std::to_string(row) + ": duplicate respondent id " +
                                     rec.resp_id);
        rec.agency_group = agency_group_from(cell(group_col));
        for (const auto& [name, ci] : rel_cols) {
            std::string v = cell(ci);
            if (v.empty() || v == "0") continue;
            if (v != "1")
                throw std::runtime_error("row " + std::to_string(row) + ", column " + name +
                                         ": relational cell must be 1, 0 or empty, got '" + v +
                                         "'");
            rec.relational_selections.insert(cb.relational_vars.at(name).canonical_label);
        }
        for (const auto& [name, ci] : freq_cols) {
            std::string v = cell(ci);
            if (v.empty()) continue;
            rec.frequency_codes[name] = detail::parse_code(v, 1, 6, row, name);
        }
        for (const auto& [name, ci] : use_cols) {
            std::string v = cell(ci);
            if (v.empty()) continue;
            rec.usefulness_codes[name] = detail::parse_code(v, 1, 4, row, name);
        }
        std::string prep = cell(prep_col);
        if (!prep.empty())
            rec.preparedness_code = detail::parse_code(prep, 1, 4, row, cb.preparedness_var);
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<SurveyRecord> parse_survey_csv_file(const std::string& path,
                                                       const Codebook& cb) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open survey csv: " + path);
    return parse_survey_csv(in, cb);
}

/// Serializes records in codebook column order; parse_survey_csv reads the
/// result back identically.
inline void write_survey_csv(const std::vector<SurveyRecord>& records, const Codebook& cb,
                             std::ostream& out) {
    std::vector<std::string> rel_cols;
    for (const auto& [name, rv] : cb.relational_vars) rel_cols.push_back(name);

    out << cb.id_var << ',' << cb.group_var;
    for (const auto& c : rel_cols) out << ',' << c;
    for (const auto& c : cb.frequency_vars) out << ',' << c;
    for (const auto& c : cb.usefulness_vars) out << ',' << c;
    out << ',' << cb.preparedness_var << '\n';

    for (const auto& rec : records) {
        out << detail::csv_escape(rec.resp_id) << ',' << to_string(rec.agency_group);
        for (const auto& c : rel_cols) {
            const auto& label = cb.relational_vars.at(c).canonical_label;
            out << ',' << (rec.relational_selections.count(label) ? "1" : "");
        }
        for (const auto& c : cb.frequency_vars) {
            auto it = rec.frequency_codes.find(c);
            out << ',';
            if (it != rec.frequency_codes.end()) out << it->second;
        }
        for (const auto& c : cb.usefulness_vars) {
            auto it = rec.usefulness_codes.find(c);
            out << ',';
            if (it != rec.usefulness_codes.end()) out << it->second;
        }
        out << ',';
        if (rec.preparedness_code) out << *rec.preparedness_code;
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Network construction
// ---------------------------------------------------------------------------

enum class AlterTiesMode { Star, Aggregate };

inline AlterTiesMode alter_ties_mode_from(const std::string& s) {
    if (s == "star") return AlterTiesMode::Star;
    if (s == "aggregate") return AlterTiesMode::Aggregate;
    throw std::invalid_argument("unknown alter-ties mode: " + s);
}

/// Respondent-centered ego network. Star mode wires only ego-alter ties;
/// aggregate mode additionally copies alter-alter ties present in the
/// aggregated organization graph.
inline EgoNetwork build_ego_network(const SurveyRecord& record,
                                    const Graph* aggregate,
                                    AlterTiesMode mode) {
    if (mode == AlterTiesMode::Aggregate && aggregate == nullptr)
        throw std::invalid_argument("aggregate mode requires an aggregate graph");
    Graph g;
    g.add_node(record.resp_id);
    for (const auto& alter : record.relational_selections) g.add_edge(record.resp_id, alter);
    if (mode == AlterTiesMode::Aggregate) {
        for (const auto& a : record.relational_selections)
            for (const auto& b : record.relational_selections)
                if (a < b && aggregate->has_edge(a, b))
                    g.add_edge(a, b, aggregate->edge_weight(a, b).value_or(1.0));
    }
    return EgoNetwork{record.resp_id, g};
}

/// Aggregated organization network: the three agency-group organizations plus
/// every selected organization; an edge (group org, alter) exists when any
/// respondent of that group selected the alter. Self-selections collapse onto
/// the group node and are skipped.
inline Graph build_organization_network(const std::vector<SurveyRecord>& records,
                                        const Codebook& cb,
                                        std::optional<AgencyGroup> scope = std::nullopt) {
    if (records.empty())
        throw std::invalid_argument("build_organization_network: no records");
    Graph g;
    if (scope) {
        g.add_node(cb.group_labels.at(*scope));
    } else {
        for (AgencyGroup ag : kAgencyGroups) g.add_node(cb.group_labels.at(ag));
    }
    for (const auto& rec : records) {
        if (scope && rec.agency_group != *scope) continue;
        const std::string& group_org = cb.group_labels.at(rec.agency_group);
        for (const auto& alter : rec.relational_selections) {
            if (alter == group_org) continue;
            g.add_edge(group_org, alter);
        }
    }
    return g;
}

}  // namespace drn
