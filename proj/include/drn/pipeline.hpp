#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "drn/measures.hpp"
#include "drn/report.hpp"
#include "drn/stats.hpp"
#include "drn/subgroup.hpp"
#include "drn/survey.hpp"

namespace drn {

struct RunConfig {
    std::string input_csv;
    std::string codebook_path;
    AlterTiesMode mode = AlterTiesMode::Aggregate;
    std::size_t clusters = 3;
    std::uint64_t seed = 42;
    std::string out_dir = "drn-out";
    std::set<std::string> formats = {"csv", "json", "markdown"};

    bool wants(const std::string& fmt) const { return formats.count(fmt) != 0; }

    void validate() const {
        if (clusters < 1) throw std::invalid_argument("cluster count must be >= 1");
        if (formats.empty()) throw std::invalid_argument("at least one output format required");
        for (const auto& f : formats)
            if (f != "csv" && f != "json" && f != "markdown")
                throw std::invalid_argument("unknown output format: " + f);
    }
};

namespace detail {

/// FNV-1a 64-bit digest of a file, hex encoded; provenance fingerprint only.
inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for digest: " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << content;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing stage output: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace detail

inline Json provenance_json(const RunConfig& cfg) {
    Json j{{"input", cfg.input_csv},
           {"input_digest", detail::file_digest(cfg.input_csv)},
           {"codebook", cfg.codebook_path},
           {"codebook_digest", detail::file_digest(cfg.codebook_path)},
           {"mode", cfg.mode == AlterTiesMode::Star ? "star" : "aggregate"},
           {"clusters", cfg.clusters},
           {"seed", cfg.seed},
           {"formats", std::vector<std::string>(cfg.formats.begin(), cfg.formats.end())}};
    return j;
}

// ---------------------------------------------------------------------------
// Ingest
// ---------------------------------------------------------------------------

struct IngestOutput {
    Codebook codebook;
    std::vector<SurveyRecord> records;
    Graph organization_network;  // combined scope
    std::vector<RespondentProfile> profiles;
    std::map<AgencyGroup, std::size_t> group_counts;
};

inline IngestOutput run_ingest(const RunConfig& cfg) {
    IngestOutput out;
    out.codebook = read_codebook_file(cfg.codebook_path);
    out.records = parse_survey_csv_file(cfg.input_csv, out.codebook);
    if (out.records.empty()) throw std::runtime_error("no survey records in " + cfg.input_csv);
    out.organization_network = build_organization_network(out.records, out.codebook);
    out.profiles = compute_profiles(out.records, &out.organization_network, cfg.mode);
    for (AgencyGroup g : kAgencyGroups) out.group_counts[g] = 0;
    for (const auto& r : out.records) out.group_counts[r.agency_group] += 1;
    return out;
}

inline void cmd_ingest(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    IngestOutput ing = run_ingest(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ostringstream os;
        write_survey_csv(ing.records, ing.codebook, os);
        detail::write_file(cfg.out_dir + "/records.csv", os.str());
    }
    {
        std::ostringstream os;
        write_edge_list(ing.organization_network, os);
        detail::write_file(cfg.out_dir + "/organization_network.tsv", os.str());
    }
    {
        std::ostringstream os;
        write_profiles_csv(ing.profiles, os);
        detail::write_file(cfg.out_dir + "/profiles.csv", os.str());
    }
    log << "Response sample\n";
    for (AgencyGroup g : kAgencyGroups)
        log << "  " << ing.codebook.group_labels.at(g) << " (" << to_string(g)
            << "): " << ing.group_counts.at(g) << " respondents\n";
    log << "  total: " << ing.records.size() << " respondents, "
        << ing.organization_network.node_count() << " organizations, "
        << ing.organization_network.edge_count() << " ties\n";
}

// ---------------------------------------------------------------------------
// H1: cliques, co-membership, tier prediction
// ---------------------------------------------------------------------------

struct H1Output {
    CliqueSet cliques;              // maximal cliques of the organization network
    CoMembership clique_membership;
    std::size_t two_clique_count = 0;
    CliqueSet two_cliques;
    CoMembership cluster_membership;  // 2-clique co-membership, tier evidence base
    std::vector<TierAssignment> predictions;   // orgs without a known tier
    std::vector<std::string> prediction_errors;
    // leave-one-out over orgs with known tiers
    std::size_t holdout_total = 0;
    std::size_t holdout_correct = 0;
    std::vector<TierAssignment> holdout_predictions;

    double holdout_accuracy() const {
        return holdout_total == 0 ? 0.0
                                  : static_cast<double>(holdout_correct) /
                                        static_cast<double>(holdout_total);
    }
};

/// Subgroup analysis of the organization network. Maximal cliques feed the
/// co-membership table; tier votes come from the distance-2 subgroup
/// co-membership, which is where organizations of the same tier actually
/// co-occur in a hub-shaped network. Known tiers are scored leave-one-out.
inline H1Output run_h1(const Graph& organization_network, const Codebook& cb) {
    H1Output out;
    out.cliques = maximal_cliques(organization_network);
    out.clique_membership = co_membership(out.cliques);
    out.two_cliques = n_cliques(organization_network, 2);
    out.two_clique_count = out.two_cliques.cliques.size();
    out.cluster_membership = co_membership(out.two_cliques);

    std::map<NodeId, int> known = cb.known_tiers();
    for (const auto& org : organization_network.nodes()) {
        auto it = known.find(org);
        if (it == known.end()) {
            try {
                out.predictions.push_back(predict_tier(org, out.cluster_membership, known));
            } catch (const std::exception& e) {
                out.prediction_errors.push_back(e.what());
            }
        } else {
            std::map<NodeId, int> loo = known;
            loo.erase(org);
            out.holdout_total += 1;
            try {
                TierAssignment ta = predict_tier(org, out.cluster_membership, loo);
                if (ta.predicted_tier == it->second) out.holdout_correct += 1;
                out.holdout_predictions.push_back(std::move(ta));
            } catch (const std::exception& e) {
                out.prediction_errors.push_back(e.what());
            }
        }
    }
    return out;
}

inline Json h1_json(const H1Output& h1) {
    Json cliques = Json::array();
    for (const auto& c : h1.cliques.cliques) cliques.push_back(c);
    auto tier_json = [](const std::vector<TierAssignment>& tas) {
        Json arr = Json::array();
        for (const auto& ta : tas) {
            Json ev = Json::object();
            for (const auto& [t, v] : ta.evidence) ev[std::to_string(t)] = v;
            arr.push_back(Json{{"org", ta.org}, {"predicted_tier", ta.predicted_tier},
                               {"evidence", ev}});
        }
        return arr;
    };
    return Json{{"cliques", cliques},
                {"clique_count", h1.cliques.cliques.size()},
                {"two_clique_count", h1.two_clique_count},
                {"predictions", tier_json(h1.predictions)},
                {"holdout_predictions", tier_json(h1.holdout_predictions)},
                {"holdout_total", h1.holdout_total},
                {"holdout_correct", h1.holdout_correct},
                {"holdout_accuracy", h1.holdout_accuracy()},
                {"prediction_errors", h1.prediction_errors}};
}

inline void cmd_h1(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    Codebook cb = read_codebook_file(cfg.codebook_path);
    std::vector<SurveyRecord> records =
        parse_survey_csv_file(cfg.out_dir + "/records.csv", cb);
    Graph org = build_organization_network(records, cb);
    H1Output h1 = run_h1(org, cb);

    if (cfg.wants("csv") || cfg.wants("markdown")) {
        std::ostringstream os;
        write_clique_report(h1.cliques, os);
        detail::write_file(cfg.out_dir + "/h1_cliques.txt", os.str());
    }
    if (cfg.wants("csv")) {
        std::ostringstream os;
        write_co_membership_csv(h1.clique_membership, os);
        detail::write_file(cfg.out_dir + "/h1_co_membership.csv", os.str());
        std::ostringstream ts;
        ts << "org,predicted_tier,votes_tier1,votes_tier2,votes_tier3\n";
        for (const auto* block : {&h1.predictions, &h1.holdout_predictions})
            for (const auto& ta : *block)
                ts << detail::csv_escape(ta.org) << ',' << ta.predicted_tier << ','
                   << ta.evidence.at(1) << ',' << ta.evidence.at(2) << ',' << ta.evidence.at(3)
                   << '\n';
        detail::write_file(cfg.out_dir + "/h1_tiers.csv", ts.str());
    }
    if (cfg.wants("json"))
        detail::write_file(cfg.out_dir + "/h1.json", h1_json(h1).dump(2) + "\n");

    log << h1.cliques.cliques.size() << " cliques found; " << h1.two_clique_count
        << " distance-2 clusters.\n";
    if (h1.cliques.cliques.empty() ||
        (h1.cliques.cliques.size() && h1.cliques.cliques.front().size() < 2))
        log << "note: network has no cohesive subgroup of size >= 2\n";
    log << "tier predictions: " << h1.predictions.size() << " unlabeled orgs, holdout accuracy "
        << format_number(h1.holdout_accuracy(), 3) << " (" << h1.holdout_correct << "/"
        << h1.holdout_total << ")\n";
    for (const auto& e : h1.prediction_errors) log << "warning: " << e << '\n';
}

// ---------------------------------------------------------------------------
// Cluster membership: a respondent belongs to a selected cluster when at
// least one of their selected alters (other than the three agency-group
// organizations) is a cluster member.
// ---------------------------------------------------------------------------

inline std::vector<std::vector<const RespondentProfile*>> cluster_profiles(
    const std::vector<std::vector<NodeId>>& clusters, const std::vector<SurveyRecord>& records,
    const std::vector<RespondentProfile>& profiles, const Codebook& cb) {
    std::set<NodeId> group_orgs;
    for (const auto& [g, label] : cb.group_labels) group_orgs.insert(label);
    std::map<std::string, const RespondentProfile*> by_id;
    for (const auto& p : profiles) by_id[p.resp_id] = &p;

    std::vector<std::vector<const RespondentProfile*>> out(clusters.size());
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        std::set<NodeId> members(clusters[c].begin(), clusters[c].end());
        for (const auto& rec : records) {
            bool in_cluster = false;
            for (const auto& alter : rec.relational_selections)
                if (!group_orgs.count(alter) && members.count(alter)) {
                    in_cluster = true;
                    break;
                }
            if (in_cluster) {
                auto it = by_id.find(rec.resp_id);
                if (it != by_id.end()) out[c].push_back(it->second);
            }
        }
    }
    return out;
}

inline std::vector<std::vector<NodeId>> pick_clusters(const Graph& org, const Codebook& cb,
                                                      std::size_t k, std::uint64_t seed) {
    CliqueSet clusters = n_cliques(org, 2);
    std::vector<std::set<NodeId>> required;
    for (AgencyGroup g : kAgencyGroups) required.push_back({cb.group_labels.at(g)});
    return select_clusters(clusters, required, k, seed);
}

// ---------------------------------------------------------------------------
// H2: Kruskal-Wallis comparisons
// ---------------------------------------------------------------------------

using MeasureGetter = std::function<std::optional<double>(const RespondentProfile&)>;

inline const std::vector<std::pair<std::string, MeasureGetter>>& connectedness_measures() {
    static const std::vector<std::pair<std::string, MeasureGetter>> ms = {
        {"Degree",
         [](const RespondentProfile& p) -> std::optional<double> {
             return static_cast<double>(p.connectedness.degree);
         }},
        {"EgoBetweenness",
         [](const RespondentProfile& p) -> std::optional<double> {
             return p.connectedness.ego_betweenness;
         }},
        {"Tie Strength",
         [](const RespondentProfile& p) -> std::optional<double> {
             return p.connectedness.tie_strength;
         }}};
    return ms;
}

inline const std::vector<std::pair<std::string, MeasureGetter>>& coordination_measures() {
    static const std::vector<std::pair<std::string, MeasureGetter>> ms = {
        {"Readiness",
         [](const RespondentProfile& p) -> std::optional<double> {
             if (!p.coordination.readiness) return std::nullopt;
             return static_cast<double>(*p.coordination.readiness);
         }},
        {"Quality",
         [](const RespondentProfile& p) -> std::optional<double> {
             return p.coordination.quality;
         }},
        {"Accessibility",
         [](const RespondentProfile& p) -> std::optional<double> {
             return static_cast<double>(p.coordination.accessibility);
         }}};
    return ms;
}

/// Builds one Kruskal-Wallis table: groups are row samples, measures are
/// columns. A measure with fewer than two groups of nonmissing data is
/// skipped with a warning instead of failing the table.
inline KWTable kw_table(const std::string& title, const std::vector<std::string>& group_names,
                        const std::vector<std::vector<const RespondentProfile*>>& groups,
                        const std::vector<std::pair<std::string, MeasureGetter>>& measures) {
    KWTable table;
    table.title = title;
    table.row_labels = group_names;
    for (const auto& [name, get] : measures) {
        KWColumn col;
        col.measure = name;
        std::vector<std::vector<double>> samples;
        std::vector<std::size_t> sample_rows;
        for (std::size_t r = 0; r < groups.size(); ++r) {
            std::vector<double> vals;
            for (const auto* p : groups[r]) {
                auto v = get(*p);
                if (v) vals.push_back(*v);
            }
            if (!vals.empty()) {
                samples.push_back(std::move(vals));
                sample_rows.push_back(r);
            }
        }
        col.row_mean_ranks.assign(groups.size(), std::nullopt);
        if (samples.size() < 2) {
            col.warning = "fewer than 2 groups with nonmissing data";
        } else {
            try {
                col.result = kruskal_wallis(samples);
                for (std::size_t s = 0; s < sample_rows.size(); ++s)
                    col.row_mean_ranks[sample_rows[s]] = col.result->mean_ranks[s];
            } catch (const std::exception& e) {
                col.warning = e.what();
            }
        }
        table.columns.push_back(std::move(col));
    }
    return table;
}

struct H2Output {
    KWTable agency;             // Degree/EgoBetweenness/Tie Strength across agencies
    KWTable cluster;            // same measures across selected clusters
    KWTable cluster_readiness;  // Readiness across selected clusters
    std::vector<std::vector<NodeId>> selected_clusters;
};

inline H2Output run_h2(const IngestOutput& ing, const RunConfig& cfg) {
    H2Output out;

    std::vector<std::string> agency_names;
    std::vector<std::vector<const RespondentProfile*>> agency_groups(3);
    for (AgencyGroup g : kAgencyGroups) agency_names.push_back(ing.codebook.group_labels.at(g));
    for (const auto& p : ing.profiles) {
        std::size_t gi = 0;
        for (std::size_t i = 0; i < kAgencyGroups.size(); ++i)
            if (kAgencyGroups[i] == p.agency_group) gi = i;
        agency_groups[gi].push_back(&p);
    }
    out.agency = kw_table("Kruskal-Wallis interconnectedness comparison of mean ranks (agencies)",
                          agency_names, agency_groups, connectedness_measures());

    out.selected_clusters =
        pick_clusters(ing.organization_network, ing.codebook, cfg.clusters, cfg.seed);
    auto members =
        cluster_profiles(out.selected_clusters, ing.records, ing.profiles, ing.codebook);
    std::vector<std::string> cluster_names;
    for (std::size_t i = 0; i < members.size(); ++i)
        cluster_names.push_back("Cluster " + std::to_string(i + 1));
    out.cluster = kw_table("Kruskal-Wallis interconnectedness comparison of mean ranks (clusters)",
                           cluster_names, members, connectedness_measures());
    out.cluster_readiness =
        kw_table("Kruskal-Wallis comparison of readiness between clusters", cluster_names,
                 members,
                 {{coordination_measures()[0].first, coordination_measures()[0].second}});
    return out;
}

inline Json h2_json(const H2Output& h2) {
    Json clusters = Json::array();
    for (const auto& c : h2.selected_clusters) clusters.push_back(c);
    return Json{{"agency", kw_table_json(h2.agency)},
                {"cluster", kw_table_json(h2.cluster)},
                {"cluster_readiness", kw_table_json(h2.cluster_readiness)},
                {"selected_clusters", clusters}};
}

inline void cmd_h2(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    IngestOutput ing;
    ing.codebook = read_codebook_file(cfg.codebook_path);
    ing.records = parse_survey_csv_file(cfg.out_dir + "/records.csv", ing.codebook);
    ing.organization_network = build_organization_network(ing.records, ing.codebook);
    {
        std::ifstream in(cfg.out_dir + "/profiles.csv");
        if (!in) throw std::runtime_error("missing stage output: " + cfg.out_dir +
                                          "/profiles.csv (run ingest first)");
        ing.profiles = read_profiles_csv(in);
    }
    H2Output h2 = run_h2(ing, cfg);

    if (cfg.wants("csv")) {
        auto dump_csv = [&](const std::string& name, const KWTable& table) {
            std::ostringstream os;
            write_kw_table_csv(table, os);
            detail::write_file(cfg.out_dir + "/" + name + ".csv", os.str());
        };
        dump_csv("h2_agency", h2.agency);
        dump_csv("h2_clusters", h2.cluster);
        dump_csv("h2_readiness", h2.cluster_readiness);
    }
    if (cfg.wants("markdown")) {
        std::ostringstream os;
        write_kw_table_markdown(h2.agency, os);
        write_kw_table_markdown(h2.cluster, os);
        write_kw_table_markdown(h2.cluster_readiness, os);
        detail::write_file(cfg.out_dir + "/h2.md", os.str());
    }
    if (cfg.wants("json"))
        detail::write_file(cfg.out_dir + "/h2.json", h2_json(h2).dump(2) + "\n");

    for (const KWTable* t : {&h2.agency, &h2.cluster, &h2.cluster_readiness})
        for (const auto& c : t->columns) {
            if (c.result)
                log << t->title << " / " << c.measure << ": p = "
                    << format_number(c.result->p) << significance_stars(c.result->p) << '\n';
            else
                log << t->title << " / " << c.measure << ": skipped (" << c.warning << ")\n";
        }
}

// ---------------------------------------------------------------------------
// H3: Spearman matrices
// ---------------------------------------------------------------------------

/// Six-variable lower-triangle matrix. Only connectedness-by-coordination
/// pairs are tested; family-internal cells are structural 'x' masks per the
/// test matrix. Missing values drop pairwise; a pair with n < 3 is skipped.
inline SpearmanMatrix spearman_matrix(const std::string& title,
                                      const std::vector<const RespondentProfile*>& sample) {
    std::vector<std::pair<std::string, MeasureGetter>> vars;
    for (const auto& m : connectedness_measures()) vars.push_back(m);
    for (const auto& m : coordination_measures()) vars.push_back(m);

    SpearmanMatrix out;
    out.title = title;
    for (const auto& [name, get] : vars) out.vars.push_back(name);
    out.cells.assign(vars.size(), std::vector<SpearmanCell>(vars.size()));

    for (std::size_t i = 0; i < vars.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            SpearmanCell& cell = out.cells[i][j];
            if (i == j) {
                cell.kind = SpearmanCell::Kind::Diagonal;
                continue;
            }
            bool tested = (i >= 3 && j < 3);  // coordination row, connectedness column
            if (!tested) {
                cell.kind = SpearmanCell::Kind::Masked;
                continue;
            }
            std::vector<double> x, y;
            for (const auto* p : sample) {
                auto vx = vars[j].second(*p);
                auto vy = vars[i].second(*p);
                if (vx && vy) {
                    x.push_back(*vx);
                    y.push_back(*vy);
                }
            }
            if (x.size() < 3) {
                cell.kind = SpearmanCell::Kind::Skipped;
                cell.note = "n = " + std::to_string(x.size()) + " after missing-data filtering";
                continue;
            }
            try {
                cell.result = spearman(x, y);
                cell.kind = SpearmanCell::Kind::Tested;
            } catch (const std::exception& e) {
                cell.kind = SpearmanCell::Kind::Skipped;
                cell.note = e.what();
            }
        }
    }
    return out;
}

struct H3Output {
    SpearmanMatrix combined;  // all respondents
    SpearmanMatrix cluster;   // merged selected clusters, deduplicated
    std::vector<std::vector<NodeId>> selected_clusters;
    std::size_t merged_n = 0;
};

inline H3Output run_h3(const IngestOutput& ing, const RunConfig& cfg) {
    H3Output out;
    std::vector<const RespondentProfile*> all;
    for (const auto& p : ing.profiles) all.push_back(&p);
    out.combined = spearman_matrix("Spearman correlations matrix (combined agency network data)",
                                   all);

    out.selected_clusters =
        pick_clusters(ing.organization_network, ing.codebook, cfg.clusters, cfg.seed);
    auto members =
        cluster_profiles(out.selected_clusters, ing.records, ing.profiles, ing.codebook);
    // respondents overlapping several clusters count once, first cluster wins
    std::set<std::string> seen;
    std::vector<const RespondentProfile*> merged;
    for (const auto& grp : members)
        for (const auto* p : grp)
            if (seen.insert(p->resp_id).second) merged.push_back(p);
    out.merged_n = merged.size();
    out.cluster = spearman_matrix("Spearman correlations matrix (combined cluster network data)",
                                  merged);
    return out;
}

inline Json h3_json(const H3Output& h3) {
    Json clusters = Json::array();
    for (const auto& c : h3.selected_clusters) clusters.push_back(c);
    return Json{{"combined", spearman_matrix_json(h3.combined)},
                {"cluster", spearman_matrix_json(h3.cluster)},
                {"selected_clusters", clusters},
                {"merged_n", h3.merged_n}};
}

inline void cmd_h3(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    IngestOutput ing;
    ing.codebook = read_codebook_file(cfg.codebook_path);
    ing.records = parse_survey_csv_file(cfg.out_dir + "/records.csv", ing.codebook);
    ing.organization_network = build_organization_network(ing.records, ing.codebook);
    {
        std::ifstream in(cfg.out_dir + "/profiles.csv");
        if (!in) throw std::runtime_error("missing stage output: " + cfg.out_dir +
                                          "/profiles.csv (run ingest first)");
        ing.profiles = read_profiles_csv(in);
    }
    H3Output h3 = run_h3(ing, cfg);

    if (cfg.wants("csv")) {
        std::ostringstream a, b;
        write_spearman_matrix_csv(h3.combined, a);
        write_spearman_matrix_csv(h3.cluster, b);
        detail::write_file(cfg.out_dir + "/h3_combined.csv", a.str());
        detail::write_file(cfg.out_dir + "/h3_clusters.csv", b.str());
    }
    if (cfg.wants("markdown")) {
        std::ostringstream os;
        write_spearman_matrix_markdown(h3.combined, os);
        write_spearman_matrix_markdown(h3.cluster, os);
        detail::write_file(cfg.out_dir + "/h3.md", os.str());
    }
    if (cfg.wants("json"))
        detail::write_file(cfg.out_dir + "/h3.json", h3_json(h3).dump(2) + "\n");

    log << "combined matrix over " << ing.profiles.size() << " respondents; merged cluster "
        << "matrix over " << h3.merged_n << " respondents\n";
}

// ---------------------------------------------------------------------------
// Consolidated report
// ---------------------------------------------------------------------------

inline void cmd_report(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    // recompute all stages from the persisted record set so the consolidated
    // report never diverges from the per-stage outputs
    IngestOutput ing;
    ing.codebook = read_codebook_file(cfg.codebook_path);
    ing.records = parse_survey_csv_file(cfg.out_dir + "/records.csv", ing.codebook);
    ing.organization_network = build_organization_network(ing.records, ing.codebook);
    {
        std::ifstream in(cfg.out_dir + "/profiles.csv");
        if (!in) throw std::runtime_error("missing stage output: " + cfg.out_dir +
                                          "/profiles.csv (run ingest first)");
        ing.profiles = read_profiles_csv(in);
    }
    for (AgencyGroup g : kAgencyGroups) ing.group_counts[g] = 0;
    for (const auto& r : ing.records) ing.group_counts[r.agency_group] += 1;

    H1Output h1 = run_h1(ing.organization_network, ing.codebook);
    H2Output h2 = run_h2(ing, cfg);
    H3Output h3 = run_h3(ing, cfg);

    RunConfig prov_cfg = cfg;
    prov_cfg.input_csv = cfg.out_dir + "/records.csv";
    Json report{{"provenance", provenance_json(prov_cfg)},
                {"sample",
                 Json{{"SLE", ing.group_counts.at(AgencyGroup::SLE)},
                      {"SES", ing.group_counts.at(AgencyGroup::SES)},
                      {"LLE", ing.group_counts.at(AgencyGroup::LLE)},
                      {"total", ing.records.size()}}},
                {"h1", h1_json(h1)},
                {"h2", h2_json(h2)},
                {"h3", h3_json(h3)}};
    if (cfg.wants("json"))
        detail::write_file(cfg.out_dir + "/report.json", report.dump(2) + "\n");

    if (cfg.wants("markdown")) {
        std::ostringstream md;
        md << "# Disaster response network assessment\n\n";
        md << "Seed " << cfg.seed << ", mode "
           << (cfg.mode == AlterTiesMode::Star ? "star" : "aggregate") << ", " << cfg.clusters
           << " clusters.\n\n";
        md << "## Sample\n\n| Agency group | Respondents |\n|---|---|\n";
        for (AgencyGroup g : kAgencyGroups)
            md << "| " << ing.codebook.group_labels.at(g) << " | " << ing.group_counts.at(g)
               << " |\n";
        md << "\n## H1: subgroups and tiers\n\n";
        md << h1.cliques.cliques.size() << " cliques found, " << h1.two_clique_count
           << " distance-2 clusters.\n\n```\n";
        write_clique_report(h1.cliques, md);
        md << "```\n\nTier prediction holdout accuracy: "
           << format_number(h1.holdout_accuracy(), 3) << " (" << h1.holdout_correct << "/"
           << h1.holdout_total << ")\n\n";
        md << "## H2: interconnectedness by group\n\n";
        write_kw_table_markdown(h2.agency, md);
        write_kw_table_markdown(h2.cluster, md);
        write_kw_table_markdown(h2.cluster_readiness, md);
        md << "## H3: connectedness and coordination\n\n";
        write_spearman_matrix_markdown(h3.combined, md);
        write_spearman_matrix_markdown(h3.cluster, md);
        detail::write_file(cfg.out_dir + "/report.md", md.str());
    }
    log << "report written to " << cfg.out_dir << '\n';
}

}  // namespace drn
