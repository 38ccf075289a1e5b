#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "drn/stats.hpp"
#include "drn/survey.hpp"
#include "drn/synthetic.hpp"

using namespace drn;

namespace {

Codebook tiny_codebook() {
    std::istringstream in(
        "id\tRESPID\n"
        "group_var\tGROUP\n"
        "group\tSLE\tState Law Enforcement\t2\n"
        "group\tSES\tState Emergency Services\t2\n"
        "group\tLLE\tLocal Law Enforcement\t2\n"
        "relational\tFBI\tFBI\t1\n"
        "relational\tJTFBI\tFBI\t1\n"
        "relational\tCOUNTY\tLocal Law Enforcement\t2\n"
        "relational\tINTER\tInternational Liaison\t?\n"
        "frequency\tMEETMUN\n"
        "frequency\tMEETSTA\n"
        "usefulness\tIFFBI\n"
        "usefulness\tIFMED\n"
        "preparedness\tPREPARED\n");
    return read_codebook(in);
}

std::vector<SurveyRecord> parse(const Codebook& cb, const std::string& csv) {
    std::istringstream in(csv);
    return parse_survey_csv(in, cb);
}

const std::string kHeader =
    "RESPID,GROUP,FBI,JTFBI,COUNTY,INTER,MEETMUN,MEETSTA,IFFBI,IFMED,PREPARED\n";

}  // namespace

TEST_CASE("codebook round-trips through its text form") {
    Codebook cb = tiny_codebook();
    std::ostringstream os;
    write_codebook(cb, os);
    std::istringstream is(os.str());
    Codebook back = read_codebook(is);
    CHECK(back.id_var == cb.id_var);
    CHECK(back.relational_vars.size() == cb.relational_vars.size());
    CHECK(back.relational_vars.at("INTER").tier == std::nullopt);
    CHECK(back.relational_vars.at("FBI").tier == 1);
    CHECK(back.group_labels == cb.group_labels);
}

TEST_CASE("codebook rejects conflicting tiers for one organization") {
    std::istringstream in(
        "id\tRESPID\n"
        "group_var\tGROUP\n"
        "group\tSLE\tA\t2\n"
        "group\tSES\tB\t2\n"
        "group\tLLE\tC\t2\n"
        "relational\tX\tFBI\t1\n"
        "relational\tY\tFBI\t3\n"
        "preparedness\tPREPARED\n");
    CHECK_THROWS_AS(read_codebook(in), std::invalid_argument);
}

TEST_CASE("known tiers cover relational alters and the group organizations") {
    Codebook cb = tiny_codebook();
    auto tiers = cb.known_tiers();
    CHECK(tiers.at("FBI") == 1);
    CHECK(tiers.at("State Law Enforcement") == 2);
    CHECK(tiers.count("International Liaison") == 0);
}

TEST_CASE("overlapping relational columns collapse to one selection") {
    auto recs = parse(tiny_codebook(), kHeader + "r1,SLE,1,1,,,2,,,,1\n");
    REQUIRE(recs.size() == 1);
    const SurveyRecord& r = recs[0];
    CHECK(r.agency_group == AgencyGroup::SLE);
    CHECK(r.relational_selections == std::set<std::string>{"FBI"});
    CHECK(r.frequency_codes == std::map<std::string, int>{{"MEETMUN", 2}});
    CHECK(r.usefulness_codes.empty());
    CHECK(r.preparedness_code == 1);
}

TEST_CASE("missing preparedness is accepted") {
    auto recs = parse(tiny_codebook(), kHeader + "r1,LLE,,,,,,,,,\n");
    CHECK_FALSE(recs[0].preparedness_code.has_value());
    CHECK(recs[0].relational_selections.empty());
}

TEST_CASE("scale codes outside their domain name the offending cell") {
    CHECK_THROWS_WITH(parse(tiny_codebook(), kHeader + "r1,SLE,,,,,7,,,,1\n"),
                      Catch::Matchers::ContainsSubstring("MEETMUN"));
    CHECK_THROWS_WITH(parse(tiny_codebook(), kHeader + "r1,SLE,,,,,2,,5,,1\n"),
                      Catch::Matchers::ContainsSubstring("IFFBI"));
    CHECK_THROWS_WITH(parse(tiny_codebook(), kHeader + "r1,SLE,,,,,2,,,,0\n"),
                      Catch::Matchers::ContainsSubstring("PREPARED"));
}

TEST_CASE("relational cells accept only 1, 0 or empty") {
    CHECK_THROWS_WITH(parse(tiny_codebook(), kHeader + "r1,SLE,2,,,,,,,,\n"),
                      Catch::Matchers::ContainsSubstring("FBI"));
    auto recs = parse(tiny_codebook(), kHeader + "r1,SLE,0,,,,,,,,\n");
    CHECK(recs[0].relational_selections.empty());
}

TEST_CASE("duplicate respondent ids are rejected") {
    CHECK_THROWS_WITH(
        parse(tiny_codebook(), kHeader + "r1,SLE,,,,,,,,,\nr1,SES,,,,,,,,,\n"),
        Catch::Matchers::ContainsSubstring("duplicate"));
}

TEST_CASE("missing codebook column in the header is an error") {
    CHECK_THROWS_WITH(parse(tiny_codebook(), "RESPID,GROUP,FBI\nr1,SLE,1\n"),
                      Catch::Matchers::ContainsSubstring("missing from header"));
}

TEST_CASE("unknown agency group code is an error") {
    CHECK_THROWS_AS(parse(tiny_codebook(), kHeader + "r1,XXX,,,,,,,,,\n"),
                    std::invalid_argument);
}

TEST_CASE("survey records round-trip through csv") {
    Codebook cb = tiny_codebook();
    auto recs = parse(cb, kHeader +
                              "r1,SLE,1,,1,,2,5,3,1,1\n"
                              "\"r,2\",SES,,1,,1,,,2,,4\n"
                              "r3,LLE,,,,,,,,,\n");
    std::ostringstream os;
    write_survey_csv(recs, cb, os);
    std::istringstream is(os.str());
    auto back = parse_survey_csv(is, cb);
    CHECK(back == recs);
}

TEST_CASE("star ego network wires only ego-alter ties") {
    Codebook cb = tiny_codebook();
    auto recs = parse(cb, kHeader + "r1,SLE,1,,1,1,,,,,\n");
    EgoNetwork e = build_ego_network(recs[0], nullptr, AlterTiesMode::Star);
    CHECK(e.ego == "r1");
    CHECK(e.alter_count() == 3);
    CHECK(e.graph.edge_count() == 3);
    CHECK(e.graph.has_edge("r1", "FBI"));
    CHECK_FALSE(e.graph.has_edge("FBI", "Local Law Enforcement"));
}

TEST_CASE("aggregate ego network copies alter ties from the organization graph") {
    Codebook cb = tiny_codebook();
    auto recs = parse(cb, kHeader +
                              "r1,SLE,1,,1,,,,,,\n"
                              "r2,LLE,1,,,,,,,,\n");
    Graph org = build_organization_network(recs, cb);
    // r2's selection makes FBI adjacent to Local Law Enforcement
    REQUIRE(org.has_edge("Local Law Enforcement", "FBI"));
    EgoNetwork e = build_ego_network(recs[0], &org, AlterTiesMode::Aggregate);
    CHECK(e.alter_count() == 2);
    CHECK(e.graph.has_edge("FBI", "Local Law Enforcement"));

    EgoNetwork star = build_ego_network(recs[0], &org, AlterTiesMode::Star);
    CHECK_FALSE(star.graph.has_edge("FBI", "Local Law Enforcement"));
}

TEST_CASE("aggregate mode requires the aggregate graph") {
    Codebook cb = tiny_codebook();
    auto recs = parse(cb, kHeader + "r1,SLE,1,,,,,,,,\n");
    CHECK_THROWS_AS(build_ego_network(recs[0], nullptr, AlterTiesMode::Aggregate),
                    std::invalid_argument);
}

TEST_CASE("respondent with no selections yields a single-node ego network") {
    Codebook cb = tiny_codebook();
    auto recs = parse(cb, kHeader + "r1,SES,,,,,,,,,\n");
    EgoNetwork e = build_ego_network(recs[0], nullptr, AlterTiesMode::Star);
    CHECK(e.alter_count() == 0);
    CHECK(e.graph.node_count() == 1);
}

TEST_CASE("organization network pools selections under the group organization") {
    Codebook cb = tiny_codebook();
    auto recs = parse(cb, kHeader +
                              "r1,SLE,1,,,,,,,,\n"
                              "r2,SLE,,,1,1,,,,,\n"
                              "r3,SES,1,,,,,,,,\n");
    Graph g = build_organization_network(recs, cb);
    CHECK(g.has_edge("State Law Enforcement", "FBI"));
    CHECK(g.has_edge("State Law Enforcement", "Local Law Enforcement"));
    CHECK(g.has_edge("State Law Enforcement", "International Liaison"));
    CHECK(g.has_edge("State Emergency Services", "FBI"));
    CHECK_FALSE(g.has_edge("State Law Enforcement", "State Emergency Services"));
    // all three group organizations are present even without selections
    CHECK(g.has_node("Local Law Enforcement"));
    CHECK(g.node_count() == 5);
}

TEST_CASE("self-selection collapses onto the group organization and is skipped") {
    Codebook cb = tiny_codebook();
    auto recs = parse(cb, kHeader + "r1,LLE,,,1,,,,,,\n");
    Graph g = build_organization_network(recs, cb);
    CHECK(g.edge_count() == 0);
}

TEST_CASE("organization network is independent of record order") {
    Codebook cb = tiny_codebook();
    auto recs = parse(cb, kHeader +
                              "r1,SLE,1,,1,,,,,,\n"
                              "r2,SES,,1,,1,,,,,\n"
                              "r3,LLE,1,,,,,,,,\n");
    Graph fwd = build_organization_network(recs, cb);
    std::reverse(recs.begin(), recs.end());
    Graph rev = build_organization_network(recs, cb);
    CHECK(fwd == rev);
}

TEST_CASE("scoped organization network keeps one group's selections") {
    Codebook cb = tiny_codebook();
    auto recs = parse(cb, kHeader +
                              "r1,SLE,1,,,,,,,,\n"
                              "r2,SES,,,1,,,,,,\n");
    Graph g = build_organization_network(recs, cb, AgencyGroup::SLE);
    CHECK(g.has_edge("State Law Enforcement", "FBI"));
    CHECK_FALSE(g.has_node("State Emergency Services"));
}

TEST_CASE("synthetic generation is deterministic per seed") {
    GeneratorConfig cfg;
    SyntheticDataset a = generate_synthetic(cfg, 42);
    SyntheticDataset b = generate_synthetic(cfg, 42);
    CHECK(a.records == b.records);
    SyntheticDataset c = generate_synthetic(cfg, 43);
    CHECK(a.records != c.records);

    std::ostringstream oa, ob;
    write_survey_csv(a.records, a.codebook, oa);
    write_survey_csv(b.records, b.codebook, ob);
    CHECK(oa.str() == ob.str());
}

TEST_CASE("synthetic group sizes match the configuration") {
    GeneratorConfig cfg;
    SyntheticDataset ds = generate_synthetic(cfg, 7);
    std::map<AgencyGroup, std::size_t> counts;
    for (const auto& r : ds.records) ++counts[r.agency_group];
    CHECK(counts == cfg.group_sizes);
    CHECK(ds.records.size() == 39 + 37 + 148);
}

TEST_CASE("every synthetic alter is covered by the emitted codebook") {
    GeneratorConfig cfg;
    SyntheticDataset ds = generate_synthetic(cfg, 11);
    auto labels = ds.codebook.canonical_labels();
    for (const auto& r : ds.records)
        for (const auto& sel : r.relational_selections) CHECK(labels.count(sel) == 1);
}

TEST_CASE("synthetic csv round-trips through the parser") {
    GeneratorConfig cfg;
    cfg.group_sizes = {{AgencyGroup::SLE, 10}, {AgencyGroup::SES, 10}, {AgencyGroup::LLE, 10}};
    SyntheticDataset ds = generate_synthetic(cfg, 5);
    std::ostringstream os;
    write_survey_csv(ds.records, ds.codebook, os);
    std::istringstream is(os.str());
    auto back = parse_survey_csv(is, ds.codebook);
    CHECK(back == ds.records);
}

TEST_CASE("coupling sign drives the association between selections and usefulness") {
    auto usefulness_mean = [](const SurveyRecord& r) {
        double sum = 0.0;
        for (const auto& [col, code] : r.usefulness_codes) sum += code;
        return r.usefulness_codes.empty() ? 0.0 : sum / r.usefulness_codes.size();
    };
    auto rho_for = [&](double coupling, std::uint64_t seed) {
        GeneratorConfig cfg;
        cfg.coupling = coupling;
        SyntheticDataset ds = generate_synthetic(cfg, seed);
        std::vector<double> x, y;
        for (const auto& r : ds.records) {
            x.push_back(static_cast<double>(r.relational_selections.size()));
            y.push_back(usefulness_mean(r));
        }
        return spearman(x, y).rho;
    };
    CHECK(rho_for(1.0, 21) > 0.5);
    CHECK(std::fabs(rho_for(0.0, 21)) < 0.15);
}

TEST_CASE("generator config rejects probabilities outside the unit interval") {
    GeneratorConfig cfg;
    cfg.tier_probs[2] = 1.5;
    CHECK_THROWS_AS(generate_synthetic(cfg, 1), std::invalid_argument);
    std::istringstream in("coupling=2.0\n");
    CHECK_THROWS_AS(read_generator_config(in), std::invalid_argument);
    std::istringstream bad("nonsense=1\n");
    CHECK_THROWS_AS(read_generator_config(bad), std::runtime_error);
}

TEST_CASE("generator config file parsing") {
    std::istringstream in(
        "# comment\n"
        "n_sle=5\n"
        "pool_tier1=4\n"
        "p_tier3=0.2\n"
        "p_lle_tier3=0.6\n"
        "coupling=0.25\n");
    GeneratorConfig cfg = read_generator_config(in);
    CHECK(cfg.group_sizes.at(AgencyGroup::SLE) == 5);
    CHECK(cfg.pool_sizes.at(1) == 4);
    CHECK(cfg.tier_probs.at(3) == 0.2);
    CHECK(cfg.selection_prob(AgencyGroup::LLE, 3) == 0.6);
    CHECK(cfg.selection_prob(AgencyGroup::SLE, 3) == 0.2);
    CHECK(cfg.coupling == 0.25);
}

TEST_CASE("bundled instrument codebook parses and covers the fixed lists") {
    Codebook cb = read_codebook_file(std::string(DRN_DATA_DIR) + "/codebook.txt");
    CHECK(cb.id_var == "RESPID");
    CHECK(cb.frequency_vars.size() == 2);
    CHECK(cb.usefulness_vars.size() == 12);
    CHECK(cb.relational_vars.count("FBI") == 1);
    CHECK(cb.relational_vars.count("JTBP") == 1);
    CHECK(cb.relational_vars.at("JTFBI").canonical_label ==
          cb.relational_vars.at("FBI").canonical_label);
}
