#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "drn/measures.hpp"
#include "drn/rng.hpp"
#include "oracles.hpp"

using namespace drn;
using Catch::Approx;

namespace {

EgoNetwork star(int k) {
    Graph g;
    g.add_node("ego");
    for (int i = 0; i < k; ++i) g.add_edge("ego", "a" + std::to_string(i));
    return EgoNetwork{"ego", g};
}

EgoNetwork random_ego(Rng& rng, int alters, double density) {
    Graph g = oracle::random_graph(rng, alters, density);
    g.add_node("ego");
    for (const auto& v : g.nodes())
        if (v != "ego" && rng.bernoulli(0.7)) g.add_edge("ego", v);
    return ego_network(g, "ego");
}

SurveyRecord record_with(std::map<std::string, int> freq, std::map<std::string, int> use,
                         std::optional<int> prep) {
    SurveyRecord r;
    r.resp_id = "r";
    r.frequency_codes = std::move(freq);
    r.usefulness_codes = std::move(use);
    r.preparedness_code = prep;
    return r;
}

}  // namespace

TEST_CASE("degree counts the ego's alters") {
    CHECK(degree_centrality(star(4)) == 4);
    CHECK(degree_centrality(star(0)) == 0);
}

TEST_CASE("ego betweenness of a star is k(k-1)/2") {
    CHECK(ego_betweenness(star(4)) == Approx(6.0).margin(1e-12));
    CHECK(ego_betweenness(star(1)) == 0.0);
    for (int k = 1; k <= 20; ++k)
        CHECK(ego_betweenness(star(k)) == Approx(k * (k - 1) / 2.0).margin(1e-9));
}

TEST_CASE("an alter-alter tie removes exactly that pair's contribution") {
    EgoNetwork e = star(4);
    e.graph.add_edge("a0", "a1");
    // pair (a0,a1) now bypasses ego; the remaining 5 pairs still need it
    CHECK(ego_betweenness(e) == Approx(5.0).margin(1e-12));
}

TEST_CASE("ego betweenness vanishes when alters form a clique") {
    EgoNetwork e = star(4);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            e.graph.add_edge("a" + std::to_string(i), "a" + std::to_string(j));
    CHECK(ego_betweenness(e) == 0.0);
}

TEST_CASE("shared alter pairs split their contribution") {
    // a0 and a1 are connected through both ego and a2: two shortest paths,
    // ego carries half
    EgoNetwork e = star(3);
    e.graph.add_edge("a0", "a2");
    e.graph.add_edge("a1", "a2");
    // pairs: (a0,a1) split 1/2, (a0,a2) direct 0, (a1,a2) direct 0
    CHECK(ego_betweenness(e) == Approx(0.5).margin(1e-12));
}

TEST_CASE("ego betweenness matches exhaustive shortest-path counting") {
    Rng rng(37);
    for (int trial = 0; trial < 200; ++trial) {
        EgoNetwork e = random_ego(rng, 3 + static_cast<int>(rng.below(6)), 0.4);
        std::vector<NodeId> alters;
        for (const auto& [v, w] : e.graph.neighbors(e.ego)) alters.push_back(v);
        double brute = oracle::betweenness_brute(e.graph, e.ego, alters);
        CHECK(ego_betweenness(e) == Approx(brute).margin(1e-9));
    }
}

TEST_CASE("adding an alter-alter tie never increases ego betweenness") {
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        EgoNetwork e = random_ego(rng, 6, 0.3);
        std::vector<NodeId> alters;
        for (const auto& [v, w] : e.graph.neighbors(e.ego)) alters.push_back(v);
        if (alters.size() < 2) continue;
        double before = ego_betweenness(e);
        std::size_t i = rng.below(alters.size());
        std::size_t j = rng.below(alters.size());
        if (i == j) continue;
        e.graph.add_edge(alters[i], alters[j]);
        CHECK(ego_betweenness(e) <= before + 1e-9);
    }
}

TEST_CASE("tie strength inverts and averages the contact-frequency codes") {
    CHECK(tie_strength(record_with({{"A", 1}}, {}, {})) == Approx(5.0));
    CHECK(tie_strength(record_with({{"A", 6}, {"B", 6}}, {}, {})) == Approx(0.0));
    CHECK(tie_strength(record_with({{"A", 2}, {"B", 4}}, {}, {})) == Approx(3.0));
    CHECK_FALSE(tie_strength(record_with({}, {}, {})).has_value());
}

TEST_CASE("readiness inverts the preparedness code") {
    CHECK(readiness(record_with({}, {}, 1)) == 4);
    CHECK(readiness(record_with({}, {}, 4)) == 1);
    CHECK_FALSE(readiness(record_with({}, {}, std::nullopt)).has_value());
}

TEST_CASE("accessibility counts sources with usefulness at least 2") {
    CHECK(accessibility(record_with({}, {{"IFFBI", 3}, {"IFMED", 1}, {"IFSTAT", 2}}, {})) == 2);
    CHECK(accessibility(record_with({}, {}, {})) == 0);
    std::map<std::string, int> all4;
    for (int i = 1; i <= 12; ++i) all4["IF" + std::to_string(i)] = 4;
    CHECK(accessibility(record_with({}, all4, {})) == 12);
}

TEST_CASE("quality averages the used sources only") {
    CHECK(quality(record_with({}, {{"A", 4}, {"B", 4}, {"C", 1}}, {})) == Approx(4.0));
    CHECK(quality(record_with({}, {{"A", 2}, {"B", 4}}, {})) == Approx(3.0));
    CHECK_FALSE(quality(record_with({}, {{"A", 1}}, {})).has_value());
    CHECK_FALSE(quality(record_with({}, {}, {})).has_value());
}

TEST_CASE("quality is missing exactly when accessibility is zero") {
    Rng rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<std::string, int> use;
        for (int i = 0; i < 12; ++i)
            if (rng.bernoulli(0.5))
                use["IF" + std::to_string(i)] = 1 + static_cast<int>(rng.below(4));
        SurveyRecord r = record_with({}, use, {});
        CHECK(quality(r).has_value() == (accessibility(r) > 0));
        if (auto q = quality(r)) {
            CHECK(*q >= 2.0);
            CHECK(*q <= 4.0);
        }
    }
}

TEST_CASE("profile of a star respondent") {
    SurveyRecord r;
    r.resp_id = "r1";
    r.agency_group = AgencyGroup::SES;
    r.relational_selections = {"FBI", "Border Patrol", "County Sheriff"};
    r.frequency_codes = {{"MEETMUN", 2}};
    r.usefulness_codes = {{"IFFBI", 3}, {"IFMED", 1}};
    r.preparedness_code = 2;
    RespondentProfile p = compute_profile(r, nullptr, AlterTiesMode::Star);
    CHECK(p.connectedness.degree == 3);
    CHECK(p.connectedness.ego_betweenness == Approx(3.0));
    CHECK(p.connectedness.tie_strength == Approx(4.0));
    CHECK(p.coordination.readiness == 3);
    CHECK(p.coordination.quality == Approx(3.0));
    CHECK(p.coordination.accessibility == 1);
}

TEST_CASE("survey-derived measures do not depend on the alter-ties mode") {
    SurveyRecord r;
    r.resp_id = "r1";
    r.relational_selections = {"A", "B"};
    r.frequency_codes = {{"M", 3}};
    r.usefulness_codes = {{"U", 4}};
    r.preparedness_code = 1;
    Graph agg;
    agg.add_edge("A", "B");
    RespondentProfile s = compute_profile(r, &agg, AlterTiesMode::Star);
    RespondentProfile a = compute_profile(r, &agg, AlterTiesMode::Aggregate);
    CHECK(s.connectedness.degree == a.connectedness.degree);
    CHECK(s.connectedness.tie_strength == a.connectedness.tie_strength);
    CHECK(s.coordination.readiness == a.coordination.readiness);
    CHECK(s.coordination.quality == a.coordination.quality);
    CHECK(s.coordination.accessibility == a.coordination.accessibility);
    // only ego betweenness reacts to the alter-alter tie
    CHECK(s.connectedness.ego_betweenness == Approx(1.0));
    CHECK(a.connectedness.ego_betweenness == Approx(0.0));
}

TEST_CASE("profiles round-trip through csv") {
    SurveyRecord full, sparse;
    full.resp_id = "r1";
    full.agency_group = AgencyGroup::SLE;
    full.relational_selections = {"A", "B", "C"};
    full.frequency_codes = {{"M", 2}, {"N", 5}};
    full.usefulness_codes = {{"U", 3}};
    full.preparedness_code = 3;
    sparse.resp_id = "r2";
    sparse.agency_group = AgencyGroup::LLE;

    auto profiles = compute_profiles({full, sparse}, nullptr, AlterTiesMode::Star);
    std::ostringstream os;
    write_profiles_csv(profiles, os);
    std::istringstream is(os.str());
    auto back = read_profiles_csv(is);
    REQUIRE(back.size() == 2);
    CHECK(back[0].resp_id == "r1");
    CHECK(back[0].connectedness.degree == 3);
    CHECK(back[0].connectedness.ego_betweenness == profiles[0].connectedness.ego_betweenness);
    CHECK(back[0].connectedness.tie_strength == profiles[0].connectedness.tie_strength);
    CHECK(back[1].agency_group == AgencyGroup::LLE);
    CHECK_FALSE(back[1].connectedness.tie_strength.has_value());
    CHECK_FALSE(back[1].coordination.readiness.has_value());
    CHECK_FALSE(back[1].coordination.quality.has_value());
    CHECK(back[1].coordination.accessibility == 0);
}
