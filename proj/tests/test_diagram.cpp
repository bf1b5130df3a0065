#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dsep_oracle.hpp"
#include "transport/diagram.hpp"
#include "transport/simgen.hpp"

using namespace transport;

namespace {

const char* kChain =
    "node A\nnode Y\nnode V\nnode P\n"
    "edge A -> Y\nedge V -> Y\nedge P -> V\n"
    "treatment A\noutcome Y\nselection P\n";

SelectionDiagram chain() { return parse_diagram(kChain); }

} // namespace

TEST_CASE("parse minimal diagram") {
    SelectionDiagram g = parse_diagram(
        "node A\nnode Y\nnode P\nedge A -> Y\nedge P -> Y\n"
        "treatment A\noutcome Y\nselection P\n");
    CHECK(g.node_count() == 3);
    CHECK(g.name(g.treatment()) == "A");
    CHECK(g.name(g.outcome()) == "Y");
    CHECK(g.name(g.selection()) == "P");
    CHECK(g.has_edge(g.index("A"), g.index("Y")));
    CHECK_FALSE(g.has_edge(g.index("Y"), g.index("A")));
}

TEST_CASE("parse rejects structural violations") {
    CHECK_THROWS_AS(parse_diagram("node A\nnode Y\nnode P\n"
                                  "edge A -> Y\nedge Y -> A\nedge P -> Y\n"
                                  "treatment A\noutcome Y\nselection P\n"),
                    CycleError);
    CHECK_THROWS_AS(parse_diagram("node A\nnode Y\nnode P\n"
                                  "edge A -> P\nedge A -> Y\nedge P -> Y\n"
                                  "treatment A\noutcome Y\nselection P\n"),
                    SelectionAfterTreatment);
    // selection node with a non-treatment parent
    CHECK_THROWS_AS(parse_diagram("node A\nnode Y\nnode P\nnode W\n"
                                  "edge W -> P\nedge A -> Y\nedge P -> Y\n"
                                  "treatment A\noutcome Y\nselection P\n"),
                    RoleError);
    CHECK_THROWS_AS(parse_diagram("node A\nnode Y\nnode P\nedge A -> Y\n"
                                  "treatment A\noutcome Y\n"),
                    RoleError);
    CHECK_THROWS_AS(parse_diagram("node A\nnode Y\nnode P\nedge A -> Y\n"
                                  "treatment A\ntreatment Y\noutcome Y\nselection P\n"),
                    RoleError);
    CHECK_THROWS_AS(parse_diagram("node A\nnode Y\nnode P\nedge A => Y\n"
                                  "treatment A\noutcome Y\nselection P\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_diagram("node A\nnode Y\nnode P\nedge A -> Q\n"
                                  "treatment A\noutcome Y\nselection P\n"),
                    ParseError);
}

TEST_CASE("parse error carries the line number") {
    try {
        parse_diagram("node A\nnode Y\nnode P\nfrobnicate\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("serialize round-trips through parse") {
    SelectionDiagram g = chain();
    std::string canon = serialize_diagram(g);
    CHECK(serialize_diagram(parse_diagram(canon)) == canon);
}

TEST_CASE("chain and collider d-separation") {
    SelectionDiagram g = chain();
    CHECK(d_separated(g, {"Y", "P", {"V"}}));
    CHECK_FALSE(d_separated(g, {"Y", "P", {}}));

    SelectionDiagram col = parse_diagram(
        "node A\nnode Y\nnode C\nnode P\n"
        "edge A -> Y\nedge P -> C\nedge Y -> C\n"
        "treatment A\noutcome Y\nselection P\n");
    CHECK(d_separated(col, {"Y", "P", {}}));
    CHECK_FALSE(d_separated(col, {"Y", "P", {"C"}}));
    CHECK_THROWS_AS(d_separated(col, {"Y", "Q", {}}), UnknownNode);
}

TEST_CASE("conditioning on a collider descendant opens the path") {
    SelectionDiagram g = parse_diagram(
        "node A\nnode Y\nnode C\nnode D\nnode P\n"
        "edge A -> Y\nedge P -> C\nedge Y -> C\nedge C -> D\n"
        "treatment A\noutcome Y\nselection P\n");
    CHECK(d_separated(g, {"Y", "P", {}}));
    CHECK_FALSE(d_separated(g, {"Y", "P", {"D"}}));
}

TEST_CASE("random diagrams agree with the path-enumeration oracle") {
    SplitMix64 rng(20240811);
    int queries = 0;
    for (int trial = 0; trial < 120; ++trial) {
        int n = 3 + static_cast<int>(rng.below(5)); // up to 7 nodes
        SelectionDiagram g = random_diagram(n, Rat(3, 10), rng);
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y)
                for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
                    if (mask & ((std::uint64_t(1) << x) | (std::uint64_t(1) << y)))
                        continue;
                    std::set<int> given;
                    for (int i = 0; i < n; ++i)
                        if (mask & (std::uint64_t(1) << i)) given.insert(i);
                    bool fast = d_separated(g, x, y, given);
                    bool slow = testing::dsep_oracle(g, x, y, given);
                    REQUIRE(fast == slow);
                    // symmetry in the query pair
                    REQUIRE(d_separated(g, y, x, given) == fast);
                    ++queries;
                }
    }
    CHECK(queries > 10000);
}

TEST_CASE("adjustment sets: single blocking node") {
    auto sets = sufficient_adjustment_sets(chain(), {"V"});
    REQUIRE(sets.size() == 1);
    CHECK(sets[0] == std::set<std::string>{"V"});
}

TEST_CASE("adjustment sets: direct edge is unblockable") {
    SelectionDiagram g = parse_diagram(
        "node A\nnode Y\nnode V\nnode P\n"
        "edge A -> Y\nedge P -> Y\nedge P -> V\nedge V -> Y\n"
        "treatment A\noutcome Y\nselection P\n");
    CHECK(sufficient_adjustment_sets(g, {"V"}).empty());
    BaselineReduction red = check_baseline_reduction(g);
    CHECK_FALSE(red.ok);
    CHECK(red.reason.find("direct edge") != std::string::npos);
}

TEST_CASE("adjustment sets: two parallel paths need both nodes") {
    SelectionDiagram g = parse_diagram(
        "node A\nnode Y\nnode V1\nnode V2\nnode P\n"
        "edge A -> Y\nedge P -> V1\nedge P -> V2\nedge V1 -> Y\nedge V2 -> Y\n"
        "treatment A\noutcome Y\nselection P\n");
    auto sets = sufficient_adjustment_sets(g, {"V1", "V2"});
    REQUIRE(sets.size() == 1);
    CHECK(sets[0] == std::set<std::string>({"V1", "V2"}));
}

TEST_CASE("returned sets are separating and minimal") {
    SplitMix64 rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 4 + static_cast<int>(rng.below(4));
        SelectionDiagram g = random_diagram(n, Rat(2, 5), rng);
        SelectionDiagram cut = g.mutilate(g.treatment());
        for (const auto& set : sufficient_adjustment_sets(g, baseline_candidates(g))) {
            std::set<int> z;
            for (const auto& name : set) z.insert(g.index(name));
            REQUIRE(d_separated(cut, cut.outcome(), cut.selection(), z));
            for (int drop : z) {
                std::set<int> sub = z;
                sub.erase(drop);
                REQUIRE_FALSE(d_separated(cut, cut.outcome(), cut.selection(), sub));
            }
        }
    }
}

TEST_CASE("candidate validation") {
    SelectionDiagram g = parse_diagram(
        "node A\nnode Y\nnode V\nnode M\nnode L latent\nnode P\n"
        "edge A -> M\nedge M -> Y\nedge P -> V\nedge V -> Y\nedge L -> Y\n"
        "treatment A\noutcome Y\nselection P\n");
    CHECK_THROWS_AS(sufficient_adjustment_sets(g, {"M"}), NonBaselineCandidate);
    CHECK_THROWS_AS(sufficient_adjustment_sets(g, {"L"}), NonBaselineCandidate);
    CHECK_THROWS_AS(sufficient_adjustment_sets(g, {"Y"}), NonBaselineCandidate);
    CHECK(baseline_candidates(g) == std::set<std::string>{"V"});
}

TEST_CASE("baseline reduction verdicts") {
    BaselineReduction ok = check_baseline_reduction(chain());
    CHECK(ok.ok);
    CHECK(ok.witness == std::set<std::string>{"V"});

    // only separator is the mediator M, a descendant of A
    SelectionDiagram post = parse_diagram(
        "node A\nnode Y\nnode M\nnode P\n"
        "edge A -> M\nedge M -> Y\nedge P -> M\n"
        "treatment A\noutcome Y\nselection P\n");
    BaselineReduction red = check_baseline_reduction(post);
    CHECK_FALSE(red.ok);
    CHECK(red.reason.find("post-treatment") != std::string::npos);
}

TEST_CASE("transportability verdict") {
    TransportabilityVerdict yes = transportability(chain());
    CHECK(yes.transportable);
    CHECK(yes.witness_set == std::set<std::string>{"V"});

    SelectionDiagram direct = parse_diagram(
        "node A\nnode Y\nnode P\nedge A -> Y\nedge P -> Y\n"
        "treatment A\noutcome Y\nselection P\n");
    TransportabilityVerdict no = transportability(direct);
    CHECK_FALSE(no.transportable);
    CHECK(no.reason.find("open path") != std::string::npos);
    CHECK(no.reason.find("P") != std::string::npos);
}

TEST_CASE("monotone failure: a collider-free open path no set covers stays open") {
    // An edge x -> y is a path with no colliders that no conditioning set can
    // cover, so every Z must leave the pair d-connected.
    SplitMix64 rng(991);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 4 + static_cast<int>(rng.below(3));
        SelectionDiagram g = random_diagram(n, Rat(2, 5), rng);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                if (!g.has_edge(x, y)) continue;
                for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
                    if (mask & ((std::uint64_t(1) << x) | (std::uint64_t(1) << y)))
                        continue;
                    std::set<int> given;
                    for (int i = 0; i < n; ++i)
                        if (mask & (std::uint64_t(1) << i)) given.insert(i);
                    REQUIRE_FALSE(d_separated(g, x, y, given));
                }
            }
    }
}

TEST_CASE("descendants and mutilation") {
    SelectionDiagram g = chain();
    auto d = g.descendants(g.index("A"));
    CHECK(d.count(g.index("A")));
    CHECK(d.count(g.index("Y")));
    CHECK_FALSE(d.count(g.index("V")));
    SelectionDiagram cut = g.mutilate(g.index("Y"));
    CHECK_FALSE(cut.has_edge(g.index("A"), g.index("Y")));
    CHECK(cut.has_edge(g.index("P"), g.index("V")));
}
