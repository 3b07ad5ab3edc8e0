#include "doctest.h"

#include <map>
#include <set>

#include "ocs/harness.hpp"
#include "ocs/instances.hpp"
#include "ocs/matching.hpp"
#include "ocs/oracle.hpp"

using namespace ocs;

TEST_CASE("validate accepts minimal two-way instance") {
    TwoWayInstance inst;
    inst.elements = {"a", "b"};
    inst.rounds = {{0, 1}};
    CHECK(!validate(inst).has_value());
}

TEST_CASE("validate rejects bad mass sums with the round index") {
    MultiWayInstance inst;
    inst.elements = {"a", "b"};
    inst.rounds = {{{0, 0.5}, {1, 0.4}}};
    auto err = validate(inst);
    REQUIRE(err.has_value());
    CHECK(err->find("round 0") != std::string::npos);
    CHECK(err->find("0.9") != std::string::npos);
}

TEST_CASE("single-element multi-way round is allowed") {
    MultiWayInstance inst;
    inst.elements = {"a"};
    inst.rounds = {{{0, 1.0}}};
    CHECK(!validate(inst).has_value());
}

TEST_CASE("two-way rounds need two distinct elements") {
    TwoWayInstance inst;
    inst.elements = {"a", "b"};
    inst.rounds = {{1, 1}};
    auto err = validate(inst);
    REQUIRE(err.has_value());
    CHECK(err->find("round 0") != std::string::npos);
}

TEST_CASE("vertex-weighted matching requires matching edge weights") {
    MatchingInstance inst;
    inst.kind = MatchingInstance::Kind::vertex_weighted;
    inst.offline = {{"u1", 2.0}};
    inst.online = {{"v1", {{0, 1.0}}}};
    auto err = validate(inst);
    REQUIRE(err.has_value());
    CHECK(err->find("v1") != std::string::npos);
}

TEST_CASE("tournament: round counts, winner appearances, determinism") {
    SUBCASE("k=1") {
        auto t = gen_tournament(1, 7);
        CHECK(t.instance.rounds.size() == 1);
        CHECK(t.instance.elements.size() == 2);
    }
    SUBCASE("k=3 has 7 rounds and the winner appears 3 times") {
        auto t = gen_tournament(3, 11);
        CHECK(t.instance.rounds.size() == 7);
        int appearances = 0;
        for (const auto& [a, b] : t.instance.rounds)
            if (a == t.winner || b == t.winner) ++appearances;
        CHECK(appearances == 3);
        CHECK(!validate(t.instance).has_value());
    }
    SUBCASE("same seed replays the same instance") {
        auto t1 = gen_tournament(2, 99), t2 = gen_tournament(2, 99);
        CHECK(t1.instance.rounds == t2.instance.rounds);
        CHECK(t1.winner == t2.winner);
    }
    SUBCASE("winner appears k times for several seeds and k") {
        for (int k = 1; k <= 4; ++k) {
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                auto t = gen_tournament(k, seed);
                int appearances = 0;
                for (const auto& [a, b] : t.instance.rounds)
                    if (a == t.winner || b == t.winner) ++appearances;
                CHECK(appearances == k);
            }
        }
    }
}

TEST_CASE("hardness instance alternates {0,1} and {0,2}") {
    auto inst = gen_ocs_hardness(1);
    REQUIRE(inst.rounds.size() == 3);
    CHECK(inst.rounds[0] == std::array<ElemId, 2>{0, 1});
    CHECK(inst.rounds[1] == std::array<ElemId, 2>{0, 2});
    CHECK(inst.rounds[2] == std::array<ElemId, 2>{0, 1});

    CHECK(gen_ocs_hardness(2).rounds.size() == 5);
    auto i3 = gen_ocs_hardness(3);
    CHECK(i3.rounds.size() == 7);
    for (const auto& [a, b] : i3.rounds) CHECK(a == 0); // element 0 in every round
}

TEST_CASE("counterexample instance matches the fixed construction") {
    auto inst = gen_positive_correlation_counterexample();
    REQUIRE(inst.rounds.size() == 7);
    CHECK(inst.elements.size() == 9);
    CHECK(!validate(inst).has_value());
    // Round 7 is uniform over {1,2,3}.
    const auto& last = inst.rounds[6];
    REQUIRE(last.size() == 3);
    for (const auto& [e, x] : last) {
        CHECK(e <= 2);
        CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
}

TEST_CASE("upper-triangular construction") {
    auto inst = gen_upper_triangular(2);
    REQUIRE(inst.online.size() == 2);
    CHECK(inst.online[0].edges.size() == 2);
    CHECK(inst.online[1].edges.size() == 1);
    CHECK(inst.online[1].edges[0].u == 1);
    CHECK(!validate(inst).has_value());
    CHECK(gen_upper_triangular(1).online.size() == 1);
}

TEST_CASE("json round trips preserve structure") {
    SUBCASE("two-way") {
        TwoWayInstance inst;
        inst.elements = {"a", "b", "c"};
        inst.rounds = {{0, 1}, {0, 2}};
        auto back = two_way_from_json(to_json(inst));
        CHECK(back.elements == inst.elements);
        CHECK(back.rounds == inst.rounds);
    }
    SUBCASE("multi-way") {
        auto inst = gen_positive_correlation_counterexample();
        auto back = multi_way_from_json(to_json(inst));
        REQUIRE(back.rounds.size() == inst.rounds.size());
        for (std::size_t t = 0; t < inst.rounds.size(); ++t) {
            REQUIRE(back.rounds[t].size() == inst.rounds[t].size());
            for (const auto& [e, x] : inst.rounds[t]) {
                auto idx = index_of(back.elements, inst.elements[e]);
                REQUIRE(idx.has_value());
                bool found = false;
                for (const auto& [be, bx] : back.rounds[t])
                    if (be == *idx && bx == doctest::Approx(x).epsilon(1e-15)) found = true;
                CHECK(found);
            }
        }
    }
    SUBCASE("matching") {
        auto inst = gen_upper_triangular(3);
        auto back = matching_from_json(to_json(inst));
        CHECK(back.kind == inst.kind);
        REQUIRE(back.online.size() == inst.online.size());
        for (std::size_t v = 0; v < inst.online.size(); ++v) {
            CHECK(back.online[v].id == inst.online[v].id);
            REQUIRE(back.online[v].edges.size() == inst.online[v].edges.size());
        }
    }
    SUBCASE("documented wire format parses") {
        auto inst = two_way_from_json(R"({"type":"two-way","rounds":[["a","b"],["a","c"]]})");
        CHECK(inst.elements.size() == 3);
        CHECK(inst.rounds.size() == 2);
        auto m = multi_way_from_json(R"({"type":"multi-way","rounds":[{"a":0.5,"b":0.5}]})");
        CHECK(m.rounds.size() == 1);
        auto g = matching_from_json(
            R"({"type":"matching","kind":"edge-weighted",)"
            R"("offline":[{"id":"u1","weight":1.0}],)"
            R"("online":[{"id":"v1","edges":[{"u":"u1","w":2.0}]}]})");
        CHECK(g.online[0].edges[0].w == 2.0);
    }
}

TEST_CASE("json round trips on random instances") {
    // Structural equality through element names; the parser re-interns ids in
    // first-appearance order.
    Rng rng(404);
    for (int i = 0; i < 10; ++i) {
        TwoWayInstance two = harness::random_two_way(rng, 9, 6);
        auto tback = two_way_from_json(to_json(two));
        REQUIRE(tback.rounds.size() == two.rounds.size());
        for (std::size_t t = 0; t < two.rounds.size(); ++t) {
            std::set<std::string> want{two.elements[two.rounds[t][0]],
                                       two.elements[two.rounds[t][1]]};
            std::set<std::string> got{tback.elements[tback.rounds[t][0]],
                                      tback.elements[tback.rounds[t][1]]};
            CHECK(want == got);
        }

        MultiWayInstance multi = harness::random_multi_way(rng, 8, 6);
        auto mback = multi_way_from_json(to_json(multi));
        REQUIRE(mback.rounds.size() == multi.rounds.size());
        for (std::size_t t = 0; t < multi.rounds.size(); ++t) {
            std::map<std::string, double> want, got;
            for (const auto& [e, x] : multi.rounds[t]) want[multi.elements[e]] = x;
            for (const auto& [e, x] : mback.rounds[t]) got[mback.elements[e]] = x;
            REQUIRE(want.size() == got.size());
            for (const auto& [name, x] : want)
                CHECK(got.at(name) == doctest::Approx(x).epsilon(1e-12));
        }

        MatchingInstance match =
            harness::random_matching(rng, MatchingInstance::Kind::edge_weighted, 6, 6);
        auto gback = matching_from_json(to_json(match));
        CHECK(offline_optimum(gback) == doctest::Approx(offline_optimum(match)).epsilon(1e-12));
    }
}

TEST_CASE("json parse errors") {
    CHECK_THROWS_AS((void)two_way_from_json(R"({"type":"multi-way","rounds":[]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)two_way_from_json(R"({"type":"two-way","rounds":[["a","a","b"]]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        (void)matching_from_json(
            R"({"type":"matching","kind":"edge-weighted","offline":[],)"
            R"("online":[{"id":"v1","edges":[{"u":"nope","w":1.0}]}]})"),
        std::invalid_argument);
    CHECK_THROWS_AS(
        (void)matching_from_json(
            R"({"type":"matching","kind":"mystery","offline":[],"online":[]})"),
        std::invalid_argument);
    CHECK(json_instance_type(R"({"type":"two-way","rounds":[]})") == "two-way");
}

TEST_CASE("generated instances validate") {
    for (int k = 1; k <= 4; ++k) CHECK(!validate(gen_tournament(k, 5).instance).has_value());
    for (int i = 1; i <= 4; ++i) CHECK(!validate(gen_ocs_hardness(i)).has_value());
    for (int n = 1; n <= 6; ++n) CHECK(!validate(gen_upper_triangular(n)).has_value());
}
