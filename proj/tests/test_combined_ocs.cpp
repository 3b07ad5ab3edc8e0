#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ocs/combined_ocs.hpp"
#include "ocs/harness.hpp"
#include "ocs/instances.hpp"
#include "ocs/oracle.hpp"

using namespace ocs;

namespace {

// E1={a,c} E2={b,d} E3={a,b} E4={a,c} E5={b,c} E6={b,c}, a..d = 0..3.
TwoWayInstance figure_instance() {
    TwoWayInstance inst;
    inst.elements = {"a", "b", "c", "d"};
    inst.rounds = {{0, 2}, {1, 3}, {0, 1}, {0, 2}, {1, 2}, {1, 2}};
    return inst;
}

TwoWayInstance repeated_pair(int k) {
    TwoWayInstance inst;
    inst.elements = {"a", "b"};
    for (int t = 0; t < k; ++t) inst.rounds.push_back({0, 1});
    return inst;
}

// {a,b}, {b,c}, {a,b}, {b,c}, ... keeps one pseudo-path growing forever.
TwoWayInstance overlap_chain(int k) {
    TwoWayInstance inst;
    inst.elements = {"a", "b", "c"};
    for (int t = 0; t < k; ++t)
        inst.rounds.push_back(t % 2 == 0 ? std::array<ElemId, 2>{0, 1}
                                         : std::array<ElemId, 2>{1, 2});
    return inst;
}

using ArcKey = std::tuple<std::uint32_t, std::uint32_t, ElemId>;

std::set<ArcKey> arc_keys(const CombinedOcs& sel) {
    std::set<ArcKey> keys;
    for (const auto& a : sel.arcs()) keys.insert({a.origin, a.dest, a.subscript});
    return keys;
}

} // namespace

TEST_CASE("ex-ante arcs of the figure instance") {
    CombinedOcs sel;
    Rng rng(1);
    run(sel, rounds_of(figure_instance()), rng);
    const std::set<ArcKey> expected{
        {0, 2, 0}, {1, 2, 1}, {0, 3, 2}, {2, 3, 0},
        {2, 4, 1}, {3, 4, 2}, {4, 5, 1}, {4, 5, 2},
    };
    CHECK(arc_keys(sel) == expected);
}

TEST_CASE("round with two fresh elements creates no arcs") {
    CombinedOcs sel;
    Rng rng(1);
    TwoWayInstance inst;
    inst.elements = {"a", "b", "c", "d"};
    inst.rounds = {{0, 1}, {2, 3}};
    run(sel, rounds_of(inst), rng);
    CHECK(sel.arcs().empty());
}

TEST_CASE("pseudo-path partition matches the figure") {
    CombinedOcs sel;
    Rng rng(3);
    run(sel, rounds_of(figure_instance()), rng);
    REQUIRE(sel.paths().size() == 3);

    auto path_keys = [&](const CombinedOcs::Path& p) {
        std::set<ArcKey> keys;
        for (auto side : {&p.left, &p.right})
            for (std::uint32_t a : *side)
                keys.insert({sel.arcs()[a].origin, sel.arcs()[a].dest, sel.arcs()[a].subscript});
        return keys;
    };
    std::vector<std::set<ArcKey>> got;
    for (const auto& p : sel.paths()) got.push_back(path_keys(p));

    const std::set<ArcKey> p1{{2, 3, 0}, {0, 3, 2}, {0, 2, 0}, {1, 2, 1}};
    const std::set<ArcKey> p2{{2, 4, 1}, {3, 4, 2}};
    const std::set<ArcKey> p3{{4, 5, 1}, {4, 5, 2}};
    CHECK(std::count(got.begin(), got.end(), p1) == 1);
    CHECK(std::count(got.begin(), got.end(), p2) == 1);
    CHECK(std::count(got.begin(), got.end(), p3) == 1);

    // Geometric order of the long path (negative end first):
    // (2,3)_a, (0,3)_c, (0,2)_a, (1,2)_b; round-4 arcs extend the negative
    // end, the round-3 pair sits on the positive end.
    for (const auto& p : sel.paths()) {
        if (path_keys(p) != p1) continue;
        std::vector<ArcKey> geo;
        std::vector<int> signs;
        for (auto it = p.left.rbegin(); it != p.left.rend(); ++it) {
            geo.push_back({sel.arcs()[*it].origin, sel.arcs()[*it].dest, sel.arcs()[*it].subscript});
            signs.push_back(sel.arcs()[*it].sign);
        }
        for (std::uint32_t a : p.right) {
            geo.push_back({sel.arcs()[a].origin, sel.arcs()[a].dest, sel.arcs()[a].subscript});
            signs.push_back(sel.arcs()[a].sign);
        }
        const std::vector<ArcKey> want{{2, 3, 0}, {0, 3, 2}, {0, 2, 0}, {1, 2, 1}};
        CHECK(geo == want);
        CHECK(signs == std::vector<int>{-1, -1, 1, 1});
    }
}

TEST_CASE("per-round selection is marginally uniform (exact)") {
    // sigma* is label-symmetric and roots label by a fixed convention, so
    // every round selects either element with probability exactly 1/2.
    for (const auto& inst : {figure_instance(), repeated_pair(5), overlap_chain(5)}) {
        const RoundSeq rounds = rounds_of(inst);
        std::vector<double> select_first(rounds.size(), 0.0);
        for_each_leaf(CombinedOcs{}, rounds, [&](double prob, const Trace& t) {
            for (std::size_t r = 0; r < rounds.size(); ++r)
                if (t.selections[r] == rounds[r].elems[0]) select_first[r] += prob;
        });
        for (double p : select_first) CHECK(p == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("parallel arcs form their own two-arc pseudo-path") {
    CombinedOcs sel;
    Rng rng(7);
    run(sel, rounds_of(repeated_pair(4)), rng);
    REQUIRE(sel.paths().size() == 3); // rounds 2,3,4 each spawn a pair
    for (const auto& p : sel.paths()) CHECK(p.left.size() + p.right.size() == 2);
}

TEST_CASE("overlap chain grows one path, positive end only after the start") {
    CombinedOcs sel;
    Rng rng(7);
    run(sel, rounds_of(overlap_chain(11)), rng);
    REQUIRE(sel.paths().size() == 1);
    const auto& p = sel.paths()[0];
    CHECK(p.left.empty());
    for (std::uint32_t a : p.right) CHECK(sel.arcs()[a].sign == 1);
    CHECK(!validate_run_structure(sel).has_value());

    // sigma+ never leaves three consecutive arcs unmatched.
    const auto& arcs = sel.arcs();
    for (std::size_t i = 0; i + 3 <= p.right.size(); ++i) {
        const bool any = arcs[p.right[i]].matched || arcs[p.right[i + 1]].matched ||
                         arcs[p.right[i + 2]].matched;
        CHECK(any);
    }
}

TEST_CASE("single round selects uniformly") {
    CombinedOcs sel;
    auto branches = sel.enumerate(Round::pair(3, 5));
    std::map<ElemId, double> law;
    for (const auto& b : branches) law[b.elem] += b.prob;
    CHECK(law[3] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(law[5] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("marginal arc match probability is 1/(3-p)") {
    const CombinedOcs proto;
    const RoundSeq rounds = rounds_of(repeated_pair(12));
    std::uint64_t matched = 0, total = 0;
    for (int i = 0; i < 50'000; ++i) {
        auto sel = proto.clone();
        Rng rng(404, i);
        run(*sel, rounds, rng);
        for (const auto& a : static_cast<const CombinedOcs&>(*sel).arcs()) {
            matched += a.matched ? 1 : 0;
            ++total;
        }
    }
    const double frac = static_cast<double>(matched) / static_cast<double>(total);
    CHECK(std::abs(frac - 1.0 / (3.0 - default_fc_p())) < 0.002);
}

TEST_CASE("structural invariants hold across a random corpus") {
    Rng rng(99);
    auto corpus = harness::adversarial_two_way_corpus(40, 10, rng);
    const CombinedOcs proto;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const RoundSeq rounds = rounds_of(corpus[i]);
        for (int rep = 0; rep < 50; ++rep) {
            auto sel = proto.clone();
            Rng run_rng(1000 + i, rep);
            run(*sel, rounds, run_rng);
            auto err = validate_run_structure(static_cast<const CombinedOcs&>(*sel));
            if (err) FAIL(*err);
        }
    }
}

TEST_CASE("forest OCS round mechanics") {
    const double beta = default_star_beta();
    SUBCASE("root labels smaller element heads and flips a fair coin") {
        struct Fixed : ChoiceSource {
            std::size_t pick;
            double prob = 0.0;
            std::size_t choose(std::span<const double> probs) override {
                prob = probs[pick];
                return pick;
            }
        };
        Fixed src;
        src.pick = 0;
        ForestRound r0 = forest_ocs_round({7, 4}, nullptr, 0, beta, src);
        CHECK(src.prob == 0.5);
        CHECK(r0.labels[1] == Label::heads); // element 4 < 7 gets heads
        CHECK(r0.labels[0] == Label::tails);
        CHECK(r0.selected == 4); // picked branch 0 = heads from origin
        src.pick = 1;
        ForestRound r1 = forest_ocs_round({7, 4}, nullptr, 0, beta, src);
        CHECK(r1.selected == 7);
    }
    SUBCASE("q_H2 forces tails and resets to origin") {
        struct Single : ChoiceSource {
            std::size_t choose(std::span<const double> probs) override {
                REQUIRE(probs.size() == 1);
                return 0;
            }
        };
        ForestRound parent;
        parent.elems = {0, 1};
        parent.labels = {Label::heads, Label::tails};
        parent.state = StarState::heads2;
        Single src;
        ForestRound child = forest_ocs_round({0, 1}, &parent, 0, beta, src);
        CHECK(child.state == StarState::origin);
        CHECK(child.selected == 1); // tails carrier
    }
}

TEST_CASE("sigma* chain obeys the beta-OCS window bounds (exact)") {
    // Full-chain forest (every junction matched): enumerate the sigma* chain
    // law and check every consecutive window, for both elements.
    const double beta = default_star_beta();
    const int T = 8;
    struct Frame {
        ForestRound round;
        int depth;
        double prob;
        std::uint32_t unsel_mask_a; // rounds where element 0 was NOT selected
    };
    std::map<std::uint32_t, double> law;
    struct Fixed : ChoiceSource {
        std::size_t pick = 0;
        std::size_t n = 0;
        double prob = 1.0;
        std::size_t choose(std::span<const double> probs) override {
            n = probs.size();
            prob = probs[pick];
            return pick;
        }
    };
    std::vector<Frame> stack;
    for (std::size_t pick = 0; pick < 2; ++pick) {
        Fixed src;
        src.pick = pick;
        ForestRound r = forest_ocs_round({0, 1}, nullptr, 0, beta, src);
        if (pick < src.n)
            stack.push_back({r, 1, src.prob, r.selected == 0 ? 0u : 1u});
    }
    while (!stack.empty()) {
        Frame fr = stack.back();
        stack.pop_back();
        if (fr.depth == T) {
            law[fr.unsel_mask_a] += fr.prob;
            continue;
        }
        for (std::size_t pick = 0; pick < 2; ++pick) {
            Fixed src;
            src.pick = pick;
            ForestRound nxt = forest_ocs_round({0, 1}, &fr.round, 0, beta, src);
            if (pick >= src.n) continue;
            std::uint32_t mask = fr.unsel_mask_a;
            if (nxt.selected != 0) mask |= 1u << fr.depth;
            stack.push_back({nxt, fr.depth + 1, fr.prob * src.prob, mask});
        }
    }
    for (int lo = 0; lo < T; ++lo) {
        for (int k = 1; lo + k <= T; ++k) {
            const std::uint32_t window = ((1u << k) - 1u) << lo;
            double prob = 0.0;
            for (const auto& [mask, p] : law)
                if ((mask & window) == window) prob += p;
            const double bound = std::pow(0.5, k) * std::pow(1.0 - beta, k - 1);
            CHECK(prob <= bound + 1e-12);
        }
    }
}

TEST_CASE("combined OCS satisfies the gamma bound on small instances (exact)") {
    const CombinedOcs proto;
    const double gamma = proto.gamma();
    Rng rng(2718);
    std::vector<TwoWayInstance> corpus;
    corpus.push_back(repeated_pair(6));
    corpus.push_back(overlap_chain(7));
    corpus.push_back(gen_ocs_hardness(2));
    corpus.push_back(gen_ocs_hardness(4));
    corpus.push_back(figure_instance());
    for (int i = 0; i < 4; ++i) corpus.push_back(harness::random_two_way(rng, 5, 4));
    for (const auto& inst : corpus) {
        const RoundSeq rounds = rounds_of(inst);
        const auto occ = harness::occurrence_lists(rounds, inst.elements.size());
        const auto laws = harness::element_mask_laws(proto, rounds, occ);
        for (std::size_t e = 0; e < occ.size(); ++e) {
            const int k = static_cast<int>(occ[e].size());
            if (k == 0) continue;
            const auto disjoint = harness::disjoint_sums(laws[e], k);
            const std::uint32_t full = (1u << k) - 1u;
            std::vector<std::size_t> positions;
            for (std::uint32_t subset = 1; subset <= full; ++subset) {
                positions.clear();
                for (int b = 0; b < k; ++b)
                    if (subset & (1u << b)) positions.push_back(b);
                const double bound = subsequence_bound(run_lengths(positions), gamma);
                CHECK(disjoint[full & ~subset] <= bound + 1e-9);
            }
        }
    }
}

TEST_CASE("subsequence_bound values") {
    CHECK(subsequence_bound(std::vector<int>{1}, 0.3) == doctest::Approx(0.5));
    CHECK(subsequence_bound(std::vector<int>{2, 2}, 0.0) == doctest::Approx(1.0 / 16.0));
    CHECK(subsequence_bound(std::vector<int>{3}, 0.109) ==
          doctest::Approx(0.099235125).epsilon(1e-12));
}

TEST_CASE("run_lengths decomposes position sets into maximal runs") {
    CHECK(run_lengths(std::vector<std::size_t>{0, 1, 3, 5, 6, 7}) == std::vector<int>{2, 1, 3});
    CHECK(run_lengths(std::vector<std::size_t>{2}) == std::vector<int>{1});
    CHECK(run_lengths(std::vector<std::size_t>{}) == std::vector<int>{});
}

TEST_CASE("determinism and snapshot round-trip") {
    const RoundSeq rounds = rounds_of(figure_instance());
    CombinedOcs a, b;
    Rng ra(12321), rb(12321);
    Trace ta = run(a, rounds, ra);
    Trace tb = run(b, rounds, rb);
    CHECK(ta.selections == tb.selections);
    CHECK(a.snapshot() == b.snapshot());

    // Restore mid-run and continue identically.
    CombinedOcs c;
    c.reset();
    Rng rc(5);
    c.step(rounds[0], rc);
    c.step(rounds[1], rc);
    const std::string mid = c.snapshot();
    Rng r1(77), r2(77);
    CombinedOcs d(c.params());
    d.restore(mid);
    const ElemId first = c.step(rounds[2], r1);
    const ElemId second = d.step(rounds[2], r2);
    CHECK(first == second);
    CHECK(c.snapshot() == d.snapshot());
}

TEST_CASE("step frequencies match the enumerated branch law from a frozen state") {
    CombinedOcs sel;
    sel.reset();
    Rng warm(9);
    const RoundSeq rounds = rounds_of(figure_instance());
    for (int t = 0; t < 4; ++t) sel.step(rounds[t], warm);
    const std::string frozen = sel.snapshot();

    std::map<ElemId, double> law;
    for (const auto& b : sel.enumerate(rounds[4])) law[b.elem] += b.prob;

    const int n = 100'000;
    std::map<ElemId, int> counts;
    for (int i = 0; i < n; ++i) {
        sel.restore(frozen);
        Rng rng(55, i);
        counts[sel.step(rounds[4], rng)]++;
    }
    for (const auto& [elem, prob] : law) {
        const double freq = static_cast<double>(counts[elem]) / n;
        const double sigma = std::sqrt(prob * (1.0 - prob) / n);
        CHECK(std::abs(freq - prob) <= 3.0 * sigma + 1e-9);
    }
}

TEST_CASE("debug dump emits one JSON line per round") {
    CombinedOcs sel;
    Rng rng(4);
    run(sel, rounds_of(figure_instance()), rng);
    const std::string dump = sel.debug_jsonl();
    CHECK(std::count(dump.begin(), dump.end(), '\n') == 6);
    CHECK(dump.find("\"arcs\"") != std::string::npos);
    CHECK(dump.find("\"labels\"") != std::string::npos);
}

namespace {

// Warm-up constructor for good instances (test fixture only): every node
// draws one of its two element slots uniformly and keeps that element's
// in-arc when it exists. Returns per-arc inclusion for a coin assignment.
struct WarmupArc {
    std::uint32_t origin, dest;
    ElemId subscript;
};

std::vector<WarmupArc> exante_arcs(const TwoWayInstance& inst) {
    std::vector<WarmupArc> arcs;
    std::map<ElemId, std::uint32_t> last;
    for (std::uint32_t t = 0; t < inst.rounds.size(); ++t) {
        for (ElemId e : inst.rounds[t]) {
            auto it = last.find(e);
            if (it != last.end()) arcs.push_back({it->second, t, e});
            last[e] = t;
        }
    }
    return arcs;
}

} // namespace

TEST_CASE("warm-up constructor is a 1/2-forest constructor on good instances") {
    // Good instance: no round has two out-neighbors sharing a common element
    // with it. E1={a,b} E2={a,c} E3={b,c} E4={a,b}.
    TwoWayInstance inst;
    inst.elements = {"a", "b", "c"};
    inst.rounds = {{0, 1}, {0, 2}, {1, 2}, {0, 1}};
    const auto arcs = exante_arcs(inst);
    const auto T = static_cast<std::uint32_t>(inst.rounds.size());

    // Enumerate the per-round coins exactly.
    std::vector<std::vector<bool>> outcomes; // arc inclusion per coin pattern
    for (std::uint32_t coins = 0; coins < (1u << T); ++coins) {
        std::vector<bool> incl(arcs.size(), false);
        for (std::size_t a = 0; a < arcs.size(); ++a) {
            const ElemId kept = inst.rounds[arcs[a].dest][(coins >> arcs[a].dest) & 1u];
            incl[a] = kept == arcs[a].subscript;
        }
        outcomes.push_back(std::move(incl));

        // Always a good forest: at most one in-arc kept per node, and the
        // good-instance property covers the children condition.
        std::map<std::uint32_t, int> in_count;
        for (std::size_t a = 0; a < arcs.size(); ++a)
            if (outcomes.back()[a]) in_count[arcs[a].dest]++;
        for (const auto& [node, count] : in_count) CHECK(count <= 1);
    }

    // E (1-beta)^{|forest arcs in U|} <= (1 - beta/2)^{|e-arcs in U|} for all
    // elements e, all node subsets U involving e, and a beta grid.
    for (ElemId e = 0; e < 3; ++e) {
        std::vector<std::uint32_t> nodes_with_e;
        for (std::uint32_t t = 0; t < T; ++t)
            if (inst.rounds[t][0] == e || inst.rounds[t][1] == e) nodes_with_e.push_back(t);
        for (std::uint32_t pick = 1; pick < (1u << nodes_with_e.size()); ++pick) {
            std::set<std::uint32_t> U;
            for (std::size_t i = 0; i < nodes_with_e.size(); ++i)
                if (pick & (1u << i)) U.insert(nodes_with_e[i]);
            int e_arcs = 0;
            std::vector<std::size_t> induced;
            for (std::size_t a = 0; a < arcs.size(); ++a) {
                if (!U.count(arcs[a].origin) || !U.count(arcs[a].dest)) continue;
                induced.push_back(a);
                if (arcs[a].subscript == e) ++e_arcs;
            }
            for (double beta : {0.1, 0.5, std::sqrt(2.0) - 1.0, 1.0}) {
                double expect = 0.0;
                for (const auto& incl : outcomes) {
                    int kept = 0;
                    for (std::size_t a : induced) kept += incl[a] ? 1 : 0;
                    expect += std::pow(1.0 - beta, kept);
                }
                expect /= static_cast<double>(outcomes.size());
                CHECK(expect <= std::pow(1.0 - beta / 2.0, e_arcs) + 1e-12);
            }
        }
    }
}

TEST_CASE("hardness event-sum stays above i(i+1)/2") {
    const CombinedOcs proto;
    for (int i = 1; i <= 3; ++i) {
        const RoundSeq rounds = rounds_of(gen_ocs_hardness(i));
        double total = 0.0;
        const int trials = 20'000;
        for (int trial = 0; trial < trials; ++trial) {
            auto sel = proto.clone();
            Rng rng(31 + i, trial);
            Trace trace = run(*sel, rounds, rng);
            int j_odd = 0, j_even = 0;
            for (std::size_t t = 0; t < trace.selections.size(); ++t)
                if (trace.selections[t] == 0) ((t % 2 == 0) ? j_odd : j_even)++;
            total += j_even + (i + 1 - j_odd) * (i - j_even) + j_odd * (j_odd - 1) / 2.0 +
                     j_even * (j_even - 1) / 2.0;
        }
        CHECK(total / trials >= i * (i + 1) / 2.0 - 1e-9);
    }
}
