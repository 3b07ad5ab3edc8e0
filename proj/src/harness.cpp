#include "ocs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>

#include "ocs/flag_ocs.hpp"
#include "ocs/matching.hpp"
#include "ocs/multiway.hpp"
#include "ocs/oracle.hpp"

namespace ocs::harness {

namespace {

std::string cfg(std::initializer_list<std::pair<const char*, std::string>> kv) {
    std::ostringstream os;
    for (const auto& [k, v] : kv) os << k << '=' << v << ';';
    return os.str();
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

WeightFunction weight_fn(const Options& opt) {
    return opt.c == 0.0 ? WeightFunction::cubic() : WeightFunction::cubic(opt.c);
}

} // namespace

// ---------------------------------------------------------------------------
// Corpora
// ---------------------------------------------------------------------------

TwoWayInstance random_two_way(Rng& rng, int max_rounds, int max_elems) {
    const int n = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_elems - 1));
    const int t = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_rounds));
    TwoWayInstance inst;
    for (int e = 0; e < n; ++e) inst.elements.push_back("e" + std::to_string(e));
    for (int i = 0; i < t; ++i) {
        const auto a = static_cast<ElemId>(rng.next_u64() % n);
        auto b = static_cast<ElemId>(rng.next_u64() % (n - 1));
        if (b >= a) ++b;
        inst.rounds.push_back({a, b});
    }
    return inst;
}

MultiWayInstance random_multi_way(Rng& rng, int max_rounds, int max_elems) {
    const int n = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_elems - 1));
    const int t = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_rounds));
    MultiWayInstance inst;
    for (int e = 0; e < n; ++e) inst.elements.push_back("e" + std::to_string(e));
    for (int i = 0; i < t; ++i) {
        const int support = 1 + static_cast<int>(rng.next_u64() % std::min(n, 4));
        std::vector<ElemId> pool(n);
        for (int e = 0; e < n; ++e) pool[e] = static_cast<ElemId>(e);
        for (int s = 0; s < support; ++s)
            std::swap(pool[s], pool[s + rng.next_u64() % (n - s)]);
        std::vector<std::pair<ElemId, double>> round;
        double sum = 0.0;
        for (int s = 0; s < support; ++s) {
            const double u = 0.05 + 0.95 * rng.uniform();
            round.emplace_back(pool[s], u);
            sum += u;
        }
        for (auto& [e, x] : round) x /= sum;
        inst.rounds.push_back(std::move(round));
    }
    return inst;
}

MatchingInstance random_matching(Rng& rng, MatchingInstance::Kind kind, int max_offline,
                                 int max_online) {
    const int n_off = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_offline - 1));
    const int n_on = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_online - 1));
    MatchingInstance inst;
    inst.kind = kind;
    for (int u = 0; u < n_off; ++u) {
        double w = 1.0;
        if (kind == MatchingInstance::Kind::vertex_weighted)
            w = 0.25 + 4.0 * rng.uniform();
        inst.offline.push_back({"u" + std::to_string(u + 1), w});
    }
    for (int v = 0; v < n_on; ++v) {
        MatchingInstance::OnlineVertex ov;
        ov.id = "v" + std::to_string(v + 1);
        for (int u = 0; u < n_off; ++u) {
            if (rng.uniform() > 0.45) continue;
            double w = 1.0;
            if (kind == MatchingInstance::Kind::vertex_weighted) w = inst.offline[u].weight;
            if (kind == MatchingInstance::Kind::edge_weighted) w = 0.1 + 5.0 * rng.uniform();
            ov.edges.push_back({static_cast<std::uint32_t>(u), w});
        }
        if (ov.edges.empty()) {
            const auto u = static_cast<std::uint32_t>(rng.next_u64() % n_off);
            double w = 1.0;
            if (kind == MatchingInstance::Kind::vertex_weighted) w = inst.offline[u].weight;
            if (kind == MatchingInstance::Kind::edge_weighted) w = 0.1 + 5.0 * rng.uniform();
            ov.edges.push_back({u, w});
        }
        inst.online.push_back(std::move(ov));
    }
    return inst;
}

std::vector<TwoWayInstance> adversarial_two_way_corpus(std::size_t count, int max_rounds, Rng& rng) {
    std::vector<TwoWayInstance> corpus;
    corpus.reserve(count);

    auto path_instance = [](int k) {
        TwoWayInstance inst;
        inst.elements = {"a", "b"};
        for (int t = 0; t < k; ++t) inst.rounds.push_back({0, 1});
        return inst;
    };
    auto interleaved = [](int k) {
        TwoWayInstance inst;
        inst.elements = {"a", "b", "c", "d"};
        for (int t = 0; t < k; ++t)
            inst.rounds.push_back(t % 2 == 0 ? std::array<ElemId, 2>{0, 1}
                                             : std::array<ElemId, 2>{2, 3});
        return inst;
    };
    auto figure_instance = [] {
        // E1={a,c} E2={b,d} E3={a,b} E4={a,c} E5={b,c} E6={b,c}
        TwoWayInstance inst;
        inst.elements = {"a", "b", "c", "d"};
        inst.rounds = {{0, 2}, {1, 3}, {0, 1}, {0, 2}, {1, 2}, {1, 2}};
        return inst;
    };

    for (int i = 1; i <= 4 && corpus.size() < count; ++i) corpus.push_back(gen_ocs_hardness(i));
    for (int k = 2; k <= std::min(10, max_rounds) && corpus.size() < count; ++k)
        corpus.push_back(path_instance(k));
    for (int k = 4; k <= std::min(10, max_rounds) && corpus.size() < count; k += 2)
        corpus.push_back(interleaved(k));
    if (corpus.size() < count) corpus.push_back(figure_instance());
    for (int k = 2; k <= 3 && corpus.size() < count; ++k)
        corpus.push_back(gen_tournament(k, rng.next_u64()).instance);

    // Random fill, biased toward repeating earlier pairs (adversarial for
    // negative correlation).
    while (corpus.size() < count) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 4); // 2..5 elements
        const int t = 3 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_rounds - 2));
        TwoWayInstance inst;
        for (int e = 0; e < n; ++e) inst.elements.push_back("e" + std::to_string(e));
        for (int i = 0; i < t; ++i) {
            if (!inst.rounds.empty() && rng.uniform() < 0.5) {
                inst.rounds.push_back(inst.rounds[rng.next_u64() % inst.rounds.size()]);
            } else {
                const auto a = static_cast<ElemId>(rng.next_u64() % n);
                auto b = static_cast<ElemId>(rng.next_u64() % (n - 1));
                if (b >= a) ++b;
                inst.rounds.push_back({a, b});
            }
        }
        corpus.push_back(std::move(inst));
    }
    return corpus;
}

TwoWayWeightRule random_weight_rule(std::uint64_t rule_seed) {
    return [rule_seed](const TwoWayState& st, const Round& r) -> std::array<double, 2> {
        auto weight = [&](ElemId e, ElemId o) {
            const std::uint64_t key = (static_cast<std::uint64_t>(e) << 40) ^
                                      (static_cast<std::uint64_t>(o) << 20) ^
                                      (static_cast<std::uint64_t>(st.k_of(e)) << 10) ^
                                      (static_cast<std::uint64_t>(st.k_of(o)) << 4) ^
                                      (st.is_selected(o) ? 2u : 0u);
            const double u = Rng(rule_seed, key).uniform();
            return u < 0.2 ? 0.0 : 2.0 * u; // occasional hard zeros
        };
        return {weight(r.elems[0], r.elems[1]), weight(r.elems[1], r.elems[0])};
    };
}

// ---------------------------------------------------------------------------
// Per-element mask machinery
// ---------------------------------------------------------------------------

std::vector<std::vector<std::size_t>> occurrence_lists(const RoundSeq& rounds, std::size_t n_elems) {
    std::vector<std::vector<std::size_t>> occ(n_elems);
    for (std::size_t t = 0; t < rounds.size(); ++t)
        for (ElemId e : rounds[t].elems) occ[e].push_back(t);
    return occ;
}

namespace {

struct MaskIndex {
    // position of round t in element e's occurrence list, else -1
    std::vector<std::vector<int>> pos_of_round;

    MaskIndex(const RoundSeq& rounds, const std::vector<std::vector<std::size_t>>& occ) {
        pos_of_round.assign(occ.size(), std::vector<int>(rounds.size(), -1));
        for (std::size_t e = 0; e < occ.size(); ++e)
            for (std::size_t i = 0; i < occ[e].size(); ++i)
                pos_of_round[e][occ[e][i]] = static_cast<int>(i);
    }

    std::uint32_t selected_mask(std::size_t e, const Trace& trace) const {
        std::uint32_t mask = 0;
        for (std::size_t t = 0; t < trace.selections.size(); ++t) {
            const ElemId sel = trace.selections[t];
            if (sel < pos_of_round.size() && pos_of_round[sel][t] >= 0 && sel == e)
                mask |= 1u << pos_of_round[sel][t];
        }
        return mask;
    }
};

} // namespace

std::vector<std::vector<double>> element_mask_laws(const Selector& proto, const RoundSeq& rounds,
                                                   const std::vector<std::vector<std::size_t>>& occ,
                                                   std::uint64_t leaf_budget) {
    std::vector<std::vector<double>> laws(occ.size());
    for (std::size_t e = 0; e < occ.size(); ++e) {
        if (occ[e].size() > 20) throw std::invalid_argument("element appears in too many rounds");
        laws[e].assign(1ull << occ[e].size(), 0.0);
    }
    MaskIndex index(rounds, occ);
    for_each_leaf(
        proto, rounds,
        [&](double prob, const Trace& trace) {
            std::vector<std::uint32_t> masks(occ.size(), 0);
            for (std::size_t t = 0; t < trace.selections.size(); ++t) {
                const ElemId sel = trace.selections[t];
                if (sel < occ.size() && index.pos_of_round[sel][t] >= 0)
                    masks[sel] |= 1u << index.pos_of_round[sel][t];
            }
            for (std::size_t e = 0; e < occ.size(); ++e) laws[e][masks[e]] += prob;
        },
        leaf_budget);
    return laws;
}

std::vector<std::vector<std::uint64_t>> element_mask_hists(
    const Selector& proto, const RoundSeq& rounds,
    const std::vector<std::vector<std::size_t>>& occ, std::uint64_t trials, std::uint64_t seed,
    unsigned workers, std::size_t validate_runs, std::string* structural_error) {
    std::vector<std::vector<std::uint64_t>> hists(occ.size());
    for (std::size_t e = 0; e < occ.size(); ++e) {
        if (occ[e].size() > 20) throw std::invalid_argument("element appears in too many rounds");
        hists[e].assign(1ull << occ[e].size(), 0);
    }
    MaskIndex index(rounds, occ);

    struct Local {
        std::vector<std::vector<std::uint64_t>> hists;
        std::unique_ptr<Selector> checker;
        std::size_t checks_left = 0;
        std::string error;
    };
    std::mutex merge_mutex;

    const auto* combined = dynamic_cast<const CombinedOcs*>(&proto);

    monte_carlo_traces(
        proto, rounds, trials, seed, workers,
        [&]() -> void* {
            auto* local = new Local;
            local->hists = hists; // zeroed copies
            local->checks_left = validate_runs;
            return local;
        },
        [&](void* raw, const Trace& trace) {
            auto* local = static_cast<Local*>(raw);
            std::vector<std::uint32_t> masks(occ.size(), 0);
            for (std::size_t t = 0; t < trace.selections.size(); ++t) {
                const ElemId sel = trace.selections[t];
                if (sel < occ.size() && index.pos_of_round[sel][t] >= 0)
                    masks[sel] |= 1u << index.pos_of_round[sel][t];
            }
            for (std::size_t e = 0; e < occ.size(); ++e) local->hists[e][masks[e]]++;
        },
        [&](void* raw) {
            auto* local = static_cast<Local*>(raw);
            std::lock_guard lock(merge_mutex);
            for (std::size_t e = 0; e < occ.size(); ++e)
                for (std::size_t m = 0; m < hists[e].size(); ++m)
                    hists[e][m] += local->hists[e][m];
            delete local;
        });

    // Structural validation runs separately on dedicated replays so the mask
    // pass stays lean.
    if (combined != nullptr && validate_runs > 0 && structural_error != nullptr) {
        for (std::size_t i = 0; i < validate_runs; ++i) {
            auto sel = combined->clone();
            Rng rng(seed ^ 0x5151515151515151ull, i);
            run(*sel, rounds, rng);
            if (auto err = validate_run_structure(static_cast<const CombinedOcs&>(*sel))) {
                *structural_error = *err + " (replay " + std::to_string(i) + ")";
                break;
            }
        }
    }
    return hists;
}

namespace {

template <class T>
std::vector<T> disjoint_sums_impl(const std::vector<T>& data, int bits) {
    // h[T] = sum over masks subset of T; hits disjoint from S are h[~S].
    std::vector<T> h = data;
    for (int b = 0; b < bits; ++b) {
        const std::uint32_t bit = 1u << b;
        for (std::uint32_t m = 0; m < h.size(); ++m)
            if (m & bit) h[m] += h[m ^ bit];
    }
    return h;
}

} // namespace

std::vector<std::uint64_t> disjoint_sums(const std::vector<std::uint64_t>& hist, int bits) {
    return disjoint_sums_impl(hist, bits);
}
std::vector<double> disjoint_sums(const std::vector<double>& law, int bits) {
    return disjoint_sums_impl(law, bits);
}

// ---------------------------------------------------------------------------
// verify-semi
// ---------------------------------------------------------------------------

Report verify_semi(const Options& opt, int k_max) {
    Report report;
    const std::uint64_t trials = opt.trials_or(1'000'000);

    // Tournament tightness: averaged over instance and algorithm randomness,
    // the winner stays unselected with probability exactly 2^{-2^k+1}.
    for (int k = 1; k <= k_max; ++k) {
        const std::string config =
            cfg({{"suite", "semi-tournament"}, {"k", std::to_string(k)}, {"trials", num(trials)}});
        auto est = monte_carlo_value(
            [&](std::uint64_t trial, std::uint64_t seed) {
                Tournament tour = gen_tournament(k, Rng(seed, 2 * trial).next_u64());
                OptimalSemiOcs sel;
                Rng run_rng(seed, 2 * trial + 1);
                Trace trace = run(sel, rounds_of(tour.instance), run_rng);
                return trace.ever_selected(tour.winner) ? 0.0 : 1.0;
            },
            trials, opt.seed, opt.workers);
        const auto hits = static_cast<std::uint64_t>(std::llround(est.mean * trials));
        const double estimate = est.mean;
        const double ci = binomial_ci99(hits, trials);
        report.check_close("tournament-tightness-k" + std::to_string(k), estimate,
                           semi_ocs_bound(k), std::max(ci, 1e-9), opt.seed, config);
    }

    // Exact bound sweep on a random corpus: every element's unselected
    // probability stays at or below 2^{-2^k+1}.
    Rng corpus_rng(opt.seed, 0xbeef);
    const std::size_t corpus = opt.scaled(50);
    double worst = -1.0;
    for (std::size_t i = 0; i < corpus; ++i) {
        TwoWayInstance inst = random_two_way(corpus_rng, 8, 6);
        const RoundSeq rounds = rounds_of(inst);
        const auto n = static_cast<std::uint32_t>(inst.elements.size());
        auto law = unselected_set_law(OptimalSemiOcs{}, rounds, n);
        auto final_law = law.back();
        superset_sum(final_law, n);
        const auto occ = occurrence_lists(rounds, n);
        for (std::uint32_t e = 0; e < n; ++e) {
            const double prob = final_law[1u << e];
            const double bound = semi_ocs_bound(static_cast<int>(occ[e].size()));
            worst = std::max(worst, prob - bound);
        }
    }
    report.check_upper("semi-bound-sweep-max-excess", worst, 0.0, 0.0, opt.seed,
                       cfg({{"suite", "semi-sweep"}, {"corpus", std::to_string(corpus)}}), 1e-12);
    return report;
}

// ---------------------------------------------------------------------------
// verify-multiway
// ---------------------------------------------------------------------------

Report verify_multiway(const Options& opt) {
    Report report;
    const WeightFunction w = weight_fn(opt);

    // Positive-correlation counterexample, exact to 1e-14.
    {
        MultiWayInstance inst = gen_positive_correlation_counterexample();
        auto law = unselected_set_law(MultiwaySelector(WeightFunction::unit()), rounds_of(inst), 9);
        auto final_law = law.back();
        superset_sum(final_law, 9);
        const double p12 = final_law[(1u << 0) | (1u << 1)];
        const double p1 = final_law[1u << 0];
        const double p2 = final_law[1u << 1];
        const std::string config = cfg({{"suite", "multiway-counterexample"}});
        report.check_close("counterexample-p12", p12, 1.0 / 81.0, 1e-14, opt.seed, config);
        report.check_close("counterexample-p1", p1, 8.0 / 81.0, 1e-14, opt.seed, config);
        report.check_close("counterexample-p2", p2, 8.0 / 81.0, 1e-14, opt.seed, config);
        report.check_close("counterexample-ratio", p12 / (p1 * p2), 81.0 / 64.0, 1e-12, opt.seed,
                           config);
    }

    // Subset bound sweep: exact Pr[E' subset of U] <= prod p(y_e).
    {
        Rng corpus_rng(opt.seed, 0x3137);
        const std::size_t corpus = opt.scaled(500);
        double worst = -1.0;
        for (std::size_t i = 0; i < corpus; ++i) {
            MultiWayInstance inst = random_multi_way(corpus_rng, 7, 6);
            const RoundSeq rounds = rounds_of(inst);
            const auto n = static_cast<std::uint32_t>(inst.elements.size());
            auto law = unselected_set_law(MultiwaySelector(w), rounds, n);
            auto final_law = law.back();
            superset_sum(final_law, n);
            std::vector<double> bound_per_elem(n);
            for (std::uint32_t e = 0; e < n; ++e)
                bound_per_elem[e] = multiway_bound(inst.total_mass(e), w.c);
            for (std::uint32_t subset = 1; subset < (1u << n); ++subset) {
                double bound = 1.0;
                for (std::uint32_t e = 0; e < n; ++e)
                    if (subset & (1u << e)) bound *= bound_per_elem[e];
                worst = std::max(worst, final_law[subset] - bound);
            }
        }
        report.check_upper("multiway-subset-bound-max-excess", worst, 0.0, 0.0, opt.seed,
                           cfg({{"suite", "multiway-subset"}, {"corpus", std::to_string(corpus)}}),
                           1e-9);
    }

    // Unweighted baseline: mass y spread over many rounds leaves the element
    // unselected with probability about exp(-y).
    {
        const std::uint64_t trials = opt.trials_or(1'000'000);
        const int T = 200;
        MultiWayInstance inst;
        inst.elements.push_back("e");
        for (int t = 0; t < T; ++t) inst.elements.push_back("f" + std::to_string(t));
        const double eps = 1.0 / T;
        for (int t = 0; t < T; ++t)
            inst.rounds.push_back({{0, eps}, {static_cast<ElemId>(t + 1), 1.0 - eps}});
        auto est = monte_carlo_event_prob(
            MultiwaySelector(WeightFunction::unit()), rounds_of(inst),
            [](const Trace& tr) { return !tr.ever_selected(0); }, trials, opt.seed, opt.workers);
        report.check_close("multiway-unweighted-expy", est.estimate, std::exp(-1.0),
                           std::max(est.ci_halfwidth, 0.01), opt.seed,
                           cfg({{"suite", "multiway-baseline"}, {"trials", num(trials)}}));
    }

    // Cubic inequality grid.
    {
        std::vector<double> xs, ys;
        for (int i = 1; i <= 200; ++i) xs.push_back(0.99 * i / 200.0);
        for (int j = 0; j < 200; ++j) ys.push_back(10.0 * j / 199.0);
        auto rep = check_cubic_inequality(xs, ys, w);
        report.check_upper("cubic-inequality-max-violation", rep.max_violation, 0.0, 0.0, opt.seed,
                           cfg({{"suite", "multiway-cubic"}, {"points", std::to_string(rep.points)}}),
                           1e-9);
    }

    // Condition inequality over random cases plus the stated edge cases.
    {
        Rng rng(opt.seed, 0xc0);
        std::vector<ConditionCase> cases;
        cases.push_back({{0.0}, {3.0}});
        cases.push_back({{0.5, 0.5}, {1.0, 2.0}}); // sum x = 1: lhs 0
        const std::size_t n_cases = opt.scaled(40'000);
        for (std::size_t i = 0; i < n_cases; ++i) {
            const int k = 1 + static_cast<int>(rng.next_u64() % 5);
            ConditionCase cs;
            double budget = rng.uniform();
            for (int j = 0; j < k; ++j) {
                cs.x.push_back(budget * rng.uniform() / k);
                cs.y.push_back(rng.uniform() * 8.0);
            }
            cases.push_back(std::move(cs));
        }
        auto rep = check_condition_inequality(cases, w);
        report.check_upper("condition-inequality-max-violation", rep.max_violation, 0.0, 0.0,
                           opt.seed,
                           cfg({{"suite", "multiway-condition"}, {"cases", std::to_string(rep.points)}}),
                           1e-9);
    }

    // Log-convexity of w on a grid: second differences of log w are >= 0.
    {
        double worst = -1.0;
        const double h = 0.05;
        for (int i = 0; i + 2 <= 400; ++i) {
            const double y = i * h;
            const double second =
                w.log_w(y) - 2.0 * w.log_w(y + h) + w.log_w(y + 2.0 * h);
            worst = std::max(worst, -second);
        }
        report.check_upper("logw-convexity-max-negative-second-difference", worst, 0.0, 0.0,
                           opt.seed, cfg({{"suite", "multiway-logconvex"}}), 1e-12);
    }
    return report;
}

} // namespace ocs::harness
