#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "ocs/flag_ocs.hpp"
#include "ocs/harness.hpp"
#include "ocs/lp.hpp"
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

// Worst (observed - bound - slack*sigma) check over all subsequence unions of
// every element, from per-element selected-mask counts.
struct SubsetCheck {
    double observed = 0.0, bound = 1.0, sigma = 0.0;
    double score = -std::numeric_limits<double>::infinity();
    std::string where;
};

SubsetCheck worst_subsequence_check(const std::vector<std::vector<std::uint64_t>>& hists,
                                    const std::vector<std::vector<std::size_t>>& occ,
                                    std::uint64_t trials, double gamma, double n_sigma) {
    SubsetCheck worst;
    for (std::size_t e = 0; e < occ.size(); ++e) {
        const int k = static_cast<int>(occ[e].size());
        if (k == 0) continue;
        const auto disjoint = disjoint_sums(hists[e], k);
        const std::uint32_t full = (1u << k) - 1u;
        std::vector<std::size_t> positions;
        for (std::uint32_t subset = 1; subset <= full; ++subset) {
            positions.clear();
            for (int b = 0; b < k; ++b)
                if (subset & (1u << b)) positions.push_back(b);
            const double bound = subsequence_bound(run_lengths(positions), gamma);
            const double phat =
                static_cast<double>(disjoint[full & ~subset]) / static_cast<double>(trials);
            const double sigma = std::sqrt(std::max(0.0, phat * (1.0 - phat)) /
                                           static_cast<double>(trials));
            const double score = phat - bound - n_sigma * sigma;
            if (score > worst.score) {
                worst.score = score;
                worst.observed = phat;
                worst.bound = bound;
                worst.sigma = sigma;
                worst.where = "e" + std::to_string(e) + "/S" + std::to_string(subset);
            }
        }
    }
    return worst;
}

// Same sweep against exact per-element laws with the relaxed flag guarantee.
struct ExactCheck {
    double max_single_excess = -1.0;  // vs flag_bound on consecutive runs
    double max_relaxed_excess = -1.0; // vs relaxed_guarantee on all unions
};

ExactCheck flag_exact_checks(const std::vector<std::vector<double>>& laws,
                             const std::vector<std::vector<std::size_t>>& occ,
                             const DiscreteLpSolution& lp) {
    ExactCheck out;
    for (std::size_t e = 0; e < occ.size(); ++e) {
        const int k = static_cast<int>(occ[e].size());
        if (k == 0) continue;
        const auto disjoint = disjoint_sums(laws[e], k);
        const std::uint32_t full = (1u << k) - 1u;
        std::vector<std::size_t> positions;
        for (std::uint32_t subset = 1; subset <= full; ++subset) {
            positions.clear();
            for (int b = 0; b < k; ++b)
                if (subset & (1u << b)) positions.push_back(b);
            const auto runs = run_lengths(positions);
            const double prob = disjoint[full & ~subset];
            if (runs.size() == 1)
                out.max_single_excess =
                    std::max(out.max_single_excess, prob - flag_bound(runs[0]));
            out.max_relaxed_excess =
                std::max(out.max_relaxed_excess, prob - relaxed_guarantee(runs, lp.a));
        }
    }
    return out;
}

} // namespace

Report verify_ocs(const Options& opt) {
    Report report;
    CombinedOcs::Params params{opt.p, opt.beta};
    const CombinedOcs proto(params);
    const double gamma = proto.gamma();

    // --- automata identities ---
    {
        const auto pi = fc_stationary(opt.p);
        const double res_plus = stationary_residual(pi, fc_matrix_plus(opt.p));
        const double res_minus = stationary_residual(pi, fc_matrix_minus(opt.p));
        const std::string config = cfg({{"suite", "ocs-automata"}, {"p", num(opt.p)}});
        report.check_upper("stationary-residual-plus", res_plus, 0.0, 0.0, opt.seed, config, 1e-15);
        report.check_upper("stationary-residual-minus", res_minus, 0.0, 0.0, opt.seed, config,
                           1e-15);

        const auto f = f_sequence(opt.p, 6);
        const double p = opt.p;
        report.check_close("f3-closed-form", f[3], 1.0 - p, 0.0, opt.seed, config);
        report.check_close("f5-closed-form", f[5], 2.0 * p * (1.0 - p), 1e-16, opt.seed, config);
        report.check_close("f6-closed-form", f[6], p * p * p + (1.0 - p) * (1.0 - p), 1e-16,
                           opt.seed, config);

        // f-sequence lower bounds over the admissible p-range.
        double worst = -1.0;
        const double p_lo = (std::sqrt(5.0) - 1.0) / 2.0, p_hi = 2.0 / 3.0;
        for (int g = 0; g <= 40; ++g) {
            const double pg = p_lo + (p_hi - p_lo) * g / 40.0;
            const auto fs = f_sequence(pg, 200);
            const double floor2 = 1.0 - pg;
            const double floor4 = pg * pg * pg + (1.0 - pg) * (1.0 - pg);
            for (int i = 2; i <= 200; ++i) {
                worst = std::max(worst, floor2 - fs[i]);
                if (i >= 4) worst = std::max(worst, floor4 - fs[i]);
            }
        }
        report.check_upper("f-sequence-bounds-max-deficit", worst, 0.0, 0.0, opt.seed, config,
                           1e-12);

        // Reverse equivalence: split construction matches the pure sigma+ law.
        double worst_gap = 0.0;
        for (int len = 1; len <= 6; ++len) {
            const auto base = plus_chain_law(opt.p, len);
            for (int i0 = 1; i0 <= len + 1; ++i0) {
                const auto split = split_chain_law(opt.p, len, i0);
                for (std::uint32_t mask = 0; mask < (1u << len); ++mask) {
                    auto b = base.find(mask);
                    auto s = split.find(mask);
                    const double pb = b == base.end() ? 0.0 : b->second;
                    const double ps = s == split.end() ? 0.0 : s->second;
                    worst_gap = std::max(worst_gap, std::abs(pb - ps));
                }
            }
        }
        report.check_upper("reverse-equivalence-linf", worst_gap, 0.0, 0.0, opt.seed, config,
                           1e-12);
    }

    // --- gamma-subsequence suite over the adversarial corpus ---
    {
        const std::uint64_t trials = opt.trials_or(100'000);
        Rng corpus_rng(opt.seed, 0xad7e);
        const auto corpus = adversarial_two_way_corpus(opt.scaled(200), 10, corpus_rng);
        double worst_score = -std::numeric_limits<double>::infinity();
        SubsetCheck worst;
        std::string worst_id = "-";
        std::string structural_error;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            const RoundSeq rounds = rounds_of(corpus[i]);
            const auto occ = occurrence_lists(rounds, corpus[i].elements.size());
            std::string err;
            const auto hists =
                element_mask_hists(proto, rounds, occ, trials, opt.seed + i, opt.workers,
                                   structural_error.empty() ? 200 : 0, &err);
            if (!err.empty() && structural_error.empty()) structural_error = err;
            const auto check = worst_subsequence_check(hists, occ, trials, gamma, 4.0);
            if (check.score > worst_score) {
                worst_score = check.score;
                worst = check;
                worst_id = "inst" + std::to_string(i) + "/" + check.where;
            }
        }
        const std::string config = cfg({{"suite", "ocs-gamma"},
                                        {"gamma", num(gamma)},
                                        {"instances", std::to_string(corpus.size())},
                                        {"trials", num(static_cast<double>(trials))}});
        report.check_upper("gamma-suite-worst(" + worst_id + ")", worst.observed, worst.bound,
                           4.0 * worst.sigma, opt.seed, config);
        ReportRow structural;
        structural.id = structural_error.empty() ? "good-forest-structure"
                                                 : "good-forest-structure: " + structural_error;
        structural.pass = structural_error.empty();
        structural.seed = opt.seed;
        structural.config = config_hash(config);
        report.rows.push_back(std::move(structural));
    }

    // --- flag-OCS exact suites ---
    {
        const DiscreteLpSolution flag_lp = two_choice_lp(flag_discrete_bound());
        Rng corpus_rng(opt.seed, 0xf1a6);
        ExactCheck worst;
        const std::size_t n_random = opt.scaled(30);
        std::vector<TwoWayInstance> corpus;
        for (int i = 1; i <= 3; ++i) corpus.push_back(gen_ocs_hardness(i));
        {
            TwoWayInstance path;
            path.elements = {"a", "b"};
            for (int t = 0; t < 6; ++t) path.rounds.push_back({0, 1});
            corpus.push_back(path);
        }
        for (std::size_t i = 0; i < n_random; ++i)
            corpus.push_back(random_two_way(corpus_rng, 8, 5));
        for (const auto& inst : corpus) {
            const RoundSeq rounds = rounds_of(inst);
            const auto occ = occurrence_lists(rounds, inst.elements.size());
            const auto laws = element_mask_laws(FlagOcs{}, rounds, occ);
            const auto check = flag_exact_checks(laws, occ, flag_lp);
            worst.max_single_excess = std::max(worst.max_single_excess, check.max_single_excess);
            worst.max_relaxed_excess = std::max(worst.max_relaxed_excess, check.max_relaxed_excess);
        }
        const std::string config =
            cfg({{"suite", "ocs-flag"}, {"instances", std::to_string(corpus.size())}});
        report.check_upper("flag-single-subsequence-max-excess", worst.max_single_excess, 0.0, 0.0,
                           opt.seed, config, 1e-12);
        report.check_upper("flag-relaxed-guarantee-max-excess", worst.max_relaxed_excess, 0.0, 0.0,
                           opt.seed, config, 1e-12);
        report.check_close("flag-lp-a0", flag_lp.a_at(0), 0.2403, 2e-4, opt.seed, config);
    }

    // --- hardness event-sum experiment ---
    {
        const std::uint64_t trials = opt.trials_or(100'000);
        for (int i = 1; i <= 4; ++i) {
            TwoWayInstance inst = gen_ocs_hardness(i);
            const RoundSeq rounds = rounds_of(inst);
            auto est = monte_carlo_value(
                [&](std::uint64_t trial, std::uint64_t seed) {
                    auto sel = proto.clone();
                    Rng rng(seed, trial);
                    Trace trace = run(*sel, rounds, rng);
                    int j_odd = 0, j_even = 0; // rounds selecting element 0
                    for (std::size_t t = 0; t < trace.selections.size(); ++t) {
                        if (trace.selections[t] != 0) continue;
                        ((t % 2 == 0) ? j_odd : j_even)++; // 0-based: even index = odd round
                    }
                    const double jo = j_odd, je = j_even;
                    return je + (i + 1 - jo) * (i - je) + jo * (jo - 1) / 2.0 +
                           je * (je - 1) / 2.0;
                },
                trials, opt.seed + i, opt.workers);
            const double target = i * (i + 1) / 2.0;
            ReportRow row;
            row.id = "hardness-event-sum-i" + std::to_string(i);
            row.observed = est.mean;
            row.bound = target;
            row.margin = est.mean - target;
            row.ci = est.ci_halfwidth;
            row.pass = est.mean >= target - est.ci_halfwidth - 1e-9;
            row.seed = opt.seed + i;
            row.config = config_hash(cfg({{"suite", "ocs-hardness"}, {"i", std::to_string(i)}}));
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

} // namespace ocs::harness
