#include <algorithm>
#include <cmath>
#include <iomanip>
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

DiscreteBound named_discrete_bound(const std::string& name) {
    if (name == "semi") return semi_ocs_discrete_bound();
    if (name == "flag") return flag_discrete_bound();
    if (name.rfind("gamma:", 0) == 0) return gamma_discrete_bound(std::stod(name.substr(6)));
    throw std::invalid_argument("unknown discrete bound '" + name + "'");
}

void discrete_feasibility_rows(Report& report, const DiscreteLpSolution& sol, std::uint64_t seed,
                               const std::string& config) {
    const auto& p = sol.bound.p;
    double worst_split = -1.0, worst_dual = -1.0, worst_mono = -1.0, worst_neg = -1.0;
    for (std::size_t k = 0; k < sol.a.size(); ++k) {
        worst_split =
            std::max(worst_split, sol.a[k] + sol.b[k] - (sol.bound.at(k) - sol.bound.at(k + 1)));
        worst_dual = std::max(worst_dual, std::abs(sol.a_prefix(k) + 2.0 * sol.b[k] - sol.gamma));
        if (k + 1 < sol.b.size()) worst_mono = std::max(worst_mono, sol.b[k + 1] - sol.b[k]);
        worst_neg = std::max({worst_neg, -sol.a[k], -sol.b[k]});
    }
    (void)p;
    report.check_upper("lp-gain-split-max-excess", worst_split, 0.0, 0.0, seed, config, 1e-12);
    report.check_upper("lp-dual-equality-max-residual", worst_dual, 0.0, 0.0, seed, config, 1e-12);
    report.check_upper("lp-b-monotone-max-increase", worst_mono, 0.0, 0.0, seed, config, 1e-12);
    report.check_upper("lp-nonnegativity-max-deficit", worst_neg, 0.0, 0.0, seed, config, 1e-12);
}

} // namespace

Report lp_suite(const Options& opt, const std::string& bound_name, std::ostream* tables) {
    Report report;
    const std::string config = cfg({{"suite", "lp"}, {"bound", bound_name}});

    if (bound_name == "multiway" || bound_name == "exp") {
        const ContinuousBound bound = bound_name == "exp"
                                          ? exp_continuous_bound()
                                          : (opt.c == 0.0 ? multiway_continuous_bound()
                                                          : multiway_continuous_bound(opt.c));
        const ContinuousLpSolution sol(bound);
        if (tables) {
            *tables << "# balance LP for p = " << bound.name << "\nGamma = " << std::setprecision(12)
                    << sol.gamma() << "\n    y        p(y)        a(y)        b(y)\n";
            for (double y = 0.0; y <= 5.0 + 1e-9; y += 0.25)
                *tables << std::fixed << std::setprecision(6) << std::setw(7) << y << "  "
                        << std::setw(10) << bound.p(y) << "  " << std::setw(10) << sol.a(y) << "  "
                        << std::setw(10) << sol.b(y) << "\n";
            // The overly idealized reference curve p*(y) = max{1-y, 0} is shown
            // for comparison only; no selector achieves it.
            *tables << "reference: p*(1) = 0 vs p(1) = " << std::setprecision(6) << bound.p(1.0)
                    << "\n";
        }
        if (bound_name == "exp") {
            report.check_close("balance-lp-gamma-exp", sol.gamma(), 0.5, 1e-8, opt.seed, config);
        } else {
            report.check_close("balance-lp-gamma-multiway", sol.gamma(), 0.5936082392873367, 1e-3,
                               opt.seed, config);
        }
        // b(0) = Gamma (dual feasibility with equality at y = 0), a,b >= 0,
        // b decreasing, a+b = -p' on a grid.
        report.check_close("balance-lp-b0-equals-gamma", sol.b(0.0), sol.gamma(), 1e-7, opt.seed,
                           config);
        double worst_split = 0.0, worst_neg = -1.0, worst_mono = -1.0, worst_dual = 0.0;
        double prev_b = sol.b(0.0);
        for (int i = 0; i <= 400; ++i) {
            const double y = i * 0.02;
            const double a = sol.a(y), b = sol.b(y);
            worst_split = std::max(worst_split, std::abs(a + b + bound.dp(y)));
            worst_neg = std::max({worst_neg, -a - 1e-8, -b - 1e-12});
            if (i > 0) worst_mono = std::max(worst_mono, b - prev_b);
            prev_b = b;
            const double dual = integrate([&](double z) { return sol.a(z); }, 0.0, y, 1e-10) + b;
            worst_dual = std::max(worst_dual, std::abs(dual - sol.gamma()));
        }
        report.check_upper("balance-lp-gain-split-max-residual", worst_split, 0.0, 0.0, opt.seed,
                           config, 1e-8);
        report.check_upper("balance-lp-nonnegativity", worst_neg, 0.0, 0.0, opt.seed, config);
        report.check_upper("balance-lp-b-monotone", worst_mono, 0.0, 0.0, opt.seed, config, 1e-12);
        report.check_upper("balance-lp-dual-max-residual", worst_dual, 0.0, 0.0, opt.seed, config,
                           1e-7);
        return report;
    }

    const DiscreteBound bound = named_discrete_bound(bound_name);
    const DiscreteLpSolution sol = two_choice_lp(bound);
    if (tables) {
        *tables << "# matching LP for p = " << bound.name << "\nGamma = " << std::setprecision(12)
                << sol.gamma << "\n  k        p(k)        a(k)        b(k)\n";
        for (std::size_t k = 0; k < std::min<std::size_t>(sol.a.size(), 12); ++k)
            *tables << std::setw(3) << k << "  " << std::scientific << std::setprecision(4)
                    << std::setw(10) << sol.bound.at(k) << "  " << std::setw(10) << sol.a[k] << "  "
                    << std::setw(10) << sol.b[k] << std::defaultfloat << "\n";
    }

    if (bound_name == "semi")
        report.check_close("lp-gamma-semi", sol.gamma, 0.5362634226904648, 1e-3, opt.seed, config);
    else if (bound_name == "flag")
        report.check_close("lp-gamma-flag", sol.gamma, 0.5193835704216327, 1e-3, opt.seed, config);
    else if (bound_name.rfind("gamma:", 0) == 0) {
        const double g = std::stod(bound_name.substr(6));
        report.check_close("lp-gamma-closed-form", sol.gamma, (3.0 + 2.0 * g) / (6.0 + 3.0 * g),
                           1e-12, opt.seed, config);
    }
    discrete_feasibility_rows(report, sol, opt.seed, config);
    return report;
}

// ---------------------------------------------------------------------------
// Matching experiments
// ---------------------------------------------------------------------------

std::vector<MatchJob> default_match_jobs(const std::string& algorithm, std::size_t random_count,
                                         std::uint64_t seed) {
    std::vector<MatchJob> jobs;
    for (int n : {4, 8, 16})
        jobs.push_back({"upper-triangular-" + std::to_string(n), gen_upper_triangular(n)});
    Rng rng(seed, 0x3a7c);
    for (std::size_t i = 0; i < random_count; ++i) {
        MatchingInstance::Kind kind;
        if (algorithm == "edge-flag" || algorithm == "edge-ocs") {
            kind = i % 3 == 0   ? MatchingInstance::Kind::edge_weighted
                   : i % 3 == 1 ? MatchingInstance::Kind::unweighted
                                : MatchingInstance::Kind::vertex_weighted;
        } else {
            kind = i % 2 == 0 ? MatchingInstance::Kind::unweighted
                              : MatchingInstance::Kind::vertex_weighted;
        }
        jobs.push_back({"random-" + std::to_string(i), random_matching(rng, kind, 8, 10)});
    }
    return jobs;
}

Report match_suite(const Options& opt, const std::string& algorithm,
                   const std::vector<MatchJob>& jobs) {
    Report report;
    const std::uint64_t trials = opt.trials_or(100'000);

    // Algorithm-specific pieces, built once and shared across trials.
    std::unique_ptr<DiscreteLpSolution> dlp;
    std::unique_ptr<ContinuousLpSolution> clp;
    std::unique_ptr<Selector> selector_proto;
    double gamma = 0.0;
    if (algorithm == "greedy") {
        dlp = std::make_unique<DiscreteLpSolution>(two_choice_lp(semi_ocs_discrete_bound()));
        selector_proto = std::make_unique<OptimalSemiOcs>();
        gamma = dlp->gamma;
    } else if (algorithm == "balance") {
        clp = std::make_unique<ContinuousLpSolution>(
            opt.c == 0.0 ? multiway_continuous_bound() : multiway_continuous_bound(opt.c));
        selector_proto = std::make_unique<MultiwaySelector>(
            opt.c == 0.0 ? WeightFunction::cubic() : WeightFunction::cubic(opt.c));
        gamma = clp->gamma();
    } else if (algorithm == "edge-flag") {
        dlp = std::make_unique<DiscreteLpSolution>(two_choice_lp(flag_discrete_bound()));
        selector_proto = std::make_unique<FlagOcs>();
        gamma = dlp->gamma;
    } else if (algorithm == "edge-ocs") {
        dlp = std::make_unique<DiscreteLpSolution>(
            two_choice_lp(gamma_discrete_bound(forest_alpha(opt.p) * opt.beta)));
        selector_proto = std::make_unique<CombinedOcs>(CombinedOcs::Params{opt.p, opt.beta});
        gamma = dlp->gamma;
    } else {
        throw std::invalid_argument("unknown matching algorithm '" + algorithm + "'");
    }

    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const auto& job = jobs[j];
        if ((algorithm == "greedy" || algorithm == "balance") &&
            job.instance.kind == MatchingInstance::Kind::edge_weighted)
            continue;
        const double optimum = offline_optimum(job.instance);
        if (optimum <= 0.0) continue;

        auto est = monte_carlo_value(
            [&](std::uint64_t trial, std::uint64_t seed) {
                Rng rng(seed, trial);
                if (algorithm == "balance") return run_balance(job.instance, *clp, *selector_proto, rng);
                if (algorithm == "greedy")
                    return run_two_choice_greedy(job.instance, *dlp, *selector_proto, rng);
                return run_two_choice(job.instance, *dlp, *selector_proto, rng);
            },
            trials, opt.seed + j, opt.workers);

        const double ratio = est.mean / optimum;
        const double sigma = est.ci_halfwidth / 2.5758293035489004 / optimum;
        ReportRow row;
        row.id = algorithm + "/" + job.id;
        row.observed = ratio;
        row.bound = gamma;
        row.margin = ratio - gamma;
        row.ci = 4.0 * sigma;
        row.pass = ratio >= gamma - 4.0 * sigma;
        row.seed = opt.seed + j;
        row.config = config_hash(cfg({{"suite", "match"},
                                      {"alg", algorithm},
                                      {"instance", job.id},
                                      {"trials", num(static_cast<double>(trials))}}));
        row.detail = "trials=" + std::to_string(trials) + " mean=" + num(est.mean) +
                     " optimum=" + num(optimum);
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace ocs::harness
