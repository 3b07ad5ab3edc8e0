#include "ocs/oracle.hpp"

#include <cmath>
#include <thread>

namespace ocs {

BudgetExceeded::BudgetExceeded(std::size_t r, std::uint64_t budget)
    : std::runtime_error("enumeration budget of " + std::to_string(budget) +
                         " leaves exceeded at round " + std::to_string(r)),
      round(r) {}

namespace {

struct Dfs {
    const RoundSeq& rounds;
    const LeafCallback& cb;
    std::uint64_t budget;
    std::uint64_t leaves = 0;
    Trace trace{};
    std::unique_ptr<Selector> work{};

    void go(std::size_t depth) {
        if (depth == rounds.size()) return; // handled by caller for T = 0
        std::vector<Branch> branches = work->enumerate(rounds[depth]);
        const std::string here = work->snapshot();
        for (const Branch& b : branches) {
            if (b.prob <= 0.0) continue;
            trace.selections.push_back(b.elem);
            if (depth + 1 == rounds.size()) {
                if (++leaves > budget) throw BudgetExceeded(depth, budget);
                cb(path_prob * b.prob, trace);
            } else {
                double saved = path_prob;
                path_prob *= b.prob;
                work->restore(b.state);
                go(depth + 1);
                path_prob = saved;
            }
            trace.selections.pop_back();
        }
        work->restore(here);
    }

    double path_prob = 1.0;
};

} // namespace

void for_each_leaf(const Selector& proto, const RoundSeq& rounds, const LeafCallback& cb,
                   std::uint64_t leaf_budget) {
    std::unique_ptr<Selector> work = proto.clone();
    work->reset();
    if (rounds.empty()) {
        cb(1.0, Trace{});
        return;
    }
    Dfs dfs{rounds, cb, leaf_budget};
    dfs.work = std::move(work);
    dfs.go(0);
}

double exact_event_prob(const Selector& proto, const RoundSeq& rounds, const TracePredicate& event,
                        std::uint64_t leaf_budget) {
    double total = 0.0;
    for_each_leaf(
        proto, rounds,
        [&](double prob, const Trace& trace) {
            if (event(trace)) total += prob;
        },
        leaf_budget);
    return total;
}

double binomial_ci99(std::uint64_t hits, std::uint64_t trials) {
    constexpr double z = 2.5758293035489004; // 99% two-sided normal quantile
    if (trials == 0) return 1.0;
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(hits) / n;
    const double successes = std::min<double>(static_cast<double>(hits),
                                              static_cast<double>(trials - hits));
    if (successes < 5.0) {
        // Wilson interval half-width; the normal approximation is poor here.
        const double z2 = z * z;
        return z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    }
    return z * std::sqrt(phat * (1.0 - phat) / n);
}

void monte_carlo_traces(const Selector& proto, const RoundSeq& rounds, std::uint64_t trials,
                        std::uint64_t seed, unsigned workers,
                        const std::function<void*()>& make_local,
                        const std::function<void(void*, const Trace&)>& accum,
                        const std::function<void(void*)>& merge) {
    if (workers == 0) {
        workers = std::thread::hardware_concurrency();
        if (workers == 0) workers = 1;
    }
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(trials, 1)));

    std::vector<void*> locals(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            locals[w] = make_local();
            std::unique_ptr<Selector> sel = proto.clone();
            const std::uint64_t lo = trials * w / workers;
            const std::uint64_t hi = trials * (w + 1) / workers;
            for (std::uint64_t i = lo; i < hi; ++i) {
                Rng rng(seed, i);
                Trace t = run(*sel, rounds, rng);
                accum(locals[w], t);
            }
        });
    }
    for (auto& th : pool) th.join();
    for (unsigned w = 0; w < workers; ++w) merge(locals[w]);
}

McEstimate monte_carlo_event_prob(const Selector& proto, const RoundSeq& rounds,
                                  const TracePredicate& event, std::uint64_t trials,
                                  std::uint64_t seed, unsigned workers) {
    std::uint64_t hits = 0;
    monte_carlo_traces(
        proto, rounds, trials, seed, workers, [] { return static_cast<void*>(new std::uint64_t(0)); },
        [&](void* local, const Trace& t) {
            if (event(t)) ++*static_cast<std::uint64_t*>(local);
        },
        [&](void* local) {
            auto* p = static_cast<std::uint64_t*>(local);
            hits += *p;
            delete p;
        });
    McEstimate est;
    est.trials = trials;
    est.estimate = trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
    est.ci_halfwidth = binomial_ci99(hits, trials);
    return est;
}

std::vector<std::vector<double>> unselected_set_law(const Selector& proto, const RoundSeq& rounds,
                                                    std::uint32_t n_elems, std::uint64_t leaf_budget) {
    if (n_elems > 20) throw std::invalid_argument("unselected_set_law: too many elements");
    const std::uint32_t full = (1u << n_elems) - 1u;
    std::vector<std::vector<double>> law(rounds.size() + 1, std::vector<double>(full + 1ull, 0.0));
    law[0][full] = 1.0;
    for_each_leaf(
        proto, rounds,
        [&](double prob, const Trace& trace) {
            std::uint32_t mask = full;
            for (std::size_t t = 0; t < trace.selections.size(); ++t) {
                mask &= ~(1u << trace.selections[t]);
                law[t + 1][mask] += prob;
            }
        },
        leaf_budget);
    return law;
}

void superset_sum(std::vector<double>& f, std::uint32_t n_bits) {
    for (std::uint32_t b = 0; b < n_bits; ++b) {
        const std::uint32_t bit = 1u << b;
        for (std::uint32_t mask = 0; mask < f.size(); ++mask) {
            if (!(mask & bit)) f[mask] += f[mask | bit];
        }
    }
}

} // namespace ocs
