#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ocs/selector.hpp"

namespace ocs {

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(std::size_t round, std::uint64_t budget);
    std::size_t round;
};

using TracePredicate = std::function<bool(const Trace&)>;
using LeafCallback = std::function<void(double prob, const Trace&)>;

inline constexpr std::uint64_t kDefaultLeafBudget = 10'000'000;

// Depth-first enumeration of all selector branches over the instance, calling
// cb once per leaf with the path probability and the full trace. Throws
// BudgetExceeded naming the round where the leaf count blew past the budget.
void for_each_leaf(const Selector& proto, const RoundSeq& rounds, const LeafCallback& cb,
                   std::uint64_t leaf_budget = kDefaultLeafBudget);

// Exact probability of the event under the selector's law, by exhaustive
// branch enumeration.
double exact_event_prob(const Selector& proto, const RoundSeq& rounds, const TracePredicate& event,
                        std::uint64_t leaf_budget = kDefaultLeafBudget);

struct McEstimate {
    double estimate = 0.0;
    double ci_halfwidth = 0.0; // 99% half-width (Wilson when counts are tiny)
    std::uint64_t trials = 0;
};

// 99% half-width for a Bernoulli mean estimated from `hits` out of `trials`.
double binomial_ci99(std::uint64_t hits, std::uint64_t trials);

// Sample mean of the event over independent trials. Trial i uses the stream
// (seed, i), so the estimate does not depend on worker count or ordering.
McEstimate monte_carlo_event_prob(const Selector& proto, const RoundSeq& rounds,
                                  const TracePredicate& event, std::uint64_t trials,
                                  std::uint64_t seed, unsigned workers = 0);

// Batch Monte Carlo: one pass over the trials feeding every trace to `accum`
// (called under a lock-free per-worker split; `accum` sees worker-local calls
// and workers are merged in index order via `merge`).
void monte_carlo_traces(const Selector& proto, const RoundSeq& rounds, std::uint64_t trials,
                        std::uint64_t seed, unsigned workers,
                        const std::function<void*()>& make_local,
                        const std::function<void(void*, const Trace&)>& accum,
                        const std::function<void(void*)>& merge);

// Exact joint distribution, per prefix length t = 0..T, of the unselected-set
// bitmask over elements [0, n). probs[t][mask] = Pr[U^t == mask]. Requires
// n <= 20.
std::vector<std::vector<double>> unselected_set_law(const Selector& proto, const RoundSeq& rounds,
                                                    std::uint32_t n_elems,
                                                    std::uint64_t leaf_budget = kDefaultLeafBudget);

// In-place superset sum: out[mask] = sum over supersets of mask of in[mask].
// Turns a set law into Pr[S subseteq U] lookups.
void superset_sum(std::vector<double>& f, std::uint32_t n_bits);

} // namespace ocs
