#pragma once

#include <functional>
#include <map>
#include <span>

#include "ocs/instances.hpp"
#include "ocs/lp.hpp"
#include "ocs/selector.hpp"

namespace ocs {

// Shortlist history of one offline vertex: k_u(w) = number of shortlist events
// with edge-weight >= w, stored as per-weight event counts.
struct StepProfile {
    std::map<double, int> events;
    int total = 0;

    void add(double w) {
        events[w] += 1;
        total += 1;
    }
    int k_at(double w) const {
        int k = 0;
        for (auto it = events.lower_bound(w); it != events.end(); ++it) k += it->second;
        return k;
    }
};

// Matching value of shortlisting u for an online vertex with edge weight w_uv:
//   int_0^{w_uv} b(k_u(w)) dw - (1/2) int_{w_uv}^inf  sum_{i<k_u(w)} a(i) dw,
// integrated exactly over the step function's breakpoints (the second integral
// vanishes beyond the largest event weight, where k_u(w) = 0).
double delta_beta(const StepProfile& profile, double w_uv, const DiscreteLpSolution& lp);

// Two-choice online primal-dual matcher (edge-weighted; also the single-weight
// -level specialization used for unweighted/vertex-weighted instances). Per
// online vertex it shortlists the two argmax-delta neighbors, matching
// deterministically when they coincide and via the OCS otherwise. Offline
// vertices keep their maximum matched edge weight (free disposal). Randomized
// rounds between distinct candidates feed the OCS one pair round; a round
// resolved to the implicit dummy (all deltas negative) leaves v unmatched.
double run_two_choice(const MatchingInstance& inst, const DiscreteLpSolution& lp,
                      const Selector& ocs_proto, Rng& rng);

// run_two_choice restricted to unweighted / vertex-weighted instances, with a
// semi-OCS as the sampler (the single-weight-level case of the matcher).
double run_two_choice_greedy(const MatchingInstance& inst, const DiscreteLpSolution& lp,
                             const Selector& semi_ocs_proto, Rng& rng);

struct BalanceNeighbor {
    std::uint32_t u;
    double weight; // vertex weight w_u
    double y;      // mass already assigned
};

// One Balance round: the mass vector (aligned with `neighbors`) assigning one
// unit at a common threshold theta with y_u(theta) = b^{-1}(theta / w_u).
// Throws on bisection non-convergence.
std::vector<double> balance_masses(std::span<const BalanceNeighbor> neighbors,
                                   const ContinuousLpSolution& lp);

// Unbounded Balance rounded by a multi-way semi-OCS (unweighted /
// vertex-weighted instances).
double run_balance(const MatchingInstance& inst, const ContinuousLpSolution& lp,
                   const Selector& multiway_proto, Rng& rng);

// Exact offline optimum: maximum-weight bipartite matching (the free-disposal
// objective coincides with it).
double offline_optimum(const MatchingInstance& inst);

} // namespace ocs
