#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ocs/combined_ocs.hpp"
#include "ocs/instances.hpp"
#include "ocs/oracle.hpp"
#include "ocs/report.hpp"
#include "ocs/semi_ocs.hpp"

namespace ocs::harness {

struct Options {
    std::uint64_t seed = 1;
    std::uint64_t trials = 0; // 0 = per-suite default
    unsigned workers = 0;     // 0 = hardware concurrency
    double scale = 1.0;       // scales corpus sizes (tests run scaled down)
    double p = default_fc_p();
    double beta = default_star_beta();
    double c = 0.0; // 0 = default cubic coefficient

    std::uint64_t trials_or(std::uint64_t def) const { return trials ? trials : def; }
    std::size_t scaled(std::size_t n) const {
        auto s = static_cast<std::size_t>(static_cast<double>(n) * scale);
        return s < 1 ? 1 : s;
    }
};

// -------------------------------------------------------------------------
// Random corpora
// -------------------------------------------------------------------------

TwoWayInstance random_two_way(Rng& rng, int max_rounds, int max_elems);
MultiWayInstance random_multi_way(Rng& rng, int max_rounds, int max_elems);
MatchingInstance random_matching(Rng& rng, MatchingInstance::Kind kind, int max_offline,
                                 int max_online);

// Adversarial two-way corpus for the gamma-OCS suite: hardness families,
// repeated-pair paths, interleaved pairs, tournaments, plus biased random
// instances. Rounds per instance <= max_rounds.
std::vector<TwoWayInstance> adversarial_two_way_corpus(std::size_t count, int max_rounds, Rng& rng);

// Deterministic hash-based weight rule for negative-correlation sweeps.
TwoWayWeightRule random_weight_rule(std::uint64_t rule_seed);

// -------------------------------------------------------------------------
// Per-element selected-position masks
// -------------------------------------------------------------------------

// occurrences[e] = round indices containing element e (elements with at most
// 20 occurrences). Exact law over the bitmask of occurrence positions where e
// was selected, one vector per element, via one enumeration pass.
std::vector<std::vector<double>> element_mask_laws(const Selector& proto, const RoundSeq& rounds,
                                                   const std::vector<std::vector<std::size_t>>& occurrences,
                                                   std::uint64_t leaf_budget = kDefaultLeafBudget);

// Monte Carlo histogram version of the same masks; counts per element.
std::vector<std::vector<std::uint64_t>> element_mask_hists(
    const Selector& proto, const RoundSeq& rounds,
    const std::vector<std::vector<std::size_t>>& occurrences, std::uint64_t trials,
    std::uint64_t seed, unsigned workers, std::size_t validate_runs = 0,
    std::string* structural_error = nullptr);

// hits[S] = sum over masks disjoint from S (subset-sum over the complement).
std::vector<std::uint64_t> disjoint_sums(const std::vector<std::uint64_t>& hist, int bits);
std::vector<double> disjoint_sums(const std::vector<double>& law, int bits);

// Round indices per element for a lowered instance.
std::vector<std::vector<std::size_t>> occurrence_lists(const RoundSeq& rounds, std::size_t n_elems);

// -------------------------------------------------------------------------
// Verification suites (the CLI subcommands and the acceptance gate share
// these; the acceptance gate pins the headline parameters).
// -------------------------------------------------------------------------

// Tournament tightness for k = 1..k_max plus an exact bound sweep on random
// small instances.
Report verify_semi(const Options& opt, int k_max = 4);

// Counterexample reproduction, subset-bound oracle sweep, the unweighted
// exp(-y) baseline, and both weight-function inequality grids.
Report verify_multiway(const Options& opt);

// gamma-subsequence suite for the combined OCS, automata identities,
// structural validation, the flag-OCS suites, and the hardness event-sum
// experiment.
Report verify_ocs(const Options& opt);

// LP evaluation for a named bound ("semi" | "flag" | "gamma:<value>" |
// "multiway" | "exp"); prints value tables to `tables` when non-null and
// verifies the feasibility invariants.
Report lp_suite(const Options& opt, const std::string& bound_name, std::ostream* tables);

struct MatchJob {
    std::string id;
    MatchingInstance instance;
};

// Matching ratio experiments: named algorithm ("greedy" | "balance" |
// "edge-flag" | "edge-ocs") against exact offline optima.
Report match_suite(const Options& opt, const std::string& algorithm,
                   const std::vector<MatchJob>& jobs);

// Default corpus for `match_suite`: upper-triangular n in {4,8,16} plus
// random instances of the kinds the algorithm accepts.
std::vector<MatchJob> default_match_jobs(const std::string& algorithm, std::size_t random_count,
                                         std::uint64_t seed);

} // namespace ocs::harness
