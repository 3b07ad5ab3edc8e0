#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

namespace ocs {

// ---------------------------------------------------------------------------
// Forest-constructor automata sigma+ / sigma- (three states, parameter p).
// ---------------------------------------------------------------------------

enum class FcState : std::uint8_t { no = 0, no2 = 1, yes = 2 };

struct FcBranch {
    FcState next;
    bool matched; // decision M (include arc into the pseudo-matching)
    double prob;
};

// Branches of sigma+ (positive end) and sigma- (negative end) from a state.
// sigma- is the time reversal of sigma+.
std::vector<FcBranch> sigma_plus(FcState q, double p);
std::vector<FcBranch> sigma_minus(FcState q, double p);

// Common stationary distribution (pi_no, pi_no2, pi_yes) of both automata:
// (1, 1-p, 1) / (3-p).
std::array<double, 3> fc_stationary(double p);

// 3x3 one-step transition matrices, rows/cols in state order (no, no2, yes).
std::array<std::array<double, 3>, 3> fc_matrix_plus(double p);
std::array<std::array<double, 3>, 3> fc_matrix_minus(double p);

// Max-abs residual of pi P - pi.
double stationary_residual(const std::array<double, 3>& pi,
                           const std::array<std::array<double, 3>, 3>& P);

// f_0..f_n of the selection-probability recurrence
// f_0 = 1, f_1 = 0, f_2 = p, f_i = p f_{i-2} + (1-p) f_{i-3}.
std::vector<double> f_sequence(double p, int n);

// Exact joint law of the decision bits (d^1..d^len) as bitmask -> probability
// (bit i-1 set iff d^i = M).
//   plus_chain_law: q^0 ~ pi, then sigma+ applied len times.
//   split_chain_law: q^{i0-1} ~ pi; sigma+ upward for indices i0..len and
//     sigma- downward for indices i0-1..1 (i0 in [1, len+1]).
// The two laws agree for every i0 (inverse property of the automata).
std::map<std::uint32_t, double> plus_chain_law(double p, int len);
std::map<std::uint32_t, double> split_chain_law(double p, int len, int i0);

// ---------------------------------------------------------------------------
// Forest-OCS automaton sigma* (five states, margin beta).
// ---------------------------------------------------------------------------

enum class StarState : std::uint8_t { origin = 0, heads = 1, heads2 = 2, tails = 3, tails2 = 4 };

enum class Label : std::uint8_t { heads = 0, tails = 1 };

struct StarBranch {
    StarState next;
    Label pick;
    double prob;
};

std::vector<StarBranch> sigma_star(StarState q, double beta);

double default_fc_p();     // 0.6616
double default_star_beta(); // sqrt(2) - 1

// alpha of the forest constructor: the minimum of the three binding cases
// 3p(1-p)/(1+p), p^3+(1-p)^2, and 1/(3-p).
double forest_alpha(double p);

} // namespace ocs
