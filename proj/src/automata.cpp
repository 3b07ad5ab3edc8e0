#include "ocs/automata.hpp"

#include <cmath>
#include <stdexcept>

namespace ocs {

double default_fc_p() { return 0.6616; }
double default_star_beta() { return std::sqrt(2.0) - 1.0; }

double forest_alpha(double p) {
    const double a1 = 3.0 * p * (1.0 - p) / (1.0 + p);
    const double a2 = p * p * p + (1.0 - p) * (1.0 - p);
    const double a3 = 1.0 / (3.0 - p);
    return std::min({a1, a2, a3});
}

std::vector<FcBranch> sigma_plus(FcState q, double p) {
    switch (q) {
        case FcState::no:
            return {{FcState::yes, true, p}, {FcState::no2, false, 1.0 - p}};
        case FcState::no2:
            return {{FcState::yes, true, 1.0}};
        case FcState::yes:
            return {{FcState::no, false, 1.0}};
    }
    throw std::logic_error("bad state");
}

std::vector<FcBranch> sigma_minus(FcState q, double p) {
    switch (q) {
        case FcState::no:
            return {{FcState::yes, false, 1.0}};
        case FcState::no2:
            return {{FcState::no, false, 1.0}};
        case FcState::yes:
            return {{FcState::no, true, p}, {FcState::no2, true, 1.0 - p}};
    }
    throw std::logic_error("bad state");
}

std::array<double, 3> fc_stationary(double p) {
    return {1.0 / (3.0 - p), (1.0 - p) / (3.0 - p), 1.0 / (3.0 - p)};
}

namespace {

std::array<std::array<double, 3>, 3> matrix_of(std::vector<FcBranch> (*table)(FcState, double),
                                               double p) {
    std::array<std::array<double, 3>, 3> m{};
    for (int s = 0; s < 3; ++s)
        for (const FcBranch& b : table(static_cast<FcState>(s), p))
            m[s][static_cast<int>(b.next)] += b.prob;
    return m;
}

} // namespace

std::array<std::array<double, 3>, 3> fc_matrix_plus(double p) { return matrix_of(&sigma_plus, p); }
std::array<std::array<double, 3>, 3> fc_matrix_minus(double p) { return matrix_of(&sigma_minus, p); }

double stationary_residual(const std::array<double, 3>& pi,
                           const std::array<std::array<double, 3>, 3>& P) {
    double worst = 0.0;
    for (int j = 0; j < 3; ++j) {
        double out = 0.0;
        for (int i = 0; i < 3; ++i) out += pi[i] * P[i][j];
        worst = std::max(worst, std::abs(out - pi[j]));
    }
    return worst;
}

std::vector<double> f_sequence(double p, int n) {
    if (n < 0) throw std::invalid_argument("f_sequence: n must be >= 0");
    std::vector<double> f;
    f.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
        if (i == 0) f.push_back(1.0);
        else if (i == 1) f.push_back(0.0);
        else if (i == 2) f.push_back(p);
        else f.push_back(p * f[i - 2] + (1.0 - p) * f[i - 3]);
    }
    return f;
}

namespace {

void add_mass(std::map<std::uint32_t, double>& law, std::uint32_t mask, double prob) {
    if (prob > 0.0) law[mask] += prob;
}

// Extends the chain by one sigma+ step per recursion level, indices lo..len.
void plus_rec(std::map<std::uint32_t, double>& law, double p, int len, int i, FcState q,
              std::uint32_t mask, double prob) {
    if (i > len) {
        add_mass(law, mask, prob);
        return;
    }
    for (const FcBranch& b : sigma_plus(q, p))
        plus_rec(law, p, len, i + 1, b.next,
                 b.matched ? mask | (1u << (i - 1)) : mask, prob * b.prob);
}

// Downward sigma- chain for indices i = hi..1 (decision bit i-1 per step).
void minus_rec(std::map<std::uint32_t, double>& law, double p, int i, FcState q,
               std::uint32_t mask, double prob) {
    if (i < 1) {
        add_mass(law, mask, prob);
        return;
    }
    for (const FcBranch& b : sigma_minus(q, p))
        minus_rec(law, p, i - 1, b.next, b.matched ? mask | (1u << (i - 1)) : mask, prob * b.prob);
}

} // namespace

std::map<std::uint32_t, double> plus_chain_law(double p, int len) {
    std::map<std::uint32_t, double> law;
    const auto pi = fc_stationary(p);
    for (int s = 0; s < 3; ++s)
        plus_rec(law, p, len, 1, static_cast<FcState>(s), 0u, pi[s]);
    return law;
}

std::map<std::uint32_t, double> split_chain_law(double p, int len, int i0) {
    if (i0 < 1 || i0 > len + 1) throw std::invalid_argument("split_chain_law: bad i0");
    const auto pi = fc_stationary(p);
    std::map<std::uint32_t, double> law;
    for (int s = 0; s < 3; ++s) {
        // Positive half from the initial state, then the negative half from the
        // same initial state, composed independently.
        std::map<std::uint32_t, double> up, down;
        plus_rec(up, p, len, i0, static_cast<FcState>(s), 0u, 1.0);
        minus_rec(down, p, i0 - 1, static_cast<FcState>(s), 0u, 1.0);
        for (const auto& [um, up_p] : up)
            for (const auto& [dm, dn_p] : down)
                add_mass(law, um | dm, pi[s] * up_p * dn_p);
    }
    return law;
}

std::vector<StarBranch> sigma_star(StarState q, double beta) {
    const double hi = (1.0 + beta) / 2.0, lo = (1.0 - beta) / 2.0;
    switch (q) {
        case StarState::origin:
            return {{StarState::heads, Label::heads, 0.5}, {StarState::tails, Label::tails, 0.5}};
        case StarState::heads:
            return {{StarState::heads2, Label::heads, lo}, {StarState::tails, Label::tails, hi}};
        case StarState::tails:
            return {{StarState::heads, Label::heads, hi}, {StarState::tails2, Label::tails, lo}};
        case StarState::heads2:
            return {{StarState::origin, Label::tails, 1.0}};
        case StarState::tails2:
            return {{StarState::origin, Label::heads, 1.0}};
    }
    throw std::logic_error("bad state");
}

} // namespace ocs
