#include "doctest.h"

#include <cmath>

#include "ocs/flag_ocs.hpp"
#include "ocs/lp.hpp"
#include "ocs/semi_ocs.hpp"

using namespace ocs;

TEST_CASE("gamma-family bound recovers the closed form (3+2g)/(6+3g)") {
    for (double g : {0.0, 0.109, 0.1673, 0.25, 0.5}) {
        const auto sol = two_choice_lp(gamma_discrete_bound(g));
        CHECK(sol.gamma == doctest::Approx((3.0 + 2.0 * g) / (6.0 + 3.0 * g)).epsilon(1e-12));
    }
    // gamma = 1/2 is the optimal-semi-OCS value 8/15.
    const auto half = two_choice_lp(gamma_discrete_bound(0.5));
    CHECK(std::abs(half.gamma - 8.0 / 15.0) <= 1e-12);
}

TEST_CASE("series values for the built-in bounds") {
    const auto semi = two_choice_lp(semi_ocs_discrete_bound());
    CHECK(semi.gamma == doctest::Approx(0.5362634226904648).epsilon(1e-12));

    const auto flag = two_choice_lp(flag_discrete_bound());
    CHECK(flag.gamma == doctest::Approx(0.5193835704216327).epsilon(1e-12));
    CHECK(flag.a_at(0) == doctest::Approx(0.24030821478918365).epsilon(1e-10));
}

TEST_CASE("discrete feasibility: equality, monotonicity, non-negativity") {
    for (const auto& bound :
         {semi_ocs_discrete_bound(), flag_discrete_bound(), gamma_discrete_bound(0.1673)}) {
        const auto sol = two_choice_lp(bound);
        for (std::size_t k = 0; k < sol.a.size(); ++k) {
            CHECK(sol.a[k] >= -1e-12);
            CHECK(sol.b[k] >= -1e-12);
            CHECK(sol.a[k] + sol.b[k] <= bound.at(k) - bound.at(k + 1) + 1e-12);
            CHECK(sol.a_prefix(k) + 2.0 * sol.b[k] == doctest::Approx(sol.gamma).epsilon(1e-10));
            if (k + 1 < sol.b.size()) CHECK(sol.b[k + 1] <= sol.b[k] + 1e-15);
        }
        CHECK(sol.b[0] == doctest::Approx(sol.gamma / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("gamma-OCS bound implies the relaxed multi-subsequence guarantee") {
    // For gamma <= 1/4 and the gamma-family LP solution, the product bound
    // over subsequences stays below p(sum k_i) plus the a-prefix terms, which
    // is what lets a gamma-OCS drive the edge-weighted matcher.
    for (double g : {0.109, 0.16738639828482123, 0.25}) {
        const auto sol = two_choice_lp(gamma_discrete_bound(g));
        Rng rng(11);
        for (int trial = 0; trial < 2000; ++trial) {
            const int m = 1 + static_cast<int>(rng.next_u64() % 4);
            std::vector<int> pattern;
            int total = 0;
            for (int i = 0; i < m; ++i) {
                pattern.push_back(1 + static_cast<int>(rng.next_u64() % 4));
                total += pattern.back();
            }
            double product = 1.0;
            for (int k : pattern)
                product *= std::ldexp(1.0, -k) * std::pow(1.0 - g, k - 1);
            double relaxed = std::ldexp(1.0, -total) * std::pow(1.0 - g, total - 1);
            int prefix = 0;
            for (int i = 0; i < m; ++i) {
                if (i >= 1)
                    for (int j = 0; j < prefix; ++j) relaxed += 0.5 * sol.a_at(j);
                prefix += pattern[i];
            }
            CHECK(product <= relaxed + 1e-12);
        }
    }
}

TEST_CASE("precondition violations name the failing k") {
    DiscreteBound bad;
    bad.name = "bad";
    bad.p = {1.0, 0.9, 0.1}; // 0.9 > (2/3)*1.0 at k = 0
    try {
        two_choice_lp(bad);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("k=0") != std::string::npos);
    }
}

TEST_CASE("balance LP: quadrature cross-check with p = e^{-y}") {
    const ContinuousLpSolution sol(exp_continuous_bound());
    CHECK(sol.gamma() == doctest::Approx(0.5).epsilon(1e-8));
    // Closed form b(y) = e^{-y}/2.
    for (double y : {0.0, 0.5, 1.0, 2.0, 5.0})
        CHECK(sol.b(y) == doctest::Approx(std::exp(-y) / 2.0).epsilon(1e-8));
    // b_inverse inverts b on the grid.
    for (double y : {0.1, 0.7, 1.9, 4.2})
        CHECK(sol.b_inverse(sol.b(y)) == doctest::Approx(y).epsilon(1e-6));
}

TEST_CASE("balance LP for the multiway bound") {
    const ContinuousLpSolution sol(multiway_continuous_bound());
    CHECK(sol.gamma() == doctest::Approx(0.5936082392873367).epsilon(1e-6));
    CHECK(sol.b(0.0) == doctest::Approx(sol.gamma()).epsilon(1e-7));
    // Independently computed b(1) and a(1) for the cubic-exponent p.
    CHECK(sol.b(1.0) == doctest::Approx(0.14048590632195668).epsilon(1e-6));
    CHECK(sol.a(1.0) == doctest::Approx(0.33278617634593636).epsilon(1e-6));

    // a(y) >= 0, b decreasing, a + b = -p' on a grid.
    const auto bound = multiway_continuous_bound();
    double prev = sol.b(0.0);
    for (int i = 1; i <= 300; ++i) {
        const double y = 0.02 * i;
        CHECK(sol.a(y) >= -1e-8);
        CHECK(sol.b(y) >= -1e-12);
        CHECK(sol.b(y) <= prev + 1e-12);
        CHECK(sol.a(y) + sol.b(y) == doctest::Approx(-bound.dp(y)).epsilon(1e-7));
        prev = sol.b(y);
    }

    // Dual feasibility holds with equality: int_0^y a + b(y) = Gamma.
    for (double y : {0.3, 1.0, 2.5}) {
        const double dual = integrate([&](double z) { return sol.a(z); }, 0.0, y, 1e-10) + sol.b(y);
        CHECK(dual == doctest::Approx(sol.gamma()).epsilon(1e-7));
    }
}

TEST_CASE("adaptive quadrature sanity") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) == doctest::Approx(1.0 / 3.0));
    CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 40.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
}
