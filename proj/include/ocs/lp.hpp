#pragma once

#include <functional>
#include <string>
#include <vector>

namespace ocs {

// ---------------------------------------------------------------------------
// Discrete side: Matching LP closed form for a bound p(k).
// ---------------------------------------------------------------------------

// k -> p(k) with p(0) = 1, truncated at the smallest K with p(K) < 1e-14.
// Feeding two_choice_lp requires p non-increasing and p(k+1) <= (2/3) p(k).
struct DiscreteBound {
    std::string name;
    std::vector<double> p; // p[0..K]

    double at(std::size_t k) const { return k < p.size() ? p[k] : 0.0; }
    std::size_t cutoff() const { return p.size(); }
};

DiscreteBound semi_ocs_discrete_bound();              // p(k) = 2^{-2^k+1}
DiscreteBound flag_discrete_bound();                  // flag-probing OCS bound
DiscreteBound gamma_discrete_bound(double gamma);     // p(k) = 2^{-k}(1-gamma)^{k-1}, p(0)=1

struct DiscreteLpSolution {
    DiscreteBound bound;
    double gamma = 0.0;     // optimal LP value
    std::vector<double> a;  // a(0..K-1)
    std::vector<double> b;  // b(0..K-1)

    double a_at(std::size_t k) const { return k < a.size() ? a[k] : 0.0; }
    double b_at(std::size_t k) const { return k < b.size() ? b[k] : 0.0; }
    // sum_{i=0}^{k-1} a(i)
    double a_prefix(std::size_t k) const;
};

// Closed-form optimal solution of the Matching LP:
//   Gamma = 1 - (1/3) sum (2/3)^i p(i),
//   b(k) = (1/3) sum_{i>=k} (2/3)^{i-k} (p(i) - p(i+1)),  a(k) = p(k)-p(k+1)-b(k).
// Throws std::invalid_argument naming the failing k when the preconditions
// (p(0)=1, monotone, ratio <= 2/3) are violated.
DiscreteLpSolution two_choice_lp(const DiscreteBound& bound);

// ---------------------------------------------------------------------------
// Continuous side: Balance LP closed form for a differentiable bound p(y).
// ---------------------------------------------------------------------------

struct ContinuousBound {
    std::string name;
    std::function<double(double)> p;  // decreasing, convex, p(0)=1
    std::function<double(double)> dp; // analytic derivative p'
};

ContinuousBound multiway_continuous_bound(double c); // exp(-y - y^2/2 - c y^3)
ContinuousBound multiway_continuous_bound();
ContinuousBound exp_continuous_bound();              // e^{-y} (quadrature cross-check)

// Gamma = int_0^inf e^{-z} (1 - p(z)) dz, b(y) = -e^y int_y^inf p'(z) e^{-z} dz,
// a(y) = -p'(y) - b(y). b is tabulated on a dense grid (by integrating the ODE
// b' = b + p' backward from the far tail) and inverted by monotone lookup.
class ContinuousLpSolution {
public:
    ContinuousLpSolution(ContinuousBound bound, double y_max = 64.0, int grid_per_unit = 512);

    double gamma() const { return gamma_; }
    const ContinuousBound& bound() const { return bound_; }

    double b(double y) const;      // piecewise-linear on the grid
    double a(double y) const { return -bound_.dp(y) - b(y); }
    // Largest y with b(y) >= v (0 when v >= b(0), capped at y_max).
    double b_inverse(double v) const;
    double y_max() const { return y_max_; }

private:
    ContinuousBound bound_;
    double y_max_;
    double step_;
    std::vector<double> grid_; // b at y = i * step_
    double gamma_;
};

// Adaptive Simpson quadrature, shared by the LP checks and tests.
double integrate(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10);

} // namespace ocs
