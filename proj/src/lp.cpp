#include "ocs/lp.hpp"

#include <cmath>
#include <stdexcept>

#include "ocs/flag_ocs.hpp"
#include "ocs/multiway.hpp"
#include "ocs/semi_ocs.hpp"

namespace ocs {

namespace {

constexpr double kCutoff = 1e-14;

DiscreteBound truncate_bound(std::string name, const std::function<double(int)>& p) {
    DiscreteBound bound;
    bound.name = std::move(name);
    for (int k = 0;; ++k) {
        const double v = p(k);
        if (v < kCutoff) break;
        bound.p.push_back(v);
        if (k > 4096) throw std::logic_error("discrete bound fails to decay");
    }
    return bound;
}

} // namespace

DiscreteBound semi_ocs_discrete_bound() {
    return truncate_bound("semi", [](int k) { return semi_ocs_bound(k); });
}

DiscreteBound flag_discrete_bound() {
    return truncate_bound("flag", [](int k) { return flag_bound(k); });
}

DiscreteBound gamma_discrete_bound(double gamma) {
    return truncate_bound("gamma", [gamma](int k) {
        return k == 0 ? 1.0 : std::ldexp(1.0, -k) * std::pow(1.0 - gamma, k - 1);
    });
}

double DiscreteLpSolution::a_prefix(std::size_t k) const {
    double s = 0.0;
    for (std::size_t i = 0; i < k && i < a.size(); ++i) s += a[i];
    return s;
}

DiscreteLpSolution two_choice_lp(const DiscreteBound& bound) {
    const auto& p = bound.p;
    if (p.empty() || p[0] != 1.0) throw std::invalid_argument("two_choice_lp: p(0) must be 1");
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        if (p[k + 1] > p[k])
            throw std::invalid_argument("two_choice_lp: p not non-increasing at k=" +
                                        std::to_string(k));
        if (p[k + 1] > (2.0 / 3.0) * p[k] + 1e-15)
            throw std::invalid_argument("two_choice_lp: p(k+1) <= (2/3)p(k) fails at k=" +
                                        std::to_string(k));
    }

    DiscreteLpSolution sol;
    sol.bound = bound;

    // Gamma = 1 - (1/3) sum (2/3)^i p(i). Terms past the cutoff are below
    // 1e-14 and the ratio condition makes the tail geometric.
    double series = 0.0;
    double w = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i, w *= 2.0 / 3.0) {
        const double term = w * p[i];
        series += term;
        if (term < 1e-13 && i > 0) break;
    }
    sol.gamma = 1.0 - series / 3.0;

    // b(k) backward: b(k) = (1/3)(p(k)-p(k+1)) + (2/3) b(k+1), seeded with the
    // telescoped tail bound b(K) ~ p(K)/3 (|error| < cutoff).
    const std::size_t K = p.size();
    sol.b.assign(K, 0.0);
    double next_b = bound.at(K) / 3.0;
    for (std::size_t k = K; k-- > 0;) {
        sol.b[k] = (bound.at(k) - bound.at(k + 1)) / 3.0 + (2.0 / 3.0) * next_b;
        next_b = sol.b[k];
    }
    sol.a.assign(K, 0.0);
    for (std::size_t k = 0; k < K; ++k)
        sol.a[k] = bound.at(k) - bound.at(k + 1) - sol.b[k];
    return sol;
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace {

double simpson(double lo, double hi, double flo, double fmid, double fhi) {
    return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
}

double adapt(const std::function<double(double)>& f, double lo, double hi, double flo, double fmid,
             double fhi, double whole, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(lo, mid, flo, flm, fmid);
    const double right = simpson(mid, hi, fmid, frm, fhi);
    if (depth > 48) throw std::runtime_error("quadrature failed to converge");
    if (std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, lo, mid, flo, flm, fmid, left, tol / 2.0, depth + 1) +
           adapt(f, mid, hi, fmid, frm, fhi, right, tol / 2.0, depth + 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (hi <= lo) return 0.0;
    const double mid = 0.5 * (lo + hi);
    const double flo = f(lo), fmid = f(mid), fhi = f(hi);
    return adapt(f, lo, hi, flo, fmid, fhi, simpson(lo, hi, flo, fmid, fhi), tol, 0);
}

// ---------------------------------------------------------------------------
// Continuous bounds and the Balance LP solution
// ---------------------------------------------------------------------------

ContinuousBound multiway_continuous_bound(double c) {
    ContinuousBound bound;
    bound.name = "multiway";
    bound.p = [c](double y) { return multiway_bound(y, c); };
    bound.dp = [c](double y) { return -(1.0 + y + 3.0 * c * y * y) * multiway_bound(y, c); };
    return bound;
}

ContinuousBound multiway_continuous_bound() { return multiway_continuous_bound(multiway_default_c()); }

ContinuousBound exp_continuous_bound() {
    ContinuousBound bound;
    bound.name = "exp";
    bound.p = [](double y) { return std::exp(-y); };
    bound.dp = [](double y) { return -std::exp(-y); };
    return bound;
}

ContinuousLpSolution::ContinuousLpSolution(ContinuousBound bound, double y_max, int grid_per_unit)
    : bound_(std::move(bound)), y_max_(y_max), step_(1.0 / grid_per_unit) {
    const auto n = static_cast<std::size_t>(std::llround(y_max_ / step_));
    grid_.assign(n + 1, 0.0);

    // Tail seed: b(Y) ~ -p'(Y)/2 far out (exact for p = e^{-y}). Any seed
    // error decays like e^{y-Y} under the backward integration below.
    grid_[n] = -bound_.dp(y_max_) / 2.0;
    if (!std::isfinite(grid_[n])) grid_[n] = 0.0;

    // Integrate b' = b + p' backward with classic RK4.
    auto deriv = [&](double y, double b) { return b + bound_.dp(y); };
    for (std::size_t i = n; i-- > 0;) {
        const double y1 = (i + 1) * step_;
        const double h = -step_;
        const double b1 = grid_[i + 1];
        const double k1 = deriv(y1, b1);
        const double k2 = deriv(y1 + h / 2, b1 + h / 2 * k1);
        const double k3 = deriv(y1 + h / 2, b1 + h / 2 * k2);
        const double k4 = deriv(y1 + h, b1 + h * k3);
        grid_[i] = b1 + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }

    // Gamma by direct quadrature; b(0) must agree (checked by tests).
    gamma_ = integrate([&](double z) { return std::exp(-z) * (1.0 - bound_.p(z)); }, 0.0, 60.0,
                       1e-12);
}

double ContinuousLpSolution::b(double y) const {
    if (y < 0.0) throw std::invalid_argument("b: y must be >= 0");
    if (y >= y_max_) return 0.0;
    const double pos = y / step_;
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= grid_.size()) return grid_.back();
    return grid_[i] * (1.0 - frac) + grid_[i + 1] * frac;
}

double ContinuousLpSolution::b_inverse(double v) const {
    if (v >= grid_[0]) return 0.0;
    if (v <= 0.0) return y_max_;
    // Binary search for the last grid index with b >= v; grid_ is
    // non-increasing.
    std::size_t lo = 0, hi = grid_.size() - 1;
    if (grid_[hi] >= v) return y_max_;
    while (lo + 1 < hi) {
        const std::size_t mid = (lo + hi) / 2;
        (grid_[mid] >= v ? lo : hi) = mid;
    }
    // Solve the linear interpolant on [lo, lo+1] exactly.
    const double b0 = grid_[lo], b1 = grid_[lo + 1];
    double frac = b0 > b1 ? (b0 - v) / (b0 - b1) : 0.0;
    frac = std::min(1.0, std::max(0.0, frac));
    return (static_cast<double>(lo) + frac) * step_;
}

} // namespace ocs
