#include "ocs/multiway.hpp"

#include <algorithm>
#include <stdexcept>

namespace ocs {

double multiway_default_c() { return (4.0 - 2.0 * std::sqrt(3.0)) / 3.0; }

WeightFunction WeightFunction::cubic(double c) { return WeightFunction{Kind::cubic, c}; }

double multiway_bound(double y, double c) {
    if (y < 0.0) throw std::invalid_argument("multiway_bound: y must be >= 0");
    return std::exp(-y - 0.5 * y * y - c * y * y * y);
}

std::string MultiwaySelector::snapshot() const {
    std::string out;
    detail::put_vec(out, mass_);
    detail::put_vec(out, selected_);
    return out;
}

void MultiwaySelector::restore(std::string_view blob) {
    mass_ = detail::get_vec<double>(blob);
    selected_ = detail::get_vec<std::uint8_t>(blob);
}

ElemId MultiwaySelector::do_step(const Round& round, ChoiceSource& src) {
    const std::size_t n = round.elems.size();
    if (n == 0) throw std::invalid_argument("multi-way round has empty support");
    ElemId max_elem = *std::max_element(round.elems.begin(), round.elems.end());
    if (max_elem >= mass_.size()) {
        mass_.resize(max_elem + 1, 0.0);
        selected_.resize(max_elem + 1, 0);
    }

    // Sampling weights in log space: ln x_e + ln w(y_e) for unselected e.
    std::vector<double> logw(n, -std::numeric_limits<double>::infinity());
    bool any_unselected = false;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (selected_[round.elems[i]]) continue;
        any_unselected = true;
        if (round.masses[i] > 0.0) {
            logw[i] = std::log(round.masses[i]) + w_.log_w(mass_[round.elems[i]]);
            top = std::max(top, logw[i]);
        }
    }

    std::vector<double> probs(n, 0.0);
    if (!any_unselected) {
        // Everything in the round was already selected: uniform over the round.
        for (std::size_t i = 0; i < n; ++i) probs[i] = 1.0 / static_cast<double>(n);
    } else if (!std::isfinite(top)) {
        // Degenerate: unselected elements exist but all weights are zero.
        std::size_t unsel = 0;
        for (std::size_t i = 0; i < n; ++i) unsel += selected_[round.elems[i]] ? 0u : 1u;
        for (std::size_t i = 0; i < n; ++i)
            if (!selected_[round.elems[i]]) probs[i] = 1.0 / static_cast<double>(unsel);
    } else {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::isfinite(logw[i])) {
                probs[i] = std::exp(logw[i] - top);
                total += probs[i];
            }
        }
        for (double& p : probs) p /= total;
    }

    const ElemId pick = round.elems[src.choose(probs)];
    for (std::size_t i = 0; i < n; ++i) mass_[round.elems[i]] += round.masses[i];
    selected_[pick] = 1;
    return pick;
}

namespace {

// log(1 + e^x), stable for large |x|.
double softplus(double x) { return x > 36.0 ? x + std::exp(-x) : std::log1p(std::exp(x)); }

void note(InequalityReport& rep, double violation, double x, double y) {
    ++rep.points;
    if (violation > rep.max_violation) {
        rep.max_violation = violation;
        rep.worst_x = x;
        rep.worst_y = y;
    }
}

} // namespace

InequalityReport check_cubic_inequality(std::span<const double> x_grid,
                                        std::span<const double> y_grid, const WeightFunction& w) {
    InequalityReport rep;
    for (double x : x_grid) {
        if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("cubic check needs x in (0,1)");
        const double log_ratio_coeff = std::log(x / (1.0 - x));
        for (double y : y_grid) {
            const double log_lhs = w.log_w(y + x) - w.log_w(y);
            const double log_rhs = softplus(log_ratio_coeff + w.log_w(y));
            note(rep, log_lhs - log_rhs, x, y);
        }
    }
    return rep;
}

InequalityReport check_condition_inequality(std::span<const ConditionCase> cases,
                                            const WeightFunction& w) {
    InequalityReport rep;
    for (const ConditionCase& cs : cases) {
        if (cs.x.size() != cs.y.size()) throw std::invalid_argument("condition case length mismatch");
        double sum_x = 0.0;
        for (double x : cs.x) sum_x += x;
        double log_rhs = 0.0;
        for (std::size_t i = 0; i < cs.x.size(); ++i)
            log_rhs += w.log_w(cs.y[i]) - w.log_w(cs.y[i] + cs.x[i]);

        if (sum_x >= 1.0) {
            // lhs is zero; rhs is a product of positive ratios.
            note(rep, -std::numeric_limits<double>::infinity(), sum_x, 0.0);
            continue;
        }
        // Denominator sum x_i w(y_i) + 1 - sum x_i via log-sum-exp.
        double top = std::log1p(-sum_x);
        std::vector<double> terms{top};
        for (std::size_t i = 0; i < cs.x.size(); ++i) {
            if (cs.x[i] <= 0.0) continue;
            terms.push_back(std::log(cs.x[i]) + w.log_w(cs.y[i]));
            top = std::max(top, terms.back());
        }
        double denom = 0.0;
        for (double t : terms) denom += std::exp(t - top);
        const double log_lhs = std::log1p(-sum_x) - (top + std::log(denom));
        note(rep, log_lhs - log_rhs, sum_x, cs.y.empty() ? 0.0 : cs.y[0]);
    }
    return rep;
}

} // namespace ocs
