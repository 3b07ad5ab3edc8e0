#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "ocs/selector.hpp"

namespace ocs {

// Default cubic coefficient (4 - 2*sqrt(3)) / 3.
double multiway_default_c();

// Weight function of the multi-way sampler: either the cubic-exponent form
// w(y) = exp(y + y^2/2 + c y^3), or the unweighted w == 1. Work happens in
// log space since w overflows for y around 30.
struct WeightFunction {
    enum class Kind { cubic, unit };
    Kind kind = Kind::cubic;
    double c = 0.0;

    static WeightFunction cubic(double c);
    static WeightFunction cubic() { return cubic(multiway_default_c()); }
    static WeightFunction unit() { return WeightFunction{Kind::unit, 0.0}; }

    double log_w(double y) const {
        return kind == Kind::unit ? 0.0 : y + 0.5 * y * y + c * y * y * y;
    }
    double w(double y) const { return std::exp(log_w(y)); }
};

// Unselected-probability bound p(y) = 1/w(y) = exp(-y - y^2/2 - c y^3).
double multiway_bound(double y, double c);
inline double multiway_bound(double y) { return multiway_bound(y, multiway_default_c()); }

// Weighted sampling without replacement over mass-vector rounds: select an
// unselected element of the round with probability proportional to
// x_e * w(y_e); cumulative masses of all round elements update afterwards.
class MultiwaySelector final : public Selector {
public:
    explicit MultiwaySelector(WeightFunction w = WeightFunction::cubic()) : w_(w) {}

    std::unique_ptr<Selector> clone() const override { return std::make_unique<MultiwaySelector>(*this); }
    void reset() override {
        mass_.clear();
        selected_.clear();
    }
    std::string snapshot() const override;
    void restore(std::string_view blob) override;

    double cumulative_mass(ElemId e) const { return e < mass_.size() ? mass_[e] : 0.0; }
    bool is_selected(ElemId e) const { return e < selected_.size() && selected_[e] != 0; }

protected:
    ElemId do_step(const Round& round, ChoiceSource& src) override;

private:
    WeightFunction w_;
    std::vector<double> mass_;
    std::vector<std::uint8_t> selected_;
};

// Numeric sweep reports for the two weight-function inequalities backing the
// multi-way analysis. Violations are log-space (relative) margins; a healthy
// sweep has max_violation <= 0 up to ~1e-9.
struct InequalityReport {
    double max_violation = -std::numeric_limits<double>::infinity();
    double worst_x = 0.0, worst_y = 0.0;
    std::size_t points = 0;
    std::size_t violations(double tol = 1e-9) const { return max_violation > tol ? 1 : 0; }
};

// Checks w(y+x)/w(y) <= x/(1-x) * w(y) + 1 on the grid (x in (0,1), y >= 0).
InequalityReport check_cubic_inequality(std::span<const double> x_grid,
                                        std::span<const double> y_grid,
                                        const WeightFunction& w = WeightFunction::cubic());

// One test case for the k-ary condition inequality.
struct ConditionCase {
    std::vector<double> x, y;
};

// Checks (1 - sum x_i) / (sum x_i w(y_i) + 1 - sum x_i) <= prod w(y_i)/w(y_i+x_i).
InequalityReport check_condition_inequality(std::span<const ConditionCase> cases,
                                            const WeightFunction& w = WeightFunction::cubic());

} // namespace ocs
