#pragma once

#include <functional>
#include <vector>

#include "ocs/selector.hpp"

namespace ocs {

// Per-element two-way sampling state: appearance counts before the current
// round and selected flags. Grows on demand; elements are dense ids.
struct TwoWayState {
    std::vector<std::uint32_t> appearances;
    std::vector<std::uint8_t> selected;

    void ensure(ElemId e) {
        if (e >= appearances.size()) {
            appearances.resize(e + 1, 0);
            selected.resize(e + 1, 0);
        }
    }
    std::uint32_t k_of(ElemId e) const { return e < appearances.size() ? appearances[e] : 0; }
    bool is_selected(ElemId e) const { return e < selected.size() && selected[e] != 0; }
};

// Weights (w_e, w_e') for the two elements of a round, given the state before
// the round. Weights must be non-negative.
using TwoWayWeightRule = std::function<std::array<double, 2>(const TwoWayState&, const Round&)>;

// Weighted 2-way sampling without replacement: among the unselected elements
// of the round, select with probability proportional to the rule's weights
// (uniform fallback when the unselected weights are all zero); if both are
// already selected, select uniformly.
class WeightedTwoWay final : public Selector {
public:
    explicit WeightedTwoWay(TwoWayWeightRule rule) : rule_(std::move(rule)) {}

    std::unique_ptr<Selector> clone() const override { return std::make_unique<WeightedTwoWay>(*this); }
    void reset() override { state_ = TwoWayState{}; }
    std::string snapshot() const override;
    void restore(std::string_view blob) override;

    const TwoWayState& state() const { return state_; }

protected:
    ElemId do_step(const Round& round, ChoiceSource& src) override;

private:
    TwoWayWeightRule rule_;
    TwoWayState state_;
};

// Optimal 2-way semi-OCS: select the unselected element with more previous
// appearances, breaking ties (and the both-selected case) uniformly.
class OptimalSemiOcs final : public Selector {
public:
    std::unique_ptr<Selector> clone() const override { return std::make_unique<OptimalSemiOcs>(*this); }
    void reset() override { state_ = TwoWayState{}; }
    std::string snapshot() const override;
    void restore(std::string_view blob) override;

    const TwoWayState& state() const { return state_; }

protected:
    ElemId do_step(const Round& round, ChoiceSource& src) override;

private:
    TwoWayState state_;
};

// The rule that reproduces the optimal semi-OCS as a special case of weighted
// 2-way sampling: w_e = 1 iff e has appeared at least as often as the other.
TwoWayWeightRule more_appearances_rule();

// Unselected-probability bound 2^{-2^k+1} of the optimal semi-OCS; underflows
// to 0 for large k (k > 30 returns 0 outright).
double semi_ocs_bound(int k);

} // namespace ocs
