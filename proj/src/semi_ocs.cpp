#include "ocs/semi_ocs.hpp"

#include <cmath>
#include <stdexcept>

namespace ocs {

namespace {

std::string snapshot_two_way(const TwoWayState& st) {
    std::string out;
    detail::put_vec(out, st.appearances);
    detail::put_vec(out, st.selected);
    return out;
}

void restore_two_way(TwoWayState& st, std::string_view blob) {
    st.appearances = detail::get_vec<std::uint32_t>(blob);
    st.selected = detail::get_vec<std::uint8_t>(blob);
}

// Shared tail of both algorithms: sample among the two elements, then update
// appearance counts and the selected flag.
ElemId finish_round(TwoWayState& st, const Round& round, ChoiceSource& src, double w0, double w1) {
    const ElemId a = round.elems[0], b = round.elems[1];
    ElemId pick;
    if (w0 <= 0.0 && w1 <= 0.0) {
        pick = round.elems[src.choose(std::array{0.5, 0.5})];
    } else {
        const double total = w0 + w1;
        pick = round.elems[src.choose(std::array{w0 / total, w1 / total})];
    }
    st.appearances[a]++;
    st.appearances[b]++;
    st.selected[pick] = 1;
    return pick;
}

} // namespace

std::string WeightedTwoWay::snapshot() const { return snapshot_two_way(state_); }
void WeightedTwoWay::restore(std::string_view blob) { restore_two_way(state_, blob); }

ElemId WeightedTwoWay::do_step(const Round& round, ChoiceSource& src) {
    if (round.elems.size() != 2) throw std::invalid_argument("two-way selector needs pair rounds");
    const ElemId a = round.elems[0], b = round.elems[1];
    state_.ensure(std::max(a, b));

    double w0 = 0.0, w1 = 0.0;
    const bool sa = state_.is_selected(a), sb = state_.is_selected(b);
    if (!sa || !sb) {
        auto weights = rule_(state_, round);
        if (weights[0] < 0.0 || weights[1] < 0.0)
            throw std::invalid_argument("weight rule returned a negative weight");
        w0 = sa ? 0.0 : weights[0];
        w1 = sb ? 0.0 : weights[1];
        if (w0 <= 0.0 && w1 <= 0.0) {
            // All unselected weights are zero: uniform over the unselected.
            w0 = sa ? 0.0 : 1.0;
            w1 = sb ? 0.0 : 1.0;
        }
    }
    return finish_round(state_, round, src, w0, w1);
}

std::string OptimalSemiOcs::snapshot() const { return snapshot_two_way(state_); }
void OptimalSemiOcs::restore(std::string_view blob) { restore_two_way(state_, blob); }

ElemId OptimalSemiOcs::do_step(const Round& round, ChoiceSource& src) {
    if (round.elems.size() != 2) throw std::invalid_argument("two-way selector needs pair rounds");
    const ElemId a = round.elems[0], b = round.elems[1];
    state_.ensure(std::max(a, b));

    const bool sa = state_.is_selected(a), sb = state_.is_selected(b);
    double w0, w1;
    if (sa && sb) {
        w0 = w1 = 0.5;
    } else if (sa) {
        w0 = 0.0; w1 = 1.0;
    } else if (sb) {
        w0 = 1.0; w1 = 0.0;
    } else {
        const auto ka = state_.k_of(a), kb = state_.k_of(b);
        if (ka > kb) { w0 = 1.0; w1 = 0.0; }
        else if (kb > ka) { w0 = 0.0; w1 = 1.0; }
        else { w0 = w1 = 0.5; }
    }
    return finish_round(state_, round, src, w0, w1);
}

TwoWayWeightRule more_appearances_rule() {
    return [](const TwoWayState& st, const Round& r) -> std::array<double, 2> {
        const auto ka = st.k_of(r.elems[0]), kb = st.k_of(r.elems[1]);
        return {ka >= kb ? 1.0 : 0.0, kb >= ka ? 1.0 : 0.0};
    };
}

double semi_ocs_bound(int k) {
    if (k < 0) throw std::invalid_argument("semi_ocs_bound: k must be >= 0");
    if (k > 30) return 0.0;
    const long long exponent = 1ll - (1ll << k);
    return static_cast<double>(std::ldexp(1.0L, static_cast<int>(exponent)));
}

} // namespace ocs
