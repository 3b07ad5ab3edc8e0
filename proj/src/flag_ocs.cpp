#include "ocs/flag_ocs.hpp"

#include <cmath>
#include <stdexcept>

namespace ocs {

std::string FlagOcs::snapshot() const {
    std::string out;
    detail::put_vec(out, flags_);
    detail::put(out, round_);
    return out;
}

void FlagOcs::restore(std::string_view blob) {
    flags_ = detail::get_vec<std::int8_t>(blob);
    round_ = detail::get<std::uint32_t>(blob);
}

ElemId FlagOcs::do_step(const Round& round, ChoiceSource& src) {
    if (round.elems.size() != 2 || round.elems[0] == round.elems[1])
        throw std::invalid_argument("flag OCS needs two distinct elements per round");
    const ElemId max_elem = std::max(round.elems[0], round.elems[1]);
    if (max_elem >= flags_.size()) flags_.resize(max_elem + 1, -1);

    ElemId probe;
    auto it = forced_.find(round_);
    if (it != forced_.end()) {
        probe = it->second;
        if (probe != round.elems[0] && probe != round.elems[1])
            throw std::invalid_argument("forced probe element not in round");
    } else {
        probe = round.elems[src.choose(std::array{0.5, 0.5})];
    }
    if (flags_[probe] < 0) flags_[probe] = static_cast<std::int8_t>(src.choose(std::array{0.5, 0.5}));

    ++round_;
    const ElemId other = round.elems[0] == probe ? round.elems[1] : round.elems[0];
    if (flags_[probe] == 1) {
        flags_[probe] = 0;
        return probe;
    }
    flags_[probe] = 1;
    return other;
}

namespace {

int half_ceil(int n) { return (n + 1) / 2; } // ceil(n/2) for n >= 0

} // namespace

double flag_bound(int k) {
    if (k < 0) throw std::invalid_argument("flag_bound: k must be >= 0");
    const int m1 = std::min(k, half_ceil(k + 2));
    const int m2 = std::min(k, half_ceil(k + 3));
    return std::ldexp(1.0, -(k + m1)) + static_cast<double>(k) * std::ldexp(1.0, -(k + m2));
}

double flag_conditional_bound(int k) {
    if (k < 0) throw std::invalid_argument("flag_conditional_bound: k must be >= 0");
    return std::ldexp(1.0, -std::min(k, half_ceil(k + 2)));
}

double relaxed_guarantee(std::span<const int> pattern, std::span<const double> a) {
    int total = 0;
    for (int k : pattern) {
        if (k < 1) throw std::invalid_argument("relaxed_guarantee: lengths must be >= 1");
        total += k;
    }
    double bound = flag_bound(total);
    int prefix = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (i >= 1) {
            for (int j = 0; j < prefix; ++j)
                bound += 0.5 * (j < static_cast<int>(a.size()) ? a[j] : 0.0);
        }
        prefix += pattern[i];
    }
    return bound;
}

} // namespace ocs
