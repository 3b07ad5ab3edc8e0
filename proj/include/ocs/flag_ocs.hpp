#pragma once

#include <map>
#include <span>
#include <vector>

#include "ocs/selector.hpp"

namespace ocs {

// Flag-probing OCS: each element carries a flag in {0,1}, initialized
// uniformly at random (materialized lazily on first probe). Per round a probe
// element is drawn uniformly; flag 1 selects the probe and clears the flag,
// flag 0 selects the other element and sets the flag.
class FlagOcs final : public Selector {
public:
    std::unique_ptr<Selector> clone() const override { return std::make_unique<FlagOcs>(*this); }
    void reset() override {
        flags_.clear();
        round_ = 0;
    }
    std::string snapshot() const override;
    void restore(std::string_view blob) override;

    // Test hook realizing the conditional-probability bound: rounds listed
    // here probe the given element with certainty instead of uniformly.
    // Configuration, not state: survives reset and is excluded from snapshots.
    void force_probe(std::uint32_t round_index, ElemId elem) { forced_[round_index] = elem; }

protected:
    ElemId do_step(const Round& round, ChoiceSource& src) override;

private:
    std::vector<std::int8_t> flags_; // -1 = not yet materialized
    std::uint32_t round_ = 0;
    std::map<std::uint32_t, ElemId> forced_;
};

// Single-subsequence unselected-probability bound of the flag-probing OCS:
// p(k) = 2^{-k-min{k,ceil((k+2)/2)}} + k 2^{-k-min{k,ceil((k+3)/2)}}.
double flag_bound(int k);

// Conditional bound 2^{-min{k, ceil((k+2)/2)}} given any probe realization.
double flag_conditional_bound(int k);

// The relaxed guarantee p(sum k_i) + (1/2) sum_{i>=2} sum_{j<k_1+..+k_{i-1}} a(j)
// for a union of consecutive subsequences; a(j) treated as 0 past its length.
double relaxed_guarantee(std::span<const int> pattern, std::span<const double> a);

} // namespace ocs
