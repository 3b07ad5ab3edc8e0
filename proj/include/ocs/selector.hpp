#pragma once

#include <cstdint>
#include <cstring>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ocs/rng.hpp"

namespace ocs {

using ElemId = std::uint32_t;

// One round of an online selection instance: the support elements and their
// masses. Two-way rounds carry two elements with mass 1/2 each; the masses are
// ignored by two-way selectors.
struct Round {
    std::vector<ElemId> elems;
    std::vector<double> masses;

    static Round pair(ElemId a, ElemId b) { return Round{{a, b}, {0.5, 0.5}}; }
};

using RoundSeq = std::vector<Round>;

// Completed run: selections[t] is the element selected in round t.
struct Trace {
    std::vector<ElemId> selections;

    std::size_t rounds() const { return selections.size(); }

    // True iff e is selected in some round t with lo <= t < hi.
    bool selected_in(ElemId e, std::size_t lo, std::size_t hi) const {
        for (std::size_t t = lo; t < hi && t < selections.size(); ++t)
            if (selections[t] == e) return true;
        return false;
    }

    bool ever_selected(ElemId e) const { return selected_in(e, 0, selections.size()); }
};

// Source of discrete randomness. Selectors draw every random decision through
// choose(), which lets the same stepping code run against a live RNG or be
// exhaustively enumerated.
struct ChoiceSource {
    virtual ~ChoiceSource() = default;
    // probs sum to 1; returns the chosen index.
    virtual std::size_t choose(std::span<const double> probs) = 0;
};

class RngChoice final : public ChoiceSource {
public:
    explicit RngChoice(Rng& rng) : rng_(rng) {}
    std::size_t choose(std::span<const double> probs) override {
        if (probs.size() == 1) return 0;
        return rng_.pick(probs);
    }

private:
    Rng& rng_;
};

// One outcome of a single round from a fixed selector state: the probability
// of this internal branch, the element it selects, and the successor state.
// Branches for the same (state, round) sum to probability 1.
struct Branch {
    double prob;
    ElemId elem;
    std::string state;
};

// Online selector contract. Implementations provide do_step(), which must be
// deterministic given the choices drawn from the ChoiceSource, plus state
// snapshot/restore. step() and enumerate() share do_step(), so the sampling
// law and the enumerated branch distribution agree by construction.
class Selector {
public:
    virtual ~Selector() = default;

    virtual std::unique_ptr<Selector> clone() const = 0;
    virtual void reset() = 0;

    // Byte-exact serialization of the mutable state; equal blobs mean equal
    // states.
    virtual std::string snapshot() const = 0;
    virtual void restore(std::string_view blob) = 0;

    ElemId step(const Round& round, Rng& rng) {
        RngChoice src(rng);
        return do_step(round, src);
    }

    // All internal branches of one round from the current state.
    std::vector<Branch> enumerate(const Round& round) const;

protected:
    virtual ElemId do_step(const Round& round, ChoiceSource& src) = 0;
};

// Runs the selector (after reset) over the whole instance.
Trace run(Selector& sel, const RoundSeq& rounds, Rng& rng);

inline Trace run(Selector& sel, const RoundSeq& rounds, std::uint64_t seed) {
    Rng rng(seed);
    return run(sel, rounds, rng);
}

// ---------------------------------------------------------------------------
// Small serialization helpers shared by selector implementations.
// ---------------------------------------------------------------------------
namespace detail {

template <class T>
void put(std::string& out, const T& v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::string_view& in) {
    T v;
    std::memcpy(&v, in.data(), sizeof(T));
    in.remove_prefix(sizeof(T));
    return v;
}

template <class T>
void put_vec(std::string& out, const std::vector<T>& v) {
    put<std::uint64_t>(out, v.size());
    out.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
}

template <class T>
std::vector<T> get_vec(std::string_view& in) {
    auto n = get<std::uint64_t>(in);
    std::vector<T> v(n);
    std::memcpy(v.data(), in.data(), n * sizeof(T));
    in.remove_prefix(n * sizeof(T));
    return v;
}

} // namespace detail

} // namespace ocs
