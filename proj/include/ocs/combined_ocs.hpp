#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ocs/automata.hpp"
#include "ocs/selector.hpp"

namespace ocs {

// One forest-OCS round: element labels, the sigma* state after the round, and
// the selected element.
struct ForestRound {
    std::array<ElemId, 2> elems;
    std::array<Label, 2> labels;
    StarState state;
    ElemId selected;
};

// Applies one forest-OCS round. Roots (parent == nullptr) label the smaller
// element id heads and transition from the origin state; other rounds inherit
// the in-arc element's label from the parent and transition from the parent's
// state.
ForestRound forest_ocs_round(const std::array<ElemId, 2>& elems, const ForestRound* parent,
                             ElemId inherited, double beta, ChoiceSource& src);

// gamma-OCS probability bound prod_i 2^{-k_i} (1-gamma)^{k_i-1} for a union of
// consecutive subsequences with lengths `pattern`.
double subsequence_bound(std::span<const int> pattern, double gamma);

// Decomposes a subset of an element's appearance positions (sorted indices
// into its appearance list) into maximal consecutive runs.
std::vector<int> run_lengths(std::span<const std::size_t> positions);

struct OcsParams {
    double p = default_fc_p();
    double beta = default_star_beta();
};

// ---------------------------------------------------------------------------
// Combined 0.167-OCS: ex-ante graph ingestion, online
// pseudo-path maintenance, sigma+/sigma- forest constructor, sigma* forest
// OCS, composed round by round.
// ---------------------------------------------------------------------------
class CombinedOcs final : public Selector {
public:
    using Params = OcsParams;

    struct Arc {
        std::uint32_t origin, dest;
        ElemId subscript;
        std::uint32_t path = 0;
        std::int8_t sign = 0; // +1 positive end, -1 negative end
        bool matched = false;
    };

    struct Node {
        std::array<ElemId, 2> elems;
        std::array<std::int32_t, 2> out_arc{-1, -1}; // aligned with elems
        std::array<std::int32_t, 2> in_arc{-1, -1};  // up to two, creation order
        std::int32_t parent = -1;                    // forest parent round, -1 = root
        ElemId inherited = 0;                        // subscript of the matched in-arc
        ForestRound ocs;
    };

    // Geometric arc order along a pseudo-path is reverse(left) ++ right; the
    // earliest arc is right[0], appends to `right` are the positive end.
    struct Path {
        std::vector<std::uint32_t> left, right;
        FcState q_pos, q_neg;
    };

    explicit CombinedOcs(Params params = {}) : params_(params) {}

    std::unique_ptr<Selector> clone() const override { return std::make_unique<CombinedOcs>(*this); }
    void reset() override;
    std::string snapshot() const override;
    void restore(std::string_view blob) override;

    const Params& params() const { return params_; }
    double alpha() const { return forest_alpha(params_.p); }
    double gamma() const { return alpha() * params_.beta; }

    const std::vector<Arc>& arcs() const { return arcs_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Path>& paths() const { return paths_; }

    // Per-round trace record (arcs, path ends, decisions, labels, state,
    // selection) as JSON lines, for run inspection.
    std::string debug_jsonl() const;

protected:
    ElemId do_step(const Round& round, ChoiceSource& src) override;

private:
    std::uint32_t new_arc(std::uint32_t origin, std::uint32_t dest, ElemId subscript);
    std::uint32_t new_path(ChoiceSource& src);
    void append_arc(std::uint32_t arc_id, std::uint32_t path_id, bool positive, ChoiceSource& src);

    Params params_;
    std::vector<std::int32_t> last_round_; // by element id, -1 = unseen
    std::vector<Arc> arcs_;
    std::vector<Node> nodes_;
    std::vector<Path> paths_;
};

// Checks the structural invariants of a finished run: the pseudo-paths
// partition the arcs and respect the adjacency rule, and the matched arcs form
// a good forest. Returns the first violation, or nullopt.
std::optional<std::string> validate_run_structure(const CombinedOcs& ocs);

} // namespace ocs
