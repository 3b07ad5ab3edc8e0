#include "ocs/combined_ocs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ocs {

ForestRound forest_ocs_round(const std::array<ElemId, 2>& elems, const ForestRound* parent,
                             ElemId inherited, double beta, ChoiceSource& src) {
    ForestRound out;
    out.elems = elems;
    StarState prev;
    if (parent == nullptr) {
        // Root convention: smaller element id gets heads.
        out.labels[0] = elems[0] < elems[1] ? Label::heads : Label::tails;
        out.labels[1] = out.labels[0] == Label::heads ? Label::tails : Label::heads;
        prev = StarState::origin;
    } else {
        std::size_t pslot = parent->elems[0] == inherited ? 0 : 1;
        if (parent->elems[pslot] != inherited)
            throw std::logic_error("inherited element missing from parent round");
        std::size_t slot = elems[0] == inherited ? 0 : 1;
        out.labels[slot] = parent->labels[pslot];
        out.labels[1 - slot] = out.labels[slot] == Label::heads ? Label::tails : Label::heads;
        prev = parent->state;
    }

    auto branches = sigma_star(prev, beta);
    std::vector<double> probs;
    probs.reserve(branches.size());
    for (const auto& b : branches) probs.push_back(b.prob);
    const auto& pick = branches[src.choose(probs)];
    out.state = pick.next;
    out.selected = out.labels[0] == pick.pick ? elems[0] : elems[1];
    return out;
}

double subsequence_bound(std::span<const int> pattern, double gamma) {
    double bound = 1.0;
    for (int k : pattern) {
        if (k < 1) throw std::invalid_argument("subsequence_bound: lengths must be >= 1");
        bound *= std::pow(0.5, k) * std::pow(1.0 - gamma, k - 1);
    }
    return bound;
}

std::vector<int> run_lengths(std::span<const std::size_t> positions) {
    std::vector<int> runs;
    for (std::size_t i = 0; i < positions.size();) {
        std::size_t j = i + 1;
        while (j < positions.size() && positions[j] == positions[j - 1] + 1) ++j;
        runs.push_back(static_cast<int>(j - i));
        i = j;
    }
    return runs;
}

// ---------------------------------------------------------------------------
// CombinedOcs
// ---------------------------------------------------------------------------

void CombinedOcs::reset() {
    last_round_.clear();
    arcs_.clear();
    nodes_.clear();
    paths_.clear();
}

std::uint32_t CombinedOcs::new_arc(std::uint32_t origin, std::uint32_t dest, ElemId subscript) {
    const auto id = static_cast<std::uint32_t>(arcs_.size());
    arcs_.push_back(Arc{origin, dest, subscript});
    Node& from = nodes_[origin];
    from.out_arc[from.elems[0] == subscript ? 0 : 1] = static_cast<std::int32_t>(id);
    return id;
}

std::uint32_t CombinedOcs::new_path(ChoiceSource& src) {
    const auto pi = fc_stationary(params_.p);
    const auto q0 = static_cast<FcState>(src.choose(pi));
    const auto id = static_cast<std::uint32_t>(paths_.size());
    paths_.push_back(Path{{}, {}, q0, q0});
    return id;
}

void CombinedOcs::append_arc(std::uint32_t arc_id, std::uint32_t path_id, bool positive,
                             ChoiceSource& src) {
    Path& path = paths_[path_id];
    Arc& arc = arcs_[arc_id];
    arc.path = path_id;
    arc.sign = positive ? 1 : -1;
    auto branches = positive ? sigma_plus(path.q_pos, params_.p) : sigma_minus(path.q_neg, params_.p);
    std::vector<double> probs;
    probs.reserve(branches.size());
    for (const auto& b : branches) probs.push_back(b.prob);
    const auto& pick = branches[src.choose(probs)];
    (positive ? path.q_pos : path.q_neg) = pick.next;
    arc.matched = pick.matched;
    (positive ? path.right : path.left).push_back(arc_id);
}

ElemId CombinedOcs::do_step(const Round& round, ChoiceSource& src) {
    if (round.elems.size() != 2 || round.elems[0] == round.elems[1])
        throw std::invalid_argument("combined OCS needs two distinct elements per round");
    const auto t = static_cast<std::uint32_t>(nodes_.size());
    Node node;
    node.elems = {round.elems[0], round.elems[1]};

    const ElemId max_elem = std::max(node.elems[0], node.elems[1]);
    if (max_elem >= last_round_.size()) last_round_.resize(max_elem + 1, -1);

    nodes_.push_back(node); // placeholder; new_arc registers out-arcs on origins
    std::array<std::int32_t, 2> in_arc{-1, -1};
    for (int i = 0; i < 2; ++i) {
        const ElemId e = node.elems[i];
        if (last_round_[e] >= 0)
            in_arc[i] = static_cast<std::int32_t>(
                new_arc(static_cast<std::uint32_t>(last_round_[e]), t, e));
    }
    nodes_[t].in_arc = in_arc;

    // --- pseudo-path attachment + forest-constructor decisions ---
    const bool parallel = in_arc[0] >= 0 && in_arc[1] >= 0 &&
                          arcs_[in_arc[0]].origin == arcs_[in_arc[1]].origin;
    if (parallel) {
        // Two parallel arcs form a pseudo-path of their own; lower subscript
        // is the earliest arc.
        const int first = node.elems[0] < node.elems[1] ? 0 : 1;
        const std::uint32_t path_id = new_path(src);
        append_arc(in_arc[first], path_id, true, src);
        append_arc(in_arc[1 - first], path_id, true, src);
    } else {
        // An in-arc (p,t)_e extends an existing pseudo-path iff round p also
        // contains the other element of round t; the neighbor is then p's
        // out-arc with that subscript.
        int extender = -1;
        std::int32_t neighbor = -1;
        for (int i = 0; i < 2; ++i) {
            if (in_arc[i] < 0) continue;
            const ElemId sibling_elem = node.elems[1 - i];
            const Node& origin = nodes_[arcs_[in_arc[i]].origin];
            if (origin.elems[0] != sibling_elem && origin.elems[1] != sibling_elem) continue;
            const std::int32_t o = origin.out_arc[origin.elems[0] == sibling_elem ? 0 : 1];
            if (o < 0 || arcs_[o].dest == t) continue; // sibling itself: parallel case
            if (extender >= 0) throw std::logic_error("two in-arcs both extend pseudo-paths");
            extender = i;
            neighbor = o;
        }
        if (extender >= 0) {
            const std::uint32_t path_id = arcs_[neighbor].path;
            const Path& path = paths_[path_id];
            const std::uint32_t back = path.right.back();
            const std::uint32_t front = path.left.empty() ? path.right.front() : path.left.back();
            bool positive;
            if (static_cast<std::uint32_t>(neighbor) == back) positive = true;
            else if (static_cast<std::uint32_t>(neighbor) == front) positive = false;
            else throw std::logic_error("pseudo-path merge required; arrival invariant violated");
            append_arc(in_arc[extender], path_id, positive, src);
            if (in_arc[1 - extender] >= 0) append_arc(in_arc[1 - extender], path_id, positive, src);
        } else if (in_arc[0] >= 0 || in_arc[1] >= 0) {
            const std::uint32_t path_id = new_path(src);
            if (in_arc[0] >= 0 && in_arc[1] >= 0) {
                const int first = node.elems[0] < node.elems[1] ? 0 : 1;
                append_arc(in_arc[first], path_id, true, src);
                append_arc(in_arc[1 - first], path_id, true, src);
            } else {
                append_arc(in_arc[0] >= 0 ? in_arc[0] : in_arc[1], path_id, true, src);
            }
        }
    }

    // --- forest in-arc of this round ---
    std::int32_t parent = -1;
    ElemId inherited = 0;
    for (int i = 0; i < 2; ++i) {
        if (in_arc[i] < 0 || !arcs_[in_arc[i]].matched) continue;
        if (parent >= 0) throw std::logic_error("two matched in-arcs; pseudo-matching violated");
        parent = static_cast<std::int32_t>(arcs_[in_arc[i]].origin);
        inherited = arcs_[in_arc[i]].subscript;
    }
    nodes_[t].parent = parent;
    nodes_[t].inherited = inherited;

    // --- forest OCS selection ---
    nodes_[t].ocs = forest_ocs_round(node.elems, parent >= 0 ? &nodes_[parent].ocs : nullptr,
                                     inherited, params_.beta, src);

    last_round_[node.elems[0]] = static_cast<std::int32_t>(t);
    last_round_[node.elems[1]] = static_cast<std::int32_t>(t);
    return nodes_[t].ocs.selected;
}

// ---------------------------------------------------------------------------
// Snapshot / restore
// ---------------------------------------------------------------------------

namespace {

// Field-wise serialization; raw struct dumps would leak padding bytes and
// break snapshot byte-equality.
void put_arc(std::string& out, const CombinedOcs::Arc& a) {
    detail::put(out, a.origin);
    detail::put(out, a.dest);
    detail::put(out, a.subscript);
    detail::put(out, a.path);
    detail::put(out, a.sign);
    detail::put<std::uint8_t>(out, a.matched ? 1 : 0);
}

CombinedOcs::Arc get_arc(std::string_view& in) {
    CombinedOcs::Arc a;
    a.origin = detail::get<std::uint32_t>(in);
    a.dest = detail::get<std::uint32_t>(in);
    a.subscript = detail::get<ElemId>(in);
    a.path = detail::get<std::uint32_t>(in);
    a.sign = detail::get<std::int8_t>(in);
    a.matched = detail::get<std::uint8_t>(in) != 0;
    return a;
}

void put_node(std::string& out, const CombinedOcs::Node& n) {
    for (int i = 0; i < 2; ++i) detail::put(out, n.elems[i]);
    for (int i = 0; i < 2; ++i) detail::put(out, n.out_arc[i]);
    for (int i = 0; i < 2; ++i) detail::put(out, n.in_arc[i]);
    detail::put(out, n.parent);
    detail::put(out, n.inherited);
    for (int i = 0; i < 2; ++i) detail::put(out, n.ocs.labels[i]);
    detail::put(out, n.ocs.state);
    detail::put(out, n.ocs.selected);
}

CombinedOcs::Node get_node(std::string_view& in) {
    CombinedOcs::Node n;
    for (int i = 0; i < 2; ++i) n.elems[i] = detail::get<ElemId>(in);
    for (int i = 0; i < 2; ++i) n.out_arc[i] = detail::get<std::int32_t>(in);
    for (int i = 0; i < 2; ++i) n.in_arc[i] = detail::get<std::int32_t>(in);
    n.parent = detail::get<std::int32_t>(in);
    n.inherited = detail::get<ElemId>(in);
    n.ocs.elems = n.elems;
    for (int i = 0; i < 2; ++i) n.ocs.labels[i] = detail::get<Label>(in);
    n.ocs.state = detail::get<StarState>(in);
    n.ocs.selected = detail::get<ElemId>(in);
    return n;
}

} // namespace

std::string CombinedOcs::snapshot() const {
    std::string out;
    detail::put_vec(out, last_round_);
    detail::put<std::uint64_t>(out, arcs_.size());
    for (const Arc& a : arcs_) put_arc(out, a);
    detail::put<std::uint64_t>(out, nodes_.size());
    for (const Node& n : nodes_) put_node(out, n);
    detail::put<std::uint64_t>(out, paths_.size());
    for (const Path& p : paths_) {
        detail::put_vec(out, p.left);
        detail::put_vec(out, p.right);
        detail::put(out, p.q_pos);
        detail::put(out, p.q_neg);
    }
    return out;
}

void CombinedOcs::restore(std::string_view blob) {
    last_round_ = detail::get_vec<std::int32_t>(blob);
    arcs_.clear();
    for (std::uint64_t i = 0, n = detail::get<std::uint64_t>(blob); i < n; ++i)
        arcs_.push_back(get_arc(blob));
    nodes_.clear();
    for (std::uint64_t i = 0, n = detail::get<std::uint64_t>(blob); i < n; ++i)
        nodes_.push_back(get_node(blob));
    paths_.clear();
    for (std::uint64_t i = 0, n = detail::get<std::uint64_t>(blob); i < n; ++i) {
        Path p;
        p.left = detail::get_vec<std::uint32_t>(blob);
        p.right = detail::get_vec<std::uint32_t>(blob);
        p.q_pos = detail::get<FcState>(blob);
        p.q_neg = detail::get<FcState>(blob);
        paths_.push_back(std::move(p));
    }
}

std::string CombinedOcs::debug_jsonl() const {
    using nlohmann::json;
    std::ostringstream os;
    for (std::size_t t = 0; t < nodes_.size(); ++t) {
        const Node& n = nodes_[t];
        json arcs = json::array();
        for (std::int32_t a : n.in_arc) {
            if (a < 0) continue;
            const Arc& arc = arcs_[a];
            arcs.push_back({{"from", arc.origin},
                            {"to", arc.dest},
                            {"subscript", arc.subscript},
                            {"path", arc.path},
                            {"end", arc.sign > 0 ? "+" : "-"},
                            {"decision", arc.matched ? "M" : "U"}});
        }
        json labels = json::object();
        for (int i = 0; i < 2; ++i)
            labels[std::to_string(n.elems[i])] = n.ocs.labels[i] == Label::heads ? "H" : "T";
        json row{{"round", t},
                 {"elems", {n.elems[0], n.elems[1]}},
                 {"arcs", arcs},
                 {"root", n.parent < 0},
                 {"labels", labels},
                 {"state", static_cast<int>(n.ocs.state)},
                 {"selected", n.ocs.selected}};
        if (n.parent >= 0) {
            row["parent"] = n.parent;
            row["inherited"] = n.inherited;
        }
        os << row.dump() << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Structural validation
// ---------------------------------------------------------------------------

namespace {

bool rounds_share_element(const CombinedOcs::Node& a, const CombinedOcs::Node& b,
                          const CombinedOcs::Node& c) {
    for (ElemId e : a.elems)
        for (ElemId f : b.elems)
            for (ElemId g : c.elems)
                if (e == f && f == g) return true;
    return false;
}

bool arcs_adjacent(const CombinedOcs::Arc& x, const CombinedOcs::Arc& y,
                   const std::vector<CombinedOcs::Node>& nodes) {
    if (x.dest == y.dest) return true;
    if (x.origin == y.origin &&
        rounds_share_element(nodes[x.origin], nodes[x.dest], nodes[y.dest]))
        return true;
    return false;
}

} // namespace

std::optional<std::string> validate_run_structure(const CombinedOcs& ocs) {
    const auto& arcs = ocs.arcs();
    const auto& nodes = ocs.nodes();
    const auto& paths = ocs.paths();

    // Partition: every arc on exactly one path, once.
    std::vector<int> seen(arcs.size(), 0);
    for (const auto& p : paths) {
        for (std::uint32_t a : p.left) seen[a]++;
        for (std::uint32_t a : p.right) seen[a]++;
    }
    for (std::size_t a = 0; a < arcs.size(); ++a)
        if (seen[a] != 1)
            return "arc " + std::to_string(a) + " appears " + std::to_string(seen[a]) +
                   " times across pseudo-paths";

    for (std::size_t pi = 0; pi < paths.size(); ++pi) {
        std::vector<std::uint32_t> geo(paths[pi].left.rbegin(), paths[pi].left.rend());
        geo.insert(geo.end(), paths[pi].right.begin(), paths[pi].right.end());
        for (std::size_t i = 0; i + 1 < geo.size(); ++i) {
            const auto& x = arcs[geo[i]];
            const auto& y = arcs[geo[i + 1]];
            if (!arcs_adjacent(x, y, nodes))
                return "path " + std::to_string(pi) + ": arcs " + std::to_string(geo[i]) + "," +
                       std::to_string(geo[i + 1]) + " not adjacent";
            if (x.subscript == y.subscript)
                return "path " + std::to_string(pi) + ": adjacent arcs share subscript";
            if (x.matched && y.matched)
                return "path " + std::to_string(pi) + ": adjacent arcs both matched";
        }
    }

    // Good forest: at most one matched in-arc per node, and children of a
    // common parent share no element with the parent round.
    for (std::size_t t = 0; t < nodes.size(); ++t) {
        int matched_in = 0;
        for (std::int32_t a : nodes[t].in_arc)
            if (a >= 0 && arcs[a].matched) ++matched_in;
        if (matched_in > 1) return "round " + std::to_string(t) + " has two forest in-arcs";

        const std::int32_t oa = nodes[t].out_arc[0], ob = nodes[t].out_arc[1];
        if (oa >= 0 && ob >= 0 && arcs[oa].matched && arcs[ob].matched) {
            if (rounds_share_element(nodes[t], nodes[arcs[oa].dest], nodes[arcs[ob].dest]))
                return "round " + std::to_string(t) +
                       ": forest children share a common element with the parent";
        }
    }
    return std::nullopt;
}

} // namespace ocs
