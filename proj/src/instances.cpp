#include "ocs/instances.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace ocs {

using nlohmann::json;

double MultiWayInstance::total_mass(ElemId e) const {
    double y = 0.0;
    for (const auto& round : rounds)
        for (const auto& [elem, mass] : round)
            if (elem == e) y += mass;
    return y;
}

std::optional<ElemId> index_of(const std::vector<std::string>& elements, const std::string& id) {
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (elements[i] == id) return static_cast<ElemId>(i);
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

std::optional<std::string> check_universe(const std::vector<std::string>& elements) {
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (elements[i].empty()) return "element " + std::to_string(i) + " has empty id";
        for (std::size_t j = i + 1; j < elements.size(); ++j)
            if (elements[i] == elements[j]) return "duplicate element id '" + elements[i] + "'";
    }
    return std::nullopt;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

} // namespace

std::optional<std::string> validate(const TwoWayInstance& inst) {
    if (auto err = check_universe(inst.elements)) return err;
    for (std::size_t t = 0; t < inst.rounds.size(); ++t) {
        const auto& [a, b] = inst.rounds[t];
        if (a >= inst.elements.size() || b >= inst.elements.size())
            return "round " + std::to_string(t) + ": element index out of range";
        if (a == b) return "round " + std::to_string(t) + ": elements must be distinct";
    }
    return std::nullopt;
}

std::optional<std::string> validate(const MultiWayInstance& inst) {
    if (auto err = check_universe(inst.elements)) return err;
    for (std::size_t t = 0; t < inst.rounds.size(); ++t) {
        double sum = 0.0;
        for (const auto& [e, x] : inst.rounds[t]) {
            if (e >= inst.elements.size())
                return "round " + std::to_string(t) + ": element index out of range";
            if (x < 0.0)
                return "round " + std::to_string(t) + ": negative mass " + fmt(x) + " on '" +
                       inst.elements[e] + "'";
            sum += x;
        }
        if (std::abs(sum - 1.0) > kMassSumTolerance)
            return "round " + std::to_string(t) + ": mass sum " + fmt(sum) + " != 1";
    }
    return std::nullopt;
}

std::optional<std::string> validate(const MatchingInstance& inst) {
    for (std::size_t i = 0; i < inst.offline.size(); ++i) {
        if (inst.offline[i].id.empty()) return "offline vertex " + std::to_string(i) + " has empty id";
        if (!(inst.offline[i].weight > 0.0))
            return "offline vertex '" + inst.offline[i].id + "': weight must be positive";
        for (std::size_t j = i + 1; j < inst.offline.size(); ++j)
            if (inst.offline[i].id == inst.offline[j].id)
                return "duplicate offline id '" + inst.offline[i].id + "'";
    }
    for (std::size_t v = 0; v < inst.online.size(); ++v) {
        const auto& ov = inst.online[v];
        if (ov.id.empty()) return "online vertex " + std::to_string(v) + " has empty id";
        for (const auto& e : ov.edges) {
            if (e.u >= inst.offline.size())
                return "online vertex '" + ov.id + "': edge to unknown offline index";
            if (!(e.w > 0.0))
                return "online vertex '" + ov.id + "': edge weight must be positive";
            if (inst.kind == MatchingInstance::Kind::unweighted && e.w != 1.0)
                return "online vertex '" + ov.id + "': unweighted instance requires weight 1";
            if (inst.kind == MatchingInstance::Kind::vertex_weighted &&
                std::abs(e.w - inst.offline[e.u].weight) > 1e-12 * inst.offline[e.u].weight)
                return "online vertex '" + ov.id + "': edge weight differs from vertex weight of '" +
                       inst.offline[e.u].id + "'";
        }
        for (std::size_t i = 0; i < ov.edges.size(); ++i)
            for (std::size_t j = i + 1; j < ov.edges.size(); ++j)
                if (ov.edges[i].u == ov.edges[j].u)
                    return "online vertex '" + ov.id + "': duplicate edge to '" +
                           inst.offline[ov.edges[i].u].id + "'";
    }
    return std::nullopt;
}

RoundSeq rounds_of(const TwoWayInstance& inst) {
    RoundSeq seq;
    seq.reserve(inst.rounds.size());
    for (const auto& [a, b] : inst.rounds) seq.push_back(Round::pair(a, b));
    return seq;
}

RoundSeq rounds_of(const MultiWayInstance& inst) {
    RoundSeq seq;
    seq.reserve(inst.rounds.size());
    for (const auto& round : inst.rounds) {
        Round r;
        for (const auto& [e, x] : round) {
            if (x <= 0.0) continue;
            r.elems.push_back(e);
            r.masses.push_back(x);
        }
        seq.push_back(std::move(r));
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

Tournament gen_tournament(int k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("gen_tournament: k must be >= 1");
    Rng rng(seed);
    const std::uint32_t n = 1u << k;

    Tournament result;
    result.instance.elements.reserve(n);
    for (std::uint32_t i = 1; i <= n; ++i) result.instance.elements.push_back(std::to_string(i));

    // survivors[j] = e^{i-1}_{j+1} for the current stage i.
    std::vector<ElemId> survivors(n);
    for (std::uint32_t j = 0; j < n; ++j) survivors[j] = j;
    for (int stage = 1; stage <= k; ++stage) {
        const std::size_t pairs = survivors.size() / 2;
        std::vector<ElemId> next(pairs);
        for (std::size_t j = 0; j < pairs; ++j) {
            const ElemId a = survivors[2 * j], b = survivors[2 * j + 1];
            result.instance.rounds.push_back({a, b});
            next[j] = (rng.next_u64() & 1u) ? b : a;
        }
        survivors = std::move(next);
    }
    result.winner = survivors[0];
    return result;
}

TwoWayInstance gen_ocs_hardness(int i) {
    if (i < 1) throw std::invalid_argument("gen_ocs_hardness: i must be >= 1");
    TwoWayInstance inst;
    inst.elements = {"0", "1", "2"};
    for (int t = 1; t <= 2 * i + 1; ++t)
        inst.rounds.push_back(t % 2 == 1 ? std::array<ElemId, 2>{0, 1} : std::array<ElemId, 2>{0, 2});
    return inst;
}

MultiWayInstance gen_positive_correlation_counterexample() {
    MultiWayInstance inst;
    for (int e = 1; e <= 9; ++e) inst.elements.push_back(std::to_string(e));
    const double third = 1.0 / 3.0;
    auto uniform_round = [&](ElemId a, ElemId b, ElemId c) {
        inst.rounds.push_back({{a, third}, {b, third}, {c, third}});
    };
    // Element ids are 0-based indices of "1".."9".
    uniform_round(0, 3, 4); // {1,4,5}
    uniform_round(0, 3, 4);
    uniform_round(1, 5, 6); // {2,6,7}
    uniform_round(1, 5, 6);
    uniform_round(2, 7, 8); // {3,8,9}
    uniform_round(2, 7, 8);
    uniform_round(0, 1, 2); // {1,2,3}
    return inst;
}

MatchingInstance gen_upper_triangular(int n) {
    if (n < 1) throw std::invalid_argument("gen_upper_triangular: n must be >= 1");
    MatchingInstance inst;
    inst.kind = MatchingInstance::Kind::unweighted;
    for (int i = 1; i <= n; ++i) inst.offline.push_back({"u" + std::to_string(i), 1.0});
    for (int j = 1; j <= n; ++j) {
        MatchingInstance::OnlineVertex v;
        v.id = "v" + std::to_string(j);
        for (int u = j; u <= n; ++u) v.edges.push_back({static_cast<std::uint32_t>(u - 1), 1.0});
        inst.online.push_back(std::move(v));
    }
    return inst;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

std::string to_json(const TwoWayInstance& inst) {
    json rounds = json::array();
    for (const auto& [a, b] : inst.rounds)
        rounds.push_back(json::array({inst.elements[a], inst.elements[b]}));
    return json{{"type", "two-way"}, {"rounds", rounds}}.dump();
}

std::string to_json(const MultiWayInstance& inst) {
    json rounds = json::array();
    for (const auto& round : inst.rounds) {
        json r = json::object();
        for (const auto& [e, x] : round) r[inst.elements[e]] = x;
        rounds.push_back(r);
    }
    return json{{"type", "multi-way"}, {"rounds", rounds}}.dump();
}

std::string to_json(const MatchingInstance& inst) {
    const char* kind = inst.kind == MatchingInstance::Kind::unweighted      ? "unweighted"
                       : inst.kind == MatchingInstance::Kind::vertex_weighted ? "vertex-weighted"
                                                                              : "edge-weighted";
    json offline = json::array();
    for (const auto& u : inst.offline) offline.push_back({{"id", u.id}, {"weight", u.weight}});
    json online = json::array();
    for (const auto& v : inst.online) {
        json edges = json::array();
        for (const auto& e : v.edges) edges.push_back({{"u", inst.offline[e.u].id}, {"w", e.w}});
        online.push_back({{"id", v.id}, {"edges", edges}});
    }
    return json{{"type", "matching"}, {"kind", kind}, {"offline", offline}, {"online", online}}.dump();
}

namespace {

json parse_typed(const std::string& text, const char* want) {
    json j = json::parse(text);
    if (j.value("type", "") != want)
        throw std::invalid_argument(std::string("expected instance type '") + want + "'");
    return j;
}

ElemId intern(std::vector<std::string>& elements, std::unordered_map<std::string, ElemId>& by_name,
              const std::string& id) {
    auto it = by_name.find(id);
    if (it != by_name.end()) return it->second;
    ElemId idx = static_cast<ElemId>(elements.size());
    elements.push_back(id);
    by_name.emplace(id, idx);
    return idx;
}

} // namespace

TwoWayInstance two_way_from_json(const std::string& text) {
    json j = parse_typed(text, "two-way");
    TwoWayInstance inst;
    std::unordered_map<std::string, ElemId> by_name;
    for (const auto& round : j.at("rounds")) {
        if (!round.is_array() || round.size() != 2)
            throw std::invalid_argument("two-way round must be a pair");
        ElemId a = intern(inst.elements, by_name, round[0].get<std::string>());
        ElemId b = intern(inst.elements, by_name, round[1].get<std::string>());
        inst.rounds.push_back({a, b});
    }
    if (auto err = validate(inst)) throw std::invalid_argument(*err);
    return inst;
}

MultiWayInstance multi_way_from_json(const std::string& text) {
    json j = parse_typed(text, "multi-way");
    MultiWayInstance inst;
    std::unordered_map<std::string, ElemId> by_name;
    for (const auto& round : j.at("rounds")) {
        std::vector<std::pair<ElemId, double>> r;
        // json objects iterate in sorted key order, so parsing is deterministic.
        for (auto it = round.begin(); it != round.end(); ++it)
            r.emplace_back(intern(inst.elements, by_name, it.key()), it.value().get<double>());
        inst.rounds.push_back(std::move(r));
    }
    if (auto err = validate(inst)) throw std::invalid_argument(*err);
    return inst;
}

MatchingInstance matching_from_json(const std::string& text) {
    json j = parse_typed(text, "matching");
    MatchingInstance inst;
    const std::string kind = j.value("kind", "unweighted");
    if (kind == "unweighted")
        inst.kind = MatchingInstance::Kind::unweighted;
    else if (kind == "vertex-weighted")
        inst.kind = MatchingInstance::Kind::vertex_weighted;
    else if (kind == "edge-weighted")
        inst.kind = MatchingInstance::Kind::edge_weighted;
    else
        throw std::invalid_argument("unknown matching kind '" + kind + "'");

    std::unordered_map<std::string, std::uint32_t> offline_index;
    for (const auto& u : j.at("offline")) {
        MatchingInstance::OfflineVertex ov{u.at("id").get<std::string>(), u.value("weight", 1.0)};
        offline_index.emplace(ov.id, static_cast<std::uint32_t>(inst.offline.size()));
        inst.offline.push_back(std::move(ov));
    }
    for (const auto& v : j.at("online")) {
        MatchingInstance::OnlineVertex ov;
        ov.id = v.at("id").get<std::string>();
        for (const auto& e : v.at("edges")) {
            auto it = offline_index.find(e.at("u").get<std::string>());
            if (it == offline_index.end())
                throw std::invalid_argument("edge references unknown offline vertex");
            ov.edges.push_back({it->second, e.value("w", 1.0)});
        }
        inst.online.push_back(std::move(ov));
    }
    if (auto err = validate(inst)) throw std::invalid_argument(*err);
    return inst;
}

std::string json_instance_type(const std::string& text) {
    return json::parse(text).value("type", "");
}

} // namespace ocs
