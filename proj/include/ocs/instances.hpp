#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ocs/selector.hpp"

namespace ocs {

// Instances name elements by opaque string ids; selectors work on the dense
// indices into `elements`. Instances are immutable after construction and safe
// to share across threads.

struct TwoWayInstance {
    std::vector<std::string> elements;
    std::vector<std::array<ElemId, 2>> rounds;

    std::size_t size() const { return rounds.size(); }
};

struct MultiWayInstance {
    std::vector<std::string> elements;
    // Per round, the positive-mass entries only; the round's element set is
    // the support of the mass vector.
    std::vector<std::vector<std::pair<ElemId, double>>> rounds;

    std::size_t size() const { return rounds.size(); }
    // Total mass of element e over all rounds.
    double total_mass(ElemId e) const;
};

struct MatchingInstance {
    enum class Kind { unweighted, vertex_weighted, edge_weighted };

    struct OfflineVertex {
        std::string id;
        double weight = 1.0;
    };
    struct Edge {
        std::uint32_t u; // offline index
        double w;
    };
    struct OnlineVertex {
        std::string id;
        std::vector<Edge> edges;
    };

    Kind kind = Kind::unweighted;
    std::vector<OfflineVertex> offline;
    std::vector<OnlineVertex> online; // in arrival order
};

// First violated invariant as human-readable text, or nullopt when valid.
std::optional<std::string> validate(const TwoWayInstance& inst);
std::optional<std::string> validate(const MultiWayInstance& inst);
std::optional<std::string> validate(const MatchingInstance& inst);

inline constexpr double kMassSumTolerance = 1e-9;

// Lowered round sequences for selector consumption.
RoundSeq rounds_of(const TwoWayInstance& inst);
RoundSeq rounds_of(const MultiWayInstance& inst);

std::optional<ElemId> index_of(const std::vector<std::string>& elements, const std::string& id);

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

struct Tournament {
    TwoWayInstance instance;
    ElemId winner; // appears in exactly k rounds
};

// Knockout-tournament instance over 2^k elements: stage i (1-based) pairs the
// stage winners of stage i-1; winners advance uniformly at random. Stages are
// emitted in ascending i, ties in ascending j.
Tournament gen_tournament(int k, std::uint64_t seed);

// Three elements {0,1,2}, T = 2i+1 rounds; odd rounds {0,1}, even rounds {0,2}.
TwoWayInstance gen_ocs_hardness(int i);

// The fixed 7-round, 9-element instance exhibiting positive correlation under
// unweighted 3-way sampling without replacement.
MultiWayInstance gen_positive_correlation_counterexample();

// Unweighted upper-triangular instance: online v_j neighbors u_j..u_n.
MatchingInstance gen_upper_triangular(int n);

// ---------------------------------------------------------------------------
// JSON wire formats
// ---------------------------------------------------------------------------
//   {"type":"two-way","rounds":[["a","b"],["a","c"]]}
//   {"type":"multi-way","rounds":[{"a":0.5,"b":0.5}]}
//   {"type":"matching","kind":"edge-weighted",
//    "offline":[{"id":"u1","weight":1.0}],
//    "online":[{"id":"v1","edges":[{"u":"u1","w":2.0}]}]}

std::string to_json(const TwoWayInstance& inst);
std::string to_json(const MultiWayInstance& inst);
std::string to_json(const MatchingInstance& inst);

TwoWayInstance two_way_from_json(const std::string& text);
MultiWayInstance multi_way_from_json(const std::string& text);
MatchingInstance matching_from_json(const std::string& text);

// Type tag of a serialized instance ("two-way" | "multi-way" | "matching").
std::string json_instance_type(const std::string& text);

} // namespace ocs
