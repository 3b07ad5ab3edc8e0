#include "ocs/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ocs {

double delta_beta(const StepProfile& profile, double w_uv, const DiscreteLpSolution& lp) {
    // Suffix counts give k(w) on each breakpoint interval (w_{j-1}, w_j].
    double first = 0.0, second = 0.0;
    int k = profile.total;
    double prev = 0.0;
    for (const auto& [w_j, count] : profile.events) {
        // On (prev, w_j] the profile counts k events.
        const double lo1 = prev, hi1 = std::min(w_j, w_uv);
        if (hi1 > lo1) first += (hi1 - lo1) * lp.b_at(k);
        const double lo2 = std::max(prev, w_uv), hi2 = w_j;
        if (hi2 > lo2) second += (hi2 - lo2) * lp.a_prefix(k);
        prev = w_j;
        k -= count;
    }
    if (w_uv > prev) first += (w_uv - prev) * lp.b_at(0); // k = 0 beyond all events
    return first - 0.5 * second;
}

namespace {

struct SortedEdge {
    std::uint32_t u;
    double w;
};

std::vector<SortedEdge> sorted_edges(const MatchingInstance::OnlineVertex& v) {
    std::vector<SortedEdge> edges;
    edges.reserve(v.edges.size());
    for (const auto& e : v.edges) edges.push_back({e.u, e.w});
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) { return a.u < b.u; });
    return edges;
}

// Argmax of delta over the neighbors with the implicit weight-0 dummy as the
// fallback: a real vertex wins ties with the dummy, the smallest index wins
// ties among real vertices. Returns -1 for the dummy.
int shortlist(const std::vector<SortedEdge>& edges, const std::vector<StepProfile>& profiles,
              const DiscreteLpSolution& lp) {
    int best = -1;
    double best_delta = 0.0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const double d = delta_beta(profiles[edges[i].u], edges[i].w, lp);
        if (best < 0 ? d >= best_delta : d > best_delta) {
            best = static_cast<int>(i);
            best_delta = d;
        }
    }
    return best;
}

} // namespace

double run_two_choice(const MatchingInstance& inst, const DiscreteLpSolution& lp,
                      const Selector& ocs_proto, Rng& rng) {
    const auto n_off = static_cast<std::uint32_t>(inst.offline.size());
    std::vector<StepProfile> profiles(n_off);
    std::vector<double> best_matched(n_off, 0.0);
    std::unique_ptr<Selector> ocs = ocs_proto.clone();
    ocs->reset();

    for (std::size_t v = 0; v < inst.online.size(); ++v) {
        const auto edges = sorted_edges(inst.online[v]);
        const int i1 = shortlist(edges, profiles, lp);
        if (i1 < 0) continue; // dummy twice: v stays unmatched
        profiles[edges[i1].u].add(edges[i1].w);
        const int i2 = shortlist(edges, profiles, lp);
        if (i2 >= 0) profiles[edges[i2].u].add(edges[i2].w);

        if (i2 == i1) {
            // Deterministic round.
            best_matched[edges[i1].u] = std::max(best_matched[edges[i1].u], edges[i1].w);
            continue;
        }
        // Randomized round; the dummy is a fresh element id per online vertex.
        const ElemId e1 = edges[i1].u;
        const ElemId e2 = i2 >= 0 ? edges[i2].u : n_off + static_cast<ElemId>(v);
        const ElemId pick = ocs->step(Round::pair(e1, e2), rng);
        if (pick < n_off) {
            const double w = pick == e1 ? edges[i1].w : edges[i2].w;
            best_matched[pick] = std::max(best_matched[pick], w);
        }
    }

    double value = 0.0;
    for (double w : best_matched) value += w;
    return value;
}

double run_two_choice_greedy(const MatchingInstance& inst, const DiscreteLpSolution& lp,
                             const Selector& semi_ocs_proto, Rng& rng) {
    if (inst.kind == MatchingInstance::Kind::edge_weighted)
        throw std::invalid_argument("two-choice greedy expects unweighted or vertex-weighted input");
    return run_two_choice(inst, lp, semi_ocs_proto, rng);
}

std::vector<double> balance_masses(std::span<const BalanceNeighbor> neighbors,
                                   const ContinuousLpSolution& lp) {
    std::vector<double> x(neighbors.size(), 0.0);
    if (neighbors.empty()) return x;
    if (neighbors.size() == 1) {
        x[0] = 1.0;
        return x;
    }

    double theta_hi = 0.0;
    for (const auto& nb : neighbors) theta_hi = std::max(theta_hi, nb.weight * lp.b(nb.y));
    if (theta_hi <= 0.0) {
        // All neighbors past the numeric tail of b: level is flat at zero.
        for (double& xi : x) xi = 1.0 / static_cast<double>(neighbors.size());
        return x;
    }

    auto assigned = [&](double theta, std::vector<double>& out) {
        double sum = 0.0;
        for (std::size_t i = 0; i < neighbors.size(); ++i) {
            const double y_theta = lp.b_inverse(theta / neighbors[i].weight);
            out[i] = std::max(0.0, y_theta - neighbors[i].y);
            sum += out[i];
        }
        return sum;
    };

    // sum is continuous and non-increasing in theta: 0 at theta_hi, large as
    // theta -> 0 (until every neighbor saturates the numeric tail).
    double lo = 0.0, hi = theta_hi;
    std::vector<double> buf(neighbors.size());
    if (assigned(lo, buf) < 1.0) {
        // Even theta = 0 cannot place one unit (all neighbors near the tail
        // cap): top up pro rata, a corner that cannot occur at desk scale.
        double sum = 0.0;
        for (double m : buf) sum += m;
        const double deficit = (1.0 - sum) / static_cast<double>(neighbors.size());
        for (std::size_t i = 0; i < neighbors.size(); ++i) x[i] = buf[i] + deficit;
        return x;
    }
    for (int iter = 0;; ++iter) {
        if (iter >= 200) throw std::runtime_error("balance_masses: bisection did not converge");
        const double mid = 0.5 * (lo + hi);
        const double sum = assigned(mid, buf);
        if (std::abs(sum - 1.0) <= 1e-10) {
            x = buf;
            return x;
        }
        (sum > 1.0 ? lo : hi) = mid;
    }
}

double run_balance(const MatchingInstance& inst, const ContinuousLpSolution& lp,
                   const Selector& multiway_proto, Rng& rng) {
    if (inst.kind == MatchingInstance::Kind::edge_weighted)
        throw std::invalid_argument("balance expects unweighted or vertex-weighted input");
    const auto n_off = inst.offline.size();
    std::vector<double> y(n_off, 0.0);
    std::vector<std::uint8_t> hit(n_off, 0);
    std::unique_ptr<Selector> mw = multiway_proto.clone();
    mw->reset();

    for (const auto& ov : inst.online) {
        if (ov.edges.empty()) continue;
        auto edges = sorted_edges(ov);
        std::vector<BalanceNeighbor> neighbors;
        neighbors.reserve(edges.size());
        for (const auto& e : edges)
            neighbors.push_back({e.u, inst.offline[e.u].weight, y[e.u]});
        const std::vector<double> masses = balance_masses(neighbors, lp);

        Round round;
        for (std::size_t i = 0; i < neighbors.size(); ++i) {
            if (masses[i] <= 0.0) continue;
            round.elems.push_back(neighbors[i].u);
            round.masses.push_back(masses[i]);
        }
        const ElemId pick = mw->step(round, rng);
        hit[pick] = 1;
        for (std::size_t i = 0; i < neighbors.size(); ++i) y[neighbors[i].u] += masses[i];
    }

    double value = 0.0;
    for (std::size_t u = 0; u < n_off; ++u)
        if (hit[u]) value += inst.offline[u].weight;
    return value;
}

// ---------------------------------------------------------------------------
// Offline optimum: Hungarian algorithm on the zero-padded square matrix.
// ---------------------------------------------------------------------------

double offline_optimum(const MatchingInstance& inst) {
    const std::size_t n = std::max(inst.offline.size(), inst.online.size());
    if (n == 0) return 0.0;
    // cost[i][j] = -(weight of edge between online i and offline j), 0 when
    // absent; a min-cost perfect matching on the padded square is then the
    // negated maximum-weight matching.
    std::vector<std::vector<double>> cost(n + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t v = 0; v < inst.online.size(); ++v)
        for (const auto& e : inst.online[v].edges)
            cost[v + 1][e.u + 1] = std::min(cost[v + 1][e.u + 1], -e.w);

    const double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), pot(n + 1, 0.0);
    std::vector<std::size_t> way(n + 1, 0), match(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0][j] - u[i0] - pot[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    pot[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    double total = 0.0;
    for (std::size_t j = 1; j <= n; ++j) total += cost[match[j]][j];
    return -total;
}

} // namespace ocs
