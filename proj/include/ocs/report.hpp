#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ocs {

// One verification row. `margin` is bound - observed (negative margins beyond
// the ci fail). Every row carries the seed and config hash for replay.
struct ReportRow {
    std::string id;
    double observed = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    double ci = 0.0;
    bool pass = true;
    std::uint64_t seed = 0;
    std::string config;
    std::string detail; // free-form extras (e.g. trials / mean / optimum)
};

struct Report {
    std::vector<ReportRow> rows;

    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
    // Row where observed must stay at or below bound; slack widens the
    // acceptable overshoot (statistical noise allowance).
    void check_upper(const std::string& id, double observed, double bound, double ci,
                     std::uint64_t seed, const std::string& config, double slack = 0.0);
    // Row where observed must equal target within tol.
    void check_close(const std::string& id, double observed, double target, double tol,
                     std::uint64_t seed, const std::string& config);
};

// FNV-1a hash of the canonical config string, rendered as hex.
std::string config_hash(const std::string& canonical);

void write_csv(std::ostream& os, const Report& report);
void write_json(std::ostream& os, const Report& report);

// MC estimate of a real-valued quantity. Trials derive their stream from
// (seed, trial index); per-worker partial sums combine in worker order, so a
// replay with the same worker count is bit-identical.
struct ValueEstimate {
    double mean = 0.0;
    double ci_halfwidth = 0.0; // 99% normal half-width from the sample stddev
    std::uint64_t trials = 0;
};

ValueEstimate monte_carlo_value(const std::function<double(std::uint64_t trial, std::uint64_t seed)>& f,
                                std::uint64_t trials, std::uint64_t seed, unsigned workers = 0);

} // namespace ocs
