#include "ocs/report.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace ocs {

void Report::check_upper(const std::string& id, double observed, double bound, double ci,
                         std::uint64_t seed, const std::string& config, double slack) {
    ReportRow row;
    row.id = id;
    row.observed = observed;
    row.bound = bound;
    row.margin = bound - observed;
    row.ci = ci;
    row.pass = observed <= bound + ci + slack;
    row.seed = seed;
    row.config = config_hash(config);
    rows.push_back(std::move(row));
}

void Report::check_close(const std::string& id, double observed, double target, double tol,
                         std::uint64_t seed, const std::string& config) {
    ReportRow row;
    row.id = id;
    row.observed = observed;
    row.bound = target;
    row.margin = target - observed;
    row.ci = tol;
    row.pass = std::abs(observed - target) <= tol;
    row.seed = seed;
    row.config = config_hash(config);
    rows.push_back(std::move(row));
}

std::string config_hash(const std::string& canonical) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

namespace {

std::string num(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

} // namespace

void write_csv(std::ostream& os, const Report& report) {
    os << "id,observed,bound,margin,ci,pass,seed,config,detail\n";
    for (const auto& r : report.rows) {
        os << r.id << ',' << num(r.observed) << ',' << num(r.bound) << ',' << num(r.margin) << ','
           << num(r.ci) << ',' << (r.pass ? "pass" : "FAIL") << ',' << r.seed << ',' << r.config
           << ',' << r.detail << '\n';
    }
}

void write_json(std::ostream& os, const Report& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"id", r.id},
                        {"observed", r.observed},
                        {"bound", r.bound},
                        {"margin", r.margin},
                        {"ci", r.ci},
                        {"pass", r.pass},
                        {"seed", r.seed},
                        {"config", r.config},
                        {"detail", r.detail}});
    }
    os << nlohmann::json{{"rows", rows}, {"all_pass", report.all_pass()}}.dump(2) << '\n';
}

ValueEstimate monte_carlo_value(const std::function<double(std::uint64_t, std::uint64_t)>& f,
                                std::uint64_t trials, std::uint64_t seed, unsigned workers) {
    if (workers == 0) {
        workers = std::thread::hardware_concurrency();
        if (workers == 0) workers = 1;
    }
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(trials, 1)));

    std::vector<double> sums(workers, 0.0), sq_sums(workers, 0.0);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::uint64_t lo = trials * w / workers;
            const std::uint64_t hi = trials * (w + 1) / workers;
            double s = 0.0, s2 = 0.0;
            for (std::uint64_t i = lo; i < hi; ++i) {
                const double v = f(i, seed);
                s += v;
                s2 += v * v;
            }
            sums[w] = s;
            sq_sums[w] = s2;
        });
    }
    for (auto& th : pool) th.join();

    double sum = 0.0, sq = 0.0;
    for (unsigned w = 0; w < workers; ++w) {
        sum += sums[w];
        sq += sq_sums[w];
    }
    ValueEstimate est;
    est.trials = trials;
    if (trials == 0) return est;
    const double n = static_cast<double>(trials);
    est.mean = sum / n;
    const double var = std::max(0.0, sq / n - est.mean * est.mean);
    est.ci_halfwidth = 2.5758293035489004 * std::sqrt(var / n);
    return est;
}

} // namespace ocs
