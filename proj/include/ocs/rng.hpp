#pragma once

#include <cstdint>
#include <span>

namespace ocs {

// Counter-based splittable random stream. Each (seed, stream) pair yields an
// independent sequence, so Monte Carlo trials can derive their own stream from
// (master seed, trial index) and run in any order or in parallel.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        state_ = mix(mix(seed) ^ mix(stream ^ 0x9e3779b97f4a7c15ull));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Index i with probability proportional to probs[i]; probs sum to 1.
    std::size_t pick(std::span<const double> probs) {
        double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        // Roundoff overshoot must not land on a zero-probability branch.
        std::size_t last = probs.size() - 1;
        while (last > 0 && probs[last] <= 0.0) --last;
        return last;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30; z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27; z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

} // namespace ocs
