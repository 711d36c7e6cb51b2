#pragma once

#include <cmath>
#include <cstdint>

namespace ambiup {

// Deterministic PRNG shared by every randomized component.  splitmix64 core:
// the output sequence depends only on the seed, never on platform or library
// version, which is what makes corpora and training traces reproducible
// bit-for-bit.  Child streams are derived by hashing (seed, stream) so that
// parallel consumers stay decorrelated without sharing state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Independent child stream; used to give each scene/source/layer its own
    // generator regardless of evaluation order.
    static Rng child(std::uint64_t seed, std::uint64_t stream) {
        Rng mixer(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
        mixer.next_u64();
        return Rng(mixer.next_u64());
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi] inclusive.  Modulo bias is below 2^-32 for
    // the small ranges used here.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    // Standard normal via Box-Muller; the second deviate of each pair is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ambiup
