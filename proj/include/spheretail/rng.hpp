// Deterministic seeded RNG for the Monte Carlo oracles.
// xoshiro256++ seeded through splitmix64: identical streams on every
// platform, and derived per-task seeds keep parallel sweeps reproducible.

#pragma once

#include <cmath>
#include <cstdint>

namespace spheretail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    // Derive an independent stream, e.g. per instance or per restart.
    Rng derive(std::uint64_t stream_id) const {
        std::uint64_t sm = s_[0] ^ (0x6a09e667f3bcc909ULL + stream_id);
        Rng out;
        for (auto& word : out.s_) word = splitmix64(sm);
        return out;
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) {
            return (x << k) | (x >> (64 - k));
        };
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1).
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + uniform() * (b - a); }

    // Standard normal via Box-Muller; both values of each pair are used.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t s_[4] = {1, 2, 3, 4};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace spheretail
