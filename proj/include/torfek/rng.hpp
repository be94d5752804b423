#pragma once
#include <cmath>
#include <cstdint>

namespace torfek {

// Deterministic, platform-independent random streams. std:: distributions are
// implementation-defined, which would break byte-identical reruns.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    // Independent child stream; associative merges stay worker-count independent.
    RandomStream derive(std::uint64_t index) const {
        std::uint64_t s = state_[0] ^ (0x9e3779b97f4a7c15ULL * (index + 1));
        return RandomStream(splitmix64(s));
    }

    std::uint64_t next_u64() {
        // xoshiro256**
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on (0,1)
    double uniform() {
        return ((next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

    double gaussian() {
        // Box-Muller, one value per call (cache dropped for reproducibility)
        double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // logistic(0, 1/2): density 2 sigma(2x)(1-sigma(2x)), CDF sigma(2x)
    double logistic() {
        double u = uniform();
        return 0.5 * std::log(u / (1.0 - u));
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

}  // namespace torfek
