#pragma once

#include <cstdint>
#include <cmath>

namespace parax {

/// Counter-keyed xoshiro256++ stream: the state is derived from
/// (seed, realization, stream) through splitmix64, so any screen of any
/// realization is reproducible in isolation and independent of worker
/// scheduling.
class KeyedRng {
  public:
    KeyedRng(uint64_t seed, uint64_t realization, uint64_t stream) {
        uint64_t x = seed;
        x ^= 0x9e3779b97f4a7c15ull * (realization + 1);
        x ^= 0xbf58476d1ce4e5b9ull * (stream + 1);
        for (auto& si : s_)
            si = splitmix64(x);
        // avoid the all-zero state, however unlikely
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0)
            s_[0] = 1;
    }

    uint64_t next() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in (0, 1).
    double uniform() {
        return (next() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    /// Standard normal via Box-Muller; draws come in fixed pairs so the
    /// consumption pattern is deterministic.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double rad = std::sqrt(-2.0 * std::log(u1));
        double ang = 2.0 * M_PI * u2;
        spare_ = rad * std::sin(ang);
        have_spare_ = true;
        return rad * std::cos(ang);
    }

  private:
    static uint64_t rotl(uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace parax
