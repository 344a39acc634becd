#pragma once

#include <cmath>
#include <cstdint>

namespace farima {

/// splitmix64 mixer, used to spread seeds and derive per-worker streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/**
 * @brief xoshiro256++ generator with Gaussian sampling.
 *
 * Seedable, platform-independent and cheap to fork: derive_stream(i) gives an
 * independent generator for worker/replication i of the same master seed, so
 * parallel and serial runs produce identical draws.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64(sm);
        have_spare_ = false;
    }

    /// Counter-based substream: independent generator for index i.
    [[nodiscard]] Rng derive_stream(std::uint64_t i) const {
        std::uint64_t mix = state_[0] ^ (0xA0761D6478BD642FULL * (i + 1));
        return Rng(mix);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on (0,1].
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform on [-1,1).
    double uniform_sym() {
        return static_cast<double>(static_cast<std::int64_t>(next_u64() >> 10)) * 0x1.0p-53 - 1.0;
    }

    /// Standard normal draw (Marsaglia polar method; second draw cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = uniform_sym();
            v = uniform_sym();
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace farima
