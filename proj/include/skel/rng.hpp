#pragma once
//
// Self-contained RNG core. The output of every experiment must be a pure
// function of (config, seed), so we avoid std::normal_distribution and
// friends whose sequences are implementation-defined.
//
// Engine: xoshiro256++ seeded through splitmix64. Replication seeds are
// counter-derived (seed, index) -> substream, so path i draws the same
// numbers regardless of thread schedule.

#include <cstdint>
#include <cmath>

namespace skel {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) { reseed(seed); }

    // Substream for replication `index` of a master seed.
    Rng(std::uint64_t master_seed, std::uint64_t index)
        : Rng(derive_seed(master_seed, index)) {}

    static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
        std::uint64_t s = master ^ (0x9E3779B97F4A7C15ULL * (index + 1));
        return splitmix64(s);
    }

    void reseed(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // all-zero state is invalid
        have_spare_ = false;
    }

    std::uint64_t next_u64() {
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

    // Uniform on (0,1): 53-bit mantissa, never returns 0 or 1.
    double uniform() {
        const std::uint64_t u = next_u64() >> 11;        // 53 bits
        double x = (static_cast<double>(u) + 0.5) * 0x1p-53;
        return x;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Standard normal via polar Box-Muller (one spare cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    bool coin() { return (next_u64() >> 63) != 0; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace skel
