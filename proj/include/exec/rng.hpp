#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace optexec {

// Counter-based generator so that any draw is a pure function of
// (seed, path, lane, index) and paths can run in parallel with bitwise
// reproducible output. The construction, exactly:
//
//   mix(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
//           z *= 0x94D049BB133111EB; z ^= z >> 31            (SplitMix64 finalizer)
//   path_key(seed, p) = mix(seed + (p + 1) * 0x9E3779B97F4A7C15)
//   u64(seed, p, lane, k) = mix(path_key + (lane * 2^42 + k + 1) * 0x9E3779B97F4A7C15)
//   u01 = ((u64 >> 11) + 1) * 2^-53                          in (0, 1]
//
// Normal pairs come from Box-Muller on two consecutive lane draws (2k, 2k+1):
//   r = sqrt(-2 ln u1); (n1, n2) = r * (cos(2 pi u2), sin(2 pi u2)).
//
// Lane 0 carries the simulation increments, lane 1 policy randomization.
namespace rng {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace rng

class PathRng {
public:
    PathRng(uint64_t seed, uint64_t path_index)
        : key_(rng::mix(seed + (path_index + 1) * rng::kGolden)) {}

    uint64_t bits(uint64_t lane, uint64_t index) const {
        return rng::mix(key_ + ((lane << 42) + index + 1) * rng::kGolden);
    }

    double u01(uint64_t lane, uint64_t index) const {
        return static_cast<double>((bits(lane, index) >> 11) + 1) * 0x1.0p-53;
    }

    // Independent standard normal pair, slot k of the lane.
    std::pair<double, double> normal_pair(uint64_t lane, uint64_t k) const {
        const double u1 = u01(lane, 2 * k);
        const double u2 = u01(lane, 2 * k + 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * M_PI * u2;
        return {r * std::cos(th), r * std::sin(th)};
    }

private:
    uint64_t key_;
};

// FNV-1a over the raw bit patterns of a double stream; used to assert that
// figure-style comparisons really share one noise panel.
class NoiseChecksum {
public:
    void add(double x) {
        uint64_t bits;
        static_assert(sizeof(bits) == sizeof(x));
        __builtin_memcpy(&bits, &x, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h_ ^= (bits >> (8 * i)) & 0xFFu;
            h_ *= 0x100000001B3ull;
        }
    }
    uint64_t value() const { return h_; }

private:
    uint64_t h_ = 0xCBF29CE484222325ull;
};

}  // namespace optexec
