#include "optstop/rng.hpp"

#include <cmath>

namespace optstop {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;  // golden ratio
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;  // sqrt(3) - 1

inline void round_once(std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
    std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * c[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * c[2];
    std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// Map 64 bits to a uniform strictly inside (0,1): (n + 1/2) / 2^53.
inline double uniform_open(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline std::uint64_t join(std::uint32_t lo, std::uint32_t hi) {
    return static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> c = counter;
    std::array<std::uint32_t, 2> k = key;
    round_once(c, k);
    for (int i = 1; i < 10; ++i) {
        k[0] += kWeyl0;
        k[1] += kWeyl1;
        round_once(c, k);
    }
    return c;
}

PathRng::PathRng(std::uint64_t seed, std::uint64_t path_index)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      path_(path_index) {}

std::array<std::uint32_t, 4> PathRng::block(std::uint32_t substream, std::uint64_t index) const {
    std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(index),
        static_cast<std::uint32_t>(index >> 32),
        static_cast<std::uint32_t>(path_),
        static_cast<std::uint32_t>(path_ >> 32) ^ (substream << 28),
    };
    return philox4x32(counter, key_);
}

double PathRng::normal_from_substream(std::uint32_t substream, std::uint64_t index) const {
    std::array<std::uint32_t, 4> out = block(substream, index);
    // Box-Muller on two uniforms carved from one 128-bit block.
    double u1 = uniform_open(join(out[0], out[1]));
    double u2 = uniform_open(join(out[2], out[3]));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double PathRng::normal(std::uint64_t step) const { return normal_from_substream(0, step); }

double PathRng::bridge_uniform(std::uint64_t step) const {
    std::array<std::uint32_t, 4> out = block(1, step);
    return uniform_open(join(out[0], out[1]));
}

double PathRng::post_switch_normal(std::uint64_t step) const {
    return normal_from_substream(2, step);
}

}  // namespace optstop
