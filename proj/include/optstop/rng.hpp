#pragma once

#include <array>
#include <cstdint>

// Counter-based random numbers (Philox 4x32-10).  Every draw is a pure
// function of (seed, path index, substream, counter), so simulations are
// reproducible bit-for-bit no matter how paths are distributed over threads,
// and a path can skip draws (e.g. an unused bridge uniform) without shifting
// any other draw.

namespace optstop {

// One 10-round Philox 4x32 block: 128-bit counter, 64-bit key, 128-bit output.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

// Per-path random streams.  Substreams keep the step-indexed draw families
// (diffusion normals, bridge uniforms, post-switch normals) independent.
class PathRng {
  public:
    PathRng(std::uint64_t seed, std::uint64_t path_index);

    // Standard normal for diffusion step `step` (substream 0).
    double normal(std::uint64_t step) const;

    // Uniform in (0,1) deciding an intra-step barrier crossing (substream 1).
    double bridge_uniform(std::uint64_t step) const;

    // Standard normal for the partial step following a mid-step regime switch
    // (substream 2).
    double post_switch_normal(std::uint64_t step) const;

  private:
    std::array<std::uint32_t, 4> block(std::uint32_t substream, std::uint64_t index) const;
    double normal_from_substream(std::uint32_t substream, std::uint64_t index) const;

    std::array<std::uint32_t, 2> key_;
    std::uint64_t path_;
};

}  // namespace optstop
