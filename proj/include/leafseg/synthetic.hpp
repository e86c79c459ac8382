#pragma once

#include <cstdint>
#include <string>

#include "leafseg/core.hpp"

namespace leafseg {

enum class SceneKind { Easy, Occluded, Textured, Veined };

SceneKind scene_kind_from_string(const std::string& s);
std::string to_string(SceneKind kind);

struct SyntheticScene {
    RgbImage image;
    BinaryMask truth; // target leaf only
};

/// Deterministic synthetic leaf scene: a radially-deformed elliptic leaf
/// with midrib and branch veins over soil and grass texture. `Occluded`
/// adds same-hue distractor leaves behind the target, `Textured` adds
/// specular spots plus a protrusion and a shadow notch at the boundary,
/// `Veined` renders a two-tone leaf whose strong midrib and weak boundary
/// segment separate the watershed and graph-cut behaviours.
SyntheticScene generate_synthetic_scene(std::uint64_t seed, SceneKind kind);

/// splitmix64; used instead of <random> distributions so scenes are
/// bit-identical across platforms.
struct Rng {
    std::uint64_t state = 0;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int irange(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

} // namespace leafseg
