#pragma once

#include <cstdint>
#include <vector>

#include "finsler/scalar_function.hpp"

namespace finsler {

// All stochastic sampling draws base points inside this radius so stencils
// and integration steps stay well inside the unit ball.
inline constexpr double kSampleRadius = 0.7;
inline constexpr std::uint64_t kDefaultSeed = 20100101;

struct TangentSample {
  Point x;
  Point y;
};

// `count` points (x, y): x uniform in the ball of radius `x_radius`, y with a
// uniform random direction and |y| uniform in [0.5, 2]. Deterministic in
// (dimension, count, seed, x_radius).
std::vector<TangentSample> sample_tangents(int dimension, int count, std::uint64_t seed,
                                           double x_radius = kSampleRadius);

// `count` unit vectors with uniform random direction.
std::vector<Point> sample_directions(int dimension, int count, std::uint64_t seed);

}  // namespace finsler
