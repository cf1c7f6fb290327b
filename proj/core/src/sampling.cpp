#include "finsler/sampling.hpp"

#include <cmath>
#include <random>

namespace finsler {
namespace {

Point random_unit(int dimension, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Point v(dimension);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& c : v) {
      c = normal(rng);
      norm += c * c;
    }
  } while (norm < 1e-20);
  norm = std::sqrt(norm);
  for (double& c : v) c /= norm;
  return v;
}

}  // namespace

std::vector<TangentSample> sample_tangents(int dimension, int count, std::uint64_t seed,
                                           double x_radius) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> magnitude(0.5, 2.0);
  std::vector<TangentSample> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    TangentSample sample;
    sample.x = random_unit(dimension, rng);
    const double r = x_radius * std::pow(unit(rng), 1.0 / dimension);
    for (double& c : sample.x) c *= r;
    sample.y = random_unit(dimension, rng);
    const double m = magnitude(rng);
    for (double& c : sample.y) c *= m;
    out.push_back(std::move(sample));
  }
  return out;
}

std::vector<Point> sample_directions(int dimension, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) out.push_back(random_unit(dimension, rng));
  return out;
}

}  // namespace finsler
