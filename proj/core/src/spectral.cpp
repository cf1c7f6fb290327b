#include "finsler/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace finsler {

// Periodic differentiation matrix for even N:
//   D_ab = (1/2) (-1)^(a-b) cot((a - b) h / 2),  D_aa = 0,  h = 2 pi / N.
std::vector<double> spectral_derivative(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("spectral_derivative: N must be even");
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  std::vector<double> cot_table(n, 0.0);
  for (std::size_t d = 1; d < n; ++d) {
    const double sign = d % 2 == 0 ? 1.0 : -1.0;
    cot_table[d] = 0.5 * sign / std::tan(0.5 * h * static_cast<double>(d));
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    double sum = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      sum += cot_table[(a + n - b) % n] * samples[b];
    }
    out[a] = sum;
  }
  return out;
}

}  // namespace finsler
