#include "finsler/fd_check.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "finsler/errors.hpp"

namespace finsler {
namespace {

struct Stencil {
  std::array<int, 5> offsets;
  std::array<double, 5> weights;
  int size;
};

// Second-order accurate central stencils for d^m/dz^m, offsets in units of h.
const Stencil& stencil(int m) {
  static const std::array<Stencil, 5> table = {{
      {{0}, {1.0}, 1},
      {{-1, 1}, {-0.5, 0.5}, 2},
      {{-1, 0, 1}, {1.0, -2.0, 1.0}, 3},
      {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}, 4},
      {{-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}, 5},
  }};
  return table[m];
}

double central_difference(const ScalarFunction& f, std::span<const double> x,
                          std::span<const double> y, const std::vector<int>& exponents,
                          double h) {
  const int n = static_cast<int>(x.size());
  std::vector<double> z(2 * n);
  for (int i = 0; i < n; ++i) {
    z[i] = x[i];
    z[n + i] = y[i];
  }
  std::vector<int> active;
  int total = 0;
  for (int v = 0; v < 2 * n; ++v) {
    if (exponents[v] > 0) active.push_back(v);
    total += exponents[v];
  }

  // Tensor product of 1-D stencils over the active variables.
  std::vector<int> cursor(active.size(), 0);
  double sum = 0.0;
  while (true) {
    double weight = 1.0;
    std::vector<double> shifted = z;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const Stencil& s = stencil(exponents[active[a]]);
      weight *= s.weights[cursor[a]];
      shifted[active[a]] += s.offsets[cursor[a]] * h;
    }
    sum += weight * f.evaluate(std::span<const double>(shifted.data(), n),
                               std::span<const double>(shifted.data() + n, n));

    std::size_t a = 0;
    for (; a < active.size(); ++a) {
      if (++cursor[a] < stencil(exponents[active[a]]).size) break;
      cursor[a] = 0;
    }
    if (a == active.size()) break;
  }
  return sum / std::pow(h, total);
}

std::vector<int> exponents_of(int variables, std::span<const int> multi_index) {
  std::vector<int> exponents(variables, 0);
  for (int v : multi_index) {
    if (v < 0 || v >= variables) throw std::invalid_argument("fd_check: bad variable index");
    ++exponents[v];
  }
  return exponents;
}

}  // namespace

double fd_step(int total_order) {
  // One Richardson level leaves O(h^4) truncation against eps / h^k roundoff.
  switch (total_order) {
    case 0:
    case 1: return 1e-3;
    case 2: return 2.5e-3;
    case 3: return 5e-3;
    default: return 3e-2;
  }
}

double fd_partial(const ScalarFunction& f, std::span<const double> x,
                  std::span<const double> y, std::span<const int> multi_index) {
  const int n = f.dimension();
  if (multi_index.size() > 4) throw UnsupportedOrder("fd_check: order above 4");
  const std::vector<int> exponents = exponents_of(2 * n, multi_index);
  const int order = static_cast<int>(multi_index.size());
  const double h = fd_step(order);

  const Domain domain = f.domain();
  const double reach = 10.0 * h;
  if (domain.margin(x) < reach) throw DomainError("fd_check: insufficient domain margin");
  double ynorm = 0.0;
  for (double v : y) ynorm += v * v;
  if (std::sqrt(ynorm) < reach) throw DomainError("fd_check: stencil reaches y = 0");

  if (order == 0) return f.evaluate(x, y);
  const double d0 = central_difference(f, x, y, exponents, h);
  const double d1 = central_difference(f, x, y, exponents, 0.5 * h);
  const double r1 = (4.0 * d1 - d0) / 3.0;
  if (order < 4) return r1;
  // Fourth differences: a second level lets h grow past the roundoff floor.
  const double d2 = central_difference(f, x, y, exponents, 0.25 * h);
  const double r2 = (4.0 * d2 - d1) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

double fd_check(const ScalarFunction& f, std::span<const double> x, std::span<const double> y,
                std::span<const int> multi_index) {
  const double reference = fd_partial(f, x, y, multi_index);
  const Jet jet = jet_eval(f, x, y, static_cast<int>(multi_index.size()));
  const double exact = jet.partial(multi_index);
  return std::abs(exact - reference) / (1.0 + std::abs(exact));
}

}  // namespace finsler
