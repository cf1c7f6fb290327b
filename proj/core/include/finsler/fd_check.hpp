#pragma once

#include <span>

#include "finsler/scalar_function.hpp"

namespace finsler {

// Base step of the central-difference oracle, per total derivative order,
// near eps^(1 / (4 + order)).
double fd_step(int total_order);

// Central-difference estimate of the partial named by `multi_index` (variable
// indices over the 2n coordinates, order <= 4), with one Richardson level.
double fd_partial(const ScalarFunction& f, std::span<const double> x,
                  std::span<const double> y, std::span<const int> multi_index);

// |jet partial - fd partial| / (1 + |jet partial|). Throws DomainError when the
// stencil would leave the chart or come within 10 steps of y = 0.
double fd_check(const ScalarFunction& f, std::span<const double> x, std::span<const double> y,
                std::span<const int> multi_index);

}  // namespace finsler
