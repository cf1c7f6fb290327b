#pragma once

#include <span>
#include <vector>

namespace finsler {

// d/dtheta of a periodic function sampled at theta_a = 2 pi a / N (N even),
// by Fourier collocation.
std::vector<double> spectral_derivative(std::span<const double> samples);

}  // namespace finsler
