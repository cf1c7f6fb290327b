#pragma once

#include <vector>

#include <Eigen/Dense>

namespace finsler {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense n x n x n array, row-major in (i, j, k).
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

  int dimension() const { return n_; }
  double& operator()(int i, int j, int k) { return data_[(i * n_ + j) * n_ + k]; }
  double operator()(int i, int j, int k) const { return data_[(i * n_ + j) * n_ + k]; }

  double norm() const;
  double max_abs() const;

 private:
  int n_ = 0;
  std::vector<double> data_;
};

Tensor3 operator-(const Tensor3& a, const Tensor3& b);
Tensor3 operator*(double s, const Tensor3& a);

// Singular values in decreasing order.
Vector singular_values(const Matrix& a);

// Count of singular values above relative_threshold * sigma_max; zero when
// sigma_max <= absolute_floor.
int numerical_rank(const Vector& singular_values, double relative_threshold,
                   double absolute_floor = 0.0);

// Minimum-norm least-squares solution of a x = b.
Vector least_squares(const Matrix& a, const Vector& b);

}  // namespace finsler
