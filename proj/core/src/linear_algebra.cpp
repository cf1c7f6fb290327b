#include "finsler/linear_algebra.hpp"

#include <algorithm>
#include <cmath>

namespace finsler {

double Tensor3::norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Tensor3 operator-(const Tensor3& a, const Tensor3& b) {
  const int n = a.dimension();
  Tensor3 r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) r(i, j, k) = a(i, j, k) - b(i, j, k);
  return r;
}

Tensor3 operator*(double s, const Tensor3& a) {
  const int n = a.dimension();
  Tensor3 r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) r(i, j, k) = s * a(i, j, k);
  return r;
}

Vector singular_values(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return Vector();
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues();
}

int numerical_rank(const Vector& singular_values, double relative_threshold,
                   double absolute_floor) {
  if (singular_values.size() == 0) return 0;
  const double top = singular_values.maxCoeff();
  if (!(top > absolute_floor)) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values[i] > relative_threshold * top) ++rank;
  }
  return rank;
}

Vector least_squares(const Matrix& a, const Vector& b) {
  return a.completeOrthogonalDecomposition().solve(b);
}

}  // namespace finsler
