#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace finsler {

// Highest total derivative order a jet can carry. Curvature needs order 5 of
// F^2; every round of algebra generation consumes one more.
inline constexpr int kMaxJetOrder = 10;

// Graded enumeration of the monomials z^a in `variables()` unknowns with
// |a| <= kMaxJetOrder. Monomials of degree <= k form a prefix of the
// enumeration, so truncating a jet to order k is a resize.
//
// One immutable layout exists per variable count; it is created on first use
// and shared by all threads afterwards.
class JetLayout {
 public:
  static const JetLayout& get(int variables);

  int variables() const { return variables_; }
  int max_order() const { return kMaxJetOrder; }

  // Number of monomials with total degree <= order.
  std::size_t size(int order) const { return prefix_[order]; }

  int degree(std::size_t index) const { return degree_[index]; }
  std::span<const std::uint8_t> exponents(std::size_t index) const {
    return {exponents_.data() + index * variables_, static_cast<std::size_t>(variables_)};
  }

  // Index of the monomial with the given exponent vector.
  std::size_t index_of(std::span<const int> exponents) const;

  // For monomial a, the indices of a + b for b = 0 .. size(max - |a|) - 1.
  const std::uint32_t* products(std::size_t index) const {
    return product_.data() + product_offset_[index];
  }

  // Index of a + e_var; valid when degree(index) < max_order().
  std::uint32_t raise(std::size_t index, int var) const {
    return raise_[index * variables_ + var];
  }

  JetLayout(const JetLayout&) = delete;
  JetLayout& operator=(const JetLayout&) = delete;

 private:
  explicit JetLayout(int variables);

  int variables_;
  std::vector<std::size_t> prefix_;
  std::vector<std::uint8_t> exponents_;
  std::vector<int> degree_;
  std::vector<std::size_t> product_offset_;
  std::vector<std::uint32_t> product_;
  std::vector<std::uint32_t> raise_;
};

// Truncated multivariate Taylor polynomial about a point.
//
// Stores Taylor coefficients c_a = (d^a f)(p) / a!, so products are plain
// truncated convolutions. A jet of order k is exact for all partials of total
// order <= k; binary operations truncate to the smaller order of the operands.
class Jet {
 public:
  Jet() = default;

  static Jet constant(const JetLayout& layout, int order, double value);
  // The coordinate function z_var seeded at `value`.
  static Jet variable(const JetLayout& layout, int order, int var, double value);

  bool empty() const { return layout_ == nullptr; }
  const JetLayout& layout() const { return *layout_; }
  int order() const { return order_; }
  int variables() const { return layout_->variables(); }

  double value() const { return coeffs_[0]; }
  std::span<const double> coefficients() const { return coeffs_; }
  double coefficient(std::size_t index) const { return coeffs_[index]; }

  // Partial derivative named by a list of variable indices, e.g. {2, 2, 3}
  // for d^3/dz2 dz2 dz3. Order of the list is irrelevant.
  double partial(std::span<const int> multi_index) const;
  // Partial derivative given as an exponent vector.
  double partial_exponents(std::span<const int> exponents) const;

  // d/dz_var; the result has order - 1. Throws UnsupportedOrder at order 0.
  Jet derivative(int var) const;
  Jet truncated(int order) const;

  // (value + z_var) * this, without a full convolution.
  Jet times_variable(int var, double value) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(const Jet& other);
  Jet& operator/=(const Jet& other);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);
  Jet& operator/=(double s);

  friend Jet operator*(const Jet& a, const Jet& b);

 private:
  Jet(const JetLayout& layout, int order);

  const JetLayout* layout_ = nullptr;
  int order_ = 0;
  std::vector<double> coeffs_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, double s);
Jet operator+(double s, Jet a);
Jet operator-(Jet a, double s);
Jet operator-(double s, const Jet& a);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);
Jet operator/(Jet a, double s);
Jet operator/(double s, const Jet& a);

Jet reciprocal(const Jet& a);
Jet sqrt(const Jet& a);
// a^p for real p; requires a.value() > 0 unless p is a non-negative integer.
Jet pow(const Jet& a, double p);

}  // namespace finsler
