#include "finsler/jet.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "finsler/errors.hpp"

namespace finsler {
namespace {

constexpr int kMaxLayoutVariables = 8;

std::uint64_t encode(std::span<const int> exponents) {
  std::uint64_t key = 0;
  for (int e : exponents) key = key * (kMaxJetOrder + 1) + static_cast<std::uint64_t>(e);
  return key;
}

// Appends every exponent vector of total degree `remaining` over the
// variables [var, v), first exponent descending.
void enumerate_degree(int var, int remaining, std::vector<int>& current,
                      std::vector<std::vector<int>>& out) {
  const int v = static_cast<int>(current.size());
  if (var == v - 1) {
    current[var] = remaining;
    out.push_back(current);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[var] = e;
    enumerate_degree(var + 1, remaining - e, current, out);
  }
  current[var] = 0;
}

void require_compatible(const Jet& a, const Jet& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("jet: empty operand");
  if (&a.layout() != &b.layout()) throw std::invalid_argument("jet: layout mismatch");
}

// sum_k t[k] h^k with h = a - a.value(), evaluated by Horner's rule.
Jet compose(const Jet& a, const std::vector<double>& taylor) {
  Jet h = a;
  h -= a.value();
  const int order = a.order();
  Jet result = Jet::constant(a.layout(), order, taylor[order]);
  for (int k = order - 1; k >= 0; --k) {
    result = result * h;
    result += taylor[k];
  }
  return result;
}

}  // namespace

JetLayout::JetLayout(int variables) : variables_(variables) {
  std::vector<std::vector<int>> monomials;
  std::vector<int> current(variables, 0);
  prefix_.resize(kMaxJetOrder + 1);
  for (int d = 0; d <= kMaxJetOrder; ++d) {
    enumerate_degree(0, d, current, monomials);
    prefix_[d] = monomials.size();
  }

  const std::size_t count = monomials.size();
  exponents_.resize(count * variables);
  degree_.resize(count);
  std::unordered_map<std::uint64_t, std::uint32_t> lookup;
  lookup.reserve(count * 2);
  for (std::size_t i = 0; i < count; ++i) {
    int deg = 0;
    for (int v = 0; v < variables; ++v) {
      exponents_[i * variables + v] = static_cast<std::uint8_t>(monomials[i][v]);
      deg += monomials[i][v];
    }
    degree_[i] = deg;
    lookup.emplace(encode(monomials[i]), static_cast<std::uint32_t>(i));
  }

  std::vector<int> sum(variables);
  product_offset_.resize(count);
  for (std::size_t a = 0; a < count; ++a) {
    product_offset_[a] = product_.size();
    const std::size_t nb = prefix_[kMaxJetOrder - degree_[a]];
    for (std::size_t b = 0; b < nb; ++b) {
      for (int v = 0; v < variables; ++v) sum[v] = monomials[a][v] + monomials[b][v];
      product_.push_back(lookup.at(encode(sum)));
    }
  }

  raise_.assign(count * variables, 0);
  for (std::size_t a = 0; a < prefix_[kMaxJetOrder - 1]; ++a) {
    for (int v = 0; v < variables; ++v) {
      sum = monomials[a];
      ++sum[v];
      raise_[a * variables + v] = lookup.at(encode(sum));
    }
  }
}

const JetLayout& JetLayout::get(int variables) {
  static std::array<std::once_flag, kMaxLayoutVariables + 1> once;
  static std::array<std::unique_ptr<JetLayout>, kMaxLayoutVariables + 1> layouts;
  if (variables < 1 || variables > kMaxLayoutVariables) {
    throw std::invalid_argument("jet layout: variable count must be in [1, 8], got " +
                                std::to_string(variables));
  }
  std::call_once(once[variables],
                 [variables] { layouts[variables].reset(new JetLayout(variables)); });
  return *layouts[variables];
}

std::size_t JetLayout::index_of(std::span<const int> exponents) const {
  if (static_cast<int>(exponents.size()) != variables_) {
    throw std::invalid_argument("jet layout: exponent vector has wrong length");
  }
  int deg = 0;
  for (int e : exponents) {
    if (e < 0) throw std::invalid_argument("jet layout: negative exponent");
    deg += e;
  }
  if (deg > kMaxJetOrder) throw UnsupportedOrder("jet layout: degree exceeds kMaxJetOrder");
  // Walk the graded enumeration: offset within degree block by counting
  // predecessors in descending-first-exponent order.
  std::size_t index = deg == 0 ? 0 : prefix_[deg - 1];
  int remaining = deg;
  for (int v = 0; v + 1 < variables_; ++v) {
    const int tail_vars = variables_ - v - 1;
    // Vectors sharing the prefix but with a larger exponent at v come first.
    for (int e = remaining; e > exponents[v]; --e) {
      // Count compositions of (remaining - e) into tail_vars parts.
      const int r = remaining - e;
      std::size_t c = 1;
      for (int k = 1; k < tail_vars; ++k) c = c * static_cast<std::size_t>(r + k) / k;
      index += c;
    }
    remaining -= exponents[v];
  }
  return index;
}

Jet::Jet(const JetLayout& layout, int order)
    : layout_(&layout), order_(order), coeffs_(layout.size(order), 0.0) {}

Jet Jet::constant(const JetLayout& layout, int order, double value) {
  if (order < 0 || order > kMaxJetOrder) {
    throw UnsupportedOrder("jet order " + std::to_string(order) + " outside [0, " +
                           std::to_string(kMaxJetOrder) + "]");
  }
  Jet j(layout, order);
  j.coeffs_[0] = value;
  return j;
}

Jet Jet::variable(const JetLayout& layout, int order, int var, double value) {
  Jet j = constant(layout, order, value);
  if (var < 0 || var >= layout.variables()) throw std::invalid_argument("jet: bad variable");
  if (order >= 1) j.coeffs_[layout.raise(0, var)] = 1.0;
  return j;
}

double Jet::partial_exponents(std::span<const int> exponents) const {
  const std::size_t idx = layout_->index_of(exponents);
  if (layout_->degree(idx) > order_) {
    throw UnsupportedOrder("jet: partial of order " + std::to_string(layout_->degree(idx)) +
                           " requested from a jet of order " + std::to_string(order_));
  }
  double factorial = 1.0;
  for (int e : exponents) {
    for (int k = 2; k <= e; ++k) factorial *= k;
  }
  return coeffs_[idx] * factorial;
}

double Jet::partial(std::span<const int> multi_index) const {
  std::vector<int> exponents(layout_->variables(), 0);
  for (int v : multi_index) {
    if (v < 0 || v >= layout_->variables()) throw std::invalid_argument("jet: bad variable");
    ++exponents[v];
  }
  return partial_exponents(exponents);
}

Jet Jet::derivative(int var) const {
  if (order_ == 0) throw UnsupportedOrder("jet: cannot differentiate an order-0 jet");
  Jet r(*layout_, order_ - 1);
  const std::size_t n = r.coeffs_.size();
  for (std::size_t a = 0; a < n; ++a) {
    const double mult = layout_->exponents(a)[var] + 1.0;
    r.coeffs_[a] = mult * coeffs_[layout_->raise(a, var)];
  }
  return r;
}

Jet Jet::truncated(int order) const {
  if (order > order_) throw UnsupportedOrder("jet: cannot raise truncation order");
  Jet r = *this;
  r.order_ = order;
  r.coeffs_.resize(layout_->size(order));
  return r;
}

Jet Jet::times_variable(int var, double value) const {
  Jet r = *this;
  r *= value;
  if (order_ == 0) return r;
  const std::size_t n = layout_->size(order_ - 1);
  for (std::size_t a = 0; a < n; ++a) r.coeffs_[layout_->raise(a, var)] += coeffs_[a];
  return r;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (double& c : r.coeffs_) c = -c;
  return r;
}

Jet& Jet::operator+=(const Jet& other) {
  require_compatible(*this, other);
  if (other.order_ < order_) *this = truncated(other.order_);
  for (std::size_t a = 0; a < coeffs_.size(); ++a) coeffs_[a] += other.coeffs_[a];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  require_compatible(*this, other);
  if (other.order_ < order_) *this = truncated(other.order_);
  for (std::size_t a = 0; a < coeffs_.size(); ++a) coeffs_[a] -= other.coeffs_[a];
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  require_compatible(a, b);
  const JetLayout& layout = a.layout();
  const int order = std::min(a.order_, b.order_);
  Jet r(layout, order);
  const std::size_t na = layout.size(order);
  double* out = r.coeffs_.data();
  const double* bc = b.coeffs_.data();
  for (std::size_t ia = 0; ia < na; ++ia) {
    const double ca = a.coeffs_[ia];
    if (ca == 0.0) continue;
    const std::size_t nb = layout.size(order - layout.degree(ia));
    const std::uint32_t* target = layout.products(ia);
    for (std::size_t ib = 0; ib < nb; ++ib) out[target[ib]] += ca * bc[ib];
  }
  return r;
}

Jet& Jet::operator*=(const Jet& other) { return *this = *this * other; }
Jet& Jet::operator/=(const Jet& other) { return *this = *this * reciprocal(other); }

Jet& Jet::operator+=(double s) {
  coeffs_[0] += s;
  return *this;
}
Jet& Jet::operator-=(double s) {
  coeffs_[0] -= s;
  return *this;
}
Jet& Jet::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}
Jet& Jet::operator/=(double s) {
  for (double& c : coeffs_) c /= s;
  return *this;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator+(Jet a, double s) { return a += s; }
Jet operator+(double s, Jet a) { return a += s; }
Jet operator-(Jet a, double s) { return a -= s; }
Jet operator-(double s, const Jet& a) {
  Jet r = -a;
  return r += s;
}
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }
Jet operator/(Jet a, double s) { return a /= s; }
Jet operator/(double s, const Jet& a) { return reciprocal(a) *= s; }

Jet reciprocal(const Jet& a) {
  const double a0 = a.value();
  if (a0 == 0.0) throw DomainError("jet: reciprocal of a jet with zero value");
  std::vector<double> taylor(a.order() + 1);
  taylor[0] = 1.0 / a0;
  for (int k = 1; k <= a.order(); ++k) taylor[k] = -taylor[k - 1] / a0;
  return compose(a, taylor);
}

Jet sqrt(const Jet& a) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw DomainError("jet: sqrt of a non-positive value");
  std::vector<double> taylor(a.order() + 1);
  taylor[0] = std::sqrt(a0);
  for (int k = 1; k <= a.order(); ++k) taylor[k] = taylor[k - 1] * (1.5 - k) / (k * a0);
  return compose(a, taylor);
}

Jet pow(const Jet& a, double p) {
  if (p >= 0.0 && p == std::floor(p) && p <= 64.0) {
    Jet result = Jet::constant(a.layout(), a.order(), 1.0);
    Jet base = a;
    for (auto e = static_cast<unsigned>(p); e != 0; e >>= 1) {
      if (e & 1U) result = result * base;
      if (e > 1) base = base * base;
    }
    return result;
  }
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw DomainError("jet: non-integer power of a non-positive value");
  std::vector<double> taylor(a.order() + 1);
  taylor[0] = std::pow(a0, p);
  for (int k = 1; k <= a.order(); ++k) taylor[k] = taylor[k - 1] * (p - k + 1) / (k * a0);
  return compose(a, taylor);
}

}  // namespace finsler
