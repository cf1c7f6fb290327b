#pragma once

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "finsler/spray.hpp"

namespace finsler {

// Deepest field the jet order cap allows: curvature uses order 5 of F^2 and
// each covariant derivative or bracket one more.
inline constexpr int kCurvatureOrder = 5;
inline constexpr int kMaxFieldDepth = kMaxJetOrder - kCurvatureOrder;

// A vertical vector field xi^i(x, y) d/dy^i on the slit tangent bundle, held
// as an immutable expression tree over curvature fields R(X, Y), horizontal
// Berwald covariant derivatives and vertical brackets. Copies share nodes.
class VerticalField {
 public:
  enum class Kind { curvature, covariant_derivative, bracket };

  // R(X, Y) for constant coordinate vectors X, Y.
  static VerticalField curvature(std::vector<double> X, std::vector<double> Y);

  Kind kind() const;
  // 0 for curvature fields; each derivative or bracket adds one.
  int depth() const;
  // Provenance, e.g. "nabla_1([R(e1,e2), nabla_2(R(e1,e2))])".
  std::string describe() const;

  const std::vector<double>& X() const;
  const std::vector<double>& Y() const;
  int direction() const;
  // Operand(s) of a derivative or bracket node.
  VerticalField left() const;
  VerticalField right() const;

  const void* identity() const { return node_.get(); }

 private:
  struct Node;
  explicit VerticalField(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  friend VerticalField covariant_derivative(const VerticalField& xi, int k);
  friend VerticalField vertical_bracket(const VerticalField& xi, const VerticalField& eta);
  friend class FieldEvaluator;

  std::shared_ptr<const Node> node_;
};

// (nabla_k xi)^i = d xi^i/dx^k - G^m_k d xi^i/dy^m + G^i_km xi^m.
// Throws UnsupportedOrder when the result would exceed kMaxFieldDepth.
VerticalField covariant_derivative(const VerticalField& xi, int k);

// [xi, eta]^i = xi^j d eta^i/dy^j - eta^j d xi^i/dy^j.
VerticalField vertical_bracket(const VerticalField& xi, const VerticalField& eta);

// Evaluates fields at one point (x, y). Builds the spray jets once, with
// enough order for fields up to `depth_budget`, and memoises the component
// jets of every node it touches. Not thread-safe; use one per thread.
class FieldEvaluator {
 public:
  FieldEvaluator(const MetricSpec& spec, std::span<const double> x, std::span<const double> y,
                 int depth_budget, int output_order = 0);

  const SprayJets& spray() const { return spray_; }
  int depth_budget() const { return depth_budget_; }

  // Component jets of the field, of order depth_budget + output_order - depth.
  // Throws UnsupportedOrder if the field is deeper than the budget.
  const std::vector<Jet>& jets(const VerticalField& field);
  Vector values(const VerticalField& field);

  // dF/dy^i at the point.
  Vector F_y() const;
  // |F_y . xi| / (1 + |F_y| |xi|): zero for fields tangent to the indicatrix.
  double tangency_defect(const VerticalField& field);

 private:
  struct Entry {
    std::shared_ptr<const void> keepalive;
    std::vector<Jet> components;
  };

  SprayJets spray_;
  int depth_budget_;
  int output_order_;
  std::unordered_map<const void*, Entry> cache_;
};

}  // namespace finsler
