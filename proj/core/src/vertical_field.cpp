#include "finsler/vertical_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "finsler/errors.hpp"

namespace finsler {

struct VerticalField::Node {
  Kind kind = Kind::curvature;
  int depth = 0;
  std::vector<double> X, Y;
  int direction = -1;
  std::shared_ptr<const Node> left, right;
};

namespace {

std::string vector_name(const std::vector<double>& v) {
  int hot = -1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 1.0 && hot < 0) hot = static_cast<int>(i);
    else if (v[i] != 0.0) hot = -2;
  }
  if (hot >= 0) return "e" + std::to_string(hot + 1);
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  out << ')';
  return out.str();
}

}  // namespace

VerticalField VerticalField::curvature(std::vector<double> X, std::vector<double> Y) {
  if (X.size() != Y.size() || X.empty()) {
    throw std::invalid_argument("curvature field: X and Y must have equal, nonzero size");
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::curvature;
  node->X = std::move(X);
  node->Y = std::move(Y);
  return VerticalField(std::move(node));
}

VerticalField::Kind VerticalField::kind() const { return node_->kind; }
int VerticalField::depth() const { return node_->depth; }
const std::vector<double>& VerticalField::X() const { return node_->X; }
const std::vector<double>& VerticalField::Y() const { return node_->Y; }
int VerticalField::direction() const { return node_->direction; }
VerticalField VerticalField::left() const {
  if (!node_->left) throw std::logic_error("curvature field has no operands");
  return VerticalField(node_->left);
}
VerticalField VerticalField::right() const {
  if (!node_->right) throw std::logic_error("field has no right operand");
  return VerticalField(node_->right);
}

std::string VerticalField::describe() const {
  switch (node_->kind) {
    case Kind::curvature:
      return "R(" + vector_name(node_->X) + "," + vector_name(node_->Y) + ")";
    case Kind::covariant_derivative:
      return "nabla_" + std::to_string(node_->direction + 1) + "(" +
             VerticalField(node_->left).describe() + ")";
    case Kind::bracket:
      return "[" + VerticalField(node_->left).describe() + ", " +
             VerticalField(node_->right).describe() + "]";
  }
  return {};
}

VerticalField covariant_derivative(const VerticalField& xi, int k) {
  if (k < 0) throw std::invalid_argument("covariant_derivative: negative direction");
  if (xi.depth() + 1 > kMaxFieldDepth) {
    throw UnsupportedOrder("covariant_derivative: field depth would exceed " +
                           std::to_string(kMaxFieldDepth));
  }
  auto node = std::make_shared<VerticalField::Node>();
  node->kind = VerticalField::Kind::covariant_derivative;
  node->depth = xi.depth() + 1;
  node->direction = k;
  node->left = xi.node_;
  return VerticalField(std::move(node));
}

VerticalField vertical_bracket(const VerticalField& xi, const VerticalField& eta) {
  const int depth = 1 + std::max(xi.depth(), eta.depth());
  if (depth > kMaxFieldDepth) {
    throw UnsupportedOrder("vertical_bracket: field depth would exceed " +
                           std::to_string(kMaxFieldDepth));
  }
  auto node = std::make_shared<VerticalField::Node>();
  node->kind = VerticalField::Kind::bracket;
  node->depth = depth;
  node->left = xi.node_;
  node->right = eta.node_;
  return VerticalField(std::move(node));
}

FieldEvaluator::FieldEvaluator(const MetricSpec& spec, std::span<const double> x,
                               std::span<const double> y, int depth_budget, int output_order)
    : spray_(spec, x, y, kCurvatureOrder + depth_budget + output_order),
      depth_budget_(depth_budget),
      output_order_(output_order) {}

const std::vector<Jet>& FieldEvaluator::jets(const VerticalField& field) {
  auto found = cache_.find(field.identity());
  if (found != cache_.end()) return found->second.components;
  if (field.depth() > depth_budget_) {
    throw UnsupportedOrder("field of depth " + std::to_string(field.depth()) +
                           " exceeds the evaluator budget " + std::to_string(depth_budget_));
  }

  const int n = spray_.dimension();
  const auto& node = *field.node_;
  std::vector<Jet> out(n);
  switch (node.kind) {
    case VerticalField::Kind::curvature: {
      if (static_cast<int>(node.X.size()) != n) {
        throw std::invalid_argument("curvature field dimension does not match the metric");
      }
      for (int i = 0; i < n; ++i) {
        Jet sum;
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            const double w = node.X[j] * node.Y[k];
            if (w == 0.0) continue;
            if (sum.empty()) sum = w * spray_.R(i, j, k);
            else sum += w * spray_.R(i, j, k);
          }
        out[i] = sum.empty() ? 0.0 * spray_.R(i, 0, 0) : std::move(sum);
      }
      break;
    }
    case VerticalField::Kind::covariant_derivative: {
      const std::vector<Jet> xi = jets(VerticalField(node.left));
      const int k = node.direction;
      if (k >= n) throw std::invalid_argument("covariant_derivative: direction out of range");
      for (int i = 0; i < n; ++i) {
        Jet r = xi[i].derivative(x_var(k));
        for (int m = 0; m < n; ++m) {
          r -= spray_.Gj(m, k) * xi[i].derivative(y_var(n, m));
          r += spray_.Gjk(i, k, m) * xi[m];
        }
        out[i] = std::move(r);
      }
      break;
    }
    case VerticalField::Kind::bracket: {
      const std::vector<Jet> a = jets(VerticalField(node.left));
      const std::vector<Jet> b = jets(VerticalField(node.right));
      for (int i = 0; i < n; ++i) {
        Jet r = a[0] * b[i].derivative(y_var(n, 0)) - b[0] * a[i].derivative(y_var(n, 0));
        for (int j = 1; j < n; ++j) {
          r += a[j] * b[i].derivative(y_var(n, j));
          r -= b[j] * a[i].derivative(y_var(n, j));
        }
        out[i] = std::move(r);
      }
      break;
    }
  }
  auto [it, inserted] = cache_.emplace(field.identity(), Entry{field.node_, std::move(out)});
  return it->second.components;
}

Vector FieldEvaluator::values(const VerticalField& field) {
  const std::vector<Jet>& c = jets(field);
  Vector v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v[static_cast<Eigen::Index>(i)] = c[i].value();
  return v;
}

Vector FieldEvaluator::F_y() const {
  const int n = spray_.dimension();
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = spray_.F().derivative(y_var(n, i)).value();
  return v;
}

double FieldEvaluator::tangency_defect(const VerticalField& field) {
  const Vector xi = values(field);
  const Vector fy = F_y();
  return std::abs(fy.dot(xi)) / (1.0 + fy.norm() * xi.norm());
}

}  // namespace finsler
