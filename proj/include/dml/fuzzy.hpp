#pragma once

// Łukasiewicz fuzzy connectives as differentiable tensor operations.
//
// All connectives are compositions of the primitive tensor ops, so gradients
// flow through them with the subgradient conventions of the tape (relu'(0)=0,
// clamp at the boundary contributes 0). Operands must lie in the unit
// interval; a tolerance of 1e-9 absorbs floating-point drift from upstream
// sigmoid/softmax outputs.

#include <stdexcept>
#include <string>

#include <dml/tensor.hpp>

namespace dml {

inline void require_unit_range(const Tensor& t, const char* op) {
  for (double v : t.values) {
    if (!(v >= -1e-9 && v <= 1.0 + 1e-9)) {
      throw std::domain_error(std::string(op) + ": operand value " +
                              std::to_string(v) + " outside [0, 1]");
    }
  }
}

// Strong conjunction: max(0, a + b - 1).
inline Tensor and_l(const Tensor& a, const Tensor& b) {
  require_unit_range(a, "and_l");
  require_unit_range(b, "and_l");
  return relu(sub(add(a, b), Tensor::scalar(1.0)));
}

// Strong disjunction: min(1, a + b).
inline Tensor or_l(const Tensor& a, const Tensor& b) {
  require_unit_range(a, "or_l");
  require_unit_range(b, "or_l");
  return clamp_max(add(a, b), 1.0);
}

// Residuum implication: min(1, 1 - a + b).
inline Tensor implies_l(const Tensor& a, const Tensor& b) {
  require_unit_range(a, "implies_l");
  require_unit_range(b, "implies_l");
  return clamp_max(add(sub(Tensor::scalar(1.0), a), b), 1.0);
}

// Involutive negation: 1 - a.
inline Tensor not_l(const Tensor& a) {
  require_unit_range(a, "not_l");
  return sub(Tensor::scalar(1.0), a);
}

// Degree to which "antecedent -> consequent" is violated: max(0, a - c).
// Equal to 1 - implies_l(a, c); kept as a primitive composition because it is
// the universal training signal.
inline Tensor contradiction_loss(const Tensor& antecedent,
                                 const Tensor& consequent) {
  require_unit_range(antecedent, "contradiction_loss");
  require_unit_range(consequent, "contradiction_loss");
  return relu(sub(antecedent, consequent));
}

}  // namespace dml
