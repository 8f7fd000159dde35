#pragma once

#include <array>
#include <optional>
#include <string>

namespace pilot {

// Weights on the three error events: c1 proceeding to an infeasible main
// trial, c2 discarding a promising intervention, c3 making unnecessary
// adjustments. Components lie in [0, 1] and sum to one.
class LossParams {
 public:
  // Equal weights.
  LossParams() = default;

  double c1() const noexcept { return c_[0]; }
  double c2() const noexcept { return c_[1]; }
  double c3() const noexcept { return c_[2]; }
  const std::array<double, 3>& values() const noexcept { return c_; }

  // The only way to construct a non-default instance; see validate_loss.
  friend LossParams validate_loss(double c1, double c2, double c3);

 private:
  LossParams(double c1, double c2, double c3) noexcept : c_{c1, c2, c3} {}
  std::array<double, 3> c_{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
};

// Accepts a loss vector whose components are in [0, 1] and whose sum is
// within 1e-6 of one; residual drift is renormalized away. Anything else
// raises ValidationError.
LossParams validate_loss(double c1, double c2, double c3);

// Binary stop/go loss: (c1, 1 - c1, 0).
LossParams binary_loss(double c1);

// Indifference probabilities from the two standard gambles:
//   p1: risk of (E1, E3) vs certain E1, so p1 (c1 + c3) = c1
//   p2: risk of (E1, E2) vs certain E1, so p2 (c1 + c2) = c1
struct IndifferencePair {
  double p1;
  double p2;
};

struct ElicitationResult {
  LossParams loss;
  // Set when an endpoint (p = 1) was used and the solution is degenerate.
  std::optional<std::string> warning;
};

// Solves the two indifference equations plus c1 + c2 + c3 = 1. Requires
// 0 < p1, p2 <= 1; throws ElicitationError otherwise.
ElicitationResult loss_from_indifference(IndifferencePair pair);

// Inverse map, (c1 / (c1 + c3), c1 / (c1 + c2)).
IndifferencePair indifference_from_loss(const LossParams& c);

}  // namespace pilot
