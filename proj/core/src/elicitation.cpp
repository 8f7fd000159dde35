#include "pilot/elicitation.hpp"

#include <cmath>
#include <sstream>

#include "pilot/error.hpp"

namespace pilot {

LossParams validate_loss(double c1, double c2, double c3) {
  const double vals[3] = {c1, c2, c3};
  for (double v : vals) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      std::ostringstream os;
      os << "loss vector (" << c1 << ", " << c2 << ", " << c3
         << ") has a component outside [0, 1]";
      throw ValidationError(os.str());
    }
  }
  const double sum = c1 + c2 + c3;
  if (std::fabs(sum - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "loss vector (" << c1 << ", " << c2 << ", " << c3 << ") sums to " << sum
       << ", not 1";
    throw ValidationError(os.str());
  }
  return LossParams(c1 / sum, c2 / sum, c3 / sum);
}

LossParams binary_loss(double c1) { return validate_loss(c1, 1.0 - c1, 0.0); }

ElicitationResult loss_from_indifference(IndifferencePair pair) {
  const auto in_range = [](double p) { return std::isfinite(p) && p > 0.0 && p <= 1.0; };
  if (!in_range(pair.p1) || !in_range(pair.p2)) {
    std::ostringstream os;
    os << "indifference probabilities must lie in (0, 1]; got p1=" << pair.p1
       << ", p2=" << pair.p2;
    throw ElicitationError(os.str());
  }
  const double p1 = pair.p1;
  const double p2 = pair.p2;
  const double denom = p1 * p2 - p1 - p2;  // strictly negative on the domain
  const double c1 = -p1 * p2 / denom;
  const double c2 = (p1 * p2 - p1) / denom;
  const double c3 = (p1 * p2 - p2) / denom;

  ElicitationResult out{validate_loss(c1, c2, c3), std::nullopt};
  if (p1 == 1.0 && p2 == 1.0) {
    out.warning = "p1 = p2 = 1 is degenerate: all weight falls on c1, giving (1, 0, 0)";
  } else if (p1 == 1.0) {
    out.warning = "p1 = 1 removes all weight from unnecessary adjustments (c3 = 0)";
  } else if (p2 == 1.0) {
    out.warning = "p2 = 1 removes all weight from discarding a promising intervention (c2 = 0)";
  }
  return out;
}

IndifferencePair indifference_from_loss(const LossParams& c) {
  const double a = c.c1() + c.c3();
  const double b = c.c1() + c.c2();
  if (a <= 0.0 || b <= 0.0) {
    throw ElicitationError("indifference probabilities undefined when c1 + c3 or c1 + c2 is 0");
  }
  return {c.c1() / a, c.c1() / b};
}

}  // namespace pilot
