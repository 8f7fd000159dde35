#include "pilot/decision.hpp"

#include <cmath>
#include <sstream>

namespace pilot {

char to_char(Decision d) noexcept {
  switch (d) {
    case Decision::r: return 'r';
    case Decision::a: return 'a';
    case Decision::g: return 'g';
  }
  return '?';
}

char to_char(HypothesisLabel h) noexcept {
  switch (h) {
    case HypothesisLabel::R: return 'R';
    case HypothesisLabel::A: return 'A';
    case HypothesisLabel::G: return 'G';
  }
  return '?';
}

HypothesisLabel label_from_char(char c) {
  switch (c) {
    case 'R': return HypothesisLabel::R;
    case 'A': return HypothesisLabel::A;
    case 'G': return HypothesisLabel::G;
    default: break;
  }
  throw ValidationError(std::string("unknown hypothesis label '") + c + "'");
}

HypothesisProbs::HypothesisProbs(double pR, double pA, double pG) {
  const double vals[3] = {pR, pA, pG};
  for (double v : vals) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw ValidationError("hypothesis probabilities must lie in [0, 1]");
    }
  }
  const double sum = pR + pA + pG;
  if (std::fabs(sum - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "hypothesis probabilities sum to " << sum << ", not 1";
    throw ValidationError(os.str());
  }
  // Leave rounding-level drift alone so stored values round-trip exactly.
  if (std::fabs(sum - 1.0) > 1e-12) {
    p_ = {pR / sum, pA / sum, pG / sum};
  } else {
    p_ = {pR, pA, pG};
  }
}

ErrorTriple errors(Decision d, HypothesisLabel h) noexcept {
  using enum HypothesisLabel;
  switch (d) {
    case Decision::r:
      return {false, h != R, false};
    case Decision::a:
      if (h == R) return {true, false, true};
      if (h == G) return {false, false, true};
      return {};
    case Decision::g:
      if (h == R) return {true, false, false};
      if (h == A) return {true, true, false};
      return {};
  }
  return {};
}

double loss(Decision d, HypothesisLabel h, const LossParams& c) noexcept {
  const ErrorTriple e = errors(d, h);
  return (e.e1 ? c.c1() : 0.0) + (e.e2 ? c.c2() : 0.0) + (e.e3 ? c.c3() : 0.0);
}

double expected_loss(Decision d, const HypothesisProbs& p, const LossParams& c) noexcept {
  switch (d) {
    case Decision::r: return c.c2() * (p.pA() + p.pG());
    case Decision::a: return (c.c1() + c.c3()) * p.pR() + c.c3() * p.pG();
    case Decision::g: return c.c1() * p.pR() + (c.c1() + c.c2()) * p.pA();
  }
  return 0.0;
}

Decision decide(const HypothesisProbs& p, const LossParams& c,
                DecisionSpace space) noexcept {
  Decision best = Decision::r;
  double best_loss = expected_loss(Decision::r, p, c);
  if (space == DecisionSpace::ternary) {
    const double la = expected_loss(Decision::a, p, c);
    if (la < best_loss) {
      best = Decision::a;
      best_loss = la;
    }
  }
  if (expected_loss(Decision::g, p, c) < best_loss) best = Decision::g;
  return best;
}

HypothesisProbs posterior_probs_from_labels(std::span<const HypothesisLabel> labels) {
  return posterior_probs_from_samples(labels, [](HypothesisLabel h) { return h; });
}

}  // namespace pilot
