#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "pilot/elicitation.hpp"
#include "pilot/error.hpp"

namespace pilot {

// Red (stop), amber (modify then proceed), green (proceed).
enum class Decision { r, a, g };

// Region of the substantive parameter space containing the truth.
enum class HypothesisLabel { R, A, G };

// Binary designs (stop/go) never offer amber.
enum class DecisionSpace { binary, ternary };

char to_char(Decision d) noexcept;
char to_char(HypothesisLabel h) noexcept;
HypothesisLabel label_from_char(char c);

// Posterior probabilities of the three hypotheses. The constructor
// validates each component and renormalizes drift up to 1e-6.
class HypothesisProbs {
 public:
  HypothesisProbs() = default;
  HypothesisProbs(double pR, double pA, double pG);

  double pR() const noexcept { return p_[0]; }
  double pA() const noexcept { return p_[1]; }
  double pG() const noexcept { return p_[2]; }
  double operator[](HypothesisLabel h) const noexcept {
    return p_[static_cast<std::size_t>(h)];
  }

 private:
  std::array<double, 3> p_{1.0, 0.0, 0.0};
};

struct ErrorTriple {
  bool e1 = false;  // proceeded to an infeasible main trial
  bool e2 = false;  // discarded a promising intervention
  bool e3 = false;  // made unnecessary adjustments

  friend bool operator==(const ErrorTriple&, const ErrorTriple&) = default;
};

ErrorTriple errors(Decision d, HypothesisLabel h) noexcept;

double loss(Decision d, HypothesisLabel h, const LossParams& c) noexcept;

double expected_loss(Decision d, const HypothesisProbs& p, const LossParams& c) noexcept;

// Minimum expected loss decision. Exact ties resolve in the order r, a, g.
Decision decide(const HypothesisProbs& p, const LossParams& c,
                DecisionSpace space = DecisionSpace::ternary) noexcept;

// Fraction of labels in each hypothesis. Throws EstimationError when empty.
HypothesisProbs posterior_probs_from_labels(std::span<const HypothesisLabel> labels);

// Monte Carlo estimate of the hypothesis probabilities from posterior draws:
// p_I = (1/M) sum_k 1{classify(draw_k) == I}.
template <class Sample, class Classifier>
HypothesisProbs posterior_probs_from_samples(std::span<const Sample> samples,
                                             Classifier&& classify) {
  if (samples.empty()) {
    throw EstimationError("posterior probabilities need at least one sample");
  }
  std::array<std::size_t, 3> counts{};
  for (const auto& s : samples) {
    ++counts[static_cast<std::size_t>(classify(s))];
  }
  const double m = static_cast<double>(samples.size());
  return HypothesisProbs(counts[0] / m, counts[1] / m, counts[2] / m);
}

}  // namespace pilot
