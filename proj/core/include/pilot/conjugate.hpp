#pragma once

#include <cstdint>

#include "pilot/decision.hpp"
#include "pilot/distributions.hpp"
#include "pilot/oc_report.hpp"
#include "pilot/rng.hpp"

namespace pilot {

// Two-arm individually randomized pilot with binomial follow-up (both arms,
// 2n participants) and binomial adherence (intervention arm, n participants).
// The "go" hypothesis is p_f >= followup_threshold and p_a >= adherence_threshold.
struct ConjugateScenario {
  int n_per_arm = 30;
  double followup_threshold = 0.8;
  double adherence_threshold = 0.7;
  BetaDist design_prior_f{40.0, 10.0};
  BetaDist design_prior_a{11.2, 4.8};
  BetaDist analysis_prior_f{1.0, 1.0};
  BetaDist analysis_prior_a{1.0, 1.0};

  std::int64_t followup_total() const noexcept { return 2 * static_cast<std::int64_t>(n_per_arm); }
  std::int64_t adherence_total() const noexcept { return n_per_arm; }

  // Throws ValidationError / ParameterDomainError on bad fields.
  void validate() const;
};

struct ConjugateParams {
  double p_f;
  double p_a;
};

struct ConjugateData {
  std::int64_t x_f = 0;
  std::int64_t n_f = 0;
  std::int64_t x_a = 0;
  std::int64_t n_a = 0;
};

// G iff both rates reach their thresholds (inclusive); never A.
HypothesisLabel classify_conjugate(const ConjugateParams& params,
                                   const ConjugateScenario& scenario) noexcept;

ConjugateParams draw_conjugate_prior(const ConjugateScenario& scenario, RngStream& rng);

ConjugateData simulate_conjugate(const ConjugateParams& params,
                                 const ConjugateScenario& scenario, RngStream& rng);

// Exact posterior probability of the go hypothesis under the analysis prior:
// [1 - F(t_f; a_f + x_f, b_f + N_f - x_f)] * [1 - F(t_a; a_a + x_a, b_a + N_a - x_a)].
double exact_pG(const ConjugateData& data, const ConjugateScenario& scenario);

HypothesisProbs exact_posterior_probs(const ConjugateData& data,
                                      const ConjugateScenario& scenario);

// Prior probability of the go hypothesis under the design prior (closed form).
double design_prior_mass_G(const ConjugateScenario& scenario);

// Exact operating characteristics of the rule "g iff pG > c1" by enumerating
// every (x_f, x_a) outcome and integrating the design prior with a
// Gauss-Legendre rule of `grid_resolution` nodes on each side of each
// threshold. Throws CapacityError when the outcome grid exceeds 1e7 cells.
OCReport exact_ocs(const ConjugateScenario& scenario, double c1, int grid_resolution = 200);

inline constexpr std::int64_t kMaxExactOutcomes = 10'000'000;

}  // namespace pilot
