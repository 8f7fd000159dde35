#pragma once

#include <array>
#include <span>
#include <vector>

#include "pilot/decision.hpp"
#include "pilot/hierarchical.hpp"
#include "pilot/rng.hpp"

namespace pilot {

struct McmcConfig {
  int chains = 4;
  int iterations = 5000;  // per chain, including burn-in
  int burnin = 2500;
  // Initial random-walk scales on log(sigma2_w) and logit(rho). Tuned toward
  // 20-50% acceptance during burn-in, then frozen.
  double step_log_sigma2_w = 0.3;
  double step_logit_rho = 1.0;
  bool adapt = true;
  double rhat_threshold = 1.05;

  int draws_per_chain() const noexcept { return iterations - burnin; }
  int total_draws() const noexcept { return chains * draws_per_chain(); }

  void validate() const;
};

struct PosteriorSample {
  std::vector<HierParams> draws;  // chain-major: chain c occupies [c*L, (c+1)*L)
  int chains = 0;
  int draws_per_chain = 0;
  std::array<double, kNumHierParams> rhat{};
  double max_rhat = 1.0;
  bool converged = true;
  double accept_sigma2_w = 0.0;  // post burn-in acceptance rates
  double accept_rho = 0.0;
  bool outcomes_observed = true;
};

// Posterior draws of all seven parameters given a dataset and analysis
// prior. Cluster-size (NIG prior), p_f and p_a blocks are drawn from their
// exact conjugate posteriors; the outcome block integrates the random
// intercepts out and alternates a Gaussian update of mu with random-walk
// Metropolis on log(sigma2_w) and logit(rho). Chain c uses rng.derive(c).
PosteriorSample posterior_sample(const HierDataset& data, const AnalysisPriorSpec& prior,
                                 const McmcConfig& mcmc, const RngStream& rng);

struct HierPosteriorResult {
  HypothesisProbs probs;
  bool converged = true;
  double max_rhat = 1.0;
};

HierPosteriorResult posterior_hypothesis_probs(const HierDataset& data,
                                               const AnalysisPriorSpec& prior,
                                               const HypothesisPartition& partition,
                                               const McmcConfig& mcmc, const RngStream& rng);

// Split R-hat over `chains` equal-length chains stored contiguously.
double split_rhat(std::span<const double> values, int chains);

}  // namespace pilot
