#pragma once

#include <cstdint>

namespace pilot {

// Operating characteristics of a design under one loss vector.
//   oc1: Pr[proceed to an infeasible main trial]
//   oc2: Pr[discard a promising intervention]
//   oc3: Pr[make unnecessary adjustments]
// Standard errors are sqrt(p(1-p)/N) for the Monte Carlo path and zero for
// exact evaluations.
struct OCReport {
  double oc1 = 0.0;
  double oc2 = 0.0;
  double oc3 = 0.0;
  double se1 = 0.0;
  double se2 = 0.0;
  double se3 = 0.0;
  double expected_loss = 0.0;
  double se_expected_loss = 0.0;
  std::int64_t n_replicates = 0;
  std::int64_t n_nonconverged = 0;
};

}  // namespace pilot
