#pragma once

#include <cstdint>
#include <vector>

namespace pilot {

// Regularized incomplete beta function I_x(a, b), i.e. the Beta(a, b) CDF.
// Throws ParameterDomainError for non-finite or non-positive shapes, or x
// outside [0, 1].
double beta_cdf(double x, double a, double b);

// Upper tail 1 - I_x(a, b), evaluated without cancellation when it is small.
double beta_sf(double x, double a, double b);

double log_beta(double a, double b);

double normal_cdf(double z);

// Inverse standard normal CDF (Wichura's AS241, ~1e-16 relative accuracy).
// Requires 0 < p < 1.
double normal_quantile(double p);

// log C(n, k) + k log p + (n - k) log(1 - p), with the p = 0 and p = 1
// limits handled exactly (returns -inf for impossible outcomes).
double log_binomial_pmf(std::int64_t k, std::int64_t n, double p);
double binomial_pmf(std::int64_t k, std::int64_t n, double p);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule mapped to [lo, hi].
QuadratureRule gauss_legendre(int n, double lo, double hi);

}  // namespace pilot
