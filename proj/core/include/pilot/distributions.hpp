#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "pilot/rng.hpp"

namespace pilot {

struct BetaDist {
  double alpha = 1.0;
  double beta = 1.0;
};

struct BinomialDist {
  std::int64_t n = 0;
  double p = 0.0;
};

struct NormalDist {
  double mean = 0.0;
  double sd = 1.0;
};

// Inverse-gamma parametrized by shape and rate: density ∝ x^{-shape-1} e^{-rate/x}.
struct InverseGammaDist {
  double shape = 1.0;
  double rate = 1.0;
};

// sigma2 ~ InvGamma(alpha0, beta0), mean | sigma2 ~ Normal(mu0, sigma2 / nu0).
struct NormalInverseGammaDist {
  double mu0 = 0.0;
  double nu0 = 1.0;
  double alpha0 = 1.0;
  double beta0 = 1.0;
};

using DistSpec =
    std::variant<BetaDist, BinomialDist, NormalDist, InverseGammaDist, NormalInverseGammaDist>;

struct NigDraw {
  double sigma2;
  double mean;
};

using Variate = std::variant<double, std::int64_t, NigDraw>;

// Throws ParameterDomainError when a parameter is outside its domain.
void validate(const DistSpec& dist);

std::string describe(const DistSpec& dist);

// One variate from `dist`: double for continuous families, int64 for the
// binomial and (sigma2, mean) for the normal-inverse-gamma.
Variate draw(const DistSpec& dist, RngStream& rng);

// Typed samplers. These validate their arguments.
double draw(const BetaDist& d, RngStream& rng);
std::int64_t draw(const BinomialDist& d, RngStream& rng);
double draw(const NormalDist& d, RngStream& rng);
double draw(const InverseGammaDist& d, RngStream& rng);
NigDraw draw(const NormalInverseGammaDist& d, RngStream& rng);

// Unchecked building blocks for inner loops.
double standard_normal(RngStream& rng);
double standard_gamma(double shape, RngStream& rng);
double sample_beta(double alpha, double beta, RngStream& rng);
std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng);
bool sample_bernoulli(double p, RngStream& rng);

}  // namespace pilot
