#include "pilot/distributions.hpp"

#include <cmath>
#include <sstream>

#include "pilot/error.hpp"
#include "pilot/special.hpp"

namespace pilot {
namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw ParameterDomainError(what);
}

std::int64_t binomial_inversion(std::int64_t n, double p, RngStream& rng) {
  // p <= 0.5 here, so q^n >= 2^-n stays representable for the sizes we see.
  const double q = 1.0 - p;
  const double s = p / q;
  const double a = (static_cast<double>(n) + 1.0) * s;
  double r = std::pow(q, static_cast<double>(n));
  double u = rng.uniform();
  std::int64_t x = 0;
  while (u > r) {
    u -= r;
    ++x;
    if (x > n) return n;
    r *= a / static_cast<double>(x) - s;
  }
  return x;
}

// Hormann's BTRS transformed rejection; requires n * p >= 10 and p <= 0.5.
std::int64_t binomial_btrs(std::int64_t n, double p, RngStream& rng) {
  const double nd = static_cast<double>(n);
  const double q = 1.0 - p;
  const double spq = std::sqrt(nd * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const double m = std::floor((nd + 1.0) * p);
  const double h = std::lgamma(m + 1.0) + std::lgamma(nd - m + 1.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + c);
    if (k < 0.0 || k > nd) continue;
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
    v = std::log(v * alpha / (a / (us * us) + b));
    if (v <= h - std::lgamma(k + 1.0) - std::lgamma(nd - k + 1.0) + (k - m) * lpq) {
      return static_cast<std::int64_t>(k);
    }
  }
}

}  // namespace

double standard_normal(RngStream& rng) { return normal_quantile(rng.uniform()); }

double standard_gamma(double shape, RngStream& rng) {
  if (shape < 1.0) {
    // Boost: G(a) = G(a + 1) * U^{1/a}.
    const double g = standard_gamma(shape + 1.0, rng);
    return g * std::exp(std::log(rng.uniform()) / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_beta(double alpha, double beta, RngStream& rng) {
  const double x = standard_gamma(alpha, rng);
  const double y = standard_gamma(beta, rng);
  return x / (x + y);
}

std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng) {
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - sample_binomial(n, 1.0 - p, rng);
  if (n <= 64 || static_cast<double>(n) * p < 10.0) return binomial_inversion(n, p, rng);
  return binomial_btrs(n, p, rng);
}

bool sample_bernoulli(double p, RngStream& rng) { return rng.uniform() < p; }

void validate(const DistSpec& dist) {
  std::visit(overloaded{
                 [](const BetaDist& d) {
                   require(positive(d.alpha) && positive(d.beta),
                           "Beta: alpha and beta must be finite and positive");
                 },
                 [](const BinomialDist& d) {
                   require(d.n >= 0 && d.p >= 0.0 && d.p <= 1.0,
                           "Binomial: requires n >= 0 and 0 <= p <= 1");
                 },
                 [](const NormalDist& d) {
                   require(std::isfinite(d.mean) && positive(d.sd),
                           "Normal: mean must be finite and sd positive");
                 },
                 [](const InverseGammaDist& d) {
                   require(positive(d.shape) && positive(d.rate),
                           "InverseGamma: shape and rate must be finite and positive");
                 },
                 [](const NormalInverseGammaDist& d) {
                   require(std::isfinite(d.mu0) && positive(d.nu0) && positive(d.alpha0) &&
                               positive(d.beta0),
                           "NormalInverseGamma: nu0, alpha0, beta0 must be positive");
                 },
             },
             dist);
}

std::string describe(const DistSpec& dist) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const BetaDist& d) { os << "Beta(" << d.alpha << ", " << d.beta << ")"; },
                 [&](const BinomialDist& d) { os << "Binomial(" << d.n << ", " << d.p << ")"; },
                 [&](const NormalDist& d) { os << "Normal(" << d.mean << ", " << d.sd << "^2)"; },
                 [&](const InverseGammaDist& d) {
                   os << "InvGamma(" << d.shape << ", " << d.rate << ")";
                 },
                 [&](const NormalInverseGammaDist& d) {
                   os << "NIG(" << d.mu0 << ", " << d.nu0 << ", " << d.alpha0 << ", " << d.beta0
                      << ")";
                 },
             },
             dist);
  return os.str();
}

double draw(const BetaDist& d, RngStream& rng) {
  validate(d);
  return sample_beta(d.alpha, d.beta, rng);
}

std::int64_t draw(const BinomialDist& d, RngStream& rng) {
  validate(d);
  return sample_binomial(d.n, d.p, rng);
}

double draw(const NormalDist& d, RngStream& rng) {
  validate(d);
  return d.mean + d.sd * standard_normal(rng);
}

double draw(const InverseGammaDist& d, RngStream& rng) {
  validate(d);
  return d.rate / standard_gamma(d.shape, rng);
}

NigDraw draw(const NormalInverseGammaDist& d, RngStream& rng) {
  validate(d);
  const double sigma2 = d.beta0 / standard_gamma(d.alpha0, rng);
  const double mean = d.mu0 + std::sqrt(sigma2 / d.nu0) * standard_normal(rng);
  return {sigma2, mean};
}

Variate draw(const DistSpec& dist, RngStream& rng) {
  return std::visit([&](const auto& d) -> Variate { return draw(d, rng); }, dist);
}

}  // namespace pilot
