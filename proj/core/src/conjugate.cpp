#include "pilot/conjugate.hpp"

#include <cmath>
#include <vector>

#include "pilot/elicitation.hpp"
#include "pilot/error.hpp"
#include "pilot/special.hpp"

namespace pilot {
namespace {

void check_threshold(double t, const char* name) {
  if (!(t > 0.0 && t < 1.0)) {
    throw ValidationError(std::string(name) + " must lie in (0, 1)");
  }
}

double upper_tail(double threshold, const BetaDist& prior, std::int64_t x, std::int64_t n) {
  return beta_sf(threshold, prior.alpha + static_cast<double>(x),
                 prior.beta + static_cast<double>(n - x));
}

struct MarginalTables {
  std::vector<double> total;  // ∫_0^1 Bin(x | N, p) prior(p) dp
  std::vector<double> upper;  // ∫_t^1 Bin(x | N, p) prior(p) dp
};

// Beta-binomial marginals split at the threshold, via Gauss-Legendre on
// [0, t] and [t, 1] so the region boundary never falls inside a panel.
MarginalTables marginal_tables(std::int64_t n, double threshold, const BetaDist& prior,
                               int resolution) {
  const QuadratureRule lo = gauss_legendre(resolution, 0.0, threshold);
  const QuadratureRule hi = gauss_legendre(resolution, threshold, 1.0);
  const double lb = log_beta(prior.alpha, prior.beta);
  const auto log_density = [&](double p) {
    return (prior.alpha - 1.0) * std::log(p) + (prior.beta - 1.0) * std::log1p(-p) - lb;
  };

  MarginalTables out{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0)};
  for (std::int64_t x = 0; x <= n; ++x) {
    double lower_sum = 0.0;
    for (std::size_t i = 0; i < lo.nodes.size(); ++i) {
      const double p = lo.nodes[i];
      lower_sum += lo.weights[i] * std::exp(log_binomial_pmf(x, n, p) + log_density(p));
    }
    double upper_sum = 0.0;
    for (std::size_t i = 0; i < hi.nodes.size(); ++i) {
      const double p = hi.nodes[i];
      upper_sum += hi.weights[i] * std::exp(log_binomial_pmf(x, n, p) + log_density(p));
    }
    out.total[x] = lower_sum + upper_sum;
    out.upper[x] = upper_sum;
  }
  return out;
}

}  // namespace

void ConjugateScenario::validate() const {
  if (n_per_arm < 1) throw ValidationError("n_per_arm must be at least 1");
  check_threshold(followup_threshold, "followup_threshold");
  check_threshold(adherence_threshold, "adherence_threshold");
  pilot::validate(design_prior_f);
  pilot::validate(design_prior_a);
  pilot::validate(analysis_prior_f);
  pilot::validate(analysis_prior_a);
}

HypothesisLabel classify_conjugate(const ConjugateParams& params,
                                   const ConjugateScenario& scenario) noexcept {
  const bool go = params.p_f >= scenario.followup_threshold &&
                  params.p_a >= scenario.adherence_threshold;
  return go ? HypothesisLabel::G : HypothesisLabel::R;
}

ConjugateParams draw_conjugate_prior(const ConjugateScenario& scenario, RngStream& rng) {
  const double p_f = draw(scenario.design_prior_f, rng);
  const double p_a = draw(scenario.design_prior_a, rng);
  return {p_f, p_a};
}

ConjugateData simulate_conjugate(const ConjugateParams& params,
                                 const ConjugateScenario& scenario, RngStream& rng) {
  ConjugateData data;
  data.n_f = scenario.followup_total();
  data.n_a = scenario.adherence_total();
  data.x_f = draw(BinomialDist{data.n_f, params.p_f}, rng);
  data.x_a = draw(BinomialDist{data.n_a, params.p_a}, rng);
  return data;
}

double exact_pG(const ConjugateData& data, const ConjugateScenario& scenario) {
  if (data.x_f < 0 || data.x_f > data.n_f || data.x_a < 0 || data.x_a > data.n_a) {
    throw ValidationError("conjugate data counts out of range");
  }
  return upper_tail(scenario.followup_threshold, scenario.analysis_prior_f, data.x_f,
                    data.n_f) *
         upper_tail(scenario.adherence_threshold, scenario.analysis_prior_a, data.x_a,
                    data.n_a);
}

HypothesisProbs exact_posterior_probs(const ConjugateData& data,
                                      const ConjugateScenario& scenario) {
  const double pG = exact_pG(data, scenario);
  return HypothesisProbs(1.0 - pG, 0.0, pG);
}

double design_prior_mass_G(const ConjugateScenario& scenario) {
  return beta_sf(scenario.followup_threshold, scenario.design_prior_f.alpha,
                 scenario.design_prior_f.beta) *
         beta_sf(scenario.adherence_threshold, scenario.design_prior_a.alpha,
                 scenario.design_prior_a.beta);
}

OCReport exact_ocs(const ConjugateScenario& scenario, double c1, int grid_resolution) {
  scenario.validate();
  if (grid_resolution < 100) {
    throw ValidationError("exact_ocs: grid_resolution must be at least 100");
  }
  const LossParams c = binary_loss(c1);
  const std::int64_t nf = scenario.followup_total();
  const std::int64_t na = scenario.adherence_total();
  if ((nf + 1) * (na + 1) > kMaxExactOutcomes) {
    throw CapacityError("exact_ocs: outcome grid too large for enumeration; use the Monte "
                        "Carlo path (build_matrix + ocs_for_loss)");
  }

  std::vector<double> post_f(nf + 1);
  for (std::int64_t x = 0; x <= nf; ++x) {
    post_f[x] = upper_tail(scenario.followup_threshold, scenario.analysis_prior_f, x, nf);
  }
  std::vector<double> post_a(na + 1);
  for (std::int64_t x = 0; x <= na; ++x) {
    post_a[x] = upper_tail(scenario.adherence_threshold, scenario.analysis_prior_a, x, na);
  }

  const MarginalTables mf =
      marginal_tables(nf, scenario.followup_threshold, scenario.design_prior_f, grid_resolution);
  const MarginalTables ma = marginal_tables(na, scenario.adherence_threshold,
                                            scenario.design_prior_a, grid_resolution);

  // The go region is a rectangle, so the prior integral over it (and over its
  // complement) factorizes into products of the one-dimensional tables.
  double oc1 = 0.0;
  double oc2 = 0.0;
  for (std::int64_t xf = 0; xf <= nf; ++xf) {
    for (std::int64_t xa = 0; xa <= na; ++xa) {
      const double in_g = mf.upper[xf] * ma.upper[xa];
      const double in_r = mf.total[xf] * ma.total[xa] - in_g;
      if (post_f[xf] * post_a[xa] > c.c1()) {
        oc1 += in_r;
      } else {
        oc2 += in_g;
      }
    }
  }

  OCReport report;
  report.oc1 = oc1;
  report.oc2 = oc2;
  report.oc3 = 0.0;
  report.expected_loss = c.c1() * oc1 + c.c2() * oc2;
  return report;
}

}  // namespace pilot
