#include "pilot/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pilot/distributions.hpp"
#include "pilot/error.hpp"

namespace pilot {
namespace {

// Sufficient statistics of one cluster's outcomes.
struct ClusterStats {
  double n = 0.0;       // followed-up residents with an outcome
  double mean = 0.0;    // ybar_j
  double ss = 0.0;      // within-cluster sum of squares
  bool treated = false; // X_j * Y_j
};

struct DataSummary {
  std::vector<double> sizes;
  double followed = 0.0;
  double residents = 0.0;
  double adherent = 0.0;
  double intervention = 0.0;
  std::vector<ClusterStats> outcome_clusters;  // clusters with n_j > 0
};

DataSummary summarize(const HierDataset& data) {
  DataSummary s;
  for (const Cluster& c : data.clusters) {
    s.sizes.push_back(static_cast<double>(c.size));
    s.residents += c.size;
    for (bool f : c.followed) s.followed += f ? 1.0 : 0.0;
    if (c.intervention) {
      s.intervention += 1.0;
      s.adherent += (c.adherent && *c.adherent) ? 1.0 : 0.0;
    }
    if (!c.outcomes.empty()) {
      ClusterStats cs;
      cs.n = static_cast<double>(c.outcomes.size());
      for (double y : c.outcomes) cs.mean += y;
      cs.mean /= cs.n;
      for (double y : c.outcomes) cs.ss += (y - cs.mean) * (y - cs.mean);
      cs.treated = c.intervention && c.adherent.value_or(false);
      s.outcome_clusters.push_back(cs);
    }
  }
  return s;
}

// Log-likelihood of the outcomes with the random intercepts integrated out.
// Within cluster j the covariance is sigma2_w I + sigma2_b J, whose
// eigenvalues are sigma2_w (n_j - 1 times) and sigma2_w + n_j sigma2_b.
double collapsed_loglik(const DataSummary& s, double mu, double sigma2_w, double rho) {
  const double sigma2_b = rho / (1.0 - rho) * sigma2_w;
  const double log_w = std::log(sigma2_w);
  double ll = 0.0;
  for (const ClusterStats& c : s.outcome_clusters) {
    const double tau = sigma2_w + c.n * sigma2_b;
    const double resid = c.mean - (c.treated ? mu : 0.0);
    ll -= 0.5 * (c.n - 1.0) * log_w + 0.5 * std::log(tau) + 0.5 * c.ss / sigma2_w +
          0.5 * c.n * resid * resid / tau;
  }
  return ll;
}

double logit(double p) { return std::log(p / (1.0 - p)); }
double inv_logit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct ChainState {
  HierParams p;
  double step_w;
  double step_rho;
  long accepted_w = 0;
  long accepted_rho = 0;
  long proposals = 0;
};

class ChainRunner {
 public:
  ChainRunner(const DataSummary& s, const AnalysisPriorSpec& prior) : s_(s), prior_(prior) {}

  void update_cluster_block(HierParams& p, RngStream& rng) const {
    const double n = static_cast<double>(s_.sizes.size());
    double sum = 0.0;
    for (double m : s_.sizes) sum += m;
    const double mbar = sum / n;

    if (const auto* nig = std::get_if<NormalInverseGammaDist>(&prior_.cluster)) {
      double ss = 0.0;
      for (double m : s_.sizes) ss += (m - mbar) * (m - mbar);
      const double nu_n = nig->nu0 + n;
      const double mu_n = (nig->nu0 * nig->mu0 + n * mbar) / nu_n;
      const double alpha_n = nig->alpha0 + 0.5 * n;
      const double beta_n = nig->beta0 + 0.5 * ss +
                            nig->nu0 * n * (mbar - nig->mu0) * (mbar - nig->mu0) / (2.0 * nu_n);
      p.sigma2_c = beta_n / standard_gamma(alpha_n, rng);
      p.mu_c = mu_n + std::sqrt(p.sigma2_c / nu_n) * standard_normal(rng);
      return;
    }

    const auto& ind = std::get<IndependentClusterPrior>(prior_.cluster);
    const double prior_prec = 1.0 / (ind.mean.sd * ind.mean.sd);
    const double prec = prior_prec + n / p.sigma2_c;
    const double mean = (ind.mean.mean * prior_prec + sum / p.sigma2_c) / prec;
    p.mu_c = mean + standard_normal(rng) / std::sqrt(prec);
    double ss = 0.0;
    for (double m : s_.sizes) ss += (m - p.mu_c) * (m - p.mu_c);
    p.sigma2_c = (ind.variance.rate + 0.5 * ss) / standard_gamma(ind.variance.shape + 0.5 * n, rng);
  }

  void update_rates(HierParams& p, RngStream& rng) const {
    p.p_f = sample_beta(prior_.p_f.alpha + s_.followed,
                        prior_.p_f.beta + s_.residents - s_.followed, rng);
    p.p_a = sample_beta(prior_.p_a.alpha + s_.adherent,
                        prior_.p_a.beta + s_.intervention - s_.adherent, rng);
  }

  void update_mu(HierParams& p, RngStream& rng) const {
    const double sigma2_b = p.sigma2_b();
    double prec = 1.0 / (prior_.mu.sd * prior_.mu.sd);
    double weighted = prior_.mu.mean * prec;
    for (const ClusterStats& c : s_.outcome_clusters) {
      if (!c.treated) continue;
      const double w = c.n / (p.sigma2_w + c.n * sigma2_b);
      prec += w;
      weighted += w * c.mean;
    }
    p.mu = weighted / prec + standard_normal(rng) / std::sqrt(prec);
  }

  // Log target on the transformed scale (log sigma2_w), up to a constant.
  double log_target_w(const HierParams& p, double sigma2_w) const {
    const InverseGammaDist& ig = prior_.sigma2_w;
    return collapsed_loglik(s_, p.mu, sigma2_w, p.rho) - ig.shape * std::log(sigma2_w) -
           ig.rate / sigma2_w;
  }

  // Log target on the logit scale for rho, up to a constant.
  double log_target_rho(const HierParams& p, double rho) const {
    const BetaDist& b = prior_.rho;
    return collapsed_loglik(s_, p.mu, p.sigma2_w, rho) + b.alpha * std::log(rho) +
           b.beta * std::log1p(-rho);
  }

  void update_variances(ChainState& st, RngStream& rng) const {
    HierParams& p = st.p;
    ++st.proposals;

    const double cur_w = std::log(p.sigma2_w);
    const double prop_w = cur_w + st.step_w * standard_normal(rng);
    const double new_sigma2_w = std::exp(prop_w);
    if (std::isfinite(new_sigma2_w) && new_sigma2_w > 0.0) {
      const double log_ratio = log_target_w(p, new_sigma2_w) - log_target_w(p, p.sigma2_w);
      if (std::log(rng.uniform()) < log_ratio) {
        p.sigma2_w = new_sigma2_w;
        ++st.accepted_w;
      }
    } else {
      rng.uniform();  // keep the draw count fixed per iteration
    }

    const double cur_r = logit(p.rho);
    const double new_rho = inv_logit(cur_r + st.step_rho * standard_normal(rng));
    if (new_rho > 0.0 && new_rho < 1.0) {
      const double log_ratio = log_target_rho(p, new_rho) - log_target_rho(p, p.rho);
      if (std::log(rng.uniform()) < log_ratio) {
        p.rho = new_rho;
        ++st.accepted_rho;
      }
    } else {
      rng.uniform();
    }
  }

 private:
  const DataSummary& s_;
  const AnalysisPriorSpec& prior_;
};

HierParams initial_state(const AnalysisPriorSpec& prior, RngStream& rng) {
  HierParams p;
  if (const auto* nig = std::get_if<NormalInverseGammaDist>(&prior.cluster)) {
    const NigDraw d = draw(*nig, rng);
    p.mu_c = d.mean;
    p.sigma2_c = d.sigma2;
  } else {
    const auto& ind = std::get<IndependentClusterPrior>(prior.cluster);
    p.mu_c = draw(ind.mean, rng);
    p.sigma2_c = draw(ind.variance, rng);
  }
  p.p_f = draw(prior.p_f, rng);
  p.p_a = draw(prior.p_a, rng);
  p.mu = draw(prior.mu, rng);
  p.sigma2_w = draw(prior.sigma2_w, rng);
  // Keep the starting ICC away from the 0/1 edges where logit overflows.
  p.rho = std::clamp(draw(prior.rho, rng), 1e-6, 1.0 - 1e-6);
  return p;
}

void adapt_step(double& step, long accepted, long proposals) {
  const double rate = static_cast<double>(accepted) / static_cast<double>(proposals);
  if (rate < 0.2) {
    step *= 0.7;
  } else if (rate > 0.5) {
    step *= 1.4;
  }
  step = std::clamp(step, 1e-4, 50.0);
}

}  // namespace

void McmcConfig::validate() const {
  if (chains < 2) throw ValidationError("mcmc.chains must be at least 2 (needed for R-hat)");
  if (burnin < 0) throw ValidationError("mcmc.burnin must be non-negative");
  if (iterations - burnin < 4) {
    throw ValidationError("mcmc.iterations must exceed burnin by at least 4");
  }
  if (!(step_log_sigma2_w > 0.0) || !(step_logit_rho > 0.0)) {
    throw ValidationError("mcmc step sizes must be positive");
  }
  if (!(rhat_threshold >= 1.0)) throw ValidationError("mcmc.rhat_threshold must be >= 1");
}

double split_rhat(std::span<const double> values, int chains) {
  if (chains < 1 || values.size() % static_cast<std::size_t>(chains) != 0) {
    throw ValidationError("split_rhat: values must split evenly into chains");
  }
  const std::size_t len = values.size() / chains;
  const std::size_t half = len / 2;
  if (half < 2) throw ValidationError("split_rhat: chains too short");

  std::vector<double> means;
  std::vector<double> vars;
  for (int c = 0; c < chains; ++c) {
    for (int h = 0; h < 2; ++h) {
      // Odd lengths drop the middle draw.
      const std::size_t start = c * len + (h == 0 ? 0 : len - half);
      double m = 0.0;
      for (std::size_t i = 0; i < half; ++i) m += values[start + i];
      m /= static_cast<double>(half);
      double v = 0.0;
      for (std::size_t i = 0; i < half; ++i) {
        v += (values[start + i] - m) * (values[start + i] - m);
      }
      v /= static_cast<double>(half - 1);
      means.push_back(m);
      vars.push_back(v);
    }
  }
  const double n = static_cast<double>(half);
  const double m_count = static_cast<double>(means.size());
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= m_count;
  double b = 0.0;
  for (double m : means) b += (m - grand) * (m - grand);
  b *= n / (m_count - 1.0);
  double w = 0.0;
  for (double v : vars) w += v;
  w /= m_count;
  if (w <= 0.0) return b <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double var_plus = (n - 1.0) / n * w + b / n;
  return std::sqrt(var_plus / w);
}

PosteriorSample posterior_sample(const HierDataset& data, const AnalysisPriorSpec& prior,
                                 const McmcConfig& mcmc, const RngStream& rng) {
  data.validate();
  prior.validate();
  mcmc.validate();

  const DataSummary summary = summarize(data);
  const ChainRunner runner(summary, prior);
  const int per_chain = mcmc.draws_per_chain();

  PosteriorSample out;
  out.chains = mcmc.chains;
  out.draws_per_chain = per_chain;
  out.draws.resize(static_cast<std::size_t>(mcmc.chains) * per_chain);
  out.outcomes_observed = !summary.outcome_clusters.empty();

  long accepted_w = 0;
  long accepted_rho = 0;
  long proposals = 0;
  for (int c = 0; c < mcmc.chains; ++c) {
    RngStream chain_rng = rng.derive(static_cast<std::uint64_t>(c));
    ChainState st{initial_state(prior, chain_rng), mcmc.step_log_sigma2_w,
                  mcmc.step_logit_rho};
    constexpr int kAdaptBatch = 50;
    for (int it = 0; it < mcmc.iterations; ++it) {
      runner.update_cluster_block(st.p, chain_rng);
      runner.update_rates(st.p, chain_rng);
      runner.update_mu(st.p, chain_rng);
      runner.update_variances(st, chain_rng);

      if (it < mcmc.burnin) {
        if (mcmc.adapt && st.proposals == kAdaptBatch) {
          adapt_step(st.step_w, st.accepted_w, st.proposals);
          adapt_step(st.step_rho, st.accepted_rho, st.proposals);
          st.accepted_w = st.accepted_rho = st.proposals = 0;
        }
        if (it + 1 == mcmc.burnin) st.accepted_w = st.accepted_rho = st.proposals = 0;
        continue;
      }
      out.draws[static_cast<std::size_t>(c) * per_chain + (it - mcmc.burnin)] = st.p;
    }
    accepted_w += st.accepted_w;
    accepted_rho += st.accepted_rho;
    proposals += st.proposals;
  }
  out.accept_sigma2_w = proposals ? static_cast<double>(accepted_w) / proposals : 0.0;
  out.accept_rho = proposals ? static_cast<double>(accepted_rho) / proposals : 0.0;

  std::vector<double> column(out.draws.size());
  out.max_rhat = 0.0;
  for (int j = 0; j < kNumHierParams; ++j) {
    for (std::size_t i = 0; i < out.draws.size(); ++i) column[i] = param_value(out.draws[i], j);
    out.rhat[j] = split_rhat(column, out.chains);
    out.max_rhat = std::max(out.max_rhat, out.rhat[j]);
  }
  out.converged = out.max_rhat <= mcmc.rhat_threshold;
  return out;
}

HierPosteriorResult posterior_hypothesis_probs(const HierDataset& data,
                                               const AnalysisPriorSpec& prior,
                                               const HypothesisPartition& partition,
                                               const McmcConfig& mcmc, const RngStream& rng) {
  const PosteriorSample sample = posterior_sample(data, prior, mcmc, rng);
  HierPosteriorResult res;
  res.probs = posterior_probs_from_samples(
      std::span<const HierParams>(sample.draws),
      [&](const HierParams& p) { return classify(p, partition); });
  res.converged = sample.converged;
  res.max_rhat = sample.max_rhat;
  return res;
}

}  // namespace pilot
