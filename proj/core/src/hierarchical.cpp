#include "pilot/hierarchical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pilot/error.hpp"

namespace pilot {

double param_value(const HierParams& p, int index) noexcept {
  switch (index) {
    case 0: return p.mu_c;
    case 1: return p.p_f;
    case 2: return p.p_a;
    case 3: return p.mu;
    case 4: return p.sigma2_c;
    case 5: return p.rho;
    case 6: return p.sigma2_w;
    default: return 0.0;
  }
}

void HierDesignPrior::validate() const {
  pilot::validate(cluster);
  pilot::validate(p_f);
  pilot::validate(p_a);
  pilot::validate(mu);
  pilot::validate(sigma2_w);
  pilot::validate(rho);
}

HierParams draw_design_prior(const HierDesignPrior& prior, RngStream& rng) {
  HierParams p;
  const NigDraw c = draw(prior.cluster, rng);
  p.sigma2_c = c.sigma2;
  p.mu_c = c.mean;
  p.p_f = draw(prior.p_f, rng);
  p.p_a = draw(prior.p_a, rng);
  p.mu = draw(prior.mu, rng);
  p.sigma2_w = draw(prior.sigma2_w, rng);
  p.rho = draw(prior.rho, rng);
  return p;
}

void HypothesisPartition::validate() const {
  if (!(info.amber_to > info.floor)) {
    throw ValidationError("partition.info: amber_to must exceed floor");
  }
  if (!(info.green_intercept > info.red_intercept)) {
    throw ValidationError("partition.info: green line must lie above the red line");
  }
  if (!(eff.amber_to > eff.floor)) {
    throw ValidationError("partition.eff: amber_to must exceed floor");
  }
  if (!(eff.green_intercept > eff.red_intercept)) {
    throw ValidationError("partition.eff: green line must lie above the red line");
  }
  if (!std::isfinite(info.slope) || !std::isfinite(eff.slope)) {
    throw ValidationError("partition slopes must be finite");
  }
}

HypothesisLabel classify_info(double p_f, double mu_c, const HypothesisPartition& part) noexcept {
  const InfoRegion& r = part.info;
  if (p_f < r.floor || r.red_intercept - r.slope * p_f > mu_c) return HypothesisLabel::R;
  if (p_f > r.amber_to && r.green_intercept - r.slope * p_f < mu_c) return HypothesisLabel::G;
  return HypothesisLabel::A;
}

HypothesisLabel classify_eff(double p_a, double mu, const HypothesisPartition& part) noexcept {
  const EffRegion& r = part.eff;
  if (p_a < r.floor || r.red_intercept - r.slope * mu > p_a) return HypothesisLabel::R;
  if (p_a > r.amber_to && r.green_intercept - r.slope * mu < p_a) return HypothesisLabel::G;
  return HypothesisLabel::A;
}

HypothesisLabel combine_labels(HypothesisLabel info, HypothesisLabel eff) noexcept {
  if (info == HypothesisLabel::R || eff == HypothesisLabel::R) return HypothesisLabel::R;
  if (info == HypothesisLabel::G && eff == HypothesisLabel::G) return HypothesisLabel::G;
  return HypothesisLabel::A;
}

HypothesisLabel classify(const HierParams& params, const HypothesisPartition& part) noexcept {
  return combine_labels(classify_info(params.p_f, params.mu_c, part),
                        classify_eff(params.p_a, params.mu, part));
}

void AnalysisPriorSpec::validate() const {
  std::visit(
      [](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, NormalInverseGammaDist>) {
          pilot::validate(c);
        } else {
          pilot::validate(c.mean);
          pilot::validate(c.variance);
        }
      },
      cluster);
  pilot::validate(p_f);
  pilot::validate(p_a);
  pilot::validate(mu);
  pilot::validate(sigma2_w);
  pilot::validate(rho);
}

AnalysisPreset preset_from_string(std::string_view name) {
  if (name == "WI") return AnalysisPreset::WI;
  if (name == "IN") return AnalysisPreset::IN;
  if (name == "INA") return AnalysisPreset::INA;
  throw ValidationError("unknown analysis prior preset '" + std::string(name) +
                        "' (expected WI, IN or INA)");
}

std::string_view to_string(AnalysisPreset preset) noexcept {
  switch (preset) {
    case AnalysisPreset::WI: return "WI";
    case AnalysisPreset::IN: return "IN";
    case AnalysisPreset::INA: return "INA";
  }
  return "?";
}

AnalysisPriorSpec make_analysis_prior(AnalysisPreset preset, const HierDesignPrior& design) {
  AnalysisPriorSpec spec;
  spec.name = std::string(to_string(preset));
  spec.cluster = IndependentClusterPrior{NormalDist{0.0, 10.0}, InverseGammaDist{2.0, 2.0}};
  spec.p_f = BetaDist{1.0, 1.0};
  spec.p_a = BetaDist{1.0, 1.0};
  spec.mu = NormalDist{0.0, 10.0};
  spec.sigma2_w = InverseGammaDist{2.0, 2.0};
  spec.rho = BetaDist{1.0, 1.0};
  if (preset == AnalysisPreset::IN || preset == AnalysisPreset::INA) {
    // Marginal of the design NIG on the cluster-size variance.
    spec.cluster = IndependentClusterPrior{
        NormalDist{0.0, 10.0},
        InverseGammaDist{design.cluster.alpha0, design.cluster.beta0}};
    spec.sigma2_w = design.sigma2_w;
    spec.rho = design.rho;
  }
  if (preset == AnalysisPreset::INA) spec.p_a = design.p_a;
  return spec;
}

AnalysisPriorSpec design_as_analysis_prior(const HierDesignPrior& design) {
  AnalysisPriorSpec spec;
  spec.name = "design";
  spec.cluster = design.cluster;
  spec.p_f = design.p_f;
  spec.p_a = design.p_a;
  spec.mu = design.mu;
  spec.sigma2_w = design.sigma2_w;
  spec.rho = design.rho;
  return spec;
}

long HierDataset::total_residents() const noexcept {
  long n = 0;
  for (const auto& c : clusters) n += c.size;
  return n;
}

long HierDataset::total_followed() const noexcept {
  long n = 0;
  for (const auto& c : clusters) {
    for (bool f : c.followed) n += f ? 1 : 0;
  }
  return n;
}

int HierDataset::adherent_clusters() const noexcept {
  int n = 0;
  for (const auto& c : clusters) n += (c.adherent && *c.adherent) ? 1 : 0;
  return n;
}

int HierDataset::intervention_clusters() const noexcept {
  int n = 0;
  for (const auto& c : clusters) n += c.intervention ? 1 : 0;
  return n;
}

long HierDataset::outcome_count() const noexcept {
  long n = 0;
  for (const auto& c : clusters) n += static_cast<long>(c.outcomes.size());
  return n;
}

void HierDataset::validate() const {
  if (k < 1) throw ValidationError("dataset needs at least one cluster per arm");
  if (clusters.size() != static_cast<std::size_t>(2 * k)) {
    throw ValidationError("dataset must hold exactly 2k clusters");
  }
  int treated = 0;
  for (const auto& c : clusters) {
    if (c.size < 1) throw ValidationError("cluster sizes must be positive");
    if (c.intervention != c.adherent.has_value()) {
      throw ValidationError("adherence is recorded for intervention clusters only");
    }
    if (c.followed.size() != static_cast<std::size_t>(c.size)) {
      throw ValidationError("one follow-up flag per resident is required");
    }
    std::size_t followed = 0;
    for (bool f : c.followed) followed += f ? 1 : 0;
    if (followed != c.outcomes.size()) {
      throw ValidationError("outcome count must equal the number of followed-up residents");
    }
    treated += c.intervention ? 1 : 0;
  }
  if (treated != k) throw ValidationError("exactly k clusters per arm are required");
}

HierDataset simulate_trial(const HierParams& params, int k, RngStream& rng) {
  if (k < 1) throw ValidationError("simulate_trial: k must be at least 1");
  HierDataset data;
  data.k = k;
  data.clusters.resize(2 * static_cast<std::size_t>(k));

  const double size_sd = std::sqrt(params.sigma2_c);
  const double sd_b = std::sqrt(params.sigma2_b());
  const double sd_w = std::sqrt(params.sigma2_w);

  for (int j = 0; j < 2 * k; ++j) {
    Cluster& c = data.clusters[j];
    c.intervention = j >= k;
    const double raw_size = params.mu_c + size_sd * standard_normal(rng);
    c.size = static_cast<int>(std::max(1.0, std::round(raw_size)));
    bool treated = false;
    if (c.intervention) {
      c.adherent = sample_bernoulli(params.p_a, rng);
      treated = *c.adherent;
    }
    const double u = sd_b * standard_normal(rng);
    const double shift = (treated ? params.mu : 0.0) + u;
    c.followed.resize(c.size);
    for (int i = 0; i < c.size; ++i) {
      const bool f = sample_bernoulli(params.p_f, rng);
      c.followed[i] = f;
      if (f) c.outcomes.push_back(shift + sd_w * standard_normal(rng));
    }
  }
  return data;
}

}  // namespace pilot
