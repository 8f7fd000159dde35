#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pilot/decision.hpp"
#include "pilot/distributions.hpp"
#include "pilot/rng.hpp"

namespace pilot {

// Cluster-randomized pilot with a random-intercept continuous outcome.
//
// Substantive parameters: mean cluster size mu_c, follow-up rate p_f,
// cluster-level adherence rate p_a and potential efficacy mu.
// Nuisance parameters: cluster-size variance sigma2_c, ICC rho and the
// within-cluster outcome variance sigma2_w.
struct HierParams {
  double mu_c = 10.0;
  double p_f = 0.7;
  double p_a = 0.9;
  double mu = 0.2;
  double sigma2_c = 2.0;
  double rho = 0.05;
  double sigma2_w = 1.0;

  // Between-cluster variance implied by the ICC.
  double sigma2_b() const noexcept { return rho / (1.0 - rho) * sigma2_w; }
};

inline constexpr int kNumHierParams = 7;
inline constexpr std::string_view kHierParamNames[kNumHierParams] = {
    "mu_c", "p_f", "p_a", "mu", "sigma2_c", "rho", "sigma2_w"};

double param_value(const HierParams& p, int index) noexcept;

struct HierDesignPrior {
  NormalInverseGammaDist cluster{10.0, 6.0, 20.0, 39.0};  // (sigma2_c, mu_c)
  BetaDist p_f{22.4, 9.6};
  BetaDist p_a{28.8, 3.2};
  NormalDist mu{0.2, 0.25};
  InverseGammaDist sigma2_w{50.0, 45.0};
  BetaDist rho{1.6, 30.4};

  void validate() const;
};

HierParams draw_design_prior(const HierDesignPrior& prior, RngStream& rng);

// Information sub-space (follow-up p_f, mean cluster size mu_c):
//   R if p_f < floor or red_intercept - slope * p_f > mu_c
//   G if p_f > amber_to and green_intercept - slope * p_f < mu_c
//   A otherwise
struct InfoRegion {
  double floor = 0.6;
  double amber_to = 0.66;
  double red_intercept = 20.0;
  double green_intercept = 22.0;
  double slope = 15.0;
};

// Efficacy sub-space (adherence p_a, potential efficacy mu):
//   R if p_a < floor or red_intercept - slope * mu > p_a
//   G if p_a > amber_to and green_intercept - slope * mu < p_a
//   A otherwise
struct EffRegion {
  double floor = 0.5;
  double amber_to = 0.6;
  double red_intercept = 0.96;
  double green_intercept = 1.06;
  double slope = 0.57;
};

struct HypothesisPartition {
  InfoRegion info;
  EffRegion eff;

  // Green boundary strictly above the red one and non-empty amber bands.
  void validate() const;
};

HypothesisLabel classify_info(double p_f, double mu_c, const HypothesisPartition& part) noexcept;
HypothesisLabel classify_eff(double p_a, double mu, const HypothesisPartition& part) noexcept;

// R if either marginal is R, G if both are G, A otherwise.
HypothesisLabel combine_labels(HypothesisLabel info, HypothesisLabel eff) noexcept;

HypothesisLabel classify(const HierParams& params, const HypothesisPartition& part) noexcept;

// --- analysis priors -------------------------------------------------------

// Independent semi-conjugate prior on the cluster-size block.
struct IndependentClusterPrior {
  NormalDist mean;
  InverseGammaDist variance;
};

using ClusterSizePrior = std::variant<NormalInverseGammaDist, IndependentClusterPrior>;

struct AnalysisPriorSpec {
  std::string name = "custom";
  ClusterSizePrior cluster;
  BetaDist p_f;
  BetaDist p_a;
  NormalDist mu;
  InverseGammaDist sigma2_w;
  BetaDist rho;

  void validate() const;
};

// WI: weakly informative on everything. IN: design prior on the nuisance
// parameters (sigma2_c, rho, sigma2_w). INA: IN plus the design prior on p_a.
enum class AnalysisPreset { WI, IN, INA };

AnalysisPreset preset_from_string(std::string_view name);
std::string_view to_string(AnalysisPreset preset) noexcept;

AnalysisPriorSpec make_analysis_prior(AnalysisPreset preset, const HierDesignPrior& design);

// Fully subjective analysis (analysis prior == design prior).
AnalysisPriorSpec design_as_analysis_prior(const HierDesignPrior& design);

// --- data ------------------------------------------------------------------

struct Cluster {
  int size = 0;
  bool intervention = false;
  std::optional<bool> adherent;  // recorded for intervention clusters only
  std::vector<bool> followed;    // one flag per resident
  std::vector<double> outcomes;  // one value per followed-up resident
};

struct HierDataset {
  int k = 0;  // clusters per arm
  std::vector<Cluster> clusters;

  long total_residents() const noexcept;
  long total_followed() const noexcept;
  int adherent_clusters() const noexcept;
  int intervention_clusters() const noexcept;
  long outcome_count() const noexcept;

  // Throws ValidationError if the structural invariants are broken.
  void validate() const;
};

// Clusters 0..k-1 are control, k..2k-1 intervention. Cluster sizes are
// Normal(mu_c, sigma2_c) rounded to the nearest integer with a floor of 1.
// Each resident is followed up with probability p_f; followed-up residents
// have outcome X_j * Y_j * mu + u_j + e_i.
HierDataset simulate_trial(const HierParams& params, int k, RngStream& rng);

}  // namespace pilot
