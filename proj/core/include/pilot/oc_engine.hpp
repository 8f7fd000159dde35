#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pilot/conjugate.hpp"
#include "pilot/decision.hpp"
#include "pilot/elicitation.hpp"
#include "pilot/hierarchical.hpp"
#include "pilot/mcmc.hpp"
#include "pilot/oc_report.hpp"
#include "pilot/rng.hpp"

namespace pilot {

struct HierScenario {
  int k = 6;  // clusters per arm
  HierDesignPrior design;
  AnalysisPriorSpec analysis = make_analysis_prior(AnalysisPreset::WI, HierDesignPrior{});
  HypothesisPartition partition;
  McmcConfig mcmc;

  void validate() const;
};

using Scenario = std::variant<ConjugateScenario, HierScenario>;

std::string model_name(const Scenario& s);
DecisionSpace decision_space(const Scenario& s) noexcept;
int sample_size(const Scenario& s) noexcept;
Scenario with_sample_size(Scenario s, int size);
void validate(const Scenario& s);

struct MatrixRow {
  std::uint64_t replicate = 0;  // substream id of the replicate
  HypothesisLabel truth = HypothesisLabel::R;
  HypothesisProbs probs;
  bool converged = true;
};

// Cached product of the nested simulation: one row per replicate with the
// true hypothesis and the posterior hypothesis probabilities. Every loss
// vector is evaluated against the same rows.
struct PosteriorProbMatrix {
  std::string fingerprint;  // hash of the generating scenario
  std::string model;
  DecisionSpace space = DecisionSpace::ternary;
  std::uint64_t seed = 0;
  int sample_size = 0;
  std::vector<MatrixRow> rows;

  std::int64_t nonconverged() const noexcept;
  void validate() const;
};

// 0 means "use the available hardware parallelism".
int resolve_threads(int threads) noexcept;

// Draws N (parameter, dataset) pairs from the design prior, analyses each
// one (exact conjugate posterior or MCMC) and records the true label with
// the posterior hypothesis probabilities. Replicate r uses substream r of
// `seed`, so the result does not depend on `threads`.
PosteriorProbMatrix build_matrix(const Scenario& scenario, std::int64_t n_replicates,
                                 std::uint64_t seed, int threads = 0);

// OC_i is the fraction of rows in which error E_i occurs under the optimal
// decision for loss vector c.
OCReport ocs_for_loss(const PosteriorProbMatrix& matrix, const LossParams& c);

struct ParetoPoint {
  LossParams c;
  OCReport report;
};

// c' dominates c iff OC_i(c') <= OC_i(c) for every i, strictly for some i.
// Exact float comparison: all candidates share one matrix.
bool dominates(const OCReport& a, const OCReport& b) noexcept;

// Uniform draws on the 2-simplex (symmetric Dirichlet(1, 1, 1)).
std::vector<LossParams> sample_loss_simplex(int count, RngStream& rng);

// Removes dominated points and sorts the survivors by (oc1, oc2, oc3, c1, c2).
std::vector<ParetoPoint> non_dominated(std::vector<ParetoPoint> points);

std::vector<ParetoPoint> evaluate_candidates(const PosteriorProbMatrix& matrix,
                                             std::span<const LossParams> candidates);

std::vector<ParetoPoint> pareto_front(const PosteriorProbMatrix& matrix, int num_candidates,
                                      RngStream& rng);

struct SweepRow {
  int size = 0;
  OCReport report;
};

inline constexpr double kDefaultMaxMcmcIterations = 5e9;

// One matrix per sample size, each seeded with derive_seed(seed, size).
// Hierarchical sweeps whose total MCMC iteration count exceeds
// `max_mcmc_iterations` raise CapacityError before any work starts.
std::vector<SweepRow> sample_size_sweep(const Scenario& scenario_template,
                                        std::span<const int> sizes, const LossParams& c,
                                        std::int64_t n_replicates, std::uint64_t seed,
                                        int threads = 0,
                                        double max_mcmc_iterations = kDefaultMaxMcmcIterations);

// Instrumentation used to verify that loss-vector evaluations reuse one
// matrix instead of re-running the nested simulation.
struct EngineCounters {
  long matrix_builds = 0;
  long analyses = 0;
};
EngineCounters engine_counters() noexcept;
void reset_engine_counters() noexcept;

}  // namespace pilot
