#include "pilot/oc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "pilot/config.hpp"
#include "pilot/error.hpp"

namespace pilot {
namespace {

std::atomic<long> g_matrix_builds{0};
std::atomic<long> g_analyses{0};

constexpr std::uint64_t kDataTag = 0x64617461ull;      // "data"
constexpr std::uint64_t kAnalysisTag = 0x616e616cull;  // "anal"

template <class Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
  threads = static_cast<int>(std::min<std::int64_t>(std::max(1, threads), std::max<std::int64_t>(n, 1)));
  if (threads == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (;;) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

MatrixRow conjugate_row(const ConjugateScenario& s, std::uint64_t seed, std::uint64_t r) {
  RngStream rng = RngStream(seed, r).derive(kDataTag);
  const ConjugateParams theta = draw_conjugate_prior(s, rng);
  const ConjugateData x = simulate_conjugate(theta, s, rng);
  g_analyses.fetch_add(1, std::memory_order_relaxed);
  return {r, classify_conjugate(theta, s), exact_posterior_probs(x, s), true};
}

MatrixRow hierarchical_row(const HierScenario& s, std::uint64_t seed, std::uint64_t r) {
  const RngStream base(seed, r);
  RngStream rng = base.derive(kDataTag);
  const HierParams theta = draw_design_prior(s.design, rng);
  const HierDataset x = simulate_trial(theta, s.k, rng);
  g_analyses.fetch_add(1, std::memory_order_relaxed);
  const HierPosteriorResult post =
      posterior_hypothesis_probs(x, s.analysis, s.partition, s.mcmc, base.derive(kAnalysisTag));
  return {r, classify(theta, s.partition), post.probs, post.converged};
}

OCReport make_report(double e1, double e2, double e3, double loss_sum, double loss_sq,
                     std::int64_t n, std::int64_t nonconverged) {
  const double nd = static_cast<double>(n);
  const auto se = [nd](double p) { return std::sqrt(p * (1.0 - p) / nd); };
  OCReport r;
  r.oc1 = e1 / nd;
  r.oc2 = e2 / nd;
  r.oc3 = e3 / nd;
  r.se1 = se(r.oc1);
  r.se2 = se(r.oc2);
  r.se3 = se(r.oc3);
  r.expected_loss = loss_sum / nd;
  const double var = std::max(0.0, loss_sq / nd - r.expected_loss * r.expected_loss);
  r.se_expected_loss = std::sqrt(var / nd);
  r.n_replicates = n;
  r.n_nonconverged = nonconverged;
  return r;
}

}  // namespace

void HierScenario::validate() const {
  if (k < 1) throw ValidationError("k must be at least 1");
  design.validate();
  analysis.validate();
  partition.validate();
  mcmc.validate();
}

std::string model_name(const Scenario& s) {
  return std::holds_alternative<ConjugateScenario>(s) ? "conjugate" : "hierarchical";
}

DecisionSpace decision_space(const Scenario& s) noexcept {
  return std::holds_alternative<ConjugateScenario>(s) ? DecisionSpace::binary
                                                      : DecisionSpace::ternary;
}

int sample_size(const Scenario& s) noexcept {
  if (const auto* c = std::get_if<ConjugateScenario>(&s)) return c->n_per_arm;
  return std::get<HierScenario>(s).k;
}

Scenario with_sample_size(Scenario s, int size) {
  if (auto* c = std::get_if<ConjugateScenario>(&s)) {
    c->n_per_arm = size;
  } else {
    std::get<HierScenario>(s).k = size;
  }
  return s;
}

void validate(const Scenario& s) {
  std::visit([](const auto& v) { v.validate(); }, s);
}

std::int64_t PosteriorProbMatrix::nonconverged() const noexcept {
  return std::count_if(rows.begin(), rows.end(), [](const MatrixRow& r) { return !r.converged; });
}

void PosteriorProbMatrix::validate() const {
  if (rows.empty()) throw ValidationError("posterior probability matrix has no rows");
  for (const MatrixRow& r : rows) {
    if (space == DecisionSpace::binary && r.truth == HypothesisLabel::A) {
      throw ValidationError("binary matrix contains an amber true label");
    }
    const double sum = r.probs.pR() + r.probs.pA() + r.probs.pG();
    if (std::fabs(sum - 1.0) > 1e-9) throw ValidationError("matrix row does not sum to 1");
  }
}

int resolve_threads(int threads) noexcept {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

PosteriorProbMatrix build_matrix(const Scenario& scenario, std::int64_t n_replicates,
                                 std::uint64_t seed, int threads) {
  if (n_replicates < 1) throw ValidationError("build_matrix: N must be at least 1");
  validate(scenario);
  g_matrix_builds.fetch_add(1, std::memory_order_relaxed);

  PosteriorProbMatrix m;
  m.fingerprint = scenario_fingerprint(scenario);
  m.model = model_name(scenario);
  m.space = decision_space(scenario);
  m.seed = seed;
  m.sample_size = sample_size(scenario);
  m.rows.resize(static_cast<std::size_t>(n_replicates));

  parallel_for(n_replicates, resolve_threads(threads), [&](std::int64_t i) {
    const auto r = static_cast<std::uint64_t>(i);
    m.rows[i] = std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, ConjugateScenario>) {
            return conjugate_row(s, seed, r);
          } else {
            return hierarchical_row(s, seed, r);
          }
        },
        scenario);
  });
  return m;
}

OCReport ocs_for_loss(const PosteriorProbMatrix& matrix, const LossParams& c) {
  if (matrix.rows.empty()) throw ValidationError("ocs_for_loss: empty matrix");
  double e1 = 0.0, e2 = 0.0, e3 = 0.0, loss_sum = 0.0, loss_sq = 0.0;
  std::int64_t nonconverged = 0;
  for (const MatrixRow& row : matrix.rows) {
    const Decision d = decide(row.probs, c, matrix.space);
    const ErrorTriple e = errors(d, row.truth);
    e1 += e.e1;
    e2 += e.e2;
    e3 += e.e3;
    const double l = loss(d, row.truth, c);
    loss_sum += l;
    loss_sq += l * l;
    nonconverged += row.converged ? 0 : 1;
  }
  return make_report(e1, e2, e3, loss_sum, loss_sq,
                     static_cast<std::int64_t>(matrix.rows.size()), nonconverged);
}

bool dominates(const OCReport& a, const OCReport& b) noexcept {
  const bool no_worse = a.oc1 <= b.oc1 && a.oc2 <= b.oc2 && a.oc3 <= b.oc3;
  const bool better = a.oc1 < b.oc1 || a.oc2 < b.oc2 || a.oc3 < b.oc3;
  return no_worse && better;
}

std::vector<LossParams> sample_loss_simplex(int count, RngStream& rng) {
  std::vector<LossParams> out;
  out.reserve(std::max(count, 0));
  for (int i = 0; i < count; ++i) {
    const double a = -std::log(rng.uniform());
    const double b = -std::log(rng.uniform());
    const double c = -std::log(rng.uniform());
    const double s = a + b + c;
    out.push_back(validate_loss(a / s, b / s, c / s));
  }
  return out;
}

std::vector<ParetoPoint> non_dominated(std::vector<ParetoPoint> points) {
  std::vector<ParetoPoint> front;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
      dominated = j != i && dominates(points[j].report, points[i].report);
    }
    if (!dominated) front.push_back(points[i]);
  }
  std::sort(front.begin(), front.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    const auto key = [](const ParetoPoint& p) {
      return std::array<double, 5>{p.report.oc1, p.report.oc2, p.report.oc3, p.c.c1(), p.c.c2()};
    };
    return key(a) < key(b);
  });
  return front;
}

std::vector<ParetoPoint> evaluate_candidates(const PosteriorProbMatrix& matrix,
                                             std::span<const LossParams> candidates) {
  std::vector<ParetoPoint> points;
  points.reserve(candidates.size());
  for (const LossParams& c : candidates) points.push_back({c, ocs_for_loss(matrix, c)});
  return points;
}

std::vector<ParetoPoint> pareto_front(const PosteriorProbMatrix& matrix, int num_candidates,
                                      RngStream& rng) {
  if (num_candidates < 2) throw ValidationError("pareto_front: need at least 2 candidates");
  const std::vector<LossParams> candidates = sample_loss_simplex(num_candidates, rng);
  return non_dominated(evaluate_candidates(matrix, candidates));
}

std::vector<SweepRow> sample_size_sweep(const Scenario& scenario_template,
                                        std::span<const int> sizes, const LossParams& c,
                                        std::int64_t n_replicates, std::uint64_t seed,
                                        int threads, double max_mcmc_iterations) {
  if (sizes.empty()) throw ValidationError("sample_size_sweep: no sample sizes given");
  for (int s : sizes) {
    if (s < 1) throw ValidationError("sample_size_sweep: sizes must be positive");
  }
  if (const auto* h = std::get_if<HierScenario>(&scenario_template)) {
    const double work = static_cast<double>(n_replicates) * h->mcmc.chains *
                        h->mcmc.iterations * static_cast<double>(sizes.size());
    if (work > max_mcmc_iterations) {
      throw CapacityError("sample_size_sweep: " + std::to_string(work) +
                          " MCMC iterations exceed the budget of " +
                          std::to_string(max_mcmc_iterations));
    }
  }
  std::vector<SweepRow> out;
  for (int s : sizes) {
    const Scenario scenario = with_sample_size(scenario_template, s);
    const PosteriorProbMatrix m =
        build_matrix(scenario, n_replicates, derive_seed(seed, static_cast<std::uint64_t>(s)),
                     threads);
    out.push_back({s, ocs_for_loss(m, c)});
  }
  return out;
}

EngineCounters engine_counters() noexcept {
  return {g_matrix_builds.load(), g_analyses.load()};
}

void reset_engine_counters() noexcept {
  g_matrix_builds.store(0);
  g_analyses.store(0);
}

}  // namespace pilot
