// Acceptance suite. Prints one PASS/FAIL line per criterion; `--only N`
// restricts the run to criterion N. Exit status is non-zero if any selected
// criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "pilot/conjugate.hpp"
#include "pilot/decision.hpp"
#include "pilot/elicitation.hpp"
#include "pilot/hierarchical.hpp"
#include "pilot/matrix_io.hpp"
#include "pilot/mcmc.hpp"
#include "pilot/oc_engine.hpp"
#include "stat_checks.hpp"

#ifdef PILOT_HAVE_CLI
#include "cli.hpp"
#endif

namespace {

using namespace pilot;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "MISS ") + what;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LossParams random_simplex(RngStream& rng) {
  const double a = -std::log(rng.uniform()), b = -std::log(rng.uniform()),
               c = -std::log(rng.uniform());
  const double s = a + b + c;
  return validate_loss(a / s, b / s, c / s);
}

// 1 -------------------------------------------------------------------------
Outcome criterion1() {
  Outcome o;
  RngStream rng(101, 0);
  double worst_sum = 0.0, worst_eq = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double p1 = rng.uniform(), p2 = rng.uniform();
    const LossParams c = loss_from_indifference({p1, p2}).loss;
    worst_sum = std::max(worst_sum, std::fabs(c.c1() + c.c2() + c.c3() - 1.0));
    worst_eq = std::max({worst_eq, std::fabs(p1 * (c.c1() + c.c3()) - c.c1()),
                         std::fabs(p2 * (c.c1() + c.c2()) - c.c1())});
  }
  o.check(worst_sum <= 1e-9, fmt("max |sum-1| = %.2e", worst_sum));
  o.check(worst_eq <= 1e-9, fmt("max indifference residual = %.2e", worst_eq));
  const LossParams t = loss_from_indifference({0.5, 0.5}).loss;
  const double dev = std::max({std::fabs(t.c1() - 1.0 / 3), std::fabs(t.c2() - 1.0 / 3),
                               std::fabs(t.c3() - 1.0 / 3)});
  o.check(dev <= 1e-12, fmt("(0.5,0.5) deviation from thirds = %.2e", dev));
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome criterion2() {
  Outcome o;
  RngStream rng(102, 0);
  using D = Decision;
  using H = HypothesisLabel;
  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    const LossParams c = random_simplex(rng);
    const double c1 = c.c1(), c2 = c.c2(), c3 = c.c3();
    const std::array<std::tuple<D, H, double>, 9> table = {{
        {D::r, H::R, 0.0}, {D::r, H::A, c2}, {D::r, H::G, c2},
        {D::a, H::R, c1 + c3}, {D::a, H::A, 0.0}, {D::a, H::G, c3},
        {D::g, H::R, c1}, {D::g, H::A, c1 + c2}, {D::g, H::G, 0.0},
    }};
    for (const auto& [d, h, want] : table) mismatches += std::fabs(loss(d, h, c) - want) > 1e-15;
  }
  o.check(mismatches == 0, fmt("%d of 900 cells differ from the loss table", mismatches));
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome criterion3() {
  Outcome o;
  const ConjugateScenario s;
  RngStream rng(103, 0);
  const int n = 1'000'000;
  int g = 0;
  for (int i = 0; i < n; ++i) g += classify_conjugate(draw_conjugate_prior(s, rng), s) == HypothesisLabel::G;
  const double frac = static_cast<double>(g) / n;
  o.check(std::fabs(frac - 0.28) <= 0.005, fmt("Pr[G] = %.5f (target 0.28 +/- 0.005)", frac));
  return o;
}

// 4 -------------------------------------------------------------------------
Outcome criterion4() {
  Outcome o;
  const ConjugateScenario s;
  const OCReport exact = exact_ocs(s, 0.2);
  const PosteriorProbMatrix m = build_matrix(s, 100000, 104, 0);
  const OCReport mc = ocs_for_loss(m, binary_loss(0.2));
  o.check(std::fabs(exact.oc1 - 0.19) <= 0.01, fmt("exact OC1 = %.4f", exact.oc1));
  o.check(std::fabs(exact.oc2 - 0.05) <= 0.01, fmt("exact OC2 = %.4f", exact.oc2));
  o.check(std::fabs(mc.oc1 - 0.19) <= 0.01, fmt("MC OC1 = %.4f (se %.4f)", mc.oc1, mc.se1));
  o.check(std::fabs(mc.oc2 - 0.05) <= 0.01, fmt("MC OC2 = %.4f (se %.4f)", mc.oc2, mc.se2));
  // The exact path carries no Monte Carlo error, so the combined SE is the MC one.
  o.check(std::fabs(mc.oc1 - exact.oc1) <= 3 * mc.se1 && std::fabs(mc.oc2 - exact.oc2) <= 3 * mc.se2,
          fmt("paths agree: |dOC1| = %.2f SE, |dOC2| = %.2f SE",
              std::fabs(mc.oc1 - exact.oc1) / mc.se1, std::fabs(mc.oc2 - exact.oc2) / mc.se2));
  return o;
}

// 5 -------------------------------------------------------------------------
Outcome criterion5() {
  Outcome o;
  const ConjugateScenario s;
  const PosteriorProbMatrix m = build_matrix(s, 100000, 105, 0);
  int mc_violations = 0, exact_violations = 0;
  OCReport prev_mc{}, prev_exact{};
  for (int i = 0; i <= 50; ++i) {
    const double c1 = i / 50.0;
    const OCReport mc = ocs_for_loss(m, binary_loss(c1));
    const OCReport ex = exact_ocs(s, c1, 100);
    if (i > 0) {
      const double se1 = std::hypot(mc.se1, prev_mc.se1), se2 = std::hypot(mc.se2, prev_mc.se2);
      mc_violations += mc.oc1 > prev_mc.oc1 + 2 * se1;
      mc_violations += mc.oc2 < prev_mc.oc2 - 2 * se2;
      exact_violations += ex.oc1 > prev_exact.oc1 + 1e-12;
      exact_violations += ex.oc2 < prev_exact.oc2 - 1e-12;
    }
    prev_mc = mc;
    prev_exact = ex;
  }
  o.check(mc_violations == 0, fmt("%d monotonicity violations on the MC curve", mc_violations));
  o.check(exact_violations == 0, fmt("%d on the exact curve", exact_violations));
  return o;
}

// 6 -------------------------------------------------------------------------
std::array<std::array<double, 3>, 3> reach_prior_proportions(const HierDesignPrior& prior, int n,
                                                             std::uint64_t seed) {
  const HypothesisPartition part;
  RngStream rng(seed, 0);
  std::array<std::array<double, 3>, 3> f{};
  for (int i = 0; i < n; ++i) {
    const HierParams p = draw_design_prior(prior, rng);
    const auto hi = classify_info(p.p_f, p.mu_c, part);
    const auto he = classify_eff(p.p_a, p.mu, part);
    f[0][static_cast<int>(hi)] += 1.0 / n;
    f[1][static_cast<int>(he)] += 1.0 / n;
    f[2][static_cast<int>(combine_labels(hi, he))] += 1.0 / n;
  }
  return f;
}

Outcome criterion6() {
  Outcome o;
  const auto f = reach_prior_proportions(HierDesignPrior{}, 100000, 106);
  const std::array<std::array<double, 3>, 3> target = {
      {{0.354, 0.517, 0.129}, {0.234, 0.470, 0.296}, {0.507, 0.458, 0.035}}};
  const char* names[] = {"info", "efficacy", "combined"};
  for (int b = 0; b < 3; ++b) {
    double dev = 0.0;
    for (int h = 0; h < 3; ++h) dev = std::max(dev, std::fabs(f[b][h] - target[b][h]));
    o.check(dev <= 0.03, fmt("%s (%.3f, %.3f, %.3f) vs (%.3f, %.3f, %.3f)", names[b], f[b][0], f[b][1],
                             f[b][2], target[b][0], target[b][1], target[b][2]));
  }
  if (!o.pass) {
    // Diagnostic only: the published efficacy split is reproduced when the
    // efficacy prior has sd 0.1 rather than 0.25.
    HierDesignPrior alt;
    alt.mu.sd = 0.1;
    const auto g = reach_prior_proportions(alt, 100000, 106);
    o.detail += fmt(" | diagnostic with mu sd 0.1: efficacy (%.3f, %.3f, %.3f), combined (%.3f, %.3f, %.3f)",
                    g[1][0], g[1][1], g[1][2], g[2][0], g[2][1], g[2][2]);
  }
  return o;
}

// 7 -------------------------------------------------------------------------
struct Mom {
  double mean, sd;
};

template <class Fn>
Mom draw_moments(const PosteriorSample& s, Fn&& get) {
  double a = 0.0, b = 0.0;
  for (const auto& p : s.draws) {
    a += get(p);
    b += get(p) * get(p);
  }
  const double n = static_cast<double>(s.draws.size());
  return {a / n, std::sqrt(std::max(0.0, b / n - a * a / (n * n)))};
}

Outcome criterion7() {
  Outcome o;
  const HierDesignPrior design;
  // (a) conjugate blocks on 20 datasets.
  {
    const AnalysisPriorSpec wi = make_analysis_prior(AnalysisPreset::WI, design);
    const AnalysisPriorSpec ina = make_analysis_prior(AnalysisPreset::INA, design);
    const AnalysisPriorSpec nig = design_as_analysis_prior(design);
    McmcConfig mc;
    mc.iterations = 2000;
    mc.burnin = 1000;
    double worst_z = 0.0, worst_sd = 0.0;
    for (int d = 0; d < 20; ++d) {
      RngStream rng(107, d);
      const HierParams theta = draw_design_prior(design, rng);
      const HierDataset data = simulate_trial(theta, 6, rng);
      const double f = data.total_followed(), m = data.total_residents();
      const double a = data.adherent_clusters(), k = data.intervention_clusters();
      const double sqrt_n = std::sqrt(static_cast<double>(mc.total_draws()));
      auto beta_check = [&](const Mom& got, double al, double be) {
        const double mean = al / (al + be);
        const double sd = std::sqrt(al * be / ((al + be) * (al + be) * (al + be + 1)));
        worst_z = std::max(worst_z, std::fabs(got.mean - mean) / (sd / sqrt_n));
        worst_sd = std::max(worst_sd, std::fabs(got.sd / sd - 1.0));
      };
      const PosteriorSample s1 = posterior_sample(data, wi, mc, RngStream(207, d));
      beta_check(draw_moments(s1, [](const HierParams& p) { return p.p_f; }), 1 + f, 1 + m - f);
      const PosteriorSample s2 = posterior_sample(data, ina, mc, RngStream(307, d));
      beta_check(draw_moments(s2, [](const HierParams& p) { return p.p_a; }), ina.p_a.alpha + a,
                 ina.p_a.beta + k - a);
      // Normal-inverse-gamma cluster-size block.
      const PosteriorSample s3 = posterior_sample(data, nig, mc, RngStream(407, d));
      double sum = 0.0;
      for (const auto& c : data.clusters) sum += c.size;
      const double n = static_cast<double>(data.clusters.size());
      const double mbar = sum / n;
      double ss = 0.0;
      for (const auto& c : data.clusters) ss += (c.size - mbar) * (c.size - mbar);
      const auto& g = design.cluster;
      const double nu_n = g.nu0 + n, mu_n = (g.nu0 * g.mu0 + n * mbar) / nu_n;
      const double al = g.alpha0 + n / 2;
      const double be = g.beta0 + ss / 2 + g.nu0 * n * (mbar - g.mu0) * (mbar - g.mu0) / (2 * nu_n);
      const double sd_mu = std::sqrt(be / (al * nu_n) * al / (al - 1));
      const double e_s2 = be / (al - 1), sd_s2 = e_s2 / std::sqrt(al - 2);
      const Mom mu_c = draw_moments(s3, [](const HierParams& p) { return p.mu_c; });
      const Mom var_c = draw_moments(s3, [](const HierParams& p) { return p.sigma2_c; });
      worst_z = std::max({worst_z, std::fabs(mu_c.mean - mu_n) / (sd_mu / sqrt_n),
                          std::fabs(var_c.mean - e_s2) / (sd_s2 / sqrt_n)});
      worst_sd = std::max({worst_sd, std::fabs(mu_c.sd / sd_mu - 1.0),
                           std::fabs(var_c.sd / sd_s2 - 1.0)});
    }
    o.check(worst_z <= 4.5, fmt("(a) worst mean deviation %.2f MC SE over 20 datasets", worst_z));
    o.check(worst_sd <= 0.08, fmt("(a) worst relative sd error %.3f", worst_sd));
  }
  // (b) simulation-based calibration with the design prior as analysis prior.
  {
    const AnalysisPriorSpec prior = design_as_analysis_prior(design);
    McmcConfig mc;
    mc.iterations = 3000;
    mc.burnin = 1000;
    const int reps = 200, thin_to = 99, bins = 10;
    std::array<std::vector<double>, 4> counts;
    for (auto& c : counts) c.assign(bins, 0.0);
    for (int r = 0; r < reps; ++r) {
      RngStream rng(117, r);
      const HierParams theta = draw_design_prior(design, rng);
      const HierDataset data = simulate_trial(theta, 6, rng);
      const PosteriorSample s = posterior_sample(data, prior, mc, RngStream(217, r));
      const std::size_t stride = s.draws.size() / thin_to;
      const double truth[4] = {theta.mu, theta.p_f, theta.p_a, theta.mu_c};
      for (int q = 0; q < 4; ++q) {
        int rank = 0;
        for (int i = 0; i < thin_to; ++i) {
          const HierParams& d = s.draws[i * stride];
          const double v[4] = {d.mu, d.p_f, d.p_a, d.mu_c};
          rank += v[q] < truth[q];
        }
        counts[q][rank * bins / (thin_to + 1)] += 1.0;
      }
    }
    const std::vector<double> expected(bins, static_cast<double>(reps) / bins);
    const char* names[] = {"mu", "p_f", "p_a", "mu_c"};
    for (int q = 0; q < 4; ++q) {
      const double p = pilot::testing::chi_square_pvalue(counts[q], expected, 0.0);
      o.check(p > 0.01, fmt("(b) SBC %s rank chi-square p = %.3f", names[q], p));
    }
  }
  return o;
}

// 8 -------------------------------------------------------------------------
Outcome criterion8() {
  Outcome o;
  HierScenario s;
  s.k = 6;
  s.mcmc.iterations = 1000;  // 4 chains x 500 retained = 2000 draws
  s.mcmc.burnin = 500;
  const PosteriorProbMatrix m = build_matrix(s, 500, 108, 0);
  o.check(m.rows.size() == 500, fmt("%zu replicates, %lld non-converged", m.rows.size(),
                                    static_cast<long long>(m.nonconverged())));
  RngStream rng(108, 1);
  const auto front = pareto_front(m, 254, rng);
  const int dominated = 254 - static_cast<int>(front.size());
  o.check(dominated > 0, fmt("%d of 254 candidates dominated, front size %zu", dominated, front.size()));
  bool pairwise = true;
  for (const auto& a : front)
    for (const auto& b : front) pairwise = pairwise && !dominates(a.report, b.report);
  o.check(pairwise, "front pairwise non-dominated");
  return o;
}

// 9 -------------------------------------------------------------------------
#ifdef PILOT_HAVE_CLI
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion9() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "pilot_acceptance_9";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string tiga = std::string(PILOT_CONFIG_DIR) + "/tiga_cub.json";
  const std::string reach = std::string(PILOT_CONFIG_DIR) + "/reach.json";
  std::vector<std::string> reference;
  for (const char* threads : {"1", "4", "8"}) {
    const fs::path d = dir / threads;
    fs::create_directories(d);
    auto p = [&](const char* name) { return (d / name).string(); };
    const std::vector<std::vector<std::string>> cmds = {
        {"elicit", "--p1", "0.3", "--p2", "0.6", "--out", p("elicit.csv")},
        {"matrix", "--config", tiga, "--out", p("tiga.csv")},
        {"ocs", "--matrix", p("tiga.csv"), "--c1", "0.2", "--out", p("ocs.csv")},
        {"pareto", "--matrix", p("tiga.csv"), "--candidates", "254", "--out", p("pareto.csv")},
        {"sweep", "--config", tiga, "--sizes", "10:50:10", "--c1", "0.36", "--out", p("sweep.csv")},
        {"matrix", "--config", reach, "--n", "40", "--out", p("reach.csv")},
        {"pareto", "--matrix", p("reach.csv"), "--out", p("reach_pareto.csv")},
        {"sweep", "--config", reach, "--n", "12", "--sizes", "6,12", "--c", "0.07,0.9,0.03",
         "--out", p("reach_sweep.csv")},
    };
    std::vector<std::string> outputs;
    for (auto cmd : cmds) {
      cmd.insert(cmd.begin() + 1, {"--threads", threads});
      std::ostringstream out, err;
      const int code = pilot::cli::run(cmd, out, err);
      if (code != 0) o.check(false, "'" + cmd[0] + "' exited " + std::to_string(code) + ": " + err.str());
      outputs.push_back(slurp(cmd.back()));
    }
    if (reference.empty()) {
      reference = outputs;
    } else {
      int differing = 0;
      for (std::size_t i = 0; i < outputs.size(); ++i) differing += outputs[i] != reference[i];
      o.check(differing == 0, fmt("%d of %zu outputs differ at %s threads", differing, outputs.size(), threads));
    }
  }
  fs::remove_all(dir);
  return o;
}
#else
Outcome criterion9() {
  Outcome o;
  o.check(false, "built without the command-line tool");
  return o;
}
#endif

// 10 ------------------------------------------------------------------------
Outcome criterion10() {
  Outcome o;
  HierScenario s;
  s.mcmc.iterations = 600;
  s.mcmc.burnin = 300;
  const fs::path path = fs::temp_directory_path() / "pilot_acceptance_10.csv";
  reset_engine_counters();
  save_matrix(path.string(), build_matrix(s, 300, 110, 0));

  const auto t0 = std::chrono::steady_clock::now();
  const PosteriorProbMatrix cached = load_matrix(path.string());
  RngStream rng(110, 1);
  const std::vector<LossParams> candidates = sample_loss_simplex(254, rng);
  const auto points = evaluate_candidates(cached, candidates);
  const auto front = non_dominated(points);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const EngineCounters c = engine_counters();
  fs::remove(path);
  o.check(c.matrix_builds == 1, fmt("%ld matrix construction(s) for 254 evaluations", c.matrix_builds));
  o.check(c.analyses == 300, fmt("%ld posterior analyses for 300 replicates", c.analyses));
  o.check(points.size() == 254, fmt("%zu reports, front size %zu", points.size(), front.size()));
  o.check(secs < 60.0, fmt("evaluation on the cached matrix took %.3f s", secs));
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "elicitation closed form", 1, criterion1},
    {2, "loss table reproduction", 1, criterion2},
    {3, "TIGA prior mass of G", 10, criterion3},
    {4, "TIGA operating characteristics at n=30, c1=0.2", 300, criterion4},
    {5, "TIGA OC curve shape in c1", 600, criterion5},
    {6, "REACH prior hypothesis proportions", 30, criterion6},
    {7, "MCMC correctness (conjugate blocks and SBC)", 1800, criterion7},
    {8, "desk-scale REACH pipeline and Pareto front", 7200, criterion8},
    {9, "byte-identical outputs at 1, 4 and 8 threads", 600, criterion9},
    {10, "matrix reuse across 254 loss vectors", 60, criterion10},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  int failures = 0, ran = 0;
  for (const Criterion& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) out.check(false, fmt("over the %.0f s budget", c.budget_s));
    failures += !out.pass;
    std::printf("[%s] criterion %d: %s (%.2f s) -- %s\n", out.pass ? "PASS" : "FAIL", c.id, c.title,
                secs, out.detail.c_str());
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
