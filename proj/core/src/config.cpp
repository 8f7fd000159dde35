#include "pilot/config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "pilot/error.hpp"

#ifndef PILOT_VERSION
#define PILOT_VERSION "dev"
#endif

namespace pilot {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.contains(key)) throw ValidationError(path + ": unknown key '" + key + "'");
  }
}

double get_number(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw ValidationError(path + ": missing '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(path + "." + key + ": expected a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const char* key, double fallback, const std::string& path) {
  return obj.contains(key) ? get_number(obj, key, path) : fallback;
}

std::int64_t get_int(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw ValidationError(path + ": missing '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ValidationError(path + "." + key + ": expected an integer");
  return v.get<std::int64_t>();
}

std::int64_t get_int_or(const json& obj, const char* key, std::int64_t fallback,
                        const std::string& path) {
  return obj.contains(key) ? get_int(obj, key, path) : fallback;
}

template <class T>
T dist_as(const json& j, const std::string& path) {
  const DistSpec d = dist_from_json(j, path);
  if (const T* t = std::get_if<T>(&d)) return *t;
  throw ValidationError(path + ": distribution family not allowed here");
}

BetaDist beta_or(const json& obj, const char* key, BetaDist fallback, const std::string& path) {
  return obj.contains(key) ? dist_as<BetaDist>(obj.at(key), path + "." + key) : fallback;
}

json info_to_json(const InfoRegion& r) {
  return {{"floor", r.floor},
          {"amber_to", r.amber_to},
          {"red_intercept", r.red_intercept},
          {"green_intercept", r.green_intercept},
          {"slope", r.slope}};
}

json eff_to_json(const EffRegion& r) {
  return {{"floor", r.floor},
          {"amber_to", r.amber_to},
          {"red_intercept", r.red_intercept},
          {"green_intercept", r.green_intercept},
          {"slope", r.slope}};
}

template <class Region>
Region region_from_json(const json& j, Region r, const std::string& path) {
  check_keys(j, {"floor", "amber_to", "red_intercept", "green_intercept", "slope"}, path);
  r.floor = get_number_or(j, "floor", r.floor, path);
  r.amber_to = get_number_or(j, "amber_to", r.amber_to, path);
  r.red_intercept = get_number_or(j, "red_intercept", r.red_intercept, path);
  r.green_intercept = get_number_or(j, "green_intercept", r.green_intercept, path);
  r.slope = get_number_or(j, "slope", r.slope, path);
  return r;
}

json cluster_prior_to_json(const ClusterSizePrior& c) {
  if (const auto* nig = std::get_if<NormalInverseGammaDist>(&c)) return dist_to_json(*nig);
  const auto& ind = std::get<IndependentClusterPrior>(c);
  return {{"mean", dist_to_json(ind.mean)}, {"variance", dist_to_json(ind.variance)}};
}

ClusterSizePrior cluster_prior_from_json(const json& j, const std::string& path) {
  if (j.is_object() && j.contains("dist")) return dist_as<NormalInverseGammaDist>(j, path);
  check_keys(j, {"mean", "variance"}, path);
  if (!j.contains("mean") || !j.contains("variance")) {
    throw ValidationError(path + ": needs either a nig distribution or {mean, variance}");
  }
  return IndependentClusterPrior{dist_as<NormalDist>(j.at("mean"), path + ".mean"),
                                 dist_as<InverseGammaDist>(j.at("variance"), path + ".variance")};
}

HierDesignPrior hier_design_from_json(const json& j, const std::string& path) {
  check_keys(j, {"cluster", "p_f", "p_a", "mu", "sigma2_w", "rho"}, path);
  HierDesignPrior d;
  if (j.contains("cluster")) {
    d.cluster = dist_as<NormalInverseGammaDist>(j.at("cluster"), path + ".cluster");
  }
  d.p_f = beta_or(j, "p_f", d.p_f, path);
  d.p_a = beta_or(j, "p_a", d.p_a, path);
  if (j.contains("mu")) d.mu = dist_as<NormalDist>(j.at("mu"), path + ".mu");
  if (j.contains("sigma2_w")) {
    d.sigma2_w = dist_as<InverseGammaDist>(j.at("sigma2_w"), path + ".sigma2_w");
  }
  d.rho = beta_or(j, "rho", d.rho, path);
  d.validate();
  return d;
}

AnalysisPriorSpec analysis_from_json(const json& j, const HierDesignPrior& design,
                                     const std::string& path) {
  if (j.is_string()) return make_analysis_prior(preset_from_string(j.get<std::string>()), design);
  check_keys(j, {"preset", "cluster", "p_f", "p_a", "mu", "sigma2_w", "rho"}, path);
  // Explicit components override the preset (WI when none is named).
  AnalysisPriorSpec spec = make_analysis_prior(AnalysisPreset::WI, design);
  bool overridden = false;
  if (j.contains("preset")) {
    if (!j.at("preset").is_string()) throw ValidationError(path + ".preset: expected a string");
    spec = make_analysis_prior(preset_from_string(j.at("preset").get<std::string>()), design);
  }
  if (j.contains("cluster")) {
    spec.cluster = cluster_prior_from_json(j.at("cluster"), path + ".cluster");
    overridden = true;
  }
  if (j.contains("p_f")) {
    spec.p_f = dist_as<BetaDist>(j.at("p_f"), path + ".p_f");
    overridden = true;
  }
  if (j.contains("p_a")) {
    spec.p_a = dist_as<BetaDist>(j.at("p_a"), path + ".p_a");
    overridden = true;
  }
  if (j.contains("mu")) {
    spec.mu = dist_as<NormalDist>(j.at("mu"), path + ".mu");
    overridden = true;
  }
  if (j.contains("sigma2_w")) {
    spec.sigma2_w = dist_as<InverseGammaDist>(j.at("sigma2_w"), path + ".sigma2_w");
    overridden = true;
  }
  if (j.contains("rho")) {
    spec.rho = dist_as<BetaDist>(j.at("rho"), path + ".rho");
    overridden = true;
  }
  if (overridden) spec.name = "custom";
  spec.validate();
  return spec;
}

McmcConfig mcmc_from_json(const json& j, const std::string& path) {
  check_keys(j,
             {"chains", "iterations", "burnin", "step_log_sigma2_w", "step_logit_rho", "adapt",
              "rhat_threshold"},
             path);
  McmcConfig m;
  m.chains = static_cast<int>(get_int_or(j, "chains", m.chains, path));
  m.iterations = static_cast<int>(get_int_or(j, "iterations", m.iterations, path));
  m.burnin = static_cast<int>(get_int_or(j, "burnin", m.burnin, path));
  m.step_log_sigma2_w = get_number_or(j, "step_log_sigma2_w", m.step_log_sigma2_w, path);
  m.step_logit_rho = get_number_or(j, "step_logit_rho", m.step_logit_rho, path);
  if (j.contains("adapt")) {
    if (!j.at("adapt").is_boolean()) throw ValidationError(path + ".adapt: expected a boolean");
    m.adapt = j.at("adapt").get<bool>();
  }
  m.rhat_threshold = get_number_or(j, "rhat_threshold", m.rhat_threshold, path);
  m.validate();
  return m;
}

Scenario conjugate_from_json(const json& doc) {
  ConjugateScenario s;
  s.n_per_arm = static_cast<int>(get_int(doc, "n_per_arm", "config"));
  if (doc.contains("design_prior")) {
    const json& d = doc.at("design_prior");
    check_keys(d, {"p_f", "p_a"}, "design_prior");
    s.design_prior_f = beta_or(d, "p_f", s.design_prior_f, "design_prior");
    s.design_prior_a = beta_or(d, "p_a", s.design_prior_a, "design_prior");
  }
  if (doc.contains("analysis_prior")) {
    const json& a = doc.at("analysis_prior");
    check_keys(a, {"p_f", "p_a"}, "analysis_prior");
    s.analysis_prior_f = beta_or(a, "p_f", s.analysis_prior_f, "analysis_prior");
    s.analysis_prior_a = beta_or(a, "p_a", s.analysis_prior_a, "analysis_prior");
  }
  if (doc.contains("partition")) {
    const json& p = doc.at("partition");
    check_keys(p, {"followup_threshold", "adherence_threshold"}, "partition");
    s.followup_threshold =
        get_number_or(p, "followup_threshold", s.followup_threshold, "partition");
    s.adherence_threshold =
        get_number_or(p, "adherence_threshold", s.adherence_threshold, "partition");
  }
  if (doc.contains("mcmc")) throw ValidationError("config: 'mcmc' applies to hierarchical models only");
  if (doc.contains("k")) throw ValidationError("config: conjugate models use 'n_per_arm', not 'k'");
  s.validate();
  return s;
}

Scenario hierarchical_from_json(const json& doc) {
  HierScenario s;
  s.k = static_cast<int>(get_int(doc, "k", "config"));
  if (doc.contains("n_per_arm")) {
    throw ValidationError("config: hierarchical models use 'k', not 'n_per_arm'");
  }
  if (doc.contains("design_prior")) s.design = hier_design_from_json(doc.at("design_prior"), "design_prior");
  s.analysis = doc.contains("analysis_prior")
                   ? analysis_from_json(doc.at("analysis_prior"), s.design, "analysis_prior")
                   : make_analysis_prior(AnalysisPreset::WI, s.design);
  if (doc.contains("partition")) {
    const json& p = doc.at("partition");
    check_keys(p, {"info", "eff"}, "partition");
    if (p.contains("info")) s.partition.info = region_from_json(p.at("info"), s.partition.info, "partition.info");
    if (p.contains("eff")) s.partition.eff = region_from_json(p.at("eff"), s.partition.eff, "partition.eff");
  }
  if (doc.contains("mcmc")) s.mcmc = mcmc_from_json(doc.at("mcmc"), "mcmc");
  s.validate();
  return s;
}

}  // namespace

json dist_to_json(const DistSpec& d) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BetaDist>) {
          return {{"dist", "beta"}, {"alpha", v.alpha}, {"beta", v.beta}};
        } else if constexpr (std::is_same_v<T, BinomialDist>) {
          return {{"dist", "binomial"}, {"n", v.n}, {"p", v.p}};
        } else if constexpr (std::is_same_v<T, NormalDist>) {
          return {{"dist", "normal"}, {"mean", v.mean}, {"sd", v.sd}};
        } else if constexpr (std::is_same_v<T, InverseGammaDist>) {
          return {{"dist", "inv_gamma"}, {"shape", v.shape}, {"rate", v.rate}};
        } else {
          return {{"dist", "nig"},
                  {"mu0", v.mu0},
                  {"nu0", v.nu0},
                  {"alpha0", v.alpha0},
                  {"beta0", v.beta0}};
        }
      },
      d);
}

DistSpec dist_from_json(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("dist") || !j.at("dist").is_string()) {
    throw ValidationError(path + ": expected {\"dist\": <family>, ...}");
  }
  const std::string family = j.at("dist").get<std::string>();
  DistSpec d;
  if (family == "beta") {
    check_keys(j, {"dist", "alpha", "beta"}, path);
    d = BetaDist{get_number(j, "alpha", path), get_number(j, "beta", path)};
  } else if (family == "binomial") {
    check_keys(j, {"dist", "n", "p"}, path);
    d = BinomialDist{get_int(j, "n", path), get_number(j, "p", path)};
  } else if (family == "normal") {
    check_keys(j, {"dist", "mean", "sd"}, path);
    d = NormalDist{get_number(j, "mean", path), get_number(j, "sd", path)};
  } else if (family == "inv_gamma") {
    check_keys(j, {"dist", "shape", "rate"}, path);
    d = InverseGammaDist{get_number(j, "shape", path), get_number(j, "rate", path)};
  } else if (family == "nig") {
    check_keys(j, {"dist", "mu0", "nu0", "alpha0", "beta0"}, path);
    d = NormalInverseGammaDist{get_number(j, "mu0", path), get_number(j, "nu0", path),
                               get_number(j, "alpha0", path), get_number(j, "beta0", path)};
  } else {
    throw ValidationError(path + ": unknown distribution '" + family + "'");
  }
  validate(d);
  return d;
}

RunConfig parse_config(const json& doc) {
  check_keys(doc,
             {"model", "n_per_arm", "k", "design_prior", "analysis_prior", "partition", "mcmc",
              "N", "seed", "threads", "max_nonconverged_fraction"},
             "config");
  if (!doc.contains("model") || !doc.at("model").is_string()) {
    throw ValidationError("config: 'model' must be \"conjugate\" or \"hierarchical\"");
  }
  const std::string model = doc.at("model").get<std::string>();
  RunConfig rc;
  if (model == "conjugate") {
    rc.scenario = conjugate_from_json(doc);
  } else if (model == "hierarchical") {
    rc.scenario = hierarchical_from_json(doc);
  } else {
    throw ValidationError("config: unknown model '" + model + "'");
  }
  rc.n_replicates = get_int_or(doc, "N", rc.n_replicates, "config");
  if (rc.n_replicates < 1) throw ValidationError("config: N must be at least 1");
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw ValidationError("config.seed: expected a non-negative integer");
    }
    rc.seed = s.get<std::uint64_t>();
  }
  rc.threads = static_cast<int>(get_int_or(doc, "threads", 0, "config"));
  if (rc.threads < 0) throw ValidationError("config.threads must be non-negative");
  rc.max_nonconverged_fraction =
      get_number_or(doc, "max_nonconverged_fraction", 1.0, "config");
  if (!(rc.max_nonconverged_fraction >= 0.0 && rc.max_nonconverged_fraction <= 1.0)) {
    throw ValidationError("config.max_nonconverged_fraction must lie in [0, 1]");
  }
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json scenario_to_json(const Scenario& s) {
  if (const auto* c = std::get_if<ConjugateScenario>(&s)) {
    return {{"model", "conjugate"},
            {"n_per_arm", c->n_per_arm},
            {"design_prior",
             {{"p_f", dist_to_json(c->design_prior_f)}, {"p_a", dist_to_json(c->design_prior_a)}}},
            {"analysis_prior",
             {{"p_f", dist_to_json(c->analysis_prior_f)},
              {"p_a", dist_to_json(c->analysis_prior_a)}}},
            {"partition",
             {{"followup_threshold", c->followup_threshold},
              {"adherence_threshold", c->adherence_threshold}}}};
  }
  const auto& h = std::get<HierScenario>(s);
  const HierDesignPrior& d = h.design;
  const AnalysisPriorSpec& a = h.analysis;
  return {{"model", "hierarchical"},
          {"k", h.k},
          {"design_prior",
           {{"cluster", dist_to_json(d.cluster)},
            {"p_f", dist_to_json(d.p_f)},
            {"p_a", dist_to_json(d.p_a)},
            {"mu", dist_to_json(d.mu)},
            {"sigma2_w", dist_to_json(d.sigma2_w)},
            {"rho", dist_to_json(d.rho)}}},
          {"analysis_prior",
           {{"name", a.name},
            {"cluster", cluster_prior_to_json(a.cluster)},
            {"p_f", dist_to_json(a.p_f)},
            {"p_a", dist_to_json(a.p_a)},
            {"mu", dist_to_json(a.mu)},
            {"sigma2_w", dist_to_json(a.sigma2_w)},
            {"rho", dist_to_json(a.rho)}}},
          {"partition", {{"info", info_to_json(h.partition.info)}, {"eff", eff_to_json(h.partition.eff)}}},
          {"mcmc",
           {{"chains", h.mcmc.chains},
            {"iterations", h.mcmc.iterations},
            {"burnin", h.mcmc.burnin},
            {"step_log_sigma2_w", h.mcmc.step_log_sigma2_w},
            {"step_logit_rho", h.mcmc.step_logit_rho},
            {"adapt", h.mcmc.adapt},
            {"rhat_threshold", h.mcmc.rhat_threshold}}}};
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string scenario_fingerprint(const Scenario& s) {
  return fnv1a_hex(scenario_to_json(s).dump());
}

const char* engine_version() noexcept { return PILOT_VERSION; }

}  // namespace pilot
