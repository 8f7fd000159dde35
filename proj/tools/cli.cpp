#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pilot/config.hpp"
#include "pilot/elicitation.hpp"
#include "pilot/error.hpp"
#include "pilot/matrix_io.hpp"
#include "pilot/oc_engine.hpp"

namespace pilot::cli {

namespace {

using nlohmann::json;

constexpr std::uint64_t kParetoTag = 0x706172657430ull;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out;
  std::optional<std::int64_t> n;
  std::optional<double> max_nonconverged;

  std::string matrix;
  std::string c;
  std::optional<double> c1;
  std::optional<double> p1;
  std::optional<double> p2;
  int candidates = 254;
  std::string sizes;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a_hex(ss.str());
}

// Manifest for `output`, written next to it as <output>.manifest.json.
struct Manifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string started = utc_now();
  json extra = json::object();
  std::vector<std::string> inputs;

  void write(const std::string& output) const {
    json inputs_json = json::array();
    for (const auto& p : inputs) inputs_json.push_back({{"path", p}, {"fnv1a", file_hash(p)}});
    json m = {{"command", command},
              {"config_hash", config_hash},
              {"engine_version", engine_version()},
              {"seed", seed},
              {"threads", threads},
              {"started_at", started},
              {"finished_at", utc_now()},
              {"inputs", inputs_json},
              {"outputs", json::array({{{"path", output}, {"fnv1a", file_hash(output)}}})}};
    for (const auto& [k, v] : extra.items()) m[k] = v;
    write_file_atomic(output + ".manifest.json", m.dump(2) + "\n");
  }
};

// Writes to --out (atomically, with a manifest) or to stdout.
void emit(const Options& o, const std::string& body, std::ostream& out,
          const Manifest& manifest) {
  if (o.out.empty()) {
    out << body;
    return;
  }
  write_file_atomic(o.out, body);
  manifest.write(o.out);
}

LossParams parse_loss_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("--c: '" + item + "' is not a number");
    }
  }
  if (v.size() != 3) throw ValidationError("--c expects three comma-separated values c1,c2,c3");
  return validate_loss(v[0], v[1], v[2]);
}

LossParams loss_from_options(const Options& o, std::ostream& err) {
  const int given = (!o.c.empty()) + o.c1.has_value() + (o.p1 || o.p2);
  if (given != 1) throw ValidationError("give exactly one of --c, --c1 or --p1/--p2");
  if (!o.c.empty()) return parse_loss_list(o.c);
  if (o.c1) return binary_loss(*o.c1);
  if (!o.p1 || !o.p2) throw ValidationError("--p1 and --p2 must be given together");
  const ElicitationResult r = loss_from_indifference({*o.p1, *o.p2});
  if (r.warning) err << "warning: " << *r.warning << '\n';
  return r.loss;
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  auto to_int = [](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("--sizes: '" + s + "' is not an integer");
    }
  };
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    // lo:hi:step expands to an inclusive range.
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      sizes.push_back(to_int(item));
      continue;
    }
    const auto c2 = item.find(':', c1 + 1);
    const int lo = to_int(item.substr(0, c1));
    const int hi = to_int(item.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1));
    const int step = c2 == std::string::npos ? 1 : to_int(item.substr(c2 + 1));
    if (step <= 0 || hi < lo) throw ValidationError("--sizes: bad range '" + item + "'");
    for (int s = lo; s <= hi; s += step) sizes.push_back(s);
  }
  if (sizes.empty()) throw ValidationError("--sizes: empty size list");
  return sizes;
}

RunConfig config_from_options(const Options& o) {
  if (o.config.empty()) throw ValidationError("--config is required");
  RunConfig rc = load_config(o.config);
  if (o.seed) rc.seed = *o.seed;
  if (o.threads) rc.threads = *o.threads;
  if (o.n) rc.n_replicates = *o.n;
  if (o.max_nonconverged) rc.max_nonconverged_fraction = *o.max_nonconverged;
  if (rc.n_replicates < 1) throw ValidationError("N must be at least 1");
  if (rc.threads < 0) throw ValidationError("--threads must be non-negative");
  if (!(rc.max_nonconverged_fraction >= 0.0 && rc.max_nonconverged_fraction <= 1.0)) {
    throw ValidationError("--max-nonconverged must lie in [0, 1]");
  }
  return rc;
}

bool too_many_nonconverged(std::int64_t bad, std::int64_t total, double threshold) {
  return total > 0 && static_cast<double>(bad) / static_cast<double>(total) > threshold;
}

int nonconvergence_exit(std::int64_t bad, std::int64_t total, std::ostream& err) {
  err << "error: " << bad << " of " << total
      << " replicates did not converge, above the configured threshold\n";
  return kNonConvergence;
}

int cmd_elicit(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.p1 || !o.p2) throw ValidationError("elicit needs --p1 and --p2");
  const ElicitationResult r = loss_from_indifference({*o.p1, *o.p2});
  if (r.warning) err << "warning: " << *r.warning << '\n';
  std::ostringstream body;
  body << "c1,c2,c3\n"
       << format_double(r.loss.c1()) << ',' << format_double(r.loss.c2()) << ','
       << format_double(r.loss.c3()) << '\n';
  Manifest m;
  m.command = "elicit";
  m.extra = {{"p1", *o.p1}, {"p2", *o.p2}};
  emit(o, body.str(), out, m);
  return kOk;
}

int cmd_matrix(const Options& o, std::ostream& err) {
  if (o.out.empty()) throw ValidationError("matrix needs --out");
  const RunConfig rc = config_from_options(o);
  Manifest manifest;
  manifest.command = "matrix";
  manifest.seed = rc.seed;
  manifest.threads = resolve_threads(rc.threads);
  manifest.inputs = {o.config};
  const PosteriorProbMatrix m = build_matrix(rc.scenario, rc.n_replicates, rc.seed, rc.threads);
  save_matrix(o.out, m);
  manifest.config_hash = m.fingerprint;
  manifest.extra = {{"n_replicates", m.rows.size()}, {"n_nonconverged", m.nonconverged()}};
  manifest.write(o.out);
  if (too_many_nonconverged(m.nonconverged(), std::ssize(m.rows), rc.max_nonconverged_fraction)) {
    return nonconvergence_exit(m.nonconverged(), std::ssize(m.rows), err);
  }
  return kOk;
}

int cmd_ocs(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.matrix.empty()) throw ValidationError("ocs needs --matrix");
  const LossParams c = loss_from_options(o, err);
  const PosteriorProbMatrix m = load_matrix(o.matrix);
  const ParetoPoint point{c, ocs_for_loss(m, c)};
  std::ostringstream body;
  write_report_csv(body, std::span<const ParetoPoint>(&point, 1));
  Manifest manifest;
  manifest.command = "ocs";
  manifest.config_hash = m.fingerprint;
  manifest.seed = m.seed;
  manifest.inputs = {o.matrix};
  emit(o, body.str(), out, manifest);
  const double threshold = o.max_nonconverged.value_or(1.0);
  if (too_many_nonconverged(m.nonconverged(), std::ssize(m.rows), threshold)) {
    return nonconvergence_exit(m.nonconverged(), std::ssize(m.rows), err);
  }
  return kOk;
}

int cmd_pareto(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.matrix.empty()) throw ValidationError("pareto needs --matrix");
  const PosteriorProbMatrix m = load_matrix(o.matrix);
  const std::uint64_t seed = o.seed.value_or(m.seed);
  RngStream rng(derive_seed(seed, kParetoTag), 0);
  const std::vector<ParetoPoint> front = pareto_front(m, o.candidates, rng);
  std::ostringstream body;
  write_report_csv(body, front);
  Manifest manifest;
  manifest.command = "pareto";
  manifest.config_hash = m.fingerprint;
  manifest.seed = seed;
  manifest.inputs = {o.matrix};
  manifest.extra = {{"candidates", o.candidates},
                    {"front_size", front.size()},
                    {"dominated", o.candidates - static_cast<int>(front.size())}};
  emit(o, body.str(), out, manifest);
  const double threshold = o.max_nonconverged.value_or(1.0);
  if (too_many_nonconverged(m.nonconverged(), std::ssize(m.rows), threshold)) {
    return nonconvergence_exit(m.nonconverged(), std::ssize(m.rows), err);
  }
  return kOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const std::vector<int> sizes = parse_sizes(o.sizes);
  const RunConfig rc = config_from_options(o);
  const LossParams c = loss_from_options(o, err);
  Manifest manifest;
  manifest.command = "sweep";
  manifest.config_hash = scenario_fingerprint(rc.scenario);
  manifest.seed = rc.seed;
  manifest.threads = resolve_threads(rc.threads);
  manifest.inputs = {o.config};
  const std::vector<SweepRow> rows =
      sample_size_sweep(rc.scenario, sizes, c, rc.n_replicates, rc.seed, rc.threads);
  std::ostringstream body;
  write_sweep_csv(body, c, rows);
  manifest.extra = {{"sizes", sizes}, {"n_replicates", rc.n_replicates}};
  emit(o, body.str(), out, manifest);
  for (const SweepRow& row : rows) {
    if (too_many_nonconverged(row.report.n_nonconverged, row.report.n_replicates,
                              rc.max_nonconverged_fraction)) {
      return nonconvergence_exit(row.report.n_nonconverged, row.report.n_replicates, err);
    }
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian external pilot trial simulator", "pilot"};
  app.set_version_flag("--version", engine_version());
  app.require_subcommand(1);
  Options o;

  auto add_globals = [&o](CLI::App* a) {
    a->add_option("--config", o.config, "Scenario JSON file");
    a->add_option("--seed", o.seed, "Master seed (overrides the config)");
    a->add_option("--threads", o.threads, "Worker threads, 0 = all cores");
    a->add_option("--out", o.out, "Output file (stdout when omitted)");
  };
  add_globals(&app);

  auto* elicit = app.add_subcommand("elicit", "Loss parameters from two indifference probabilities");
  auto* matrix = app.add_subcommand("matrix", "Simulate and store the posterior probability matrix");
  auto* ocs = app.add_subcommand("ocs", "Operating characteristics of one loss vector");
  auto* pareto = app.add_subcommand("pareto", "Non-dominated loss vectors from random candidates");
  auto* sweep = app.add_subcommand("sweep", "Operating characteristics across sample sizes");
  for (auto* sub : {elicit, matrix, ocs, pareto, sweep}) add_globals(sub);

  for (auto* sub : {elicit, ocs, sweep}) {
    sub->add_option("--p1", o.p1, "Indifference probability between r and g under R");
    sub->add_option("--p2", o.p2, "Indifference probability between a and g under A");
  }
  for (auto* sub : {ocs, sweep}) {
    sub->add_option("--c", o.c, "Loss vector c1,c2,c3");
    sub->add_option("--c1", o.c1, "Binary loss (c1, 1 - c1, 0)");
  }
  for (auto* sub : {matrix, ocs, pareto, sweep}) {
    sub->add_option("--max-nonconverged", o.max_nonconverged,
                    "Largest tolerated fraction of non-converged replicates");
  }
  for (auto* sub : {matrix, sweep}) sub->add_option("--n", o.n, "Replicates (overrides the config)");
  for (auto* sub : {ocs, pareto}) sub->add_option("--matrix", o.matrix, "Matrix file")->required();
  pareto->add_option("--candidates", o.candidates, "Number of sampled loss vectors");
  sweep->add_option("--sizes", o.sizes, "Sizes, e.g. 10,20,30 or 10:50:2")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (elicit->parsed()) return cmd_elicit(o, out, err);
    if (matrix->parsed()) return cmd_matrix(o, err);
    if (ocs->parsed()) return cmd_ocs(o, out, err);
    if (pareto->parsed()) return cmd_pareto(o, out, err);
    return cmd_sweep(o, out, err);
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kCapacity;
  } catch (const ParameterDomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ElicitationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace pilot::cli
