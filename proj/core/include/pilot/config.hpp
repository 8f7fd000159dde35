#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "pilot/oc_engine.hpp"

namespace pilot {

// A scenario plus the run controls that sit alongside it in a config file.
struct RunConfig {
  Scenario scenario;
  std::int64_t n_replicates = 10000;
  std::uint64_t seed = 1;
  int threads = 0;
  // Exceeding this fraction of non-converged MCMC rows fails a matrix run.
  double max_nonconverged_fraction = 1.0;
};

// Parses and schema-checks a config document. Unknown keys, wrong types and
// invalid distribution parameters raise ValidationError (or
// ParameterDomainError for distribution parameters).
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

nlohmann::json dist_to_json(const DistSpec& d);
DistSpec dist_from_json(const nlohmann::json& j, const std::string& path);

// Fully expanded canonical form (presets resolved, defaults filled in).
nlohmann::json scenario_to_json(const Scenario& s);

// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string scenario_fingerprint(const Scenario& s);

std::string fnv1a_hex(const std::string& bytes);

const char* engine_version() noexcept;

}  // namespace pilot
