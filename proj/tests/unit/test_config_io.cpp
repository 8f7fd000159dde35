#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pilot/config.hpp"
#include "pilot/error.hpp"
#include "pilot/matrix_io.hpp"

namespace {

using namespace pilot;
using nlohmann::json;

json conjugate_doc() {
  return json::parse(R"({
    "model": "conjugate", "n_per_arm": 30,
    "design_prior": {"p_f": {"dist": "beta", "alpha": 40, "beta": 10},
                     "p_a": {"dist": "beta", "alpha": 11.2, "beta": 4.8}},
    "N": 100, "seed": 5
  })");
}

json hier_doc() {
  return json::parse(R"({
    "model": "hierarchical", "k": 6,
    "analysis_prior": "INA",
    "mcmc": {"iterations": 1000, "burnin": 500},
    "N": 10, "seed": 1, "threads": 2
  })");
}

TEST(Config, ParsesConjugate) {
  const RunConfig rc = parse_config(conjugate_doc());
  const auto& s = std::get<ConjugateScenario>(rc.scenario);
  EXPECT_EQ(s.n_per_arm, 30);
  EXPECT_EQ(s.design_prior_a.alpha, 11.2);
  EXPECT_EQ(rc.n_replicates, 100);
  EXPECT_EQ(rc.seed, 5u);
}

TEST(Config, ParsesHierarchicalWithPreset) {
  const RunConfig rc = parse_config(hier_doc());
  const auto& h = std::get<HierScenario>(rc.scenario);
  EXPECT_EQ(h.k, 6);
  EXPECT_EQ(h.analysis.name, "INA");
  EXPECT_EQ(h.analysis.p_a.alpha, 28.8);
  EXPECT_EQ(h.mcmc.iterations, 1000);
  EXPECT_EQ(rc.threads, 2);
}

TEST(Config, ExplicitAnalysisComponentsOverridePreset) {
  json doc = hier_doc();
  doc["analysis_prior"] = json::parse(R"({"preset": "IN",
      "mu": {"dist": "normal", "mean": 0, "sd": 1},
      "cluster": {"dist": "nig", "mu0": 10, "nu0": 1, "alpha0": 2, "beta0": 2}})");
  const auto& h = std::get<HierScenario>(parse_config(doc).scenario);
  EXPECT_EQ(h.analysis.name, "custom");
  EXPECT_EQ(h.analysis.mu.sd, 1.0);
  EXPECT_TRUE(std::holds_alternative<NormalInverseGammaDist>(h.analysis.cluster));
  EXPECT_EQ(h.analysis.rho.alpha, 1.6);
}

TEST(Config, RejectsUnknownKeysEverywhere) {
  json a = conjugate_doc();
  a["bogus"] = 1;
  EXPECT_THROW(parse_config(a), ValidationError);
  json b = conjugate_doc();
  b["design_prior"]["p_f"]["gamma"] = 2;
  EXPECT_THROW(parse_config(b), ValidationError);
  json c = hier_doc();
  c["mcmc"]["thin"] = 2;
  EXPECT_THROW(parse_config(c), ValidationError);
  json d = hier_doc();
  d["partition"] = json::parse(R"({"info": {"flor": 0.6}})");
  EXPECT_THROW(parse_config(d), ValidationError);
}

TEST(Config, RejectsBadValues) {
  json a = conjugate_doc();
  a["design_prior"]["p_f"]["alpha"] = -1;
  EXPECT_THROW(parse_config(a), ParameterDomainError);
  json b = conjugate_doc();
  b["N"] = 0;
  EXPECT_THROW(parse_config(b), ValidationError);
  json c = conjugate_doc();
  c["model"] = "mixture";
  EXPECT_THROW(parse_config(c), ValidationError);
  json d = conjugate_doc();
  d["mcmc"] = json::object();
  EXPECT_THROW(parse_config(d), ValidationError);
  json e = conjugate_doc();
  e["design_prior"]["p_f"] = json::parse(R"({"dist": "normal", "mean": 0, "sd": 1})");
  EXPECT_THROW(parse_config(e), ValidationError);
  json f = hier_doc();
  f["analysis_prior"] = "STRONG";
  EXPECT_THROW(parse_config(f), ValidationError);
  json g = conjugate_doc();
  g["n_per_arm"] = "thirty";
  EXPECT_THROW(parse_config(g), ValidationError);
}

TEST(Config, DistRoundTrip) {
  for (const DistSpec& d : {DistSpec{BetaDist{2, 3}}, DistSpec{BinomialDist{7, 0.25}},
                            DistSpec{NormalDist{-1, 2}}, DistSpec{InverseGammaDist{3, 4}},
                            DistSpec{NormalInverseGammaDist{10, 6, 20, 39}}}) {
    EXPECT_EQ(dist_to_json(dist_from_json(dist_to_json(d), "x")), dist_to_json(d));
  }
}

TEST(Config, CanonicalFormReparsesToSameScenario) {
  for (const json& doc : {conjugate_doc(), hier_doc()}) {
    const Scenario s = parse_config(doc).scenario;
    json canon = scenario_to_json(s);
    if (canon["model"] == "hierarchical") canon["analysis_prior"].erase("name");
    const Scenario again = parse_config(canon).scenario;
    EXPECT_EQ(scenario_fingerprint(s).size(), 16u);
    // Explicit components rename the preset, which is part of the fingerprint.
    json c2 = scenario_to_json(again);
    c2["analysis_prior"].erase("name");
    json c1 = scenario_to_json(s);
    c1["analysis_prior"].erase("name");
    EXPECT_EQ(c1, c2);
  }
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

PosteriorProbMatrix sample_matrix() {
  return build_matrix(ConjugateScenario{}, 257, 4, 1);
}

TEST(MatrixIo, RoundTripIsByteIdentical) {
  const PosteriorProbMatrix m = sample_matrix();
  std::ostringstream first;
  write_matrix(first, m);
  std::istringstream in(first.str());
  const PosteriorProbMatrix back = read_matrix(in);
  std::ostringstream second;
  write_matrix(second, back);
  EXPECT_EQ(first.str(), second.str());
  ASSERT_EQ(back.rows.size(), m.rows.size());
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].probs.pG(), m.rows[i].probs.pG());
    EXPECT_EQ(back.rows[i].truth, m.rows[i].truth);
  }
  EXPECT_EQ(back.fingerprint, m.fingerprint);
  EXPECT_EQ(back.space, DecisionSpace::binary);
}

TEST(MatrixIo, HeaderLayout) {
  std::ostringstream os;
  write_matrix(os, sample_matrix());
  std::istringstream is(os.str());
  std::string l1, l2;
  std::getline(is, l1);
  std::getline(is, l2);
  const json h = json::parse(l1);
  EXPECT_EQ(h["n_rows"], 257);
  EXPECT_EQ(h["model"], "conjugate");
  EXPECT_EQ(l2, "replicate,label,p_r,p_a,p_g,converged");
}

TEST(MatrixIo, RejectsCorruptInput) {
  std::ostringstream os;
  write_matrix(os, sample_matrix());
  std::string text = os.str();
  {
    std::istringstream in(text.substr(0, text.size() - 30));
    EXPECT_THROW(read_matrix(in), ValidationError);
  }
  {
    std::string bad = text;
    bad.replace(bad.find(",R,") != std::string::npos ? bad.find(",R,") : bad.find(",G,"), 3, ",Q,");
    std::istringstream in(bad);
    EXPECT_THROW(read_matrix(in), ValidationError);
  }
  {
    std::istringstream in("not json\n");
    EXPECT_THROW(read_matrix(in), ValidationError);
  }
}

TEST(MatrixIo, SaveAndLoadFile) {
  const auto path = (std::filesystem::temp_directory_path() / "pilot_matrix_io_test.csv").string();
  const PosteriorProbMatrix m = sample_matrix();
  save_matrix(path, m);
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  const PosteriorProbMatrix back = load_matrix(path);
  EXPECT_EQ(back.rows.size(), m.rows.size());
  std::filesystem::remove(path);
  EXPECT_THROW(load_matrix(path), ValidationError);
}

TEST(ReportCsv, Header) {
  std::ostringstream os;
  write_report_csv(os, {});
  EXPECT_EQ(os.str(),
            "c1,c2,c3,oc1,oc2,oc3,expected_loss,se1,se2,se3,n_replicates,n_nonconverged\n");
}

}  // namespace
