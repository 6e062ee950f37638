#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "stlrob/config.hpp"

using namespace stlrob;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "model": {
      "name": "planar_integrator",
      "q0": [0, 1],
      "state_box": [[0, 6], [0, 6]],
      "input_box": [[-1.5, 1.5], [-1.5, 1.5]],
      "output_map": [{"channel": "x", "state": 0}, {"channel": "y", "state": 1}]
    },
    "regions": {"Reg1": {"x": [1, 2], "y": [3, 4]}},
    "spec": "F[1,5] Reg1",
    "horizon": 5
  })");
}

std::string load_error(const json& doc) {
  try {
    parse_problem(doc);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalDefaults) {
  const auto cfg = parse_problem(minimal());
  EXPECT_EQ(cfg.problem.horizon, 5u);
  EXPECT_EQ(cfg.problem.semantics.kind, SemanticsKind::Agm);
  EXPECT_EQ(cfg.problem.semantics.scale, PredicateScale::Half);
  EXPECT_EQ(cfg.optimizer.max_iters, 300);
  EXPECT_EQ(cfg.n_runs, 100);
  ASSERT_EQ(cfg.sigmas.size(), 3u);
  EXPECT_DOUBLE_EQ(cfg.sigmas[0], 0.075);
  EXPECT_DOUBLE_EQ(cfg.sigmas[2], 0.3);
  ASSERT_EQ(cfg.regions.size(), 1u);
  EXPECT_EQ(cfg.regions[0].axes[0].lo, 1.0);
}

TEST(Config, RegionsConvertToNormalizedThresholds) {
  const auto cfg = parse_problem(minimal());
  const Formula& box = cfg.problem.spec.child();
  ASSERT_EQ(box.op(), Op::And);
  ASSERT_EQ(box.children().size(), 4u);
  EXPECT_EQ(box.child(0).channel(), "x");
  EXPECT_EQ(box.child(0).comparison(), Comparison::Greater);
  EXPECT_DOUBLE_EQ(box.child(0).threshold(), -2.0 / 3.0);
  EXPECT_EQ(box.child(1).comparison(), Comparison::Less);
  EXPECT_DOUBLE_EQ(box.child(1).threshold(), -1.0 / 3.0);
  EXPECT_EQ(box.child(2).channel(), "y");
  EXPECT_DOUBLE_EQ(box.child(2).threshold(), 0.0);
  EXPECT_DOUBLE_EQ(box.child(3).threshold(), 1.0 / 3.0);
}

TEST(Config, SchemaErrors) {
  auto doc = minimal();
  doc["horizon"] = 4;
  EXPECT_NE(load_error(doc).find("horizon"), std::string::npos);

  doc = minimal();
  doc["regions"]["Reg1"]["x"] = json::array({5, 7});
  EXPECT_NE(load_error(doc).find("inside the state box"), std::string::npos);

  doc = minimal();
  doc["extra"] = 1;
  EXPECT_NE(load_error(doc).find("unknown key 'extra'"), std::string::npos);

  doc = minimal();
  doc["semantics"] = "fuzzy";
  EXPECT_NE(load_error(doc).find("fuzzy"), std::string::npos);

  doc = minimal();
  doc["model"]["params"] = {{"mass", 2}};
  EXPECT_FALSE(load_error(doc).empty());

  doc = minimal();
  doc["spec"] = "F[1,5] Reg9";
  EXPECT_NE(load_error(doc).find("spec"), std::string::npos);

  doc = minimal();
  doc["regions"]["Reg1"] = {{"z", {1, 2}}};
  EXPECT_NE(load_error(doc).find("'z'"), std::string::npos);

  doc = minimal();
  doc["model"]["q0"] = {7, 1};
  EXPECT_FALSE(load_error(doc).empty());

  doc = minimal();
  doc.erase("spec");
  EXPECT_NE(load_error(doc).find("missing 'spec'"), std::string::npos);

  doc = minimal();
  doc["optimizer"] = {{"step0", -1}};
  EXPECT_FALSE(load_error(doc).empty());
}

TEST(Config, SemanticsObjectAndDisturbance) {
  auto doc = minimal();
  doc["semantics"] = {{"name", "smooth"}, {"beta", 30}};
  doc["disturbance"] = {{"sigmas", {0.1}}, {"n_runs", 7}, {"seed", 4}};
  const auto cfg = parse_problem(doc);
  EXPECT_EQ(cfg.problem.semantics.kind, SemanticsKind::Smooth);
  EXPECT_EQ(cfg.problem.semantics.smooth.beta, 30.0);
  EXPECT_EQ(cfg.sigmas, std::vector<double>{0.1});
  EXPECT_EQ(cfg.disturbance(0.1).n_runs, 7);
  EXPECT_EQ(cfg.disturbance(0.1).seed, 4u);
}

TEST(Config, ShippedProblems) {
  for (const char* name : {"problem1.json", "problem2.json", "problem3.json"}) {
    const auto cfg = load_problem(std::string(STLROB_CONFIG_DIR) + "/" + name);
    EXPECT_GE(cfg.problem.horizon, static_cast<std::size_t>(horizon(cfg.problem.spec)));
  }
  EXPECT_EQ(horizon(load_problem(STLROB_CONFIG_DIR "/problem1.json").problem.spec), 15);
  EXPECT_THROW(load_problem("/nonexistent/problem.json"), FormatError);
}
