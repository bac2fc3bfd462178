#include <fstream>
#include <sstream>

#include "common.hpp"

using namespace znav;
using namespace znav::test;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) { return std::string(ZNAV_FIXTURES) + "/" + name + ".json"; }

json minimal() {
  return json::parse(R"J({"name": "m", "dimension": 2, "metric": "euclidean", "wind": [0.1, [0, 0.2]],
                         "speed": 0.9, "cos_phi": -1, "domain": "4 - abs2(z1) - abs2(z2)"})J");
}

void expect_invalid(const json& j, const std::string& needle) {
  try {
    parse_scenario(j);
    ADD_FAILURE() << "expected ValidationError for " << j.dump();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(ScenarioFile, FixturesMatchBuiltins) {
  for (const char* name : {"hartogs_ex1", "hartogs_ex2", "hartogs_ex3", "hartogs_ex4", "hartogs_ex1_nowind",
                           "hartogs_ex2_nowind", "euclidean_const_wind"}) {
    const ScenarioFile f = load_scenario(fixture(name));
    const Scenario sc = builtin(name);
    EXPECT_EQ(f.name, name);
    EXPECT_EQ(f.structure.wind_zero, sc.structure.wind_zero) << name;
    EXPECT_EQ(f.structure.cos_phi, sc.structure.cos_phi) << name;
    for (const auto& p : plan_for(sc, 12, 1, 1)) {
      ASSERT_TRUE(f.structure.contains(p.z)) << name;
      const auto a = f.structure.at(p.z), b = sc.structure.at(p.z);
      EXPECT_LE(max_diff(a.h, b.h), 1e-12 * b.h.cwiseAbs().maxCoeff()) << name;
      EXPECT_LE(max_diff(a.W, b.W), 1e-13) << name;
      EXPECT_NEAR(a.f2, b.f2, 1e-14) << name;
      EXPECT_NEAR(solve_forward(f.structure, p.z, p.eta), solve_forward(sc.structure, p.z, p.eta),
                  1e-11 * solve_forward(sc.structure, p.z, p.eta))
          << name;
    }
    ASSERT_TRUE(f.geodesic.has_value()) << name;
  }
}

TEST(ScenarioFile, FixtureGeodesicStartsOnReference) {
  for (const char* name : {"hartogs_ex1", "hartogs_ex2", "hartogs_ex3", "hartogs_ex4", "hartogs_ex1_nowind",
                           "hartogs_ex2_nowind", "euclidean_const_wind"}) {
    const ScenarioFile f = load_scenario(fixture(name));
    const auto [z0, v0] = builtin(name).reference->geodesic.at(0.0);
    EXPECT_LE(max_diff(f.geodesic->start, z0), 1e-15) << name;
    EXPECT_LE(max_diff(initial_velocity(f), v0), 1e-12) << name;
    EXPECT_NEAR(solve_forward(f.structure, f.geodesic->start, initial_velocity(f)), 1.0, 1e-13) << name;
  }
}

TEST(ScenarioFile, ExplicitVelocityAndOutputs) {
  const ScenarioFile f = load_scenario(fixture("euclidean_nowind"));
  EXPECT_FALSE(f.geodesic->from_F_unit);
  EXPECT_EQ(f.geodesic->samples, 65);
  EXPECT_EQ(f.geodesic->t1, 2.0);
  EXPECT_LE(max_diff(initial_velocity(f), v2(cplx(0.3, 0.4), 0.5)), 0.0);
  EXPECT_EQ(classify_solution(f.structure).kind, SolutionKind::ConformalHermitian);
}

TEST(ScenarioFile, BuiltinRoundTrip) {
  const ScenarioFile f = scenario_file_from_builtin(builtin("hartogs_ex3"));
  EXPECT_EQ(f.name, "hartogs_ex3");
  ASSERT_TRUE(f.geodesic.has_value());
  EXPECT_NEAR(solve_forward(f.structure, f.geodesic->start, initial_velocity(f)), 1.0, 1e-13);
}

TEST(ScenarioFile, MinimalParses) {
  const ScenarioFile f = parse_scenario(minimal());
  EXPECT_EQ(f.dimension, 2);
  EXPECT_EQ(f.metric_source, "euclidean");
  EXPECT_NEAR(f.structure.at(v2(0.0, 0.0)).f2, 0.81, 1e-15);
  EXPECT_FALSE(f.geodesic.has_value());
  EXPECT_THROW(f.structure.at(v2(3.0, 0.0)), DomainError);
}

TEST(ScenarioFile, ValidationErrors) {
  json j = minimal();
  j.erase("cos_phi");
  expect_invalid(j, "cos_phi");
  j = minimal();
  j["colour"] = 1;
  expect_invalid(j, "colour");
  j = minimal();
  j["speed2"] = 0.81;
  expect_invalid(j, "speed");
  j = minimal();
  j["cos_phi"] = 1.5;
  expect_invalid(j, "cos_phi");
  j = minimal();
  j["wind"] = json::array({0.1});
  expect_invalid(j, "wind");
  j = minimal();
  j["metric"] = "poincare";
  expect_invalid(j, "poincare");
  j = minimal();
  j["metric"] = json::array({json::array({1, 0}), json::array({0})});
  expect_invalid(j, "metric[1]");
  j = minimal();
  j["dimension"] = 0;
  expect_invalid(j, "dimension");
  j = minimal();
  j["geodesic"] = json::parse(R"({"start": [0, 0], "velocity": [1, 0], "tol": 0})");
  expect_invalid(j, "tol");
  j = minimal();
  j["geodesic"] = json::parse(R"({"start": [0, 0], "velocity": [1, 0], "t_span": [1, 0]})");
  expect_invalid(j, "t_span");
  j = minimal();
  j["geodesic"] = json::parse(R"({"start": [0, 0], "velocity": "from_F_unit"})");
  expect_invalid(j, "direction");
  j = minimal();
  j["metric"] = "hartogs";
  j["dimension"] = 3;
  j["wind"] = "zero";
  expect_invalid(j, "dimension 2");
}

TEST(ScenarioFile, NonHermitianMetricRejected) {
  json j = minimal();
  j["metric"] = json::parse(R"([["1", "0.5"], ["0.2", "1"]])");
  const ScenarioFile f = parse_scenario(j);
  EXPECT_THROW(f.structure.at(v2(0.0, 0.0)), ValidationError);
}

TEST(ScenarioFile, DomainMustEvaluateReal) {
  json j = minimal();
  j["domain"] = "1 - abs2(z1)";
  const ScenarioFile f = parse_scenario(j);
  EXPECT_TRUE(f.structure.contains(v2(0.5, 9.0)));
  EXPECT_FALSE(f.structure.contains(v2(1.5, 0.0)));
}

TEST(ScenarioFile, ParseErrors) {
  EXPECT_THROW(parse_scenario_text("{ not json"), ParseError);
  json j = minimal();
  j["wind"] = json::array({"z1*", "0"});
  EXPECT_THROW(parse_scenario(j), ParseError);
  j = minimal();
  j["wind"] = json::array({"z3", "0"});
  EXPECT_THROW(parse_scenario(j), ParseError);
  EXPECT_THROW(load_scenario("/nonexistent/file.json"), ValidationError);
}

TEST(ScenarioFile, SpeedAboveOneRejected) {
  json j = minimal();
  j["speed"] = 1.2;
  EXPECT_THROW(parse_scenario(j).structure.at(v2(0.0, 0.0)), ValidationError);
}
