#include <fstream>

#include <gtest/gtest.h>

#include "gmkf/scenario.hpp"

using namespace gmkf;

TEST(Presets, SyntheticModelParameters) {
  const auto m1 = preset("model1");
  EXPECT_EQ(m1.process.weights, (std::vector<double>{0.2, 0.2, 0.2, 0.2, 0.2}));
  EXPECT_DOUBLE_EQ(m1.process.means[0](0), -50);
  EXPECT_DOUBLE_EQ(m1.process.means[4](0), 50);
  EXPECT_DOUBLE_EQ(m1.process.covs[2](0, 0), 1.0);
  EXPECT_TRUE(m1.process.scale_means_by_c);
  EXPECT_DOUBLE_EQ(m1.dt, 0.1080);

  const auto m2 = preset("model2");
  EXPECT_EQ(m2.process.weights, (std::vector<double>{0.1, 0.1, 0.6, 0.1, 0.1}));

  const auto m3 = preset("model3");
  EXPECT_EQ(m3.process.weights, (std::vector<double>{0.5, 0.1, 0.1, 0.1, 0.2}));
  EXPECT_DOUBLE_EQ(m3.process.means[1](0), 10);
  EXPECT_DOUBLE_EQ(m3.process.means[4](0), 80);
  // asymmetric weights still give a zero-mean mixture
  const auto mm = moment_match(m3.noise().process);
  EXPECT_NEAR(mm.mean(0), 0.0, 1e-12);
}

TEST(Presets, TwoScaleScenarioParameters) {
  const auto maneuvering = preset("maneuvering");
  EXPECT_EQ(maneuvering.process.weights, (std::vector<double>{0.8, 0.2}));
  EXPECT_DOUBLE_EQ(maneuvering.process.covs[0](0, 0), 0.01);
  EXPECT_DOUBLE_EQ(maneuvering.process.covs[1](0, 0), 1.0);
  EXPECT_EQ(maneuvering.measurement.weights.size(), 1u);
  EXPECT_DOUBLE_EQ(maneuvering.measurement.covs[0](0, 0), 0.1);

  const auto glint = preset("glint");
  EXPECT_EQ(glint.measurement.weights, (std::vector<double>{0.1, 0.9}));
  EXPECT_DOUBLE_EQ(glint.measurement.covs[0](0, 0), 0.01);
  EXPECT_DOUBLE_EQ(glint.measurement.covs[1](0, 0), 1.0);
  EXPECT_EQ(glint.process.weights.size(), 1u);
}

TEST(Presets, UwbParametersAndNormalization) {
  const auto x = preset("uwb_x");
  // published process weights sum to 0.999 and are normalized on build
  EXPECT_DOUBLE_EQ(x.process.weights[0], 0.13);
  EXPECT_DOUBLE_EQ(x.process.weights[2], 0.099);
  EXPECT_TRUE(x.process.normalize_weights);
  const auto built = x.noise().process;
  double sum = 0.0;
  for (const auto& c : built.components()) sum += c.weight;
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_NEAR(built.component(0).weight, 0.13 / 0.999, 1e-15);
  EXPECT_DOUBLE_EQ(x.measurement.covs[0](0, 0), 8163.20);

  const auto y = preset("uwb_y");
  EXPECT_EQ(y.process.weights.size(), 9u);
  EXPECT_DOUBLE_EQ(y.process.means[4](0), -0.32);
  EXPECT_DOUBLE_EQ(y.measurement.covs[1](0, 0), 10809.10);
}

TEST(Presets, UnknownNameRejected) { EXPECT_THROW(preset("model9"), ConfigError); }

TEST(Scenario, SeparationScalesMeansOnly) {
  const auto s = preset("model1").with_c(0.5);
  const auto noise = s.noise();
  EXPECT_DOUBLE_EQ(noise.process.component(0).mean(0), -25.0);
  EXPECT_DOUBLE_EQ(noise.process.component(0).cov(0, 0), 1.0);
  // fixed-parameter presets ignore c
  const auto g = preset("glint").with_c(7.0);
  EXPECT_DOUBLE_EQ(g.noise().measurement.component(0).mean(0), 0.0);
}

TEST(Scenario, JsonRoundTrip) {
  const auto s = preset("model3");
  const auto j = scenario_to_json(s);
  const auto back = scenario_from_json(j);
  EXPECT_EQ(back.name, s.name);
  EXPECT_DOUBLE_EQ(back.dt, s.dt);
  EXPECT_EQ(back.horizon, s.horizon);
  EXPECT_EQ(back.process.weights, s.process.weights);
  EXPECT_DOUBLE_EQ(back.measurement.means[3](0), s.measurement.means[3](0));
  EXPECT_EQ(back.process.scale_means_by_c, s.process.scale_means_by_c);
}

TEST(Scenario, UnknownKeysRejected) {
  auto j = scenario_to_json(preset("model1"));
  j["bogus"] = 1;
  EXPECT_THROW(scenario_from_json(j), ConfigError);

  auto j2 = scenario_to_json(preset("model1"));
  j2["process"]["extra"] = 2;
  EXPECT_THROW(scenario_from_json(j2), ConfigError);
}

TEST(Scenario, MissingMixtureRejected) {
  nlohmann::json j;
  j["name"] = "x";
  EXPECT_THROW(scenario_from_json(j), ConfigError);
}

TEST(Scenario, HorizonMustBePositive) {
  auto s = preset("model1");
  s.horizon = 0;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(LoadScenario, FileThenPresetResolution) {
  const auto s = preset("model2").with_c(0.25);
  const std::string path = ::testing::TempDir() + "custom_scenario.json";
  {
    std::ofstream out(path);
    out << scenario_to_json(s).dump(2);
  }
  const auto from_file = load_scenario(path);
  EXPECT_EQ(from_file.name, "model2");
  EXPECT_DOUBLE_EQ(from_file.c, 0.25);

  const auto builtin = load_scenario("glint", "/nonexistent_dir");
  EXPECT_EQ(builtin.name, "glint");

  EXPECT_THROW(load_scenario("not_a_preset"), ConfigError);
  EXPECT_THROW(load_scenario("/nonexistent.json"), ConfigError);
}

TEST(LoadScenario, ShippedPresetFilesMatchBuiltins) {
  for (const auto& name : preset_names()) {
    const auto from_file = load_scenario(name, GMKF_DATA_DIR);
    const auto builtin = preset(name);
    EXPECT_EQ(from_file.process.weights, builtin.process.weights) << name;
    EXPECT_EQ(from_file.measurement.weights, builtin.measurement.weights) << name;
    ASSERT_EQ(from_file.process.means.size(), builtin.process.means.size()) << name;
    for (std::size_t k = 0; k < builtin.process.means.size(); ++k) {
      EXPECT_DOUBLE_EQ(from_file.process.means[k](0), builtin.process.means[k](0)) << name;
      EXPECT_DOUBLE_EQ(from_file.process.covs[k](0, 0), builtin.process.covs[k](0, 0)) << name;
    }
    EXPECT_DOUBLE_EQ(from_file.dt, builtin.dt) << name;
  }
}
