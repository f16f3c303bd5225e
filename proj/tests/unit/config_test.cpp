#include "stirap/config.hpp"
#include "stirap/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <string>

namespace stirap {
namespace {

ExperimentConfig parse(std::string_view text, ExperimentKind kind = ExperimentKind::Trajectory) {
  ExperimentConfig c = preset(kind);
  apply_config_text(c, text);
  return c;
}

TEST(Config, SectionsAndTopLevelKeys) {
  const ExperimentConfig c = parse(R"(
seed = 99
threads = 3
[lambda]
rabi_mhz = 64
spin_dephasing_ns = inf
[schedule]
wedge_deg = 45
tau_ns = 800
shape = sine-ramp
sign = -
[integration]
substeps = 4
[output]
dir = results
)");
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.threads, 3);
  EXPECT_EQ(c.lambda.rabi_mhz, 64.0);
  EXPECT_TRUE(std::isinf(c.lambda.spin_dephasing_ns));
  EXPECT_EQ(c.schedule.loop.wedge_deg, 45.0);
  EXPECT_EQ(c.schedule.loop.shape, PulseShape::SineRamp);
  EXPECT_EQ(c.schedule.loop.dwell_fraction, 0.0);  // shape default without an explicit dwell
  EXPECT_EQ(c.schedule.sign, LoopSign::Negative);
  EXPECT_EQ(c.integration.substeps, 4);
  EXPECT_EQ(c.out_dir, "results");
}

TEST(Config, SweepLists) {
  const ExperimentConfig c = parse("[sweep]\ndelta_mhz = -0.1, 0, 0.1\nloops = 1,2,3\n", ExperimentKind::StarkSweep);
  EXPECT_EQ(c.sweep.delta_mhz, (std::vector<double>{-0.1, 0.0, 0.1}));
  EXPECT_EQ(c.sweep.loops, (std::vector<int>{1, 2, 3}));
}

TEST(Config, UnknownKeyIsError) {
  EXPECT_THROW(parse("[lambda]\nrabi = 31\n"), ConfigError);
  EXPECT_THROW(parse("colour = blue\n"), ConfigError);
  EXPECT_THROW(parse("[nosuch]\nx = 1\n"), ConfigError);
}

TEST(Config, MalformedValuesAreErrors) {
  EXPECT_THROW(parse("[lambda]\nrabi_mhz = fast\n"), ConfigError);
  EXPECT_THROW(parse("[lambda]\nrabi_mhz = 31x\n"), ConfigError);
  EXPECT_THROW(parse("[schedule]\nshape = triangle\n"), ConfigError);
  EXPECT_THROW(parse("[schedule]\necho = maybe\n"), ConfigError);
  EXPECT_THROW(parse("threads = 0\n"), ConfigError);
  EXPECT_THROW(parse("[schedule]\nwedge_deg = 400\n"), ConfigError);
  EXPECT_THROW(parse("[lambda]\ndecay_to_plus_ns = -3\n"), ConfigError);
  EXPECT_THROW(parse("[schedule]\nloops = 3\necho = true\n"), ConfigError);
  EXPECT_THROW(parse("this is not ini\n"), ConfigError);
}

TEST(Config, ExperimentKeyMustMatch) {
  EXPECT_NO_THROW(parse("experiment = trajectory\n"));
  EXPECT_THROW(parse("experiment = berry-sweep\n"), ConfigError);
}

TEST(Config, SweepAxesRequired) {
  EXPECT_THROW(parse("[sweep]\nwedge_deg =\n", ExperimentKind::BerrySweep), ConfigError);
  EXPECT_THROW(parse("[sweep]\ntau_ns = 800\n", ExperimentKind::StarkSweep), ConfigError);
  EXPECT_THROW(parse("[sweep]\ns_phi_deg =\ns_theta_deg =\n", ExperimentKind::NoiseRobustness), ConfigError);
}

TEST(Config, EntriesRoundTrip) {
  for (ExperimentKind kind : all_experiments()) {
    const ExperimentConfig a = preset(kind);
    std::string top;
    std::map<std::string, std::string> sections;
    for (const auto& [k, v] : config_entries(a)) {
      const auto dot = k.find('.');
      if (dot == std::string::npos) {
        top += k + " = " + v + "\n";
      } else {
        sections[k.substr(0, dot)] += k.substr(dot + 1) + " = " + v + "\n";
      }
    }
    std::string text = top;
    for (const auto& [name, body] : sections) text += "[" + name + "]\n" + body;
    ExperimentConfig b = preset(kind);
    apply_config_text(b, text);
    EXPECT_EQ(config_entries(a), config_entries(b)) << to_string(kind);
  }
}

TEST(Config, PresetsAreValid) {
  for (ExperimentKind kind : all_experiments()) {
    EXPECT_NO_THROW(validate_config(preset(kind))) << to_string(kind);
    EXPECT_EQ(parse_experiment(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_experiment("fig9"), ConfigError);
}

TEST(Config, DissipationSwitch) {
  const ExperimentConfig c = parse("[lambda]\ndissipation = false\n");
  EXPECT_TRUE(std::isinf(c.effective_params().decay_to_minus_ns));
  EXPECT_EQ(c.lambda.decay_to_minus_ns, 31.0);
}

}  // namespace
}  // namespace stirap
