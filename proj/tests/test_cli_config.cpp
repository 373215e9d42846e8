#include "ppqnd/cli/commands.hpp"

#include <gtest/gtest.h>

using namespace ppqnd::cli;

namespace {

ExperimentConfig ratio100() {
  return parse_config(std::string(
      R"({"delta_probe": 100, "delta_two": 100, "omega_d": 1, "xi_p": 0.01, "xi_s": 0.0001, "n_sl": 1, "n_sr": 1})"));
}

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST(Config, RoundTrip) {
  const std::string text = R"({
    "delta_probe": 10000.5, "delta_two": 1e4, "omega_d": 100, "xi_s": 0.1, "xi_p": 1,
    "n_sl": 2, "n_sr": 1, "n_p": 3, "alpha": [2.5, 0.30000000000000004],
    "chi": -1e-7, "t": 1e6, "chi_t_values": [0.1, 3.141592653589793],
    "qubit": [[0.6, 0.1], [0.8, -2.0]], "qubits": [[[1, 0], [0, 0]]],
    "random_unitaries": 5, "cutoff_signal": 3, "cutoff_probe": 12, "trials": 100, "seed": 18446744073709551615,
    "tolerance": 1e-7, "sensitive": true, "out": "x.json", "format": "csv", "regime_threshold": 20,
    "theta": 0.25, "target_phase": 0.1
  })";
  const ExperimentConfig c = parse_config(text);
  EXPECT_EQ(*c.seed, 18446744073709551615ull);
  EXPECT_EQ(c.alpha->phase, 0.30000000000000004);
  const ExperimentConfig back = parse_config(to_json(c).dump());
  EXPECT_EQ(back, c);
  EXPECT_EQ(to_json(back), to_json(c));
  // The 17-digit rendering used in records also round-trips.
  EXPECT_EQ(parse_config(ordered::parse(dump_json(config_json(c))).dump()), c);
}

TEST(Config, EmptyObjectIsValid) {
  EXPECT_EQ(parse_config(std::string("{}")), ExperimentConfig{});
  EXPECT_EQ(to_json(ExperimentConfig{}).dump(), "{}");
}

TEST(Config, Errors) {
  EXPECT_EQ(field_of(R"({"delta_probe": 1, "delta_two": 1, "xi_s": 0.1, "xi_p": 1})"), "omega_d");
  EXPECT_EQ(field_of(R"({"omega_d": "ten"})"), "omega_d");
  EXPECT_EQ(field_of(R"({"n_p": -1})"), "n_p");
  EXPECT_EQ(field_of(R"({"n_p": 1.5})"), "n_p");
  EXPECT_EQ(field_of(R"({"omegad": 1})"), "omegad");
  EXPECT_EQ(field_of(R"({"alpha": [1]})"), "alpha");
  EXPECT_EQ(field_of(R"({"alpha": [-1, 0]})"), "alpha");
  EXPECT_EQ(field_of(R"({"qubit": [[1, 0], [1, 0]]})"), "qubit");
  EXPECT_EQ(field_of(R"({"format": "xml"})"), "format");
  EXPECT_EQ(field_of(R"({"tolerance": 0})"), "tolerance");
  EXPECT_EQ(field_of(R"({"chi_t": 1, "chi": 1})"), "chi_t");
  EXPECT_EQ(field_of(R"({"delta_probe": 1, "delta_two": 1, "omega_d": -1, "xi_s": 0.1, "xi_p": 1})"), "scheme");
  EXPECT_EQ(field_of("[1, 2]"), "");
  try {
    parse_config(std::string("{\n\"omega_d\": 1,\n\"xi_s\" 2\n}"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(-1.0 / 3.0), "-0.33333333333333331");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "null");
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -1e-14}) EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(Tolerance, Precedence) {
  ExperimentConfig c;
  EXPECT_EQ(detail::tolerance_for(c, std::nullopt, 3.0), 3.0);
  EXPECT_EQ(detail::tolerance_for(c, 2.0, 3.0), 2.0);
  c.tolerance = 1.0;
  EXPECT_EQ(detail::tolerance_for(c, 2.0, 3.0), 1.0);
  EXPECT_EQ(parse_tolerance("1e-6"), 1e-6);
  EXPECT_THROW(parse_tolerance("abc"), ConfigError);
  EXPECT_THROW(parse_tolerance("-1"), ConfigError);
  EXPECT_THROW(parse_tolerance("1e-6x"), ConfigError);
}

TEST(Commands, SecularBalancedRatio100Passes) {
  const ResultRecord r = run_command("secular", ratio100(), std::nullopt);
  EXPECT_EQ(r.exit_code(), 0);
  ASSERT_EQ(r.tables.size(), 1u);
  EXPECT_EQ(r.tables[0].rows.size(), 5u);
}

TEST(Commands, SecularZeroSignalCoupling) {
  ExperimentConfig c = ratio100();
  c.xi_s = 0.0;
  const ResultRecord r = run_command("secular", c, std::nullopt);
  EXPECT_EQ(r.exit_code(), 0);
  for (const auto& [k, v] : r.results) {
    if (k == "lambda_s_est" || k == "lambda_s_exact") {
      EXPECT_EQ(v.get<double>(), 0.0) << k;
    }
  }
}

TEST(Commands, MissingFieldsAndSeed) {
  ExperimentConfig c = ratio100();
  c.omega_d.reset();
  try {
    run_command("secular", c, std::nullopt);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "omega_d");
  }
  ExperimentConfig d;
  d.theta = 0.3;
  EXPECT_THROW(run_command("discriminate", d, std::nullopt), ConfigError);
  EXPECT_THROW(run_command("qnd", ExperimentConfig{}, std::nullopt), ConfigError);
  EXPECT_THROW(run_command("nope", ExperimentConfig{}, std::nullopt), ConfigError);
  ExperimentConfig p;
  p.qubits = std::vector<QubitSpec>{};
  EXPECT_THROW(run_command("preserve", p, std::nullopt), ConfigError);
}

TEST(Commands, BackactionAndToleranceFailure) {
  ExperimentConfig c;
  c.alpha = PolarPair{2.0, 0.0};
  const ResultRecord r = run_command("backaction", c, std::nullopt);
  EXPECT_EQ(r.exit_code(), 0);
  ExperimentConfig inv;
  inv.random_unitaries = 3;
  EXPECT_EQ(run_command("invariance", inv, std::nullopt).exit_code(), 0);
  EXPECT_EQ(run_command("invariance", inv, 1e-30).exit_code(), 2);
}

TEST(Commands, EffectiveConfigEchoReproducesRecord) {
  ExperimentConfig c;
  c.random_qubits = 3;
  c.chi_t = 0.7;
  const ResultRecord a = run_command("preserve", c, std::nullopt);
  ASSERT_TRUE(a.config.seed.has_value());  // defaulted seed is echoed
  const ResultRecord b = run_command("preserve", parse_config(to_json(a.config).dump()), std::nullopt);
  EXPECT_EQ(render_json(a), render_json(b));
  EXPECT_EQ(render_csv(a), render_csv(b));

  ExperimentConfig d;
  d.theta = 0.4;
  d.seed = 9;
  d.trials = 500;
  EXPECT_EQ(render_json(run_command("discriminate", d, std::nullopt)),
            render_json(run_command("discriminate", d, std::nullopt)));
}

TEST(Render, RecordLayout) {
  ExperimentConfig c;
  c.alpha = PolarPair{1.0, 0.0};
  const ResultRecord r = run_command("backaction", c, std::nullopt);
  const ordered j = ordered::parse(render_json(r));
  EXPECT_EQ(j["command"], "backaction");
  EXPECT_EQ(j["version"], library_version);
  EXPECT_EQ(j["conventions"]["evolution"], "exp(-iHt)");
  EXPECT_EQ(j["config"]["alpha"], ordered::parse("[1.0, 0.0]"));
  EXPECT_EQ(j["status"], "pass");
  EXPECT_NEAR(j["results"]["product"].get<double>(), 0.25, 1e-6);
  const std::string csv = render_csv(r);
  EXPECT_EQ(csv.rfind("key,value\ncommand,backaction\n", 0), 0u);
  EXPECT_NE(csv.find("\nproduct,0.25"), std::string::npos);
}
