#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <string>

#include "d2dnet/densities.hpp"
#include "d2dnet/scenario.hpp"
#include "d2dnet/units.hpp"

namespace {

using namespace d2dnet;

TEST(Units, DbmToWatts) {
  EXPECT_DOUBLE_EQ(dbm_to_watts(30.0), 1.0);
  EXPECT_DOUBLE_EQ(dbm_to_watts(40.0), 10.0);
  EXPECT_DOUBLE_EQ(dbm_to_watts(0.0), 1e-3);
  EXPECT_DOUBLE_EQ(dbm_to_watts(23.0), 0.19952623149688797);
  EXPECT_DOUBLE_EQ(dbm_to_watts(-96.0), 2.511886431509582e-13);
  EXPECT_DOUBLE_EQ(dbm_to_watts(-std::numeric_limits<double>::infinity()), 0.0);
}

TEST(Units, RoundTrips) {
  for (double dbm : {-96.0, -30.0, 0.0, 23.0, 40.0})
    EXPECT_NEAR(watts_to_dbm(dbm_to_watts(dbm)), dbm, 1e-12);
  for (double db : {-50.0, -3.0, 0.0, 10.0})
    EXPECT_NEAR(linear_to_db(db_to_linear(db)), db, 1e-12);
  EXPECT_DOUBLE_EQ(db_to_linear(-50.0), 1e-5);
}

const char* kGoodConfig = R"(# comment line
lambda_b   = 1e-6
lambda_u   = 0.1   # trailing comment
p_b_dbm    = 40 dBm
p_d_dbm    = 23 dBm
gamma_dbm  = 0 dBm
sigma2_dbm = -96 dBm
k          = 1
alpha      = 4
delta_db   = -50 dB
p_fd       = 0.5
n          = 1
)";

TEST(ScenarioParser, ParsesCompleteConfig) {
  const ParsedConfig cfg = parse_scenario_text(kGoodConfig);
  const Scenario& s = cfg.scenario;
  EXPECT_DOUBLE_EQ(s.lambda_b, 1e-6);
  EXPECT_DOUBLE_EQ(s.lambda_u, 0.1);
  EXPECT_DOUBLE_EQ(s.p_b, 10.0);
  EXPECT_DOUBLE_EQ(s.p_d, 0.19952623149688797);
  EXPECT_DOUBLE_EQ(s.gamma, 1e-3);
  EXPECT_DOUBLE_EQ(s.sigma2, 2.511886431509582e-13);
  EXPECT_DOUBLE_EQ(s.k, 1.0);
  EXPECT_DOUBLE_EQ(s.alpha, 4.0);
  EXPECT_DOUBLE_EQ(s.delta, 1e-5);
  EXPECT_DOUBLE_EQ(s.p_fd, 0.5);
  EXPECT_EQ(s.n, 1);
  // Optional keys fall back to defaults.
  EXPECT_EQ(cfg.laplace.w_total, 200);
  EXPECT_DOUBLE_EQ(cfg.laplace.m_bar, 200.0);
}

TEST(ScenarioParser, OptionalKeysOverrideDefaults) {
  const std::string text = std::string(kGoodConfig) + "w_total = 64\nm_bar = 12.5\n";
  const ParsedConfig cfg = parse_scenario_text(text);
  EXPECT_EQ(cfg.laplace.w_total, 64);
  EXPECT_DOUBLE_EQ(cfg.laplace.m_bar, 12.5);
}

TEST(ScenarioParser, UnitTokensAreOptionalButChecked) {
  std::string text(kGoodConfig);
  const size_t pos = text.find("40 dBm");
  text.replace(pos, 6, "40");  // bare number is accepted
  EXPECT_DOUBLE_EQ(parse_scenario_text(text).scenario.p_b, 10.0);
}

void expect_parse_error(const std::string& text, const std::string& needle) {
  try {
    parse_scenario_text(text);
    FAIL() << "expected config_error containing '" << needle << "'";
  } catch (const config_error& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos)
        << "got: " << e.what();
  }
}

TEST(ScenarioParser, RejectsUnknownKey) {
  expect_parse_error(std::string(kGoodConfig) + "bogus = 1\n", "unknown key 'bogus'");
}

TEST(ScenarioParser, RejectsDuplicateKey) {
  expect_parse_error(std::string(kGoodConfig) + "alpha = 4\n", "duplicate key 'alpha'");
}

TEST(ScenarioParser, RejectsMalformedNumber) {
  std::string text(kGoodConfig);
  const size_t pos = text.find("= 4");
  text.replace(pos, 3, "= four");
  expect_parse_error(text, "malformed number");
}

TEST(ScenarioParser, RejectsWrongUnitToken) {
  std::string text(kGoodConfig);
  const size_t pos = text.find("40 dBm");
  text.replace(pos, 6, "40 dB");
  expect_parse_error(text, "unit token 'dB' does not match expected 'dBm'");
}

TEST(ScenarioParser, RejectsUnitOnDimensionlessKey) {
  expect_parse_error(std::string(kGoodConfig) + "w_total = 64 dBm\n", "unexpected unit token");
}

TEST(ScenarioParser, RejectsMissingRequiredKey) {
  std::string text(kGoodConfig);
  const size_t pos = text.find("p_fd");
  text.erase(pos, text.find('\n', pos) - pos + 1);
  expect_parse_error(text, "missing required key 'p_fd'");
}

TEST(ScenarioParser, RejectsNonIntegerN) {
  std::string text(kGoodConfig);
  const size_t pos = text.find("n          = 1");
  text.replace(pos, 14, "n          = 1.5");
  expect_parse_error(text, "expected an integer");
}

TEST(ScenarioParser, ReportsLineNumbers) {
  expect_parse_error("lambda_b = 1e-6\nnot a kv line\n", "line 2");
}

TEST(ScenarioParser, MinusInfinityDbmMeansZeroWatts) {
  std::string text(kGoodConfig);
  const size_t pos = text.find("-96 dBm");
  text.replace(pos, 7, "-inf dBm");
  EXPECT_DOUBLE_EQ(parse_scenario_text(text).scenario.sigma2, 0.0);
}

TEST(ScenarioValidate, RejectsOutOfRangeValues) {
  ParsedConfig cfg = parse_scenario_text(kGoodConfig);
  Scenario s = cfg.scenario;
  s.alpha = 2.0;
  EXPECT_THROW(s.validate(), config_error);
  s = cfg.scenario;
  s.delta = 1.5;
  EXPECT_THROW(s.validate(), config_error);
  s = cfg.scenario;
  s.lambda_b = 0.0;
  EXPECT_THROW(s.validate(), config_error);
  s = cfg.scenario;
  s.n = 0;
  EXPECT_THROW(s.validate(), config_error);
  GeneralLaplaceParams glp;
  glp.w_total = 1;
  EXPECT_THROW(glp.validate(), config_error);
  glp = GeneralLaplaceParams{};
  glp.m_bar = 1.0;
  EXPECT_THROW(glp.validate(), config_error);
}

TEST(Densities, SplitsUserField) {
  Scenario s = parse_scenario_text(kGoodConfig).scenario;
  const Densities d = derive_densities(s, 0.4);
  EXPECT_DOUBLE_EQ(d.assoc_probability, 0.4);
  EXPECT_DOUBLE_EQ(d.lambda_c, 0.04);
  EXPECT_DOUBLE_EQ(d.lambda_d, 0.06);
  EXPECT_DOUBLE_EQ(d.lambda_hd_tx, 0.015);  // half of the HD share transmits
  EXPECT_DOUBLE_EQ(d.lambda_fd, 0.03);
  // Conservation: cellular + D2D shares exhaust the user field.
  EXPECT_DOUBLE_EQ(d.lambda_c + d.lambda_d, s.lambda_u);
}

TEST(Densities, EdgeShares) {
  Scenario s = parse_scenario_text(kGoodConfig).scenario;
  const Densities all_d2d = derive_densities(s, 0.0);
  EXPECT_DOUBLE_EQ(all_d2d.lambda_c, 0.0);
  EXPECT_DOUBLE_EQ(all_d2d.lambda_d, s.lambda_u);
  const Densities all_cell = derive_densities(s, 1.0);
  EXPECT_DOUBLE_EQ(all_cell.lambda_d, 0.0);
  EXPECT_DOUBLE_EQ(all_cell.lambda_hd_tx, 0.0);
  EXPECT_DOUBLE_EQ(all_cell.lambda_fd, 0.0);
  EXPECT_THROW(derive_densities(s, 1.5), std::domain_error);
  EXPECT_THROW(derive_densities(s, -0.1), std::domain_error);
}

}  // namespace
