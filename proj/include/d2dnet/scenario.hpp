#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "units.hpp"

namespace d2dnet {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Duplex { hd, fd };

enum class Mode { cellular, hd, fd };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::cellular: return "cellular";
    case Mode::hd: return "hd";
    case Mode::fd: return "fd";
  }
  return "?";
}

// Physical parameters of one overlay deployment.  All powers are linear watts,
// all densities are per square metre.
struct Scenario {
  double lambda_b = 0;  // base-station density
  double lambda_u = 0;  // user density
  double p_b = 0;       // base-station transmit power
  double p_d = 0;       // device transmit power
  double gamma = 0;     // association power threshold (received-power floor)
  double sigma2 = 0;    // noise power over the shared band
  double k = 0;         // cellular bias factor; k = 0 forces every user to D2D
  double alpha = 0;     // path-loss exponent
  double delta = 0;     // residual self-interference fraction after cancellation
  double p_fd = 0;      // probability that a D2D user operates full duplex
  int n = 1;            // pairing order: link with the n-th nearest same-class transmitter

  void validate() const {
    auto fail = [](const std::string& what) { throw config_error("invalid scenario: " + what); };
    auto finite = [&](double v, const char* name) {
      if (!std::isfinite(v)) fail(std::string(name) + " must be finite");
    };
    finite(lambda_b, "lambda_b");
    finite(lambda_u, "lambda_u");
    finite(p_b, "p_b");
    finite(p_d, "p_d");
    finite(gamma, "gamma");
    finite(sigma2, "sigma2");
    finite(k, "k");
    finite(alpha, "alpha");
    finite(delta, "delta");
    finite(p_fd, "p_fd");
    if (!(lambda_b > 0)) fail("lambda_b > 0 violated");
    if (!(lambda_u > 0)) fail("lambda_u > 0 violated");
    if (!(p_b > 0)) fail("p_b > 0 violated");
    if (!(p_d > 0)) fail("p_d > 0 violated");
    if (!(gamma >= 0)) fail("gamma >= 0 violated");
    if (!(sigma2 >= 0)) fail("sigma2 >= 0 violated");
    if (!(k >= 0)) fail("k >= 0 violated");
    if (!(alpha > 2)) fail("alpha > 2 violated");
    if (!(delta >= 0 && delta <= 1)) fail("delta in [0, 1] violated");
    if (!(p_fd >= 0 && p_fd <= 1)) fail("p_fd in [0, 1] violated");
    if (n < 1) fail("n >= 1 violated");
  }
};

// Knobs of the finite-population n-th-order interference transform.
struct GeneralLaplaceParams {
  int w_total = 200;   // total population size W of the studied class window
  double m_bar = 200;  // mean number of simultaneously active transmitters

  void validate() const {
    if (w_total < 2) throw config_error("invalid parameters: w_total >= 2 violated");
    if (!(m_bar > 1)) throw config_error("invalid parameters: m_bar > 1 violated");
    if (!std::isfinite(m_bar)) throw config_error("invalid parameters: m_bar must be finite");
  }
};

struct ParsedConfig {
  Scenario scenario;
  GeneralLaplaceParams laplace;
};

namespace detail {

struct KeySpec {
  const char* name;
  const char* unit;  // required unit token when one is given; "" = dimensionless
  bool required;
  bool integer;
};

inline const std::vector<KeySpec>& scenario_keys() {
  static const std::vector<KeySpec> keys = {
      {"lambda_b", "", true, false},   {"lambda_u", "", true, false},
      {"p_b_dbm", "dBm", true, false}, {"p_d_dbm", "dBm", true, false},
      {"gamma_dbm", "dBm", true, false}, {"sigma2_dbm", "dBm", true, false},
      {"k", "", true, false},          {"alpha", "", true, false},
      {"delta_db", "dB", true, false}, {"p_fd", "", true, false},
      {"n", "", true, true},           {"w_total", "", false, true},
      {"m_bar", "", false, false},
  };
  return keys;
}

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_value(const std::string& raw, const KeySpec& spec, int line) {
  std::string text = trim(raw);
  auto fail = [&](const std::string& what) {
    throw config_error("line " + std::to_string(line) + ": " + what + " for key '" + spec.name + "'");
  };
  if (text.empty()) fail("missing value");
  // Split off an optional trailing unit token ("40 dBm").
  size_t sp = text.find_last_of(" \t");
  if (sp != std::string::npos) {
    std::string unit = trim(text.substr(sp + 1));
    bool unit_like = !unit.empty() && (std::isalpha(static_cast<unsigned char>(unit[0])) != 0) &&
                     unit != "inf" && unit != "nan";
    if (unit_like) {
      if (std::string(spec.unit).empty()) fail("unexpected unit token '" + unit + "'");
      if (unit != spec.unit) fail("unit token '" + unit + "' does not match expected '" + std::string(spec.unit) + "'");
      text = trim(text.substr(0, sp));
    }
  }
  const char* begin = text.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') fail("malformed number '" + text + "'");
  if (spec.integer) {
    if (!std::isfinite(value) || value != std::floor(value))
      fail("expected an integer, got '" + text + "'");
  }
  return value;
}

}  // namespace detail

// Parses the flat key = value scenario format.  '#' starts a comment; keys may
// appear once; values may carry a unit token that must match the key's unit.
inline ParsedConfig parse_scenario_text(const std::string& text) {
  std::map<std::string, double> values;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
    std::string key = detail::trim(line.substr(0, eq));
    const detail::KeySpec* spec = nullptr;
    for (const auto& ks : detail::scenario_keys())
      if (key == ks.name) spec = &ks;
    if (spec == nullptr)
      throw config_error("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (values.count(key) != 0)
      throw config_error("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    values[key] = detail::parse_value(line.substr(eq + 1), *spec, lineno);
  }
  for (const auto& ks : detail::scenario_keys())
    if (ks.required && values.count(ks.name) == 0)
      throw config_error(std::string("missing required key '") + ks.name + "'");

  ParsedConfig cfg;
  Scenario& s = cfg.scenario;
  s.lambda_b = values["lambda_b"];
  s.lambda_u = values["lambda_u"];
  s.p_b = dbm_to_watts(values["p_b_dbm"]);
  s.p_d = dbm_to_watts(values["p_d_dbm"]);
  s.gamma = dbm_to_watts(values["gamma_dbm"]);
  s.sigma2 = dbm_to_watts(values["sigma2_dbm"]);
  s.k = values["k"];
  s.alpha = values["alpha"];
  s.delta = db_to_linear(values["delta_db"]);
  s.p_fd = values["p_fd"];
  s.n = static_cast<int>(values["n"]);
  if (values.count("w_total") != 0) cfg.laplace.w_total = static_cast<int>(values["w_total"]);
  if (values.count("m_bar") != 0) cfg.laplace.m_bar = values["m_bar"];
  s.validate();
  cfg.laplace.validate();
  return cfg;
}

inline ParsedConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

}  // namespace d2dnet
