#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "scenario.hpp"
#include "simulator.hpp"
#include "units.hpp"

namespace d2dnet {

struct GridSpec {
  double start = 0;
  double stop = 0;
  double step = 0;
};

// Parses "start:stop:step"; the grid is inclusive of both endpoints (up to a
// relative step tolerance on the upper edge).
inline GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  double* slots[3] = {&g.start, &g.stop, &g.step};
  size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const size_t colon = text.find(':', pos);
    const bool last = (i == 2);
    if ((colon == std::string::npos) != last)
      throw config_error("grid must have the form start:stop:step, got '" + text + "'");
    const std::string part = text.substr(pos, last ? std::string::npos : colon - pos);
    char* end = nullptr;
    *slots[i] = std::strtod(part.c_str(), &end);
    if (end == part.c_str() || *end != '\0')
      throw config_error("grid has a malformed number '" + part + "'");
    pos = colon + 1;
  }
  if (!(g.step > 0)) throw config_error("grid step must be positive");
  if (g.stop < g.start) throw config_error("grid stop must not precede start");
  return g;
}

inline std::vector<double> grid_points(const GridSpec& g) {
  std::vector<double> pts;
  const double span = g.stop - g.start;
  const int count = static_cast<int>(std::floor(span / g.step + 1e-9)) + 1;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) pts.push_back(g.start + i * g.step);
  return pts;
}

// Locale-independent shortest %.10g-style formatting.
inline std::string format_g10(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 10);
  return std::string(buf, res.ptr);
}

struct CurveRow {
  double x = 0;         // sweep coordinate (beta in dB, or bias k)
  double analytic = 0;  // analytic-engine value
  double mc_mean = 0;   // Monte Carlo estimate
  double mc_stderr = 0; // standard error of the estimate
  uint64_t trials = 0;
};

inline std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = "x,analytic,mc_mean,mc_stderr,trials\n";
  for (const CurveRow& r : rows) {
    out += format_g10(r.x);
    out += ',';
    out += format_g10(r.analytic);
    out += ',';
    out += format_g10(r.mc_mean);
    out += ',';
    out += format_g10(r.mc_stderr);
    out += ',';
    out += std::to_string(r.trials);
    out += '\n';
  }
  return out;
}

// Coverage curve over a beta grid given in dB: one conditioned drop set per
// mode feeds every grid point.
inline std::vector<CurveRow> coverage_sweep(const Scenario& s, const Densities& d,
                                            const GeneralLaplaceParams& glp, Mode mode,
                                            const std::vector<double>& beta_db, uint64_t trials,
                                            uint64_t seed, BatchOptions opts = {},
                                            QuadratureSpec spec = {}) {
  std::vector<double> betas;
  betas.reserve(beta_db.size());
  for (double b : beta_db) betas.push_back(db_to_linear(b));
  const BatchResult mc = run_batch(s, d, mode, betas, trials, seed, opts);
  std::vector<CurveRow> rows(betas.size());
  for (size_t i = 0; i < betas.size(); ++i) {
    rows[i].x = beta_db[i];
    rows[i].analytic = coverage(CoverageQuery{betas[i], mode}, s, d, glp, spec);
    rows[i].mc_mean = mc.coverage[i].mean;
    rows[i].mc_stderr = mc.coverage[i].std_error;
    rows[i].trials = mc.coverage[i].trials;
  }
  return rows;
}

struct RateRow {
  Mode mode = Mode::cellular;
  double analytic = 0;
  double mc_mean = 0;
  double mc_stderr = 0;
  uint64_t trials = 0;
};

inline std::vector<RateRow> rate_table(const Scenario& s, const Densities& d,
                                       const GeneralLaplaceParams& glp,
                                       const std::vector<Mode>& modes, uint64_t trials,
                                       uint64_t seed, BatchOptions opts = {},
                                       QuadratureSpec spec = {}) {
  std::vector<RateRow> rows;
  rows.reserve(modes.size());
  for (Mode m : modes) {
    RateRow row;
    row.mode = m;
    row.analytic = rate(m, s, d, glp, spec).nats;
    const Estimate e = estimate_rate(s, d, m, trials, seed, opts);
    row.mc_mean = e.mean;
    row.mc_stderr = e.std_error;
    row.trials = e.trials;
    rows.push_back(row);
  }
  return rows;
}

inline std::string rate_csv(const std::vector<RateRow>& rows) {
  std::string out = "mode,analytic,mc_mean,mc_stderr,trials\n";
  for (const RateRow& r : rows) {
    out += mode_name(r.mode);
    out += ',';
    out += format_g10(r.analytic);
    out += ',';
    out += format_g10(r.mc_mean);
    out += ',';
    out += format_g10(r.mc_stderr);
    out += ',';
    out += std::to_string(r.trials);
    out += '\n';
  }
  return out;
}

struct ThroughputRow {
  double k = 0;
  ThroughputParts parts;
};

// Analytic sum throughput as a function of the bias k.
inline std::vector<ThroughputRow> throughput_sweep(Scenario s, const GeneralLaplaceParams& glp,
                                                   const std::vector<double>& ks,
                                                   bool fd_both_directions = false,
                                                   QuadratureSpec spec = {}) {
  std::vector<ThroughputRow> rows;
  rows.reserve(ks.size());
  for (double k : ks) {
    s.k = k;
    s.validate();
    rows.push_back({k, sum_throughput(s, glp, fd_both_directions, spec)});
  }
  return rows;
}

inline std::string throughput_csv(const std::vector<ThroughputRow>& rows) {
  std::string out = "k,cellular,d2d,total\n";
  for (const ThroughputRow& r : rows) {
    out += format_g10(r.k);
    out += ',';
    out += format_g10(r.parts.cellular);
    out += ',';
    out += format_g10(r.parts.d2d);
    out += ',';
    out += format_g10(r.parts.total);
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file '" + path.string() + "'");
  out << content;
}

// Companion matplotlib scripts so sweep outputs can be eyeballed immediately.
inline std::string coverage_plot_script(const std::vector<std::string>& csv_names) {
  std::string files = "[";
  for (size_t i = 0; i < csv_names.size(); ++i) {
    files += "\"" + csv_names[i] + "\"";
    if (i + 1 < csv_names.size()) files += ", ";
  }
  files += "]";
  return
      "#!/usr/bin/env python3\n"
      "\"\"\"Plots coverage sweeps produced alongside this script.\"\"\"\n"
      "import csv\n"
      "import os\n"
      "import matplotlib\n"
      "matplotlib.use(\"Agg\")\n"
      "import matplotlib.pyplot as plt\n"
      "\n"
      "here = os.path.dirname(os.path.abspath(__file__))\n"
      "fig, ax = plt.subplots(figsize=(7, 5))\n"
      "for name in " + files + ":\n"
      "    path = os.path.join(here, name)\n"
      "    xs, an, mc, se = [], [], [], []\n"
      "    with open(path) as fh:\n"
      "        for row in csv.DictReader(fh):\n"
      "            xs.append(float(row[\"x\"]))\n"
      "            an.append(float(row[\"analytic\"]))\n"
      "            mc.append(float(row[\"mc_mean\"]))\n"
      "            se.append(float(row[\"mc_stderr\"]))\n"
      "    label = name.replace(\"coverage_\", \"\").replace(\".csv\", \"\")\n"
      "    line, = ax.plot(xs, an, label=f\"{label} analytic\")\n"
      "    ax.errorbar(xs, mc, yerr=[2 * s for s in se], fmt=\"o\", ms=3,\n"
      "                color=line.get_color(), label=f\"{label} MC\")\n"
      "ax.set_xlabel(\"SINR threshold [dB]\")\n"
      "ax.set_ylabel(\"coverage probability\")\n"
      "ax.set_ylim(0, 1.02)\n"
      "ax.grid(alpha=0.3)\n"
      "ax.legend()\n"
      "fig.tight_layout()\n"
      "fig.savefig(os.path.join(here, \"coverage.png\"), dpi=150)\n"
      "print(\"wrote\", os.path.join(here, \"coverage.png\"))\n";
}

inline std::string throughput_plot_script() {
  return
      "#!/usr/bin/env python3\n"
      "\"\"\"Plots the sum-throughput sweep produced alongside this script.\"\"\"\n"
      "import csv\n"
      "import os\n"
      "import matplotlib\n"
      "matplotlib.use(\"Agg\")\n"
      "import matplotlib.pyplot as plt\n"
      "\n"
      "here = os.path.dirname(os.path.abspath(__file__))\n"
      "ks, cel, d2d, tot = [], [], [], []\n"
      "with open(os.path.join(here, \"throughput.csv\")) as fh:\n"
      "    for row in csv.DictReader(fh):\n"
      "        ks.append(float(row[\"k\"]))\n"
      "        cel.append(float(row[\"cellular\"]))\n"
      "        d2d.append(float(row[\"d2d\"]))\n"
      "        tot.append(float(row[\"total\"]))\n"
      "fig, ax = plt.subplots(figsize=(7, 5))\n"
      "ax.plot(ks, tot, \"o-\", label=\"total\")\n"
      "ax.plot(ks, cel, \"s--\", label=\"cellular share\")\n"
      "ax.plot(ks, d2d, \"^--\", label=\"D2D share\")\n"
      "ax.set_xlabel(\"cellular bias k\")\n"
      "ax.set_ylabel(\"sum throughput [nats/s/Hz/m$^2$]\")\n"
      "ax.grid(alpha=0.3)\n"
      "ax.legend()\n"
      "fig.tight_layout()\n"
      "fig.savefig(os.path.join(here, \"throughput.png\"), dpi=150)\n"
      "print(\"wrote\", os.path.join(here, \"throughput.png\"))\n";
}

}  // namespace d2dnet
