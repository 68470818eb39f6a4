// Command-line front end: analytic curves, Monte Carlo cross-checks, and the
// validation battery, driven by a scenario config file.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "d2dnet/analytic.hpp"
#include "d2dnet/densities.hpp"
#include "d2dnet/scenario.hpp"
#include "d2dnet/simulator.hpp"
#include "d2dnet/sweep.hpp"
#include "d2dnet/units.hpp"
#include "d2dnet/validate.hpp"

namespace {

struct GlobalArgs {
  std::string config;
  std::string out = ".";
  uint64_t seed = 1;
  int threads = 0;
  int n_override = -1;
};

d2dnet::ParsedConfig load(const GlobalArgs& g) {
  d2dnet::ParsedConfig cfg = d2dnet::load_scenario_file(g.config);
  if (g.n_override >= 0) {
    cfg.scenario.n = g.n_override;
    cfg.scenario.validate();
  }
  return cfg;
}

std::filesystem::path out_path(const GlobalArgs& g, const std::string& name) {
  return std::filesystem::path(g.out) / name;
}

int run_assoc(const GlobalArgs& g, uint64_t trials) {
  const d2dnet::ParsedConfig cfg = load(g);
  const d2dnet::Scenario& s = cfg.scenario;
  const double analytic = d2dnet::association_probability(s);
  const d2dnet::Estimate mc = d2dnet::estimate_association(s, trials, g.seed);
  const double z = mc.std_error > 0 ? (mc.mean - analytic) / mc.std_error : 0.0;

  std::printf("association probability (bias k = %g)\n", s.k);
  std::printf("  analytic (integral)  %.10g\n", analytic);
  if (s.alpha == 4.0) {
    const double closed = d2dnet::association_probability_closed_alpha4(s);
    const double alt = d2dnet::association_probability_closed_alpha4(
        s, d2dnet::TailConvention::probability_integral);
    std::printf("  analytic (closed)    %.10g\n", closed);
    std::printf("  note: probability-integral tail convention would give %.10g (not used)\n", alt);
  }
  std::printf("  monte carlo          %.10g +- %.3g  (trials %" PRIu64 ")\n", mc.mean,
              mc.std_error, trials);
  std::printf("  z-score              %.3f\n", z);
  return 0;
}

int run_coverage(const GlobalArgs& g, const std::string& grid, std::vector<std::string> modes,
                 uint64_t trials) {
  const d2dnet::ParsedConfig cfg = load(g);
  const d2dnet::Scenario& s = cfg.scenario;
  const double assoc = d2dnet::association_probability(s);
  const d2dnet::Densities dens = d2dnet::derive_densities(s, assoc);
  const std::vector<double> beta_db = d2dnet::grid_points(d2dnet::parse_grid(grid));

  if (modes.empty()) modes = {"cellular", "hd", "fd"};
  std::vector<std::string> csv_names;
  for (const std::string& name : modes) {
    d2dnet::Mode mode;
    if (name == "cellular") mode = d2dnet::Mode::cellular;
    else if (name == "hd") mode = d2dnet::Mode::hd;
    else if (name == "fd") mode = d2dnet::Mode::fd;
    else throw d2dnet::config_error("unknown mode '" + name + "' (expected cellular, hd, fd)");

    const auto rows = d2dnet::coverage_sweep(s, dens, cfg.laplace, mode, beta_db, trials, g.seed,
                                             d2dnet::BatchOptions{g.threads});
    const std::string csv_name = "coverage_" + name + ".csv";
    d2dnet::write_text_file(out_path(g, csv_name), d2dnet::curve_csv(rows));
    csv_names.push_back(csv_name);

    double worst = 0;
    for (const auto& row : rows) worst = std::max(worst, std::fabs(row.analytic - row.mc_mean));
    std::printf("%-8s  %zu points  max |analytic - mc| = %.4f  -> %s\n", name.c_str(),
                rows.size(), worst, csv_name.c_str());
    for (const auto& row : rows)
      std::printf("  beta %+6.1f dB  analytic %.6f  mc %.6f +- %.6f\n", row.x, row.analytic,
                  row.mc_mean, row.mc_stderr);
  }
  d2dnet::write_text_file(out_path(g, "plot_coverage.py"), d2dnet::coverage_plot_script(csv_names));
  std::printf("wrote %s\n", out_path(g, "plot_coverage.py").string().c_str());
  return 0;
}

int run_rate(const GlobalArgs& g, uint64_t trials) {
  const d2dnet::ParsedConfig cfg = load(g);
  const d2dnet::Scenario& s = cfg.scenario;
  const double assoc = d2dnet::association_probability(s);
  const d2dnet::Densities dens = d2dnet::derive_densities(s, assoc);

  std::vector<d2dnet::Mode> modes;
  if (s.k > 0 && dens.lambda_c > 0) modes.push_back(d2dnet::Mode::cellular);
  if (dens.lambda_hd_tx > 0) modes.push_back(d2dnet::Mode::hd);
  if (dens.lambda_fd > 0) modes.push_back(d2dnet::Mode::fd);
  const auto rows = d2dnet::rate_table(s, dens, cfg.laplace, modes, trials, g.seed,
                                       d2dnet::BatchOptions{g.threads});
  d2dnet::write_text_file(out_path(g, "rates.csv"), d2dnet::rate_csv(rows));
  std::printf("average rate (nats/s/Hz), %" PRIu64 " conditioned drops per tier\n", trials);
  for (const auto& row : rows)
    std::printf("  %-8s  analytic %.6f  mc %.6f +- %.6f\n", d2dnet::mode_name(row.mode),
                row.analytic, row.mc_mean, row.mc_stderr);
  std::printf("wrote %s\n", out_path(g, "rates.csv").string().c_str());
  return 0;
}

int run_throughput(const GlobalArgs& g, const std::string& grid, bool fd_both) {
  const d2dnet::ParsedConfig cfg = load(g);
  const std::vector<double> ks = d2dnet::grid_points(d2dnet::parse_grid(grid));

  const auto rows = d2dnet::throughput_sweep(cfg.scenario, cfg.laplace, ks, fd_both);
  d2dnet::write_text_file(out_path(g, "throughput.csv"), d2dnet::throughput_csv(rows));

  size_t best = 0;
  std::printf("sum throughput vs bias k (analytic)\n");
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].parts.total > rows[best].parts.total) best = i;
    std::printf("  k %6.3f  cellular %.6g  d2d %.6g  total %.6g\n", rows[i].k,
                rows[i].parts.cellular, rows[i].parts.d2d, rows[i].parts.total);
  }
  std::printf("argmax k = %.3f (total %.6g)\n", rows[best].k, rows[best].parts.total);
  d2dnet::write_text_file(out_path(g, "plot_throughput.py"), d2dnet::throughput_plot_script());
  std::printf("wrote %s and plot_throughput.py\n", out_path(g, "throughput.csv").string().c_str());
  return 0;
}

int run_validate(const GlobalArgs& g, uint64_t trials, const std::string& only, double mc_tol) {
  const d2dnet::ParsedConfig cfg = load(g);
  d2dnet::ValidationOptions opt;
  opt.trials = trials;
  opt.seed = g.seed;
  opt.only = only;
  opt.threads = g.threads;
  if (mc_tol > 0) {
    opt.mc_tol = mc_tol;
    opt.rate_tol = mc_tol;
  }
  const d2dnet::ValidationReport report = d2dnet::run_validation(cfg.scenario, cfg.laplace, opt);
  std::fputs(d2dnet::report_text(report).c_str(), stdout);
  d2dnet::write_text_file(out_path(g, "validate_report.json"),
                          d2dnet::report_to_json(report).dump(2) + "\n");
  std::printf("wrote %s\n", out_path(g, "validate_report.json").string().c_str());
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"overlay cellular/D2D network toolkit: analytic engine + Monte Carlo validator"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config, "scenario config file")->required();
  app.add_option("--out", g.out, "output directory for CSV/JSON artifacts");
  app.add_option("--seed", g.seed, "master seed for Monte Carlo streams");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
  app.add_option("--n", g.n_override, "override the pairing order n");

  CLI::App* assoc = app.add_subcommand("assoc", "association probability: analytic vs Monte Carlo");
  uint64_t assoc_trials = 100000;
  assoc->add_option("--trials", assoc_trials, "Monte Carlo field draws");

  CLI::App* coverage = app.add_subcommand("coverage", "coverage curves over an SINR-threshold grid");
  std::string cov_grid = "-10:20:2";
  std::vector<std::string> cov_modes;
  uint64_t cov_trials = 10000;
  coverage->add_option("--grid", cov_grid, "threshold grid in dB, start:stop:step");
  coverage->add_option("--mode", cov_modes, "tiers to sweep (cellular, hd, fd); default all");
  coverage->add_option("--trials", cov_trials, "conditioned drops per tier");

  CLI::App* rate = app.add_subcommand("rate", "average rate per tier: analytic vs Monte Carlo");
  uint64_t rate_trials = 10000;
  rate->add_option("--trials", rate_trials, "conditioned drops per tier");

  CLI::App* throughput = app.add_subcommand("throughput", "analytic sum throughput vs bias k");
  std::string thr_grid = "0:4:0.5";
  bool fd_both = false;
  throughput->add_option("--grid", thr_grid, "bias grid, start:stop:step (linear k)");
  throughput->add_flag("--fd-both", fd_both, "count both directions of each FD pair");

  CLI::App* validate = app.add_subcommand("validate", "cross-validation battery, JSON report");
  uint64_t val_trials = 4000;
  std::string val_only;
  double val_mc_tol = 0;
  validate->add_option("--trials", val_trials, "conditioned drops per Monte Carlo check");
  validate->add_option("--only", val_only, "run only checks whose name contains this substring");
  validate->add_option("--mc-tol", val_mc_tol, "override Monte Carlo gap tolerances");

  try {
    app.parse(argc, argv);
    if (*assoc) return run_assoc(g, assoc_trials);
    if (*coverage) return run_coverage(g, cov_grid, cov_modes, cov_trials);
    if (*rate) return run_rate(g, rate_trials);
    if (*throughput) return run_throughput(g, thr_grid, fd_both);
    if (*validate) return run_validate(g, val_trials, val_only, val_mc_tol);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const d2dnet::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
