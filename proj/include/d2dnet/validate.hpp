#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "analytic.hpp"
#include "densities.hpp"
#include "laplace.hpp"
#include "quadrature.hpp"
#include "scenario.hpp"
#include "simulator.hpp"
#include "special.hpp"
#include "units.hpp"

namespace d2dnet {

struct ValidationCheck {
  std::string name;
  double tolerance = 0;
  double observed = 0;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  uint64_t trials = 0;
  uint64_t seed = 0;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const ValidationCheck& c) { return c.pass; });
  }
};

struct ValidationOptions {
  uint64_t trials = 4000;  // conditioned drops per Monte Carlo cross-check
  uint64_t seed = 1;
  double mc_tol = 0.02;    // absolute tolerance for coverage cross-checks
  double rate_tol = 0.05;  // relative tolerance for rate cross-checks
  std::string only;        // substring filter on check names
  int threads = 0;
};

// Analytic-vs-simulation comparison rows for the D2D tiers; the gap measures
// how well the independent-thinning approximation describes the dependent
// mode field the simulator actually builds.
struct IndependenceRow {
  Mode mode = Mode::hd;
  double beta = 1;
  double analytic = 0;
  double mc_mean = 0;
  double mc_stderr = 0;
  double gap = 0;
};

inline std::vector<IndependenceRow> validate_independence_assumption(
    const Scenario& s, const Densities& d, const GeneralLaplaceParams& glp,
    const std::vector<double>& betas, uint64_t trials, uint64_t seed, BatchOptions opts = {}) {
  std::vector<IndependenceRow> rows;
  for (Mode mode : {Mode::hd, Mode::fd}) {
    const double lam = (mode == Mode::hd) ? d.lambda_hd_tx : d.lambda_fd;
    if (!(lam > 0)) continue;
    const BatchResult mc = run_batch(s, d, mode, betas, trials, seed, opts);
    for (size_t i = 0; i < betas.size(); ++i) {
      IndependenceRow row;
      row.mode = mode;
      row.beta = betas[i];
      row.analytic = coverage(CoverageQuery{betas[i], mode}, s, d, glp);
      row.mc_mean = mc.coverage[i].mean;
      row.mc_stderr = mc.coverage[i].std_error;
      row.gap = std::fabs(row.analytic - row.mc_mean);
      rows.push_back(row);
    }
  }
  return rows;
}

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

// Runs the whole cross-validation battery: special-function identities,
// quadrature oracles, closed-form-vs-general agreement, transform limits, and
// the analytic-vs-Monte-Carlo cross-checks.
inline ValidationReport run_validation(const Scenario& s, const GeneralLaplaceParams& glp,
                                       const ValidationOptions& opt = {}) {
  ValidationReport report;
  report.trials = opt.trials;
  report.seed = opt.seed;

  auto wanted = [&](const std::string& name) {
    return opt.only.empty() || name.find(opt.only) != std::string::npos;
  };
  auto add = [&](const std::string& name, double tolerance,
                 const std::function<std::pair<double, std::string>()>& eval) {
    if (!wanted(name)) return;
    ValidationCheck c;
    c.name = name;
    c.tolerance = tolerance;
    auto [observed, detail] = eval();
    c.observed = observed;
    c.detail = detail;
    c.pass = observed <= tolerance;
    report.checks.push_back(c);
  };

  const double assoc = association_probability(s);
  const Densities dens = derive_densities(s, assoc);
  const BatchOptions bopts{opt.threads};

  // --- special functions -------------------------------------------------
  add("special.gamma_recurrence", 1e-10, [&] {
    double worst = 0;
    for (double x = 0.1; x < 49.0; x *= 1.7)
      worst = std::max(worst, std::fabs(gamma_fn(x + 1.0) / (x * gamma_fn(x)) - 1.0));
    return std::pair{worst, std::string("max relative recurrence defect over (0, 50]")};
  });

  add("special.gamma_reflection", 1e-10, [&] {
    double worst = 0;
    for (double x = 0.05; x < 1.0; x += 0.09)
      worst = std::max(worst,
                       std::fabs(gamma_fn(x) * gamma_fn(1.0 - x) * std::sin(M_PI * x) / M_PI - 1.0));
    return std::pair{worst, "Gamma(1.25)*Gamma(0.75) = " + detail::fmt(gamma_fn(1.25) * gamma_fn(0.75))};
  });

  add("special.probability_integral", 1e-10, [&] {
    double worst = 0;
    for (double x : {0.3, 1.0, 2.5}) {
      const double oracle =
          quad_finite([](double t) { return std::exp(-t * t); }, 0.0, x).value /
          std::sqrt(2.0 * M_PI);
      worst = std::max(worst, std::fabs(probability_integral(x) - oracle));
    }
    const double bound = 1.0 / (2.0 * std::sqrt(2.0));
    for (double x : {5.0, 10.0, 40.0})
      if (probability_integral(x) > bound) worst = std::max(worst, 1.0);
    return std::pair{worst, std::string("defining-integral oracle; bounded by 1/(2*sqrt(2))")};
  });

  add("special.incomplete_beta", 1e-11, [&] {
    double worst = 0;
    for (double a : {0.5, 2.0, 7.5})
      for (double b : {1.0, 3.25})
        for (double x : {0.05, 0.4, 0.85}) {
          const double direct = reg_incomplete_beta(x, a, b);
          const double mirrored = 1.0 - reg_incomplete_beta(1.0 - x, b, a);
          worst = std::max(worst, std::fabs(direct - mirrored));
        }
    return std::pair{worst, std::string("symmetry I_x(a,b) = 1 - I_{1-x}(b,a)")};
  });

  add("special.interference_kernel", 1e-9, [&] {
    double worst = 0;
    for (double beta = 1e-3; beta < 1.1e3; beta *= 10.0) {
      const double quad = interference_integral_L(beta, 4.0);
      const double closed = interference_integral_L_closed_alpha4(beta);
      worst = std::max(worst, std::fabs(quad - closed) / closed);
    }
    return std::pair{worst, std::string("alpha = 4 arctan reduction over beta in [1e-3, 1e3]")};
  });

  // --- quadrature ---------------------------------------------------------
  add("quadrature.known_integrals", 1e-9, [&] {
    double worst = 0;
    worst = std::max(worst, std::fabs(quad_finite([](double x) { return std::exp(x); }, 0.0, 1.0).value -
                                      (std::exp(1.0) - 1.0)) / (std::exp(1.0) - 1.0));
    worst = std::max(worst, std::fabs(quad_finite([](double x) { return std::sin(x); }, 0.0, M_PI).value - 2.0) / 2.0);
    worst = std::max(worst, std::fabs(quad_semi_infinite([](double x) { return std::exp(-x); }, 0.0).value - 1.0));
    worst = std::max(worst, std::fabs(quad_semi_infinite([](double x) { return x / (1.0 + x * x * x * x); }, 0.0).value -
                                      M_PI / 4.0) / (M_PI / 4.0));
    return std::pair{worst, std::string("closed-form antiderivative spot checks")};
  });

  // --- closed forms vs general integrals ----------------------------------
  const bool alpha4 = (s.alpha == 4.0);

  add("closed.association", 1e-6, [&] {
    if (!alpha4) return std::pair{0.0, std::string("not applicable: alpha != 4")};
    Scenario v = s;
    double worst = 0, alt_gap = 0;
    for (double k : {0.25, 1.0, 4.0}) {
      v.k = k;
      const double general = association_probability(v);
      const double closed = association_probability_closed_alpha4(v);
      const double alt = association_probability_closed_alpha4(v, TailConvention::probability_integral);
      worst = std::max(worst, std::fabs(general - closed) / general);
      alt_gap = std::max(alt_gap, std::fabs(general - alt) / general);
    }
    return std::pair{worst, "probability-integral tail convention would deviate by " +
                                detail::fmt(alt_gap) + " rel (documented, not used)"};
  });

  add("closed.cellular_coverage", 1e-6, [&] {
    if (!alpha4 || s.k == 0) return std::pair{0.0, std::string("not applicable")};
    double worst = 0, alt_gap = 0;
    for (double beta : {0.1, 1.0, 10.0}) {
      const double general = cellular_coverage(beta, s);
      const double closed = cellular_coverage_closed_alpha4(beta, s);
      const double alt = cellular_coverage_closed_alpha4(beta, s, TailConvention::probability_integral);
      worst = std::max(worst, std::fabs(general - closed));
      alt_gap = std::max(alt_gap, std::fabs(general - alt));
    }
    return std::pair{worst, "probability-integral tail convention would deviate by " +
                                detail::fmt(alt_gap) + " abs (documented, not used)"};
  });

  add("closed.nearest_link", 1e-8, [&] {
    if (!alpha4) return std::pair{0.0, std::string("not applicable: alpha != 4")};
    const double lam = dens.lambda_hd_tx > 0 ? dens.lambda_hd_tx : dens.lambda_fd;
    double worst = 0, printed_gap = 0;
    for (double beta : {0.01, 0.5, 1.0, 10.0, 100.0})
      for (double r : {1.0, 4.0}) {
        const double s_arg = beta * detail::pow_pos(r, 4.0) / s.p_d;
        const double quad = laplace_nearest_link(s_arg, lam, r, 4.0, s.p_d);
        const double closed = laplace_nearest_link_closed_alpha4(s_arg, lam, r, s.p_d);
        const double printed =
            laplace_nearest_link_closed_alpha4(s_arg, lam, r, s.p_d, ArctanVariant::printed);
        worst = std::max(worst, std::fabs(quad - closed) / closed);
        printed_gap = std::max(printed_gap, std::fabs(quad - printed) / closed);
      }
    return std::pair{worst, "printed arctan-argument variant deviates by up to " +
                                detail::fmt(printed_gap) + " rel (documented, not used)"};
  });

  add("closed.field_exponent", 1e-8, [&] {
    const double lam = dens.lambda_fd > 0 ? dens.lambda_fd : s.lambda_u;
    double worst = 0, printed_gap = 0;
    for (double s_arg : {0.3, 2.0, 40.0}) {
      auto f = [&](double x) {
        const double v = s_arg * s.p_d * std::pow(x, -s.alpha);
        return (v / (1.0 + v)) * x;
      };
      const double oracle = std::exp(-2.0 * M_PI * lam * quad_semi_infinite(f, 0.0).value);
      const double closed = laplace_ppp_field(s_arg, lam, s.alpha, s.p_d);
      const double printed = laplace_ppp_field(s_arg, lam, s.alpha, s.p_d, FieldExponent::printed);
      worst = std::max(worst, std::fabs(oracle - closed) / oracle);
      printed_gap = std::max(printed_gap, std::fabs(oracle - printed) / oracle);
    }
    return std::pair{worst, "printed Gamma(1 +- 1/alpha) exponent deviates by up to " +
                                detail::fmt(printed_gap) + " rel (documented, not used)"};
  });

  // --- finite-population transform ----------------------------------------
  add("laplace.general_unit_s0", 1e-12, [&] {
    const double lam = dens.lambda_fd > 0 ? dens.lambda_fd : dens.lambda_hd_tx;
    const double v = laplace_general_nth(0.0, 2, 40, 20.0, lam > 0 ? lam : 0.01, 3.0, s.alpha, s.p_d);
    return std::pair{std::fabs(v - 1.0), std::string("L(0) = 1")};
  });

  add("laplace.general_nearest_limit", 5e-2, [&] {
    const double lam = dens.lambda_fd > 0 ? dens.lambda_fd : (dens.lambda_hd_tx > 0 ? dens.lambda_hd_tx : 0.05);
    const double r_d = expected_nth_neighbor_distance(1, lam);
    double worst = 0;
    for (double beta : {0.5, 2.0}) {
      const double s_arg = beta * detail::pow_pos(r_d, s.alpha) / s.p_d;
      const double general = laplace_general_nth(s_arg, 1, 1000, 1000.0, lam, r_d, s.alpha, s.p_d);
      const double nearest = laplace_nearest_link(s_arg, lam, r_d, s.alpha, s.p_d);
      worst = std::max(worst, std::fabs(general - nearest) / nearest);
    }
    return std::pair{worst, std::string("W -> inf, m_bar -> inf recovers the nearest-link transform")};
  });

  // --- Monte Carlo cross-checks -------------------------------------------
  add("mc.association", 4.0, [&] {
    Scenario v = s;
    double worst = 0;
    std::string detail_s;
    const uint64_t trials = std::max<uint64_t>(opt.trials * 50, 100000);
    for (double k : {0.25, 1.0, 4.0}) {
      v.k = k;
      const double analytic = association_probability(v);
      const Estimate mc = estimate_association(v, trials, opt.seed);
      const double z = mc.std_error > 0 ? std::fabs(mc.mean - analytic) / mc.std_error : 0.0;
      worst = std::max(worst, z);
      detail_s += "k=" + detail::fmt(k) + ":z=" + detail::fmt(z) + " ";
    }
    v.k = 0.0;
    const Estimate zero = estimate_association(v, 10000, opt.seed);
    if (zero.mean != 0.0) worst = std::max(worst, 1e9);
    return std::pair{worst, "max |z| over k grid; " + detail_s + "(k=0 exactly zero)"};
  });

  const std::vector<double> mc_betas = {0.5, 1.0, 2.0};

  add("mc.cellular_coverage", opt.mc_tol, [&] {
    if (s.k == 0) return std::pair{0.0, std::string("not applicable: k = 0")};
    const BatchResult mc = run_batch(s, dens, Mode::cellular, mc_betas, opt.trials, opt.seed, bopts);
    double worst = 0;
    for (size_t i = 0; i < mc_betas.size(); ++i)
      worst = std::max(worst, std::fabs(cellular_coverage(mc_betas[i], s) - mc.coverage[i].mean));
    const double rate_mc = mc.rate.mean;
    const double rate_an = cellular_rate(s);
    const double rate_gap = std::fabs(rate_mc - rate_an) / rate_an;
    return std::pair{worst, "rate rel gap " + detail::fmt(rate_gap) + " (checked in mc.rates)"};
  });

  add("mc.d2d_coverage", opt.mc_tol, [&] {
    const auto rows =
        validate_independence_assumption(s, dens, glp, mc_betas, opt.trials, opt.seed, bopts);
    if (rows.empty()) return std::pair{0.0, std::string("not applicable: no D2D classes")};
    double worst = 0;
    for (const auto& r : rows) worst = std::max(worst, r.gap);
    return std::pair{worst, std::string("independent-thinning approximation vs dependent mode field "
                                        "(Monte Carlo builds the joint geometry)")};
  });

  add("mc.rates", opt.rate_tol, [&] {
    double worst = 0;
    std::string detail_s;
    if (s.k > 0 && assoc > 0) {
      const Estimate mc = estimate_rate(s, dens, Mode::cellular, opt.trials, opt.seed, bopts);
      const double an = cellular_rate(s);
      const double gap = std::fabs(mc.mean - an) / an;
      worst = std::max(worst, gap);
      detail_s += "cellular=" + detail::fmt(gap) + " ";
    }
    for (Mode m : {Mode::hd, Mode::fd}) {
      const double lam = (m == Mode::hd) ? dens.lambda_hd_tx : dens.lambda_fd;
      if (!(lam > 0)) continue;
      const Estimate mc = estimate_rate(s, dens, m, opt.trials, opt.seed, bopts);
      const double an = rate(m, s, dens, glp).nats;
      const double gap = std::fabs(mc.mean - an) / an;
      worst = std::max(worst, gap);
      detail_s += std::string(mode_name(m)) + "=" + detail::fmt(gap) + " ";
    }
    return std::pair{worst, "relative rate gaps: " + detail_s};
  });

  // --- simulator internals --------------------------------------------------
  add("sim.determinism", 0.0, [&] {
    Mode mode = Mode::cellular;
    if (dens.lambda_fd > 0) mode = Mode::fd;
    else if (dens.lambda_hd_tx > 0) mode = Mode::hd;
    else if (s.k == 0) return std::pair{0.0, std::string("not applicable")};
    const uint64_t t = std::min<uint64_t>(opt.trials, 500);
    const BatchResult a = run_batch(s, dens, mode, mc_betas, t, opt.seed, BatchOptions{1});
    const BatchResult b = run_batch(s, dens, mode, mc_betas, t, opt.seed, BatchOptions{4});
    double worst = 0;
    for (size_t i = 0; i < mc_betas.size(); ++i)
      worst = std::max(worst, std::fabs(a.coverage[i].mean - b.coverage[i].mean));
    worst = std::max(worst, std::fabs(a.rate.mean - b.rate.mean));
    return std::pair{worst, std::string("1-thread vs 4-thread batches must agree bitwise")};
  });

  add("sim.truncation", 1e-2, [&] {
    Duplex dup;
    if (dens.lambda_hd_tx > 0) dup = Duplex::hd;
    else if (dens.lambda_fd > 0) dup = Duplex::fd;
    else return std::pair{0.0, std::string("not applicable: no D2D classes")};
    const TruncationProbe probe =
        truncation_probe(s, dens, dup, mc_betas, std::min<uint64_t>(opt.trials, 2000), opt.seed);
    return std::pair{probe.max_delta,
                     std::string("paired coverage shift when the interference window doubles")};
  });

  add("sim.dispersion", 0.1, [&] {
    SplitMix64 g = trial_stream(opt.seed, 0xD15);
    const double lambda = 0.01, radius = 56.41895835477563;  // mean ~ 100 points
    const int fields = 2000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < fields; ++i) {
      const double c = static_cast<double>(sample_ppp(g, lambda, radius).points.size());
      sum += c;
      sumsq += c * c;
    }
    const double mean = sum / fields;
    const double var = sumsq / fields - mean * mean;
    return std::pair{std::fabs(var / mean - 1.0),
                     "variance/mean = " + detail::fmt(var / mean) + " over " +
                         std::to_string(fields) + " fields"};
  });

  return report;
}

inline nlohmann::json report_to_json(const ValidationReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const ValidationCheck& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"tolerance", c.tolerance},
                      {"observed", c.observed},
                      {"pass", c.pass},
                      {"detail", c.detail}});
  return nlohmann::json{{"checks", checks},
                        {"all_pass", report.all_pass()},
                        {"trials", report.trials},
                        {"seed", report.seed}};
}

inline std::string report_text(const ValidationReport& report) {
  std::string out;
  for (const ValidationCheck& c : report.checks) {
    out += c.pass ? "[PASS] " : "[FAIL] ";
    out += c.name;
    out += "  observed=" + detail::fmt(c.observed);
    out += "  tol=" + detail::fmt(c.tolerance);
    if (!c.detail.empty()) out += "  (" + c.detail + ")";
    out += '\n';
  }
  out += report.all_pass() ? "all checks passed\n" : "some checks FAILED\n";
  return out;
}

}  // namespace d2dnet
