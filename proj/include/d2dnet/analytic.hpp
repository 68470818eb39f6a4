#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "densities.hpp"
#include "laplace.hpp"
#include "quadrature.hpp"
#include "scenario.hpp"
#include "special.hpp"

namespace d2dnet {

// One requested coverage operating point.
struct CoverageQuery {
  double beta = 1.0;            // SINR threshold, linear
  Mode mode = Mode::cellular;   // which tier/duplex class is probed
};

struct RateResult {
  Mode mode = Mode::cellular;
  double nats = 0;  // average ergodic rate in nats/s/Hz
};

// The alpha = 4 closed forms carry a Gaussian tail e^{x^2} erfc(x).  A second
// circulating spelling replaces erfc(x) by 1 - probability_integral(x); it is
// selectable so that reports can surface the discrepancy instead of hiding it.
enum class TailConvention { erfc, probability_integral };

namespace detail {

inline double pow_pos(double r, double alpha) {
  if (alpha == 4.0) {
    const double r2 = r * r;
    return r2 * r2;
  }
  return std::pow(r, alpha);
}

inline QuadratureSpec tighten(const QuadratureSpec& spec) {
  QuadratureSpec inner = spec;
  inner.rel_tol *= 0.1;  // nested quadratures run the inner pass 10x tighter
  inner.abs_tol *= 0.1;
  return inner;
}

inline double gaussian_tail(double x, TailConvention conv) {
  if (conv == TailConvention::erfc) return exp_x2_erfc(x);
  if (x > 20.0) return std::numeric_limits<double>::infinity();  // variant diverges
  return std::exp(x * x) * (1.0 - probability_integral(x));
}

// Same-class nearest-link transform with the validated alpha = 4 reduction.
inline double nearest_link_L(double s_arg, double lambda, double r_min, double alpha,
                             double p_tx, const QuadratureSpec& spec) {
  if (alpha == 4.0) return laplace_nearest_link_closed_alpha4(s_arg, lambda, r_min, p_tx);
  return laplace_nearest_link(s_arg, lambda, r_min, alpha, p_tx, spec);
}

}  // namespace detail

// Probability that the biased received cellular power clears the association
// threshold: P = 2 pi lambda_b int_0^inf exp(-gamma r^alpha / (k P_b) - pi lambda_b r^2) r dr.
inline double association_probability(const Scenario& s, QuadratureSpec spec = {}) {
  if (s.k == 0) return 0.0;
  if (s.gamma == 0) return 1.0;
  const double c = s.gamma / (s.k * s.p_b);
  const double lb = s.lambda_b;
  const double a = s.alpha;
  auto f = [c, lb, a](double r) {
    return std::exp(-c * detail::pow_pos(r, a) - M_PI * lb * r * r) * r;
  };
  return 2.0 * M_PI * lb * quad_semi_infinite(f, 0.0, spec).value;
}

inline double association_probability_closed_alpha4(const Scenario& s,
                                                    TailConvention conv = TailConvention::erfc) {
  if (s.alpha != 4.0)
    throw std::domain_error("association_probability_closed_alpha4 requires alpha = 4");
  if (s.k == 0) return 0.0;
  if (s.gamma == 0) return 1.0;
  const double ratio = s.k * s.p_b / (4.0 * s.gamma);
  const double x = M_PI * s.lambda_b * std::sqrt(ratio);
  return M_PI * s.lambda_b * std::sqrt(M_PI * ratio) * detail::gaussian_tail(x, conv);
}

// Distance from a user to its nearest base station (Rayleigh).
inline double nearest_bs_pdf(double r, double lambda_b) {
  if (!(lambda_b > 0)) throw std::domain_error("nearest_bs_pdf requires lambda_b > 0");
  if (r < 0) return 0.0;
  return 2.0 * M_PI * lambda_b * r * std::exp(-M_PI * lambda_b * r * r);
}

// Distance to the n-th nearest point of a plane process of density lambda
// (generalized Gamma law).
inline double nth_neighbor_pdf(double r, int n, double lambda) {
  if (n < 1) throw std::domain_error("nth_neighbor_pdf requires n >= 1");
  if (!(lambda > 0)) throw std::domain_error("nth_neighbor_pdf requires lambda > 0");
  if (r < 0) return 0.0;
  const double lp = lambda * M_PI;
  return 2.0 * std::pow(lp, n) * std::pow(r, 2 * n - 1) * std::exp(-lp * r * r) / gamma_fn(n);
}

// Mean of the n-th neighbor distance: Gamma(n + 1/2) / (Gamma(n) sqrt(lambda pi)).
inline double expected_nth_neighbor_distance(int n, double lambda) {
  if (n < 1) throw std::domain_error("expected_nth_neighbor_distance requires n >= 1");
  if (!(lambda > 0)) throw std::domain_error("expected_nth_neighbor_distance requires lambda > 0");
  return gamma_fn(n + 0.5) / (gamma_fn(n) * std::sqrt(lambda * M_PI));
}

// Serving-BS distance density conditioned on cellular association.
inline double serving_bs_distance_pdf(double r, const Scenario& s, double assoc_probability) {
  if (s.k == 0 || !(assoc_probability > 0))
    throw std::domain_error("serving_bs_distance_pdf requires a cellular tier (k > 0)");
  if (r < 0) return 0.0;
  const double c = s.gamma / (s.k * s.p_b);
  return 2.0 * M_PI * s.lambda_b * r *
         std::exp(-c * detail::pow_pos(r, s.alpha) - M_PI * s.lambda_b * r * r) /
         assoc_probability;
}

// Cellular coverage probability P[SINR > beta | cellular].
inline double cellular_coverage(double beta, const Scenario& s, QuadratureSpec spec = {}) {
  if (s.k == 0) throw config_error("cellular coverage undefined: k = 0 leaves no cellular users");
  if (!(beta >= 0)) throw std::domain_error("cellular_coverage requires beta >= 0");
  if (beta == 0) return 1.0;
  const QuadratureSpec inner = detail::tighten(spec);
  const double assoc = association_probability(s, spec);
  const double iterm =
      1.0 + 2.0 * std::pow(beta, 2.0 / s.alpha) * detail::interference_L(beta, s.alpha, inner);
  const double c = beta * s.sigma2 / s.p_b + s.gamma / (s.k * s.p_b);
  const double lb = s.lambda_b;
  const double a = s.alpha;
  auto f = [=](double r) {
    return r * std::exp(-M_PI * lb * r * r * iterm - c * detail::pow_pos(r, a));
  };
  return 2.0 * M_PI * lb * quad_semi_infinite(f, 0.0, spec).value / assoc;
}

inline double cellular_coverage_closed_alpha4(double beta, const Scenario& s,
                                              TailConvention conv = TailConvention::erfc) {
  if (s.alpha != 4.0)
    throw std::domain_error("cellular_coverage_closed_alpha4 requires alpha = 4");
  if (s.k == 0) throw config_error("cellular coverage undefined: k = 0 leaves no cellular users");
  if (beta == 0) return 1.0;
  const double assoc = association_probability_closed_alpha4(s, conv);
  const double sq = std::sqrt(beta);
  const double a = M_PI * s.lambda_b * (1.0 + sq * std::atan(sq));
  const double c = (s.k * beta * s.sigma2 + s.gamma) / (s.k * s.p_b);
  if (c == 0) return M_PI * s.lambda_b / (assoc * a);  // noiseless, threshold-free limit
  const double x = a / (2.0 * std::sqrt(c));
  return (M_PI * s.lambda_b / assoc) * std::sqrt(M_PI / (4.0 * c)) *
         detail::gaussian_tail(x, conv);
}

// Average cellular ergodic rate E[ln(1 + SINR)] in nats/s/Hz, conditioned on
// cellular association.  Outer integral over the serving distance, inner over
// the rate threshold t with x = e^t - 1.
inline double cellular_rate(const Scenario& s, QuadratureSpec spec = {}) {
  if (s.k == 0) throw config_error("cellular rate undefined: k = 0 leaves no cellular users");
  const QuadratureSpec inner = detail::tighten(spec);
  const double assoc = association_probability(s, spec);
  const double cgam = s.gamma / (s.k * s.p_b);
  const double lb = s.lambda_b;
  const double a = s.alpha;
  auto outer = [&](double r) {
    const double ra = detail::pow_pos(r, a);
    const double r2 = r * r;
    auto inner_f = [&](double t) {
      const double x = std::expm1(t);
      if (!std::isfinite(x)) return 0.0;  // integrand limit; avoids inf * 0 at sigma2 = 0
      const double interf =
          2.0 * M_PI * lb * std::pow(x, 2.0 / a) * r2 * detail::interference_L(x, a, inner);
      return std::exp(-x * s.sigma2 * ra / s.p_b - interf);
    };
    const double tail = quad_semi_infinite(inner_f, 0.0, inner).value;
    return r * std::exp(-M_PI * lb * r2 - cgam * ra) * tail;
  };
  return 2.0 * M_PI * lb * quad_semi_infinite(outer, 0.0, spec).value / assoc;
}

// D2D coverage probability P[SINR > beta | duplex class], pairing with the
// n-th nearest same-class transmitter.
inline double d2d_coverage(double beta, Duplex duplex, const Scenario& s, const Densities& d,
                           const GeneralLaplaceParams& glp, QuadratureSpec spec = {}) {
  if (!(beta >= 0)) throw std::domain_error("d2d_coverage requires beta >= 0");
  const double lam_same = (duplex == Duplex::hd) ? d.lambda_hd_tx : d.lambda_fd;
  const double lam_cross = (duplex == Duplex::hd) ? d.lambda_fd : d.lambda_hd_tx;
  if (!(lam_same > 0))
    throw config_error("d2d_coverage: requested duplex class has zero density");
  if (beta == 0) return 1.0;
  if (std::isinf(beta)) return 0.0;  // rate integrand tail; avoids inf * 0 at sigma2 = 0
  const QuadratureSpec inner = detail::tighten(spec);
  // FD self-interference scales with own transmit power, so P_d cancels out.
  const double noise_c = beta * (s.sigma2 / s.p_d + (duplex == Duplex::fd ? s.delta : 0.0));
  auto f = [&](double r) {
    const double ra = detail::pow_pos(r, s.alpha);
    const double s_arg = beta * ra / s.p_d;
    const double l_same =
        (s.n == 1) ? detail::nearest_link_L(s_arg, lam_same, r, s.alpha, s.p_d, inner)
                   : laplace_general_for_class(s_arg, s, d, glp, duplex, r, inner);
    const double l_cross = laplace_ppp_field(s_arg, lam_cross, s.alpha, s.p_d);
    return nth_neighbor_pdf(r, s.n, lam_same) * l_same * l_cross * std::exp(-noise_c * ra);
  };
  return quad_semi_infinite(f, 0.0, spec).value;
}

// Average D2D ergodic rate in nats/s/Hz for one receive direction.
inline double d2d_rate(Duplex duplex, const Scenario& s, const Densities& d,
                       const GeneralLaplaceParams& glp, QuadratureSpec spec = {}) {
  const QuadratureSpec inner = detail::tighten(spec);
  auto f = [&](double t) { return d2d_coverage(std::expm1(t), duplex, s, d, glp, inner); };
  return quad_semi_infinite(f, 0.0, spec).value;
}

inline double coverage(const CoverageQuery& q, const Scenario& s, const Densities& d,
                       const GeneralLaplaceParams& glp, QuadratureSpec spec = {}) {
  if (q.mode == Mode::cellular) return cellular_coverage(q.beta, s, spec);
  return d2d_coverage(q.beta, q.mode == Mode::hd ? Duplex::hd : Duplex::fd, s, d, glp, spec);
}

inline RateResult rate(Mode mode, const Scenario& s, const Densities& d,
                       const GeneralLaplaceParams& glp, QuadratureSpec spec = {}) {
  RateResult out;
  out.mode = mode;
  if (mode == Mode::cellular)
    out.nats = cellular_rate(s, spec);
  else
    out.nats = d2d_rate(mode == Mode::hd ? Duplex::hd : Duplex::fd, s, d, glp, spec);
  return out;
}

// Area sum throughput T = lambda_c R_c + lambda_d [(1 - p_fd) R_HD + p_fd R_FD]
// in nats/s/Hz/m^2.  With fd_both_directions the FD share counts both link
// directions of a full-duplex pair.
struct ThroughputParts {
  double assoc = 0;     // association probability at this operating point
  double r_c = 0;       // conditional cellular rate
  double r_hd = 0;      // conditional HD D2D rate
  double r_fd = 0;      // conditional FD D2D rate (one direction)
  double cellular = 0;  // lambda_c * r_c
  double d2d = 0;       // lambda_d * mixed D2D rate
  double total = 0;
};

inline ThroughputParts sum_throughput(const Scenario& s, const GeneralLaplaceParams& glp,
                                      bool fd_both_directions = false,
                                      QuadratureSpec spec = {}) {
  ThroughputParts out;
  out.assoc = association_probability(s, spec);
  const Densities d = derive_densities(s, out.assoc);
  if (d.lambda_c > 0) out.r_c = cellular_rate(s, spec);
  if (d.lambda_hd_tx > 0) out.r_hd = d2d_rate(Duplex::hd, s, d, glp, spec);
  if (d.lambda_fd > 0) out.r_fd = d2d_rate(Duplex::fd, s, d, glp, spec);
  const double fd_share = fd_both_directions ? 2.0 : 1.0;
  out.cellular = d.lambda_c * out.r_c;
  out.d2d = d.lambda_d * ((1.0 - s.p_fd) * out.r_hd + s.p_fd * fd_share * out.r_fd);
  out.total = out.cellular + out.d2d;
  return out;
}

}  // namespace d2dnet
