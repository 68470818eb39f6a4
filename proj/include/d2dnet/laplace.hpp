#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "densities.hpp"
#include "quadrature.hpp"
#include "scenario.hpp"
#include "special.hpp"

namespace d2dnet {

// Interference Laplace transform seen by a receiver paired with its nearest
// same-class transmitter: interferers form the field of density `lambda`
// outside the exclusion disc of radius r_min.
//   L(s) = exp(-2 pi lambda int_{r_min}^inf [s p x^-a / (1 + s p x^-a)] x dx)
inline double laplace_nearest_link(double s, double lambda, double r_min, double alpha,
                                   double p_tx, QuadratureSpec spec = {}) {
  if (!(s >= 0)) throw std::domain_error("laplace_nearest_link requires s >= 0");
  if (!(lambda >= 0)) throw std::domain_error("laplace_nearest_link requires lambda >= 0");
  if (!(r_min > 0)) throw std::domain_error("laplace_nearest_link requires r_min > 0");
  if (!(alpha > 2)) throw std::domain_error("laplace_nearest_link requires alpha > 2");
  if (s == 0 || lambda == 0) return 1.0;
  const double sp = s * p_tx;
  auto integrand = [sp, alpha](double x) {
    const double v = sp * std::pow(x, -alpha);
    return v / (1.0 + v) * x;
  };
  const double inner = quad_semi_infinite(integrand, r_min, spec).value;
  return std::exp(-2.0 * M_PI * lambda * inner);
}

// Two circulating spellings of the alpha = 4 reduction; `consistent` is the one
// that matches the defining integral (the other agrees only at s p / r^4 = 1).
enum class ArctanVariant { consistent, printed };

inline double laplace_nearest_link_closed_alpha4(double s, double lambda, double r_min,
                                                 double p_tx,
                                                 ArctanVariant variant = ArctanVariant::consistent) {
  if (!(r_min > 0)) throw std::domain_error("laplace_nearest_link requires r_min > 0");
  if (s == 0 || lambda == 0) return 1.0;
  const double root = std::sqrt(s * p_tx);  // sqrt(s p) = r_min^2 * sqrt(beta)
  const double arg = root / (r_min * r_min);
  const double atan_term = (variant == ArctanVariant::consistent)
                               ? std::atan(arg)
                               : std::atan(arg * arg);
  return std::exp(-M_PI * lambda * root * atan_term);
}

// Unconditioned transform of a whole-plane field of density `lambda`:
//   L(s) = exp(-pi lambda (s p)^{2/alpha} Gamma(1 + 2/alpha) Gamma(1 - 2/alpha)).
// `printed` substitutes Gamma(1 +- 1/alpha), which misses the defining integral
// by the factor cos(pi/alpha) in the exponent; it is kept for reporting.
enum class FieldExponent { consistent, printed };

inline double laplace_ppp_field(double s, double lambda, double alpha, double p_tx,
                                FieldExponent variant = FieldExponent::consistent) {
  if (!(s >= 0)) throw std::domain_error("laplace_ppp_field requires s >= 0");
  if (!(lambda >= 0)) throw std::domain_error("laplace_ppp_field requires lambda >= 0");
  if (!(alpha > 2)) throw std::domain_error("laplace_ppp_field requires alpha > 2");
  if (s == 0 || lambda == 0) return 1.0;
  const double frac = (variant == FieldExponent::consistent) ? 2.0 / alpha : 1.0 / alpha;
  const double g = gamma_fn(1.0 + frac) * gamma_fn(1.0 - frac);
  return std::exp(-M_PI * lambda * std::pow(s * p_tx, 2.0 / alpha) * g);
}

// Exponent choice for the outside-annulus factor of the finite-population
// transform; `complement` (k - l actives outside) is the probability-consistent
// reading, `printed` (n - l) is kept selectable for comparison.
enum class OutsidePower { complement, printed };

// Finite-population transform for a receiver paired with the n-th nearest
// same-class transmitter at distance r_d.  The class population of M members
// lives in a window of radius R_M = sqrt(M / (pi lambda_class)); the number of
// active interferers k follows a Poisson(m_bar - 1) law truncated to k < M, of
// which at most n - 1 may fall inside the pairing disc (truncated binomial with
// inside probability (n - 1)/(M - 1)).  Inside and outside interferers
// contribute the averaged fading/path-loss factors E_in and E_out.
inline double laplace_general_nth(double s, int n, int population_m, double m_bar,
                                  double lambda_class, double r_d, double alpha, double p_tx,
                                  OutsidePower variant = OutsidePower::complement,
                                  QuadratureSpec spec = {}) {
  if (population_m <= n)
    throw config_error("laplace_general_nth: population M must exceed pairing order n");
  if (!(m_bar > 1)) throw config_error("laplace_general_nth: m_bar > 1 violated");
  if (!(lambda_class > 0))
    throw std::domain_error("laplace_general_nth requires lambda_class > 0");
  if (!(r_d > 0)) throw std::domain_error("laplace_general_nth requires r_d > 0");
  if (!(s >= 0)) throw std::domain_error("laplace_general_nth requires s >= 0");
  if (n < 1) throw std::domain_error("laplace_general_nth requires n >= 1");
  if (s == 0) return 1.0;

  const int M = population_m;
  const double sp = s * p_tx;
  const double r_window = std::sqrt(M / (M_PI * lambda_class));
  auto attenuation = [sp, alpha](double x) { return 1.0 / (1.0 + sp * std::pow(x, -alpha)); };

  // Mean fading/path-loss factor of one interferer inside the pairing disc ...
  double e_in = 0.0;
  if (n > 1) {
    auto f_in = [&](double x) { return (2.0 * x / (r_d * r_d)) * attenuation(x); };
    e_in = quad_finite(f_in, 0.0, r_d, spec).value;
  }
  // ... and of one interferer on the annulus out to the window edge.
  double e_out = 0.0;
  if (r_window > r_d) {
    const double area = r_window * r_window - r_d * r_d;
    auto f_out = [&](double x) { return (2.0 * x / area) * attenuation(x); };
    e_out = quad_finite(f_out, r_d, r_window, spec).value;
  }

  // Activity weights: truncated Poisson over k = 0 .. M-1 in log space.
  const double q = m_bar - 1.0;
  std::vector<double> logw(M);
  double logw_max = -1e300;
  for (int k = 0; k < M; ++k) {
    logw[k] = (k > 0 ? k * std::log(q) : 0.0) - q - std::lgamma(k + 1.0);
    logw_max = std::max(logw_max, logw[k]);
  }
  double norm = 0.0;
  for (int k = 0; k < M; ++k) norm += std::exp(logw[k] - logw_max);

  const double p_in = static_cast<double>(n - 1) / (M - 1);
  const double log_ein = e_in > 0 ? std::log(e_in) : -1e300;
  const double log_eout = e_out > 0 ? std::log(e_out) : -1e300;

  double total = 0.0;
  for (int k = 0; k < M; ++k) {
    const double w_k = std::exp(logw[k] - logw_max) / norm;
    const int f_min = std::min(k, n - 1);
    double trunc = 1.0;  // P[Bin(k, p_in) <= f_min]
    if (k > f_min && p_in > 0)
      trunc = reg_incomplete_beta(1.0 - p_in, k - f_min, f_min + 1.0);
    double inner = 0.0;
    for (int l = 0; l <= f_min; ++l) {
      const int outside = (variant == OutsidePower::complement) ? (k - l) : (n - l);
      double log_term = 0.0;
      if (p_in > 0) {
        log_term += std::lgamma(k + 1.0) - std::lgamma(l + 1.0) - std::lgamma(k - l + 1.0) +
                    l * std::log(p_in) + (k - l) * std::log1p(-p_in);
      } else if (l > 0) {
        continue;  // p_in = 0 admits only l = 0
      }
      log_term += l * log_ein + outside * log_eout;
      inner += std::exp(log_term);
    }
    total += w_k * inner / trunc;
  }
  return total;
}

// Class-population view of a scenario: the finite window holds w_total users,
// of which the studied class keeps its share by density.
inline int class_population(const Scenario& s, const Densities& d,
                            const GeneralLaplaceParams& glp, Duplex duplex) {
  const double lambda_class = (duplex == Duplex::hd) ? d.lambda_hd_tx : d.lambda_fd;
  const double share = lambda_class / s.lambda_u;
  return static_cast<int>(std::lround(glp.w_total * share));
}

inline double laplace_general_for_class(double s_arg, const Scenario& s, const Densities& d,
                                        const GeneralLaplaceParams& glp, Duplex duplex,
                                        double r_d, QuadratureSpec spec = {}) {
  const double lambda_class = (duplex == Duplex::hd) ? d.lambda_hd_tx : d.lambda_fd;
  const int m = class_population(s, d, glp, duplex);
  if (m <= s.n)
    throw config_error(
        "laplace_general_for_class: w_total times the class share must exceed the pairing order n");
  return laplace_general_nth(s_arg, s.n, m, glp.m_bar, lambda_class, r_d, s.alpha, s.p_d,
                             OutsidePower::complement, spec);
}

}  // namespace d2dnet
