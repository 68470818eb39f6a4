#pragma once

#include <cmath>
#include <stdexcept>

#include "quadrature.hpp"

namespace d2dnet {

// Probability integral Phi(x) = (1/sqrt(2*pi)) * int_0^x exp(-t^2) dt.
// Odd, increasing, bounded by 1/(2*sqrt(2)) ~ 0.3536.  Note the nonstandard
// normalization: Phi(x) = erf(x) / (2*sqrt(2)).
inline double probability_integral(double x) {
  return std::erf(x) / (2.0 * std::sqrt(2.0));
}

// Gamma function restricted to the positive half line.
inline double gamma_fn(double x) {
  if (!(x > 0)) throw std::domain_error("gamma_fn requires x > 0");
  return std::tgamma(x);
}

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz method).
inline double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  throw std::runtime_error("reg_incomplete_beta: continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double reg_incomplete_beta(double x, double a, double b) {
  if (!(a > 0) || !(b > 0))
    throw std::domain_error("reg_incomplete_beta requires a > 0 and b > 0");
  if (!(x >= 0 && x <= 1))
    throw std::domain_error("reg_incomplete_beta requires x in [0, 1]");
  if (x == 0) return 0.0;
  if (x == 1) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::betacf(a, b, x) / a;
  return 1.0 - bt * detail::betacf(b, a, 1.0 - x) / b;
}

// Scaled complementary error function combination exp(x^2) * erfc(x) for x >= 0,
// stable where exp(x^2) alone would overflow.
inline double exp_x2_erfc(double x) {
  if (x < 15.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series erfc(x) ~ exp(-x^2)/(x sqrt(pi)) * sum (-1)^k (2k-1)!! / (2x^2)^k.
  const double q = 1.0 / (2.0 * x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 6; ++k) {
    term *= -(2.0 * k - 1.0) * q;
    sum += term;
  }
  return sum / (x * std::sqrt(M_PI));
}

// Interference kernel L(beta, alpha) = int_{beta^{-1/alpha}}^inf u / (1 + u^alpha) du.
// Converges for alpha > 2; increasing in beta.
inline double interference_integral_L(double beta, double alpha, QuadratureSpec spec = {}) {
  if (!(beta > 0)) throw std::domain_error("interference_integral_L requires beta > 0");
  if (!(alpha > 2)) throw std::domain_error("interference_integral_L requires alpha > 2");
  const double lower = std::pow(beta, -1.0 / alpha);
  auto integrand = [alpha](double u) { return u / (1.0 + std::pow(u, alpha)); };
  return quad_semi_infinite(integrand, lower, spec).value;
}

// Closed form of the interference kernel at alpha = 4: L(beta, 4) = arctan(sqrt(beta)) / 2.
inline double interference_integral_L_closed_alpha4(double beta) {
  if (!(beta > 0)) throw std::domain_error("interference_integral_L requires beta > 0");
  return 0.5 * std::atan(std::sqrt(beta));
}

namespace detail {

// Dispatch used inside hot integration loops; the alpha = 4 reduction is
// equivalent to the quadrature within the tolerances covered by the test suite.
inline double interference_L(double beta, double alpha, const QuadratureSpec& spec) {
  if (alpha == 4.0) return interference_integral_L_closed_alpha4(beta);
  return interference_integral_L(beta, alpha, spec);
}

}  // namespace detail

}  // namespace d2dnet
