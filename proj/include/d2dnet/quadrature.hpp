#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace d2dnet {

struct QuadratureSpec {
  double rel_tol = 1e-8;        // relative accuracy target
  double abs_tol = 1e-12;       // absolute accuracy floor
  int max_subdivisions = 2000;  // bisection budget
};

struct QuadResult {
  double value = 0;      // integral estimate
  double error = 0;      // accumulated error estimate
  bool converged = true; // false when the bisection budget ran out
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1] (positive half; node 7 is 0).
// The odd-indexed Kronrod nodes are the embedded Gauss nodes.
inline constexpr double kK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelEstimate {
  double k15 = 0;    // Kronrod value
  double error = 0;  // embedded error estimate
  bool finite = true;
};

// One Gauss-Kronrod panel on [a, b] with the QUADPACK-style rescaled error estimate.
template <class F>
PanelEstimate gk15_panel(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kK15Nodes[i]);
    fv[14 - i] = f(c + h * kK15Nodes[i]);
  }
  fv[7] = f(c);
  double k15 = 0, g7 = 0, resabs = 0;
  for (int i = 0; i < 7; ++i) {
    k15 += kK15Weights[i] * (fv[i] + fv[14 - i]);
    resabs += kK15Weights[i] * (std::fabs(fv[i]) + std::fabs(fv[14 - i]));
  }
  k15 += kK15Weights[7] * fv[7];
  resabs += kK15Weights[7] * std::fabs(fv[7]);
  for (int i = 0; i < 3; ++i) {
    const int j = 2 * i + 1;  // embedded Gauss nodes
    g7 += kG7Weights[i] * (fv[j] + fv[14 - j]);
  }
  g7 += kG7Weights[3] * fv[7];
  k15 *= h;
  g7 *= h;
  resabs *= std::fabs(h);

  PanelEstimate out;
  out.k15 = k15;
  out.finite = std::isfinite(k15);
  double raw = std::fabs(k15 - g7);
  double err = raw;
  if (raw > 0) err = std::min(raw, std::pow(200.0 * raw, 1.5));
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  out.error = std::max(err, floor);
  return out;
}

}  // namespace detail

// Adaptive bisection over a deterministic LIFO work stack: evaluation order, and
// therefore the accumulated result, is a pure function of the integrand and spec.
template <class F>
QuadResult quad_finite(F&& f, double a, double b, QuadratureSpec spec = {}) {
  QuadResult out;
  if (a == b) return out;
  const double len0 = std::fabs(b - a);

  struct Interval {
    double a, b;
    detail::PanelEstimate est;
  };
  std::vector<Interval> stack;
  stack.push_back({a, b, detail::gk15_panel(f, a, b)});
  int splits = 0;
  while (!stack.empty()) {
    Interval cur = stack.back();
    stack.pop_back();
    if (!cur.est.finite) {
      out.value = cur.est.k15;
      out.error = std::numeric_limits<double>::infinity();
      out.converged = false;
      return out;
    }
    const double len = std::fabs(cur.b - cur.a);
    const double allow =
        spec.abs_tol * (len / len0) + spec.rel_tol * std::fabs(cur.est.k15);
    const double mid = 0.5 * (cur.a + cur.b);
    const bool splittable = mid > cur.a && mid < cur.b;
    if (cur.est.error <= allow || splits >= spec.max_subdivisions || !splittable) {
      if (cur.est.error > allow) out.converged = false;
      out.value += cur.est.k15;
      out.error += cur.est.error;
      continue;
    }
    ++splits;
    stack.push_back({mid, cur.b, detail::gk15_panel(f, mid, cur.b)});
    stack.push_back({cur.a, mid, detail::gk15_panel(f, cur.a, mid)});
  }
  return out;
}

// Semi-infinite integral over [a, inf) via the compactifying map x = a + t/(1-t),
// t in (0, 1), dx = dt/(1-t)^2.  The unit interval is pre-split geometrically
// toward t = 1 so that widely separated decay scales are seen early.
template <class F>
QuadResult quad_semi_infinite(F&& f, double a, QuadratureSpec spec = {}) {
  auto g = [&](double t) {
    const double om = 1.0 - t;
    const double x = a + t / om;
    return f(x) / (om * om);
  };
  QuadResult out;
  double lo = 0.0;
  double hi = 0.5;
  QuadratureSpec piece = spec;
  for (int i = 0; i < 16; ++i) {
    QuadResult part = quad_finite(g, lo, hi, piece);
    out.value += part.value;
    out.error += part.error;
    out.converged = out.converged && part.converged;
    lo = hi;
    hi = (i == 14) ? 1.0 : 0.5 * (hi + 1.0);
  }
  return out;
}

}  // namespace d2dnet
