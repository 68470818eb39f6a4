#include <gtest/gtest.h>

#include <cmath>

#include "d2dnet/analytic.hpp"
#include "d2dnet/densities.hpp"
#include "d2dnet/units.hpp"

namespace {

using namespace d2dnet;

Scenario baseline() {
  Scenario s;
  s.lambda_b = 1e-6;
  s.lambda_u = 0.1;
  s.p_b = 10.0;                       // 40 dBm
  s.p_d = dbm_to_watts(23.0);
  s.gamma = 1e-3;                     // 0 dBm
  s.sigma2 = dbm_to_watts(-96.0);
  s.k = 1.0;
  s.alpha = 4.0;
  s.delta = 1e-5;                     // -50 dB
  s.p_fd = 0.5;
  s.n = 1;
  return s;
}

TEST(Association, EdgeCases) {
  Scenario s = baseline();
  s.k = 0.0;
  EXPECT_DOUBLE_EQ(association_probability(s), 0.0);
  EXPECT_DOUBLE_EQ(association_probability_closed_alpha4(s), 0.0);
  s = baseline();
  s.gamma = 0.0;
  EXPECT_DOUBLE_EQ(association_probability(s), 1.0);
  EXPECT_DOUBLE_EQ(association_probability_closed_alpha4(s), 1.0);
}

TEST(Association, FrozenReferenceValues) {
  // References computed independently from the defining integral at high
  // precision before this implementation existed.
  Scenario s = baseline();
  s.k = 0.25;
  EXPECT_NEAR(association_probability(s), 1.3919586377394676e-4, 1e-13);
  s.k = 1.0;
  EXPECT_NEAR(association_probability(s), 2.783670586884176e-4, 1e-13);
  s.k = 4.0;
  EXPECT_NEAR(association_probability(s), 5.566354625393584e-4, 1e-13);
}

TEST(Association, ClosedFormMatchesIntegral) {
  Scenario s = baseline();
  for (double k : {0.01, 0.25, 1.0, 4.0, 100.0}) {
    s.k = k;
    const double general = association_probability(s);
    const double closed = association_probability_closed_alpha4(s);
    EXPECT_LE(std::fabs(general - closed) / general, 1e-8) << k;
  }
}

TEST(Association, MonotoneInBiasAndConvention) {
  Scenario s = baseline();
  double prev = 0.0;
  for (double k : {0.1, 0.5, 1.0, 2.0, 8.0}) {
    s.k = k;
    const double cur = association_probability(s);
    EXPECT_GT(cur, prev);
    prev = cur;
  }
  // The alternative tail spelling is close here but distinguishably different;
  // it must stay selectable, not silently swapped in.
  s.k = 1.0;
  const double erfc_form = association_probability_closed_alpha4(s);
  const double variant =
      association_probability_closed_alpha4(s, TailConvention::probability_integral);
  EXPECT_GT(std::fabs(erfc_form - variant) / erfc_form, 1e-5);
  EXPECT_LT(std::fabs(erfc_form - variant) / erfc_form, 1e-2);
}

TEST(DistanceLaws, PdfsNormalizeAndAverage) {
  const double lam = 0.03;
  for (int n : {1, 2, 5}) {
    auto pdf = [&](double r) { return nth_neighbor_pdf(r, n, lam); };
    EXPECT_NEAR(quad_semi_infinite(pdf, 0.0).value, 1.0, 1e-9) << n;
    auto mean_f = [&](double r) { return r * nth_neighbor_pdf(r, n, lam); };
    EXPECT_NEAR(quad_semi_infinite(mean_f, 0.0).value, expected_nth_neighbor_distance(n, lam),
                1e-9)
        << n;
  }
  // n = 1 reduces to the Rayleigh nearest-neighbor law.
  for (double r : {0.5, 2.0, 7.0})
    EXPECT_NEAR(nth_neighbor_pdf(r, 1, lam), nearest_bs_pdf(r, lam), 1e-15);
  // Rayleigh mode at 1 / sqrt(2 pi lambda).
  const double mode = 1.0 / std::sqrt(2.0 * M_PI * lam);
  EXPECT_GT(nearest_bs_pdf(mode, lam), nearest_bs_pdf(mode * 0.95, lam));
  EXPECT_GT(nearest_bs_pdf(mode, lam), nearest_bs_pdf(mode * 1.05, lam));
  EXPECT_NEAR(expected_nth_neighbor_distance(2, lam),
              (1.329340388179137) / std::sqrt(lam * M_PI), 1e-12);
}

TEST(DistanceLaws, ServingPdfNormalizes) {
  const Scenario s = baseline();
  const double assoc = association_probability(s);
  auto pdf = [&](double r) { return serving_bs_distance_pdf(r, s, assoc); };
  EXPECT_NEAR(quad_semi_infinite(pdf, 0.0).value, 1.0, 1e-8);
  Scenario no_cell = baseline();
  no_cell.k = 0.0;
  EXPECT_THROW(serving_bs_distance_pdf(1.0, no_cell, 0.0), std::domain_error);
}

TEST(CellularCoverage, FrozenReferenceValues) {
  const Scenario s = baseline();
  EXPECT_NEAR(cellular_coverage(0.1, s), 0.9999828351358852, 1e-9);
  EXPECT_NEAR(cellular_coverage(1.0, s), 0.9998608209734995, 1e-9);
  EXPECT_NEAR(cellular_coverage(10.0, s), 0.9992917029656146, 1e-9);
  EXPECT_DOUBLE_EQ(cellular_coverage(0.0, s), 1.0);
}

TEST(CellularCoverage, ClosedFormMatchesIntegral) {
  const Scenario s = baseline();
  for (double beta : {0.1, 1.0, 10.0, 100.0}) {
    const double general = cellular_coverage(beta, s);
    const double closed = cellular_coverage_closed_alpha4(beta, s);
    EXPECT_NEAR(general, closed, 1e-9) << beta;
    // The alternative tail spelling misses the integral by a visible margin.
    const double variant =
        cellular_coverage_closed_alpha4(beta, s, TailConvention::probability_integral);
    EXPECT_GT(std::fabs(general - variant), 1e-5) << beta;
  }
}

TEST(CellularCoverage, NoiselessUnthresholdedLimit) {
  // With gamma = sigma2 = 0 the closed form collapses to
  // 1 / (1 + sqrt(beta) arctan sqrt(beta)).
  Scenario s = baseline();
  s.gamma = 0.0;
  s.sigma2 = 0.0;
  for (double beta : {0.5, 1.0, 4.0}) {
    const double expect = 1.0 / (1.0 + std::sqrt(beta) * std::atan(std::sqrt(beta)));
    EXPECT_NEAR(cellular_coverage_closed_alpha4(beta, s), expect, 1e-12) << beta;
    EXPECT_NEAR(cellular_coverage(beta, s), expect, 1e-8) << beta;
  }
  Scenario no_cell = baseline();
  no_cell.k = 0.0;
  EXPECT_THROW(cellular_coverage(1.0, no_cell), config_error);
}

TEST(CellularRate, FrozenReference) {
  const Scenario s = baseline();
  const double r_c = cellular_rate(s);
  EXPECT_LE(std::fabs(r_c - 16.038710872786584) / 16.038710872786584, 1e-5);
}

TEST(CellularRate, NoiselessReductionIdentity) {
  // gamma = sigma2 = 0: the rate is the threshold integral of the noiseless
  // coverage, int_0^inf dt / (1 + sqrt(x) atan sqrt(x)) with x = e^t - 1.
  Scenario s = baseline();
  s.gamma = 0.0;
  s.sigma2 = 0.0;
  auto f = [](double t) {
    const double x = std::expm1(t);
    const double sq = std::sqrt(x);
    return 1.0 / (1.0 + sq * std::atan(sq));
  };
  const double oracle = quad_semi_infinite(f, 0.0).value;
  EXPECT_LE(std::fabs(cellular_rate(s) - oracle) / oracle, 1e-6);
}

struct D2dFixture {
  Scenario s;
  Densities d;
  GeneralLaplaceParams glp;
};

D2dFixture d2d_fixture() {
  D2dFixture f;
  f.s = baseline();
  f.d = derive_densities(f.s, association_probability(f.s));
  return f;
}

TEST(D2dCoverage, FrozenReferenceValues) {
  const D2dFixture f = d2d_fixture();
  // (beta, HD, FD) references computed independently at high precision.
  const double cases[][3] = {
      {0.1, 0.4783974295016282, 0.7433405613258836},
      {1.0, 0.2029636419323908, 0.38893681307041744},
      {10.0, 0.0669642185260332, 0.1336274793592762},
      {100.0, 0.02121916707135947, 0.042429155776888536},
  };
  for (const auto& c : cases) {
    EXPECT_NEAR(d2d_coverage(c[0], Duplex::hd, f.s, f.d, f.glp), c[1], 1e-7) << c[0];
    EXPECT_NEAR(d2d_coverage(c[0], Duplex::fd, f.s, f.d, f.glp), c[2], 1e-7) << c[0];
  }
}

TEST(D2dCoverage, FdDominatesHdAndLimits) {
  const D2dFixture f = d2d_fixture();
  for (double beta = 0.1; beta < 200.0; beta *= 4.0) {
    const double hd = d2d_coverage(beta, Duplex::hd, f.s, f.d, f.glp);
    const double fd = d2d_coverage(beta, Duplex::fd, f.s, f.d, f.glp);
    EXPECT_GT(fd, hd) << beta;  // denser same-class field hurts less than sparser cross field
    EXPECT_GT(hd, 0.0);
    EXPECT_LT(fd, 1.0);
  }
  EXPECT_DOUBLE_EQ(d2d_coverage(0.0, Duplex::hd, f.s, f.d, f.glp), 1.0);
}

TEST(D2dCoverage, NoiselessClosedFormSanity) {
  // sigma2 = delta = 0, n = 1, alpha = 4, all users D2D:
  // C = 1 / (1 + sqrt(b) atan sqrt(b) + (lam_cross / lam_same)(pi/2) sqrt(b)).
  D2dFixture f;
  f.s = baseline();
  f.s.k = 0.0;
  f.s.sigma2 = 0.0;
  f.s.delta = 0.0;
  f.d = derive_densities(f.s, 0.0);
  for (double beta : {0.5, 1.0, 2.0, 10.0}) {
    const double sq = std::sqrt(beta);
    const double hd_expect =
        1.0 / (1.0 + sq * std::atan(sq) + (f.d.lambda_fd / f.d.lambda_hd_tx) * M_PI_2 * sq);
    const double fd_expect =
        1.0 / (1.0 + sq * std::atan(sq) + (f.d.lambda_hd_tx / f.d.lambda_fd) * M_PI_2 * sq);
    EXPECT_LE(std::fabs(d2d_coverage(beta, Duplex::hd, f.s, f.d, f.glp) - hd_expect) / hd_expect,
              1e-8)
        << beta;
    EXPECT_LE(std::fabs(d2d_coverage(beta, Duplex::fd, f.s, f.d, f.glp) - fd_expect) / fd_expect,
              1e-8)
        << beta;
  }
}

TEST(D2dCoverage, HigherPairingOrderCoversLess) {
  D2dFixture f = d2d_fixture();
  const double n1 = d2d_coverage(1.0, Duplex::hd, f.s, f.d, f.glp);
  f.s.n = 2;
  const double n2 = d2d_coverage(1.0, Duplex::hd, f.s, f.d, f.glp);
  EXPECT_LT(n2, n1);
  EXPECT_GT(n2, 0.0);
}

TEST(D2dCoverage, ZeroDensityClassRejected) {
  D2dFixture f;
  f.s = baseline();
  f.s.p_fd = 1.0;  // no HD users left
  f.d = derive_densities(f.s, association_probability(f.s));
  EXPECT_THROW(d2d_coverage(1.0, Duplex::hd, f.s, f.d, f.glp), config_error);
  EXPECT_GT(d2d_coverage(1.0, Duplex::fd, f.s, f.d, f.glp), 0.0);
}

TEST(D2dRate, FrozenReferences) {
  const D2dFixture f = d2d_fixture();
  const double r_hd = d2d_rate(Duplex::hd, f.s, f.d, f.glp);
  const double r_fd = d2d_rate(Duplex::fd, f.s, f.d, f.glp);
  EXPECT_LE(std::fabs(r_hd - 0.5638810289968945) / 0.5638810289968945, 1e-4);
  EXPECT_LE(std::fabs(r_fd - 1.0467340002496301) / 1.0467340002496301, 1e-4);
  EXPECT_GT(r_fd, r_hd);
}

TEST(Dispatch, QueriesRouteToTheRightTier) {
  const D2dFixture f = d2d_fixture();
  EXPECT_DOUBLE_EQ(coverage(CoverageQuery{1.0, Mode::cellular}, f.s, f.d, f.glp),
                   cellular_coverage(1.0, f.s));
  EXPECT_DOUBLE_EQ(coverage(CoverageQuery{1.0, Mode::hd}, f.s, f.d, f.glp),
                   d2d_coverage(1.0, Duplex::hd, f.s, f.d, f.glp));
  EXPECT_DOUBLE_EQ(coverage(CoverageQuery{1.0, Mode::fd}, f.s, f.d, f.glp),
                   d2d_coverage(1.0, Duplex::fd, f.s, f.d, f.glp));
  EXPECT_DOUBLE_EQ(rate(Mode::cellular, f.s, f.d, f.glp).nats, cellular_rate(f.s));
  EXPECT_DOUBLE_EQ(rate(Mode::fd, f.s, f.d, f.glp).nats,
                   d2d_rate(Duplex::fd, f.s, f.d, f.glp));
}

TEST(Throughput, FrozenReferenceAndAlgebra) {
  const Scenario s = baseline();
  GeneralLaplaceParams glp;
  const ThroughputParts t = sum_throughput(s, glp);
  EXPECT_LE(std::fabs(t.total - 0.08095479923098886) / 0.08095479923098886, 1e-5);
  // Mixture algebra holds by construction.
  const Densities d = derive_densities(s, t.assoc);
  EXPECT_DOUBLE_EQ(t.cellular, d.lambda_c * t.r_c);
  EXPECT_DOUBLE_EQ(t.d2d, d.lambda_d * ((1.0 - s.p_fd) * t.r_hd + s.p_fd * t.r_fd));
  EXPECT_DOUBLE_EQ(t.total, t.cellular + t.d2d);

  const ThroughputParts both = sum_throughput(s, glp, true);
  EXPECT_NEAR(both.d2d - t.d2d, d.lambda_d * s.p_fd * t.r_fd, 1e-12);
}

}  // namespace
