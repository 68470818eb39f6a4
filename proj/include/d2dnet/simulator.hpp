#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "analytic.hpp"
#include "densities.hpp"
#include "rng.hpp"
#include "scenario.hpp"

namespace d2dnet {

struct PointField {
  std::vector<Vec2> points;
  double window_radius = 0;
  double intensity = 0;
};

inline PointField sample_ppp(SplitMix64& g, double lambda, double radius) {
  PointField f;
  f.window_radius = radius;
  f.intensity = lambda;
  const uint64_t count = poisson(g, lambda * M_PI * radius * radius);
  f.points.reserve(count);
  for (uint64_t i = 0; i < count; ++i) f.points.push_back(uniform_disc(g, radius));
  return f;
}

// Interference window that captures the dominant mass of a field of density
// lambda (five mean point spacings).
inline double interference_reach(double lambda) { return 5.0 / std::sqrt(M_PI * lambda); }

inline double bs_window_radius(const Scenario& s) { return interference_reach(s.lambda_b); }

// D2D simulation window: wide enough for both the interference mass of the
// sparsest active class and the n-th-neighbor pairing tail.
inline double d2d_window_radius(const Scenario& s, const Densities& d, Duplex duplex) {
  double lambda_min = std::numeric_limits<double>::infinity();
  if (d.lambda_hd_tx > 0) lambda_min = std::min(lambda_min, d.lambda_hd_tx);
  if (d.lambda_fd > 0) lambda_min = std::min(lambda_min, d.lambda_fd);
  if (!std::isfinite(lambda_min))
    throw config_error("d2d_window_radius: no active D2D transmitter class");
  const double lam_same = (duplex == Duplex::hd) ? d.lambda_hd_tx : d.lambda_fd;
  if (!(lam_same > 0)) throw config_error("d2d_window_radius: requested class has zero density");
  return std::max(interference_reach(lambda_min),
                  20.0 * expected_nth_neighbor_distance(s.n, lam_same));
}

struct DropOutcome {
  Mode mode = Mode::cellular;
  double serving_distance = 0;      // serving BS distance or D2D pairing distance
  double signal_w = 0;              // received signal power
  double interference_bs_w = 0;     // from non-serving base stations (cellular band)
  double interference_hd_w = 0;     // from transmitting HD D2D users (D2D band)
  double interference_fd_w = 0;     // from FD D2D transceivers (D2D band)
  double self_interference_w = 0;   // residual self-interference (FD only)
  double noise_w = 0;
  double sinr = 0;
};

struct Estimate {
  double mean = 0;
  double std_error = 0;
  uint64_t trials = 0;
};

struct BatchResult {
  std::vector<Estimate> coverage;  // one entry per requested beta
  Estimate rate;                   // mean ln(1 + SINR)
  uint64_t attempts = 0;           // association draws inspected (mode conditioning)
  uint64_t resamples = 0;          // drops retried for lack of n same-class partners
};

struct BatchOptions {
  int threads = 0;  // 0 = hardware concurrency; results are thread-count invariant
};

namespace detail {

inline double path_gain_r2(double r2, double alpha) {
  if (alpha == 4.0) return 1.0 / (r2 * r2);
  return std::pow(r2, -0.5 * alpha);
}

struct AssocDraw {
  double r_c = 0;      // nearest-BS distance
  bool cellular = false;
};

inline AssocDraw draw_association(SplitMix64& g, const Scenario& s) {
  AssocDraw a;
  a.r_c = std::sqrt(exp1(g) / (M_PI * s.lambda_b));
  if (s.k > 0) {
    const double h = exp1(g);
    a.cellular = s.k * s.p_b * h * path_gain_r2(a.r_c * a.r_c, s.alpha) > s.gamma;
  }
  return a;
}

// Conditioned on the nearest BS sitting at r_c, the rest of the BS process is
// an independent PPP on the annulus beyond r_c.
inline std::vector<Vec2> sample_bs_field(SplitMix64& g, const Scenario& s, double r_c,
                                         double radius) {
  std::vector<Vec2> bs;
  bs.push_back(polar(r_c, 2.0 * M_PI * u01(g)));
  if (radius > r_c) {
    const double area = M_PI * (radius * radius - r_c * r_c);
    const uint64_t count = poisson(g, s.lambda_b * area);
    bs.reserve(count + 1);
    for (uint64_t i = 0; i < count; ++i) bs.push_back(uniform_annulus(g, r_c, radius));
  }
  return bs;
}

inline DropOutcome cellular_drop_body(SplitMix64& g, const Scenario& s, double r_c) {
  DropOutcome o;
  o.mode = Mode::cellular;
  o.serving_distance = r_c;
  o.signal_w = s.p_b * exp1(g) * path_gain_r2(r_c * r_c, s.alpha);
  const double radius = bs_window_radius(s);
  double interference = 0;
  if (radius > r_c) {
    const double area = M_PI * (radius * radius - r_c * r_c);
    const uint64_t count = poisson(g, s.lambda_b * area);
    for (uint64_t i = 0; i < count; ++i) {
      const Vec2 p = uniform_annulus(g, r_c, radius);
      interference += s.p_b * exp1(g) * path_gain_r2(p.x * p.x + p.y * p.y, s.alpha);
    }
  }
  o.interference_bs_w = interference;
  o.noise_w = s.sigma2;
  o.sinr = o.signal_w / (interference + s.sigma2);
  return o;
}

struct D2dEnvironment {
  std::vector<Vec2> hd_tx;  // transmitting half-duplex users
  std::vector<Vec2> fd;     // full-duplex transceivers
};

// Other users in the window make their own biased association decisions
// against the same BS realization (the mode field is not thinned independently).
inline D2dEnvironment sample_d2d_environment(SplitMix64& g, const Scenario& s, double r_c,
                                             double window) {
  const std::vector<Vec2> bs = sample_bs_field(g, s, r_c, window + bs_window_radius(s));
  D2dEnvironment env;
  const uint64_t n_ue = poisson(g, s.lambda_u * M_PI * window * window);
  env.hd_tx.reserve(n_ue / 3);
  env.fd.reserve(n_ue / 2);
  for (uint64_t i = 0; i < n_ue; ++i) {
    const Vec2 u = uniform_disc(g, window);
    bool cellular = false;
    if (s.k > 0) {
      double best_r2 = std::numeric_limits<double>::infinity();
      for (const Vec2& b : bs) {
        const double dx = u.x - b.x, dy = u.y - b.y;
        best_r2 = std::min(best_r2, dx * dx + dy * dy);
      }
      cellular = s.k * s.p_b * exp1(g) * path_gain_r2(best_r2, s.alpha) > s.gamma;
    }
    if (cellular) continue;
    if (u01(g) < s.p_fd) {
      env.fd.push_back(u);
    } else if (u01(g) < 0.5) {
      env.hd_tx.push_back(u);  // the other half of HD users are receiving
    }
  }
  return env;
}

inline DropOutcome d2d_drop_body(SplitMix64& g, const Scenario& s, const D2dEnvironment& env,
                                 Duplex duplex, int n) {
  const std::vector<Vec2>& same = (duplex == Duplex::hd) ? env.hd_tx : env.fd;
  // n-th nearest same-class transmitter is the partner.
  std::vector<std::pair<double, size_t>> dist2(same.size());
  for (size_t i = 0; i < same.size(); ++i)
    dist2[i] = {same[i].x * same[i].x + same[i].y * same[i].y, i};
  std::nth_element(dist2.begin(), dist2.begin() + (n - 1), dist2.end());
  const size_t partner = dist2[n - 1].second;
  const double partner_r2 = dist2[n - 1].first;

  DropOutcome o;
  o.mode = (duplex == Duplex::hd) ? Mode::hd : Mode::fd;
  o.serving_distance = std::sqrt(partner_r2);
  o.signal_w = s.p_d * exp1(g) * path_gain_r2(partner_r2, s.alpha);
  double i_hd = 0, i_fd = 0;
  for (size_t i = 0; i < env.hd_tx.size(); ++i) {
    if (duplex == Duplex::hd && i == partner) continue;
    const Vec2& p = env.hd_tx[i];
    i_hd += s.p_d * exp1(g) * path_gain_r2(p.x * p.x + p.y * p.y, s.alpha);
  }
  for (size_t i = 0; i < env.fd.size(); ++i) {
    if (duplex == Duplex::fd && i == partner) continue;
    const Vec2& p = env.fd[i];
    i_fd += s.p_d * exp1(g) * path_gain_r2(p.x * p.x + p.y * p.y, s.alpha);
  }
  o.interference_hd_w = i_hd;
  o.interference_fd_w = i_fd;
  o.self_interference_w = (duplex == Duplex::fd) ? s.delta * s.p_d : 0.0;
  o.noise_w = s.sigma2;
  o.sinr = o.signal_w / (i_hd + i_fd + o.self_interference_w + s.sigma2);
  return o;
}

struct DropCounters {
  uint64_t attempts = 0;
  uint64_t resamples = 0;
};

inline constexpr uint64_t kMaxAttemptsPerDrop = 100000000;

// One accepted drop, optionally conditioned on a mode; rejected attempts and
// pairing retries consume the same per-trial stream, keeping the whole drop a
// pure function of (seed, trial).
inline DropOutcome drop_impl(const Scenario& s, const Densities& d, SplitMix64& g,
                             std::optional<Mode> forced, DropCounters& counters) {
  for (uint64_t attempt = 0; attempt < kMaxAttemptsPerDrop; ++attempt) {
    ++counters.attempts;
    const AssocDraw a = draw_association(g, s);
    if (a.cellular) {
      if (forced && *forced != Mode::cellular) continue;
      return cellular_drop_body(g, s, a.r_c);
    }
    if (forced && *forced == Mode::cellular) continue;
    Duplex duplex;
    if (forced)
      duplex = (*forced == Mode::hd) ? Duplex::hd : Duplex::fd;
    else
      duplex = (u01(g) < s.p_fd) ? Duplex::fd : Duplex::hd;
    const double lam_same = (duplex == Duplex::hd) ? d.lambda_hd_tx : d.lambda_fd;
    if (!(lam_same > 0))
      throw config_error("simulator: requested duplex class has zero density");
    const double window = d2d_window_radius(s, d, duplex);
    const D2dEnvironment env = sample_d2d_environment(g, s, a.r_c, window);
    const std::vector<Vec2>& same = (duplex == Duplex::hd) ? env.hd_tx : env.fd;
    if (same.size() < static_cast<size_t>(s.n)) {
      ++counters.resamples;
      continue;
    }
    return d2d_drop_body(g, s, env, duplex, s.n);
  }
  throw config_error("simulator: requested mode is too rare to condition on");
}

inline void check_mode_feasible(const Scenario& s, const Densities& d, Mode mode) {
  if (mode == Mode::cellular && s.k == 0)
    throw config_error("simulator: mode 'cellular' has zero probability when k = 0");
  if (mode == Mode::hd && !(d.lambda_hd_tx > 0))
    throw config_error("simulator: mode 'hd' has zero density");
  if (mode == Mode::fd && !(d.lambda_fd > 0))
    throw config_error("simulator: mode 'fd' has zero density");
}

// Runs chunks on a small pool; chunk results land in pre-assigned slots so the
// final reduction order is fixed regardless of the thread layout.
inline void parallel_chunks(int n_chunks, int threads, const std::function<void(int)>& work) {
  if (threads <= 1 || n_chunks <= 1) {
    for (int c = 0; c < n_chunks; ++c) work(c);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto runner = [&] {
    try {
      for (int c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) work(c);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(n_chunks);
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min(threads, n_chunks);
  pool.reserve(n);
  for (int i = 0; i < n; ++i) pool.emplace_back(runner);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// One independent network drop; the mode falls as the association Bernoulli
// decides.  The typical D2D user is evaluated as a receiver.
inline DropOutcome run_drop(const Scenario& s, const Densities& d, uint64_t master_seed,
                            uint64_t trial) {
  SplitMix64 g = trial_stream(master_seed, trial);
  detail::DropCounters counters;
  return detail::drop_impl(s, d, g, std::nullopt, counters);
}

// Coverage over a beta grid plus the mean rate, all from one conditioned drop
// set.  `trials` counts accepted drops of the requested mode.
inline BatchResult run_batch(const Scenario& s, const Densities& d, Mode mode,
                             const std::vector<double>& betas, uint64_t trials, uint64_t seed,
                             BatchOptions opts = {}) {
  detail::check_mode_feasible(s, d, mode);
  BatchResult out;
  out.coverage.assign(betas.size(), Estimate{});
  if (trials == 0) return out;

  const int n_chunks = static_cast<int>(std::min<uint64_t>(trials, 256));
  struct ChunkAccum {
    std::vector<uint64_t> cov;
    double rate_sum = 0;
    double rate_sq = 0;
    uint64_t attempts = 0;
    uint64_t resamples = 0;
  };
  std::vector<ChunkAccum> chunks(n_chunks);

  auto work = [&](int c) {
    ChunkAccum acc;
    acc.cov.assign(betas.size(), 0);
    const uint64_t t0 = trials * static_cast<uint64_t>(c) / n_chunks;
    const uint64_t t1 = trials * (static_cast<uint64_t>(c) + 1) / n_chunks;
    for (uint64_t t = t0; t < t1; ++t) {
      SplitMix64 g = trial_stream(seed, t);
      detail::DropCounters counters;
      const DropOutcome o = detail::drop_impl(s, d, g, mode, counters);
      acc.attempts += counters.attempts;
      acc.resamples += counters.resamples;
      for (size_t i = 0; i < betas.size(); ++i) acc.cov[i] += (o.sinr > betas[i]) ? 1 : 0;
      const double lr = std::log1p(o.sinr);
      acc.rate_sum += lr;
      acc.rate_sq += lr * lr;
    }
    chunks[c] = std::move(acc);
  };
  int threads = opts.threads > 0 ? opts.threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
  detail::parallel_chunks(n_chunks, std::max(threads, 1), work);

  std::vector<uint64_t> cov_total(betas.size(), 0);
  double rate_sum = 0, rate_sq = 0;
  for (const ChunkAccum& acc : chunks) {
    for (size_t i = 0; i < betas.size(); ++i) cov_total[i] += acc.cov[i];
    rate_sum += acc.rate_sum;
    rate_sq += acc.rate_sq;
    out.attempts += acc.attempts;
    out.resamples += acc.resamples;
  }
  const double n = static_cast<double>(trials);
  for (size_t i = 0; i < betas.size(); ++i) {
    const double p = static_cast<double>(cov_total[i]) / n;
    out.coverage[i] = {p, std::sqrt(std::max(p * (1.0 - p), 0.0) / n), trials};
  }
  const double mean = rate_sum / n;
  const double var = std::max(rate_sq / n - mean * mean, 0.0);
  out.rate = {mean, std::sqrt(var / n), trials};
  return out;
}

inline Estimate estimate_coverage(const Scenario& s, const Densities& d, double beta, Mode mode,
                                  uint64_t trials, uint64_t seed, BatchOptions opts = {}) {
  return run_batch(s, d, mode, {beta}, trials, seed, opts).coverage.front();
}

inline Estimate estimate_rate(const Scenario& s, const Densities& d, Mode mode, uint64_t trials,
                              uint64_t seed, BatchOptions opts = {}) {
  return run_batch(s, d, mode, {}, trials, seed, opts).rate;
}

// Unconditioned association fraction over `trials` independent users.
inline Estimate estimate_association(const Scenario& s, uint64_t trials, uint64_t seed) {
  uint64_t cellular = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    SplitMix64 g = trial_stream(seed, t);
    cellular += detail::draw_association(g, s).cellular ? 1 : 0;
  }
  const double n = static_cast<double>(trials);
  const double p = trials > 0 ? static_cast<double>(cellular) / n : 0.0;
  const double se = trials > 0 ? std::sqrt(std::max(p * (1.0 - p), 0.0) / n) : 0.0;
  return {p, se, trials};
}

// Paired interference-truncation probe: the same drops evaluated with the
// interference window and with twice the window; pairing always happens inside
// the base window so only the far-interferer contribution differs.
struct TruncationProbe {
  std::vector<double> base;     // coverage with interferers inside the window
  std::vector<double> doubled;  // same drops, interferers out to twice the window
  double max_delta = 0;
  uint64_t trials = 0;
};

inline TruncationProbe truncation_probe(const Scenario& s, const Densities& d, Duplex duplex,
                                        const std::vector<double>& betas, uint64_t trials,
                                        uint64_t seed) {
  detail::check_mode_feasible(s, d, duplex == Duplex::hd ? Mode::hd : Mode::fd);
  const double window = d2d_window_radius(s, d, duplex);
  const double wide = 2.0 * window;
  const double w2 = window * window;
  std::vector<uint64_t> cov_base(betas.size(), 0), cov_wide(betas.size(), 0);
  for (uint64_t t = 0; t < trials; ++t) {
    SplitMix64 g = trial_stream(seed, t);
    for (uint64_t attempt = 0;; ++attempt) {
      if (attempt >= detail::kMaxAttemptsPerDrop)
        throw config_error("truncation_probe: requested mode is too rare");
      const detail::AssocDraw a = detail::draw_association(g, s);
      if (a.cellular) continue;
      const detail::D2dEnvironment env = detail::sample_d2d_environment(g, s, a.r_c, wide);
      const std::vector<Vec2>& same = (duplex == Duplex::hd) ? env.hd_tx : env.fd;
      // candidate partners live inside the base window in both evaluations
      std::vector<std::pair<double, size_t>> dist2;
      for (size_t i = 0; i < same.size(); ++i) {
        const double r2 = same[i].x * same[i].x + same[i].y * same[i].y;
        if (r2 <= w2) dist2.push_back({r2, i});
      }
      if (dist2.size() < static_cast<size_t>(s.n)) continue;
      std::nth_element(dist2.begin(), dist2.begin() + (s.n - 1), dist2.end());
      const size_t partner = dist2[s.n - 1].second;
      const double signal =
          s.p_d * exp1(g) * detail::path_gain_r2(dist2[s.n - 1].first, s.alpha);
      double near_i = 0, far_i = 0;
      auto add = [&](const std::vector<Vec2>& pts, bool skip_partner) {
        for (size_t i = 0; i < pts.size(); ++i) {
          if (skip_partner && i == partner) continue;
          const double r2 = pts[i].x * pts[i].x + pts[i].y * pts[i].y;
          const double contrib = s.p_d * exp1(g) * detail::path_gain_r2(r2, s.alpha);
          far_i += contrib;
          if (r2 <= w2) near_i += contrib;
        }
      };
      add(env.hd_tx, duplex == Duplex::hd);
      add(env.fd, duplex == Duplex::fd);
      const double si = (duplex == Duplex::fd) ? s.delta * s.p_d : 0.0;
      const double sinr_near = signal / (near_i + si + s.sigma2);
      const double sinr_far = signal / (far_i + si + s.sigma2);
      for (size_t i = 0; i < betas.size(); ++i) {
        cov_base[i] += (sinr_near > betas[i]) ? 1 : 0;
        cov_wide[i] += (sinr_far > betas[i]) ? 1 : 0;
      }
      break;
    }
  }
  TruncationProbe out;
  out.trials = trials;
  out.base.resize(betas.size());
  out.doubled.resize(betas.size());
  for (size_t i = 0; i < betas.size(); ++i) {
    out.base[i] = static_cast<double>(cov_base[i]) / static_cast<double>(trials);
    out.doubled[i] = static_cast<double>(cov_wide[i]) / static_cast<double>(trials);
    out.max_delta = std::max(out.max_delta, std::fabs(out.base[i] - out.doubled[i]));
  }
  return out;
}

}  // namespace d2dnet
