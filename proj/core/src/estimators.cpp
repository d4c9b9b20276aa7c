#include "boolperc/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "boolperc/connectivity.hpp"

namespace boolperc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs fn(i) for i in [0, n) over the worker count; fn must be pure up to
// writing slot i of preallocated output.
template <typename Fn>
void for_replicates(long long n, int workers, Fn&& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || n < 2 * workers) {
    for (long long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&fn, t, n, workers] {
      for (long long i = t; i < n; i += workers) fn(i);
    });
  for (std::thread& th : pool) th.join();
}

CrossingEstimate finish_estimate(std::vector<unsigned char>& bits,
                                 StreamKey seed, Clock::time_point t0,
                                 std::vector<unsigned char>* per_sample) {
  CrossingEstimate est;
  est.n = static_cast<long long>(bits.size());
  for (unsigned char b : bits) est.hits += b;
  est.p_hat = est.n ? static_cast<double>(est.hits) / est.n : 0.0;
  Wilson w = wilson_interval(est.hits, est.n);
  est.ci_lo = w.lo;
  est.ci_hi = w.hi;
  est.seed = seed.v;
  est.wall_seconds = seconds_since(t0);
  if (per_sample) *per_sample = std::move(bits);
  return est;
}

}  // namespace

Wilson wilson_interval(long long hits, long long n, double z) {
  if (n <= 0) return {0.0, 1.0};
  double p = static_cast<double>(hits) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // center - half cancels exactly at the endpoints; don't let roundoff leak
  double lo = hits == 0 ? 0.0 : std::max(0.0, center - half);
  double hi = hits == n ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

CrossingEstimate estimate_crossing(const RadiusMeasure& mu, double a, int d,
                                   long long n, StreamKey seed,
                                   std::vector<unsigned char>* per_sample,
                                   int workers) {
  if (n < 0) throw std::invalid_argument("estimate_crossing: n >= 0");
  auto t0 = Clock::now();
  std::vector<unsigned char> bits(static_cast<std::size_t>(n), 0);
  for_replicates(n, workers, [&](long long i) {
    Realization real =
        sample_boolean(mu, a, d, seed.child(static_cast<std::uint64_t>(i)));
    ComponentStructure cs = ComponentStructure::build(real);
    bits[static_cast<std::size_t>(i)] = cs.crossing_event(0.5 * a, a) ? 1 : 0;
  });
  return finish_estimate(bits, seed, t0, per_sample);
}

CrossingEstimate estimate_one_arm(const RadiusMeasure& mu, double r, int d,
                                  long long n, StreamKey seed,
                                  std::vector<unsigned char>* per_sample,
                                  int workers) {
  if (n < 0) throw std::invalid_argument("estimate_one_arm: n >= 0");
  auto t0 = Clock::now();
  std::vector<unsigned char> bits(static_cast<std::size_t>(n), 0);
  for_replicates(n, workers, [&](long long i) {
    Realization real =
        sample_boolean(mu, r, d, seed.child(static_cast<std::uint64_t>(i)));
    ComponentStructure cs = ComponentStructure::build(real);
    bits[static_cast<std::size_t>(i)] = cs.one_arm_event(r) ? 1 : 0;
  });
  CrossingEstimate est = finish_estimate(bits, seed, t0, per_sample);
  est.diagnostic = ipow(r, d) * est.p_hat;
  return est;
}

double covered_volume_fraction(const RadiusMeasure& mu, int d) {
  double md = mu.moment(static_cast<double>(d));
  if (md == kInf) return 1.0;
  double phi = 1.0 - std::exp(-unit_ball_volume(d) * md);
  return std::clamp(phi, 0.0, 1.0);
}

namespace {

template <typename Get>
void trend_flags(const std::vector<LadderPoint>& points, double trend_sigmas,
                 Get&& get, bool* non_increasing, bool* non_decreasing) {
  *non_increasing = *non_decreasing = true;
  for (std::size_t j = 0; j + 1 < points.size(); ++j) {
    const LadderPoint& x = points[j];
    const LadderPoint& y = points[j + 1];
    double px = get(x), py = get(y);
    double var = px * (1.0 - px) / std::max<long long>(1, x.n) +
                 py * (1.0 - py) / std::max<long long>(1, y.n);
    double sigma = std::max(std::sqrt(var),
                            1.0 / static_cast<double>(std::max<long long>(1, x.n)));
    if (py > px + trend_sigmas * sigma) *non_increasing = false;
    if (py < px - trend_sigmas * sigma) *non_decreasing = false;
  }
}

}  // namespace

Verdict ladder_verdict(const std::vector<LadderPoint>& points,
                       const ThresholdPolicy& policy) {
  if (points.empty()) return Verdict::Inconclusive;
  bool sub = false, sup = false;
  if (points.back().circuit_hat >= 0) {
    // Planar dual rule: the circuit probability at the largest window decays
    // to 0 below the threshold, grows to 1 above it, and hovers at a small
    // positive plateau at criticality (~0.03 for the default annulus ratio).
    // A Wilson band around the largest-window estimate separates the three
    // regimes; trends are useless here because the plateau is approached from
    // above on both sides at reachable window sizes.
    const LadderPoint& last = points.back();
    Wilson w = wilson_interval(last.circuit_hits, last.n);
    sub = w.hi <= policy.p_low;
    sup = w.lo >= policy.p_high;
  } else {
    // no dual event away from the plane; crossing levels only
    bool ni, nd;
    trend_flags(points, policy.trend_sigmas,
                [](const LadderPoint& p) { return p.p_hat; }, &ni, &nd);
    double last = points.back().p_hat;
    sub = ni && last <= policy.p_low;
    sup = nd && last >= std::max(policy.p_high, 0.985);
  }
  if (sub && !sup) return Verdict::Subcritical;
  if (sup && !sub) return Verdict::Supercritical;
  return Verdict::Inconclusive;
}

LadderEvidence evaluate_ladder(const RadiusMeasure& mu, double lambda, int d,
                               const ThresholdPolicy& policy, StreamKey seed,
                               long long n_override) {
  LadderEvidence ev;
  ev.lambda = lambda;
  long long n = n_override > 0 ? n_override : policy.n;
  RadiusMeasure driven = mu.scaled_by(lambda);
  std::vector<double> ladder = policy.ladder();
  for (std::size_t j = 0; j < ladder.size(); ++j) {
    const double a = ladder[j];
    StreamKey skey = seed.child(static_cast<std::uint64_t>(j));
    std::vector<unsigned char> cross(static_cast<std::size_t>(n), 0);
    std::vector<unsigned char> circ(d == 2 ? static_cast<std::size_t>(n) : 0, 0);
    for_replicates(n, policy.workers, [&](long long i) {
      Realization real =
          sample_boolean(driven, a, d, skey.child(static_cast<std::uint64_t>(i)));
      ComponentStructure cs = ComponentStructure::build(real);
      cross[static_cast<std::size_t>(i)] =
          cs.crossing_event(0.5 * a, a) ? 1 : 0;
      if (d == 2)
        circ[static_cast<std::size_t>(i)] =
            annulus_circuit_event(real, a / policy.circuit_ratio, a) ? 1 : 0;
    });
    LadderPoint p;
    p.a = a;
    p.n = n;
    p.hits = 0;
    for (unsigned char b : cross) p.hits += b;
    p.p_hat = n ? static_cast<double>(p.hits) / n : 0.0;
    Wilson w = wilson_interval(p.hits, n);
    p.ci_lo = w.lo;
    p.ci_hi = w.hi;
    if (d == 2) {
      for (unsigned char b : circ) p.circuit_hits += b;
      p.circuit_hat = n ? static_cast<double>(p.circuit_hits) / n : 0.0;
    }
    ev.points.push_back(p);
  }
  ev.verdict = ladder_verdict(ev.points, policy);
  return ev;
}

ThresholdBracket bracket_threshold_hat(const RadiusMeasure& mu, int d,
                                       const ThresholdPolicy& policy,
                                       StreamKey seed) {
  if (mu.is_zero())
    throw std::invalid_argument("bracket_threshold_hat: zero measure");
  double md = mu.moment(static_cast<double>(d));
  if (md == kInf)
    throw std::invalid_argument(
        "bracket_threshold_hat: divergent d-th moment; window intensity "
        "infinite at every lambda");
  auto t0 = Clock::now();

  ThresholdBracket out;
  out.ladder = policy.ladder();
  out.p_low = policy.p_low;
  out.p_high = policy.p_high;
  out.seed = seed.v;

  auto account = [&out](const LadderEvidence& ev) {
    for (const LadderPoint& p : ev.points) out.total_replicates += p.n;
    out.evidence.push_back(ev);
  };

  // lambda = 0 is subcritical by definition: the model is empty
  out.evidence.push_back({0.0, Verdict::Subcritical, {}});
  double lo = 0.0;

  std::uint64_t eval = 0;
  double hi = policy.lambda_hi_init > 0
                  ? policy.lambda_hi_init
                  : 2.0 / (unit_ball_volume(d) * md);
  bool have_super = false;
  for (int doubling = 0; doubling < 20; ++doubling) {
    LadderEvidence ev = evaluate_ladder(mu, hi, d, policy, seed.child(eval++));
    account(ev);
    if (ev.verdict == Verdict::Supercritical) {
      have_super = true;
      break;
    }
    if (ev.verdict == Verdict::Subcritical) lo = hi;
    hi *= 2.0;
  }
  if (!have_super) {
    out.lambda_lo = lo;
    out.lambda_hi = hi;
    out.status = BracketStatus::NoSupercritical;
    out.wall_seconds = seconds_since(t0);
    return out;
  }

  out.status = BracketStatus::Converged;
  int rounds = 0;
  while ((hi - lo) > policy.rel_width_stop * 0.5 * (hi + lo)) {
    if (++rounds > policy.max_rounds) {
      out.status = BracketStatus::BudgetExhausted;
      break;
    }
    double mid = 0.5 * (lo + hi);
    Verdict verdict = Verdict::Inconclusive;
    long long nn = policy.n;
    for (int attempt = 0; attempt <= policy.inconclusive_retries; ++attempt) {
      LadderEvidence ev =
          evaluate_ladder(mu, mid, d, policy, seed.child(eval++), nn);
      account(ev);
      verdict = ev.verdict;
      if (verdict != Verdict::Inconclusive) break;
      nn *= 2;
    }
    if (verdict == Verdict::Subcritical) {
      lo = mid;
    } else if (verdict == Verdict::Supercritical) {
      hi = mid;
    } else {
      // the midpoint sits in the window where the finite ladder cannot
      // distinguish sub from super; the bracket cannot shrink honestly
      out.status = BracketStatus::InconclusiveGap;
      break;
    }
  }
  out.lambda_lo = lo;
  out.lambda_hi = hi;
  out.wall_seconds = seconds_since(t0);
  return out;
}

double two_scale_limit_phi(double alpha) {
  if (!(alpha >= 0.0) || !(alpha <= 1.0))
    throw std::invalid_argument("two_scale_limit_phi: alpha in [0,1]");
  double v2 = unit_ball_volume(2);
  double lambda_c = -std::log(1.0 - kPhiCriticalDisk) / v2;
  double coeff = 1.0;
  if (alpha > 0.0 && alpha < 1.0)
    coeff = std::min(1.0 / alpha, 1.0 / (1.0 - alpha));
  return 1.0 - std::exp(-v2 * lambda_c * coeff);
}

std::vector<TwoScaleRow> two_scale_curve(const RadiusMeasure& nu1,
                                         const RadiusMeasure& nu2,
                                         std::span<const double> alpha_grid,
                                         double rho, int d,
                                         const TwoScaleConfig& config,
                                         StreamKey seed) {
  if (!(rho > 1)) throw std::invalid_argument("two_scale_curve: rho > 1");
  std::vector<TwoScaleRow> rows;
  RadiusMeasure scaled2 = nu2.scaled(rho, d);
  double warm_hi = 0.0;
  for (std::size_t idx = 0; idx < alpha_grid.size(); ++idx) {
    double alpha = alpha_grid[idx];
    if (!(alpha >= 0.0) || !(alpha <= 1.0))
      throw std::invalid_argument("two_scale_curve: alpha in [0,1]");
    RadiusMeasure mix =
        RadiusMeasure::combine({{alpha, nu1}, {1.0 - alpha, scaled2}});
    double md = mix.moment(static_cast<double>(d));
    if (md == kInf)
      throw std::invalid_argument("two_scale_curve: divergent d-th moment");

    ThresholdPolicy policy = config.policy;
    if (alpha == 0.0) policy.a0 /= rho;  // pure fine-scale balls
    if (config.warm_start && warm_hi > 0.0) policy.lambda_hi_init = 1.25 * warm_hi;

    StreamKey sub = seed.child(idx);
    ThresholdBracket bracket = bracket_threshold_hat(mix, d, policy, sub);
    if (bracket.conclusive()) warm_hi = bracket.lambda_hi;

    double v = unit_ball_volume(d) * md;
    auto phi = [v](double lambda) { return 1.0 - std::exp(-lambda * v); };
    TwoScaleRow row;
    row.alpha = alpha;
    row.rho = rho;
    row.lambda_lo = bracket.lambda_lo;
    row.lambda_hi = bracket.lambda_hi;
    row.phi_hat = phi(bracket.mid());
    row.ci_lo = phi(bracket.lambda_lo);
    row.ci_hi = phi(bracket.lambda_hi);
    row.n = bracket.total_replicates;
    row.seed = sub.v;
    row.status = bracket.status;
    rows.push_back(row);
  }
  return rows;
}

std::vector<ScanRow> multiscale_crossing_scan(const RadiusMeasure& mu,
                                              double lambda, double rho,
                                              int levels,
                                              std::span<const double> a_grid,
                                              int d, long long n,
                                              StreamKey seed, int workers) {
  if (levels < 0)
    throw std::invalid_argument("multiscale_crossing_scan: levels >= 0");
  MultiscaleSpec spec{mu, rho, levels};
  std::vector<ScanRow> rows;
  for (std::size_t ai = 0; ai < a_grid.size(); ++ai) {
    double a = a_grid[ai];
    StreamKey akey = seed.child(ai);
    std::vector<std::vector<unsigned char>> bits(
        static_cast<std::size_t>(levels) + 1,
        std::vector<unsigned char>(static_cast<std::size_t>(n), 0));
    for_replicates(n, workers, [&](long long i) {
      Realization full = sample_multiscale(
          spec, lambda, a, d, akey.child(static_cast<std::uint64_t>(i)));
      for (int k = 0; k <= levels; ++k) {
        Realization prefix = filter_scales(full, k);
        ComponentStructure cs = ComponentStructure::build(prefix);
        bits[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
            cs.crossing_event(0.5 * a, a) ? 1 : 0;
      }
    });
    for (int k = 0; k <= levels; ++k) {
      long long hits = 0;
      for (unsigned char b : bits[static_cast<std::size_t>(k)]) hits += b;
      Wilson w = wilson_interval(hits, n);
      rows.push_back({k, a, n, hits,
                      n ? static_cast<double>(hits) / n : 0.0, w.lo, w.hi});
    }
  }
  return rows;
}

std::vector<DiameterRow> diameter_moment_probe(const RadiusMeasure& mu,
                                               double lambda, double rho,
                                               double s,
                                               std::span<const double> window_grid,
                                               int d, long long n,
                                               StreamKey seed, int levels,
                                               int workers) {
  if (!(s > 0)) throw std::invalid_argument("diameter_moment_probe: s > 0");
  if (window_grid.empty()) return {};
  MultiscaleSpec spec{mu, rho, levels};
  if (levels < 0) {
    double wmax = *std::max_element(window_grid.begin(), window_grid.end());
    spec.levels = auto_levels(spec, lambda, wmax, d);
  }
  // nested design: one realization per replicate at the largest window,
  // restricted to each sub-window (exact by Poisson restriction). Shared
  // randomness makes min(D, w)^s nondecreasing in w per sample, so the
  // successive ratios measure growth, not resampling noise.
  double wmax = *std::max_element(window_grid.begin(), window_grid.end());
  std::size_t nw = window_grid.size();
  std::vector<double> acc(nw, 0.0);
  std::vector<long long> censored(nw, 0);
  std::mutex mu_acc;
  for_replicates(n, workers, [&](long long i) {
    Realization full = sample_multiscale(
        spec, lambda, wmax, d, seed.child(static_cast<std::uint64_t>(i)));
    std::vector<double> vals(nw);
    std::vector<unsigned char> cens(nw);
    for (std::size_t wi = 0; wi < nw; ++wi) {
      double w = window_grid[wi];
      Realization real = restrict_window(full, w);
      ComponentStructure cs = ComponentStructure::build(real);
      auto [diam, was_censored] = cs.origin_component_diameter();
      vals[wi] = std::pow(std::min(diam, w), s);
      cens[wi] = was_censored ? 1 : 0;
    }
    std::lock_guard<std::mutex> lock(mu_acc);
    for (std::size_t wi = 0; wi < nw; ++wi) {
      acc[wi] += vals[wi];
      censored[wi] += cens[wi];
    }
  });
  std::vector<DiameterRow> rows;
  double prev = 0.0;
  for (std::size_t wi = 0; wi < nw; ++wi) {
    DiameterRow row;
    row.window = window_grid[wi];
    row.n = n;
    row.truncated_moment = n ? acc[wi] / n : 0.0;
    row.censor_rate = n ? static_cast<double>(censored[wi]) / n : 0.0;
    row.ratio_to_prev = (wi > 0 && prev > 0.0) ? row.truncated_moment / prev : 0.0;
    prev = row.truncated_moment;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace boolperc
