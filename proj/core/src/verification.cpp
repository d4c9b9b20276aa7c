#include "boolperc/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <json.hpp>

#include "boolperc/connectivity.hpp"

namespace boolperc {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double dist(int d, const double* x, const double* y) {
  double acc = 0.0;
  for (int j = 0; j < d; ++j) {
    double t = x[j] - y[j];
    acc += t * t;
  }
  return std::sqrt(acc);
}

// iterate k over [-limit, limit]^d; fn gets the integer vector
template <typename Fn>
void lattice_box(int d, long long limit, Fn&& fn) {
  std::vector<long long> k(d, -limit);
  for (;;) {
    fn(k);
    int j = 0;
    while (j < d && k[j] == limit) k[j++] = -limit;
    if (j == d) break;
    ++k[j];
  }
}

void guard_lattice_size(long long per_axis, int d) {
  double total = 1.0;
  for (int j = 0; j < d; ++j) total *= static_cast<double>(per_axis);
  if (total > 5e7)
    throw std::overflow_error(
        "covering lattice too large; intended for low dimensions");
}

}  // namespace

CoveringFamily build_ball_covering(double a, double eta, int d) {
  if (!(eta > 0) || !(a >= 4 * eta))
    throw std::invalid_argument("build_ball_covering: need a >= 4*eta > 0");
  if (d < 1) throw std::invalid_argument("build_ball_covering: d >= 1");
  const double h = eta / (4.0 * std::sqrt(static_cast<double>(d)));
  const double reach = a + 0.25 * eta;
  const long long limit = static_cast<long long>(std::floor(reach / h));
  guard_lattice_size(2 * limit + 1, d);
  CoveringFamily fam;
  fam.d = d;
  fam.ball_radius = 0.25 * eta;
  fam.region = "ball";
  fam.region_param = a;
  std::vector<double> x(d);
  lattice_box(d, limit, [&](const std::vector<long long>& k) {
    double acc = 0.0;
    for (int j = 0; j < d; ++j) {
      x[j] = static_cast<double>(k[j]) * h;
      acc += x[j] * x[j];
    }
    if (acc <= reach * reach)
      fam.centers.insert(fam.centers.end(), x.begin(), x.end());
  });
  return fam;
}

CoveringFamily build_sphere_covering(double s, int d) {
  if (!(s > 0)) throw std::invalid_argument("build_sphere_covering: s > 0");
  if (d < 2) throw std::invalid_argument("build_sphere_covering: d >= 2");
  const double h = 1.0 / (4.0 * std::sqrt(static_cast<double>(d)));
  const long long limit = static_cast<long long>(std::ceil((s + 0.125) / h));
  guard_lattice_size(2 * limit + 1, d);
  CoveringFamily fam;
  fam.d = d;
  fam.ball_radius = 0.5;
  fam.region = "sphere";
  fam.region_param = s;
  std::vector<double> x(d);
  std::vector<std::vector<double>> pts;
  lattice_box(d, limit, [&](const std::vector<long long>& k) {
    double acc = 0.0;
    for (int j = 0; j < d; ++j) {
      x[j] = static_cast<double>(k[j]) * h;
      acc += x[j] * x[j];
    }
    double norm = std::sqrt(acc);
    if (std::abs(norm - s) > 0.125 || norm == 0.0) return;
    std::vector<double> proj(d);
    for (int j = 0; j < d; ++j) proj[j] = x[j] * s / norm;
    pts.push_back(std::move(proj));
  });
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  for (const std::vector<double>& p : pts)
    fam.centers.insert(fam.centers.end(), p.begin(), p.end());
  return fam;
}

// ---- key-eta ----------------------------------------------------------------

VerifyResult verify_key_eta(const RadiusMeasure& nu1, const RadiusMeasure& nu2,
                            double eta, double a, int d, long long n,
                            StreamKey seed) {
  if (!(eta > 0) || !(a >= 4 * eta))
    throw std::invalid_argument("verify_key_eta: need a >= 4*eta > 0");
  auto t0 = Clock::now();
  const double h = eta / (4.0 * std::sqrt(static_cast<double>(d)));
  const double reach = a + 0.25 * eta;
  const double reach2 = reach * reach;
  const double inner_s = 0.25 * eta, outer_s = 0.5 * eta;

  long long violations = 0;
  std::vector<long long> klo(d), khi(d);
  // entry: (site key, root*4 | sphere flag); flag 1 inner, 2 outer
  std::vector<std::pair<std::uint64_t, std::uint64_t>> entries;

  for (long long rep = 0; rep < n; ++rep) {
    StreamKey key = seed.child(static_cast<std::uint64_t>(rep));
    Realization r1 = sample_boolean(nu1, a + eta, d, key.child(0));
    Realization r2 = sample_boolean(nu2, a + eta, d, key.child(1));

    Realization all = merge(r1, r2);
    if (!ComponentStructure::build(all).crossing_event(0.5 * a, a)) continue;
    if (ComponentStructure::build(fatten(r1, eta)).crossing_event(0.5 * a, a))
      continue;

    ComponentStructure c2 = ComponentStructure::build(r2);
    entries.clear();
    for (std::size_t j = 0; j < r2.size(); ++j) {
      const double* c = r2.center(j);
      const double r = r2.radius(j);
      const std::uint64_t root = static_cast<std::uint64_t>(c2.find(j));
      for (int which = 0; which < 2; ++which) {
        const double sr = which == 0 ? inner_s : outer_s;
        const double span = r + sr;
        for (int jj = 0; jj < d; ++jj) {
          klo[jj] = static_cast<long long>(std::ceil((c[jj] - span) / h));
          khi[jj] = static_cast<long long>(std::floor((c[jj] + span) / h));
        }
        std::vector<long long> k(klo);
        for (;;) {
          double acc = 0.0, dd = 0.0;
          std::uint64_t site = 0;
          for (int jj = 0; jj < d; ++jj) {
            double xj = static_cast<double>(k[jj]) * h;
            acc += xj * xj;
            double t = xj - c[jj];
            dd += t * t;
            site = mix64(site ^ mix64(static_cast<std::uint64_t>(k[jj]) +
                                      0x9e3779b97f4a7c15ULL *
                                          static_cast<std::uint64_t>(jj + 1)));
          }
          if (acc <= reach2 && std::abs(std::sqrt(dd) - sr) < r)
            entries.emplace_back(site, root * 4 + (which == 0 ? 1 : 2));
          int jj = 0;
          while (jj < d && k[jj] == khi[jj]) {
            k[jj] = klo[jj];
            ++jj;
          }
          if (jj == d) break;
          ++k[jj];
        }
      }
    }
    std::sort(entries.begin(), entries.end());
    bool local_hit = false;
    for (std::size_t u = 0; u < entries.size() && !local_hit;) {
      std::size_t v = u;
      std::uint64_t flags = 0;
      std::uint64_t group = entries[u].second >> 2;
      while (v < entries.size() && entries[v].first == entries[u].first &&
             (entries[v].second >> 2) == group)
        flags |= entries[v++].second & 3u;
      if (flags == 3u) local_hit = true;
      u = v;
    }
    if (!local_hit) ++violations;
  }

  VerifyResult res;
  res.check = "key_eta";
  res.samples = n;
  res.violations = violations;
  res.params_json = json{{"eta", eta}, {"a", a}, {"d", d},
                         {"nu1", json::parse(nu1.to_json_string())},
                         {"nu2", json::parse(nu2.to_json_string())}}
                        .dump();
  res.seed = seed.v;
  res.wall_seconds = seconds_since(t0);
  return res;
}

// ---- key-carre ---------------------------------------------------------------

namespace {

bool local_annulus_crossing(const ComponentStructure& cs, const double* x,
                            double s1, double s2) {
  const Realization& real = cs.realization();
  const int d = real.dimension();
  // (root, flags) pairs; the touched roots stay few
  std::vector<std::pair<std::int32_t, int>> roots;
  for (std::size_t j = 0; j < real.size(); ++j) {
    double dj = dist(d, real.center(j), x);
    int flags = 0;
    if (std::abs(dj - s1) < real.radius(j)) flags |= 1;
    if (std::abs(dj - s2) < real.radius(j)) flags |= 2;
    if (!flags) continue;
    std::int32_t root = cs.find(j);
    bool found = false;
    for (auto& rp : roots)
      if (rp.first == root) {
        rp.second |= flags;
        if (rp.second == 3) return true;
        found = true;
        break;
      }
    if (!found) {
      if (flags == 3) return true;
      roots.emplace_back(root, flags);
    }
  }
  return false;
}

}  // namespace

VerifyResult verify_key_carre(const RadiusMeasure& nu, double a, int d,
                              long long n, StreamKey seed) {
  if (!(a > 0)) throw std::invalid_argument("verify_key_carre: a > 0");
  auto t0 = Clock::now();
  CoveringFamily covK = build_sphere_covering(5.0, d);
  CoveringFamily covL = build_sphere_covering(10.0, d);
  std::vector<double> ak(covK.centers), al(covL.centers);
  for (double& v : ak) v *= a;
  for (double& v : al) v *= a;
  const std::size_t nk = covK.size(), nl = covL.size();

  long long violations = 0;
  for (long long rep = 0; rep < n; ++rep) {
    Realization real = sample_boolean(
        nu, 11.0 * a, d, seed.child(static_cast<std::uint64_t>(rep)));
    ComponentStructure cs = ComponentStructure::build(real);
    if (!cs.crossing_event(5.0 * a, 10.0 * a)) continue;
    bool giant = false;
    for (std::size_t i = 0; i < real.size() && !giant; ++i)
      if (real.radius(i) >= a) giant = true;
    if (giant) continue;  // event-A guard: the lemma branch does not apply

    const double* wk = nullptr;
    for (std::size_t i = 0; i < nk && !wk; ++i)
      if (local_annulus_crossing(cs, ak.data() + i * d, 0.5 * a, a))
        wk = ak.data() + i * d;
    const double* wl = nullptr;
    for (std::size_t i = 0; i < nl && !wl; ++i)
      if (local_annulus_crossing(cs, al.data() + i * d, 0.5 * a, a))
        wl = al.data() + i * d;
    if (!wk || !wl) {
      ++violations;
      continue;
    }
    // independence structure: witnesses are >= 5a apart and no small ball
    // can decide both local events
    if (dist(d, wk, wl) < 5.0 * a * (1.0 - 1e-12)) ++violations;
    for (std::size_t i = 0; i < real.size(); ++i) {
      const double* c = real.center(i);
      double r = real.radius(i);
      if (dist(d, c, wk) <= a + r && dist(d, c, wl) <= a + r) {
        ++violations;
        break;
      }
    }
  }

  VerifyResult res;
  res.check = "key_carre";
  res.samples = n;
  res.violations = violations;
  res.params_json = json{{"a", a},
                         {"d", d},
                         {"nu", json::parse(nu.to_json_string())},
                         {"covering_K", nk},
                         {"covering_L", nl}}
                        .dump();
  res.seed = seed.v;
  res.wall_seconds = seconds_since(t0);
  return res;
}

// ---- remaining couplings ------------------------------------------------------

VerifyResult verify_scaling_coupling(const RadiusMeasure& mu, double rho,
                                     double a, int d, long long n,
                                     StreamKey seed) {
  if (!(rho > 1)) throw std::invalid_argument("verify_scaling_coupling: rho > 1");
  auto t0 = Clock::now();
  long long violations = 0;
  for (long long rep = 0; rep < n; ++rep) {
    Realization big = sample_boolean(
        mu, rho * a, d, seed.child(static_cast<std::uint64_t>(rep)));
    bool e1 = ComponentStructure::build(big).crossing_event(0.5 * rho * a,
                                                            rho * a);
    Realization small = rescale(big, 1.0 / rho);
    bool e2 = ComponentStructure::build(small).crossing_event(0.5 * a, a);
    if (e1 != e2) ++violations;
  }
  VerifyResult res;
  res.check = "scaling_coupling";
  res.samples = n;
  res.violations = violations;
  res.params_json = json{{"rho", rho}, {"a", a}, {"d", d},
                         {"mu", json::parse(mu.to_json_string())}}
                        .dump();
  res.seed = seed.v;
  res.wall_seconds = seconds_since(t0);
  return res;
}

VerifyResult verify_monotone_in_levels(const RadiusMeasure& mu, double rho,
                                       double lambda, double a, int d,
                                       int n_max, long long n, StreamKey seed) {
  if (n_max < 0) throw std::invalid_argument("verify_monotone_in_levels: n_max >= 0");
  auto t0 = Clock::now();
  MultiscaleSpec spec{mu, rho, n_max};
  long long violations = 0;
  for (long long rep = 0; rep < n; ++rep) {
    Realization full = sample_multiscale(
        spec, lambda, a, d, seed.child(static_cast<std::uint64_t>(rep)));
    bool prev = false;
    for (int k = 0; k <= n_max; ++k) {
      Realization prefix = filter_scales(full, k);
      bool ek =
          ComponentStructure::build(prefix).crossing_event(0.5 * a, a);
      if (prev && !ek) {
        ++violations;
        break;
      }
      prev = ek;
    }
  }
  VerifyResult res;
  res.check = "monotone_in_levels";
  res.samples = n;
  res.violations = violations;
  res.params_json = json{{"rho", rho}, {"lambda", lambda}, {"a", a},
                         {"d", d},     {"n_max", n_max},
                         {"mu", json::parse(mu.to_json_string())}}
                        .dump();
  res.seed = seed.v;
  res.wall_seconds = seconds_since(t0);
  return res;
}

VerifyResult verify_one_arm_inclusion(const RadiusMeasure& mu, double r, int d,
                                      long long n, StreamKey seed) {
  if (!(r > 0)) throw std::invalid_argument("verify_one_arm_inclusion: r > 0");
  auto t0 = Clock::now();
  long long violations = 0;
  for (long long rep = 0; rep < n; ++rep) {
    Realization real =
        sample_boolean(mu, r, d, seed.child(static_cast<std::uint64_t>(rep)));
    ComponentStructure cs = ComponentStructure::build(real);
    if (cs.one_arm_event(r) && !cs.crossing_event(0.5 * r, r)) ++violations;
  }
  VerifyResult res;
  res.check = "one_arm_inclusion";
  res.samples = n;
  res.violations = violations;
  res.params_json = json{{"r", r}, {"d", d},
                         {"mu", json::parse(mu.to_json_string())}}
                        .dump();
  res.seed = seed.v;
  res.wall_seconds = seconds_since(t0);
  return res;
}

MeasureIdentityReport verify_measure_identities(const RadiusMeasure& mu,
                                                double rho, double s,
                                                std::span<const double> a_grid,
                                                int d) {
  if (!mu.bounded_support())
    throw std::domain_error(
        "verify_measure_identities: bounded support required for the "
        "enumeration oracle");
  MeasureIdentityReport rep;
  rep.sandwich = moment_sandwich_check(mu, rho, s, d);
  if (!rep.sandwich.holds) ++rep.violations;
  for (double a : a_grid) {
    rep.a_grid.push_back(a);
    double closed = multiscale_tail_moment(mu, rho, a, d);
    double direct = 0.0;
    for (int k = 0; k <= 400; ++k) {
      if (k * d * std::log10(rho) > 280.0) break;
      RadiusMeasure layer = (k == 0) ? mu : mu.scaled(ipow(rho, k), d);
      if (layer.max_radius() < a) break;
      direct += layer.tail_moment(a, static_cast<double>(d));
    }
    double denom = std::max({1e-300, std::abs(closed), std::abs(direct)});
    double rel = std::abs(closed - direct) / denom;
    rep.max_rel_error = std::max(rep.max_rel_error, rel);
    if (rel > 1e-12) ++rep.violations;
  }
  rep.holds = rep.violations == 0;
  return rep;
}

EtaProbeResult eta_subcritical_probe(const RadiusMeasure& mu, int d,
                                     double lambda_mid, double r_typ,
                                     const ThresholdPolicy& policy,
                                     StreamKey seed) {
  if (!(lambda_mid > 0) || !(r_typ > 0))
    throw std::invalid_argument("eta_subcritical_probe: positive inputs");
  EtaProbeResult out;
  out.lambda = 0.8 * lambda_mid;
  const double fracs[3] = {0.01, 0.05, 0.1};
  std::vector<double> ladder = policy.ladder();
  for (int ei = 0; ei < 3; ++ei) {
    double eta = fracs[ei] * r_typ;
    RadiusMeasure driven = mu.scaled_by(out.lambda).shifted(eta);
    EtaProbeRow row;
    row.eta = eta;
    for (std::size_t j = 0; j < ladder.size(); ++j) {
      CrossingEstimate est = estimate_crossing(
          driven, ladder[j], d, policy.n,
          seed.child(static_cast<std::uint64_t>(ei)).child(j), nullptr,
          policy.workers);
      row.points.push_back(
          {ladder[j], est.n, est.hits, est.p_hat, est.ci_lo, est.ci_hi});
    }
    row.decreasing = true;
    for (std::size_t j = 0; j + 1 < row.points.size(); ++j) {
      const LadderPoint& x = row.points[j];
      const LadderPoint& y = row.points[j + 1];
      double var = x.p_hat * (1.0 - x.p_hat) / std::max<long long>(1, x.n) +
                   y.p_hat * (1.0 - y.p_hat) / std::max<long long>(1, y.n);
      double sigma =
          std::max(std::sqrt(var), 1.0 / std::max<long long>(1, x.n));
      if (y.p_hat > x.p_hat + policy.trend_sigmas * sigma)
        row.decreasing = false;
    }
    if (row.decreasing) out.some_eta_decreasing = true;
    out.rows.push_back(std::move(row));
  }
  return out;
}

Realization thin_to(const Realization& x, const RadiusMeasure& nu,
                    const RadiusMeasure& nu_prime, StreamKey stream) {
  if (!nu.is_atomic() || !nu_prime.is_atomic())
    throw std::invalid_argument("thin_to: atomic measures required");
  // keep probability per radius = weight ratio; radii of sampled balls are
  // bitwise copies of atom radii, so exact lookup is sound
  std::vector<std::pair<double, double>> ratio;  // (radius, nu weight)
  for (const Atom& at : nu.atoms()) {
    double wp = 0.0;
    for (const Atom& bt : nu_prime.atoms())
      if (bt.radius == at.radius) wp += bt.weight;
    if (wp < at.weight)
      throw std::invalid_argument("thin_to: nu not dominated by nu_prime");
    ratio.emplace_back(at.radius, at.weight / wp);
  }
  Rng rng = stream.rng();
  Realization out(x.dimension(), x.window_radius());
  out.seeds() = x.seeds();
  for (std::size_t i = 0; i < x.size(); ++i) {
    double keep = 0.0;
    for (const auto& rv : ratio)
      if (rv.first == x.radius(i)) {
        keep = rv.second;
        break;
      }
    double u = rng.uniform();
    if (u < keep)
      out.add_ball(std::span<const double>(x.center(i), x.dimension()),
                   x.radius(i), x.scale_index(i), x.source(i));
  }
  return out;
}

}  // namespace boolperc
