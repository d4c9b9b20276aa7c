#include "boolperc/connectivity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "boolperc/rng.hpp"  // mix64 for cell hashing

namespace boolperc {

namespace {

double dist2(int d, const double* a, const double* b) {
  double acc = 0.0;
  for (int j = 0; j < d; ++j) {
    double t = a[j] - b[j];
    acc += t * t;
  }
  return acc;
}

double norm2(int d, const double* a) {
  double acc = 0.0;
  for (int j = 0; j < d; ++j) acc += a[j] * a[j];
  return acc;
}

struct Dsu {
  std::vector<std::int32_t> parent, size;

  explicit Dsu(std::size_t n) : parent(n), size(n, 1) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::int32_t>(i);
  }

  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];  // path halving
      x = parent[x];
    }
    return x;
  }

  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

// level = ceil(log2 r), exact: frexp gives r = m * 2^e with m in [0.5, 1)
int radius_level(double r) {
  int e;
  double m = std::frexp(r, &e);
  return m == 0.5 ? e - 1 : e;
}

std::uint64_t cell_hash(const std::int64_t* k, int d) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (int j = 0; j < d; ++j)
    h = mix64(h ^ mix64(static_cast<std::uint64_t>(k[j]) +
                        0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(j + 1)));
  return h;
}

struct LevelIndex {
  int level;
  double cell;                                       // 2^{level+1}
  std::vector<std::pair<std::uint64_t, std::int32_t>> entries;  // (hash, ball)
};

}  // namespace

bool balls_overlap(int d, const double* c1, double r1, const double* c2,
                   double r2) {
  double s = r1 + r2;
  return dist2(d, c1, c2) < s * s;
}

bool ball_meets_sphere_at(int d, const double* c, double r,
                          const double* sphere_center, double s) {
  return std::abs(std::sqrt(dist2(d, c, sphere_center)) - s) < r;
}

bool ball_meets_sphere(int d, const double* c, double r, double s) {
  return std::abs(std::sqrt(norm2(d, c)) - s) < r;
}

ComponentStructure ComponentStructure::build_brute_force(
    const Realization& real) {
  const int d = real.dimension();
  const std::size_t n = real.size();
  Dsu dsu(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (balls_overlap(d, real.center(i), real.radius(i), real.center(j),
                        real.radius(j)))
        dsu.unite(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
  ComponentStructure out;
  out.real_ = &real;
  out.parent_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.parent_[i] = dsu.find(static_cast<std::int32_t>(i));
  return out;
}

namespace {

// Enumerates every overlapping pair exactly once as fn(i, j) with j < i in
// the same-level case. Shared by component building and circuit detection.
template <typename Fn>
void visit_overlapping_pairs(const Realization& real, Fn&& fn) {
  const int d = real.dimension();
  const std::size_t n = real.size();
  // the grid pays off only for larger planar-ish instances
  if (n <= 64 || d >= 6) {
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (balls_overlap(d, real.center(i), real.radius(i), real.center(j),
                          real.radius(j)))
          fn(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
    return;
  }

  std::vector<int> level(n);
  for (std::size_t i = 0; i < n; ++i) level[i] = radius_level(real.radius(i));

  std::vector<int> distinct(level.begin(), level.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());

  std::vector<LevelIndex> index(distinct.size());
  std::vector<std::int64_t> k(d);
  for (std::size_t li = 0; li < distinct.size(); ++li) {
    index[li].level = distinct[li];
    index[li].cell = std::ldexp(1.0, distinct[li] + 1);
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t li = static_cast<std::size_t>(
        std::lower_bound(distinct.begin(), distinct.end(), level[i]) -
        distinct.begin());
    const double* c = real.center(i);
    for (int j = 0; j < d; ++j)
      k[j] = static_cast<std::int64_t>(std::floor(c[j] / index[li].cell));
    index[li].entries.emplace_back(cell_hash(k.data(), d),
                                   static_cast<std::int32_t>(i));
  }
  for (LevelIndex& lx : index) std::sort(lx.entries.begin(), lx.entries.end());

  std::vector<std::int64_t> base(d), probe(d);
  for (std::size_t i = 0; i < n; ++i) {
    const double* ci = real.center(i);
    const double ri = real.radius(i);
    std::size_t li0 = static_cast<std::size_t>(
        std::lower_bound(distinct.begin(), distinct.end(), level[i]) -
        distinct.begin());
    // same level and all coarser levels: a pair at levels l_i <= l_j has
    // center distance < 2^{l_i} + 2^{l_j} <= cell(l_j), so it sits in
    // neighbouring cells of the coarser grid
    for (std::size_t li = li0; li < index.size(); ++li) {
      const LevelIndex& lx = index[li];
      for (int j = 0; j < d; ++j)
        base[j] = static_cast<std::int64_t>(std::floor(ci[j] / lx.cell));
      // odometer over the 3^d neighbourhood
      std::vector<int> digit(d, -1);
      for (;;) {
        for (int j = 0; j < d; ++j) probe[j] = base[j] + digit[j];
        std::uint64_t h = cell_hash(probe.data(), d);
        auto range = std::equal_range(
            lx.entries.begin(), lx.entries.end(),
            std::make_pair(h, std::int32_t{-1}),
            [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto it = range.first; it != range.second; ++it) {
          std::int32_t jball = it->second;
          if (li == li0 && jball >= static_cast<std::int32_t>(i)) continue;
          if (balls_overlap(d, ci, ri, real.center(jball),
                            real.radius(jball)))
            fn(static_cast<std::int32_t>(i), jball);
        }
        int j = 0;
        while (j < d && digit[j] == 1) digit[j++] = -1;
        if (j == d) break;
        ++digit[j];
      }
    }
  }
}

}  // namespace

ComponentStructure ComponentStructure::build(const Realization& real) {
  const std::size_t n = real.size();
  Dsu dsu(n);
  visit_overlapping_pairs(
      real, [&](std::int32_t i, std::int32_t j) { dsu.unite(i, j); });

  ComponentStructure out;
  out.real_ = &real;
  out.parent_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.parent_[i] = dsu.find(static_cast<std::int32_t>(i));
  return out;
}

bool ComponentStructure::crossing_event(double s1, double s2) const {
  const Realization& real = *real_;
  const double window = real.window_radius();
  if (!(s1 > 0) || !(s2 > s1))
    throw std::invalid_argument("crossing_event: 0 < s1 < s2 required");
  if (s2 > window * (1.0 + 1e-12))
    throw std::invalid_argument(
        "crossing_event: s2 exceeds the sampling window; event undecidable");
  const int d = real.dimension();
  const std::size_t n = real.size();
  std::vector<unsigned char> inner(n, 0), outer(n, 0);
  bool any_inner = false, any_outer = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double* c = real.center(i);
    double r = real.radius(i);
    double dist = std::sqrt(norm2(d, c));
    std::int32_t root = parent_[i];
    if (std::abs(dist - s1) < r) {
      inner[root] = 1;
      any_inner = true;
    }
    if (std::abs(dist - s2) < r) {
      outer[root] = 1;
      any_outer = true;
    }
  }
  if (!any_inner || !any_outer) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (inner[i] && outer[i]) return true;
  return false;
}

bool ComponentStructure::one_arm_event(double r) const {
  const Realization& real = *real_;
  if (!(r > 0)) throw std::invalid_argument("one_arm_event: r > 0 required");
  if (r > real.window_radius() * (1.0 + 1e-12))
    throw std::invalid_argument(
        "one_arm_event: r exceeds the sampling window; event undecidable");
  const int d = real.dimension();
  const std::size_t n = real.size();
  std::int32_t origin_root = -1;
  for (std::size_t i = 0; i < n; ++i) {
    // balls containing the origin pairwise overlap, one root suffices
    if (norm2(d, real.center(i)) < real.radius(i) * real.radius(i)) {
      origin_root = parent_[i];
      break;
    }
  }
  if (origin_root < 0) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (parent_[i] == origin_root &&
        ball_meets_sphere(d, real.center(i), real.radius(i), r))
      return true;
  return false;
}

std::pair<double, bool> ComponentStructure::origin_component_diameter() const {
  const Realization& real = *real_;
  const int d = real.dimension();
  const std::size_t n = real.size();
  std::int32_t origin_root = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (norm2(d, real.center(i)) < real.radius(i) * real.radius(i)) {
      origin_root = parent_[i];
      break;
    }
  }
  if (origin_root < 0) return {0.0, false};
  std::vector<std::int32_t> members;
  for (std::size_t i = 0; i < n; ++i)
    if (parent_[i] == origin_root) members.push_back(static_cast<std::int32_t>(i));
  double diam = 0.0;
  bool censored = false;
  const double window = real.window_radius();
  for (std::size_t u = 0; u < members.size(); ++u) {
    std::int32_t i = members[u];
    if (ball_meets_sphere(d, real.center(i), real.radius(i), window))
      censored = true;
    for (std::size_t v = u; v < members.size(); ++v) {
      std::int32_t j = members[v];
      double val = std::sqrt(dist2(d, real.center(i), real.center(j))) +
                   real.radius(i) + real.radius(j);
      diam = std::max(diam, val);
    }
  }
  return {diam, censored};
}

std::vector<int> ComponentStructure::component_labels() const {
  std::vector<int> label(parent_.size(), -1), out(parent_.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < parent_.size(); ++i) {
    std::int32_t root = parent_[i];
    if (label[root] < 0) label[root] = next++;
    out[i] = label[root];
  }
  return out;
}

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

double wrap_pi(double x) {
  while (x > 0.5 * kTau) x -= kTau;
  while (x <= -0.5 * kTau) x += kTau;
  return x;
}

// Union-find over the angle cover. sheet(x) tracks which 2pi-branch the
// piece's lift lives on relative to its root; a contradictory constraint is
// a cycle with nonzero holonomy, i.e. a circuit around the origin.
struct WindingDsu {
  std::vector<std::int32_t> up;
  std::vector<std::int64_t> off;  // sheet(x) - sheet(up[x])

  explicit WindingDsu(std::size_t n) : up(n), off(n, 0) {
    for (std::size_t i = 0; i < n; ++i) up[i] = static_cast<std::int32_t>(i);
  }

  std::pair<std::int32_t, std::int64_t> find(std::int32_t x) {
    std::int64_t acc = 0;
    std::int32_t root = x;
    while (up[root] != root) {
      acc += off[root];
      root = up[root];
    }
    std::int32_t cur = x;
    std::int64_t rel = acc;
    while (up[cur] != root) {
      std::int32_t nxt = up[cur];
      std::int64_t old = off[cur];
      up[cur] = root;
      off[cur] = rel;
      rel -= old;
      cur = nxt;
    }
    return {root, acc};
  }

  // imposes sheet(a) - sheet(b) == delta; false on contradiction
  bool unite(std::int32_t a, std::int32_t b, std::int64_t delta) {
    auto [ra, pa] = find(a);
    auto [rb, pb] = find(b);
    if (ra == rb) return pa - pb == delta;
    up[ra] = rb;
    off[ra] = delta + pb - pa;
    return true;
  }
};

double norm2d(const double* c) { return std::sqrt(c[0] * c[0] + c[1] * c[1]); }

// Any point on segment p->q with norm T, if one exists.
bool point_at_norm(const std::array<double, 2>& p, const std::array<double, 2>& q,
                   double T, std::array<double, 2>* out) {
  double dx = q[0] - p[0], dy = q[1] - p[1];
  double a = dx * dx + dy * dy;
  double c = p[0] * p[0] + p[1] * p[1] - T * T;
  if (a == 0.0) {
    if (std::abs(c) > 1e-9 * T * T) return false;
    *out = p;
    return true;
  }
  double b = 2.0 * (p[0] * dx + p[1] * dy);
  double disc = b * b - 4.0 * a * c;
  if (disc < 0) return false;
  double sq = std::sqrt(disc);
  for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
    if (t >= -1e-12 && t <= 1.0 + 1e-12) {
      t = std::min(1.0, std::max(0.0, t));
      *out = {p[0] + t * dx, p[1] + t * dy};
      return true;
    }
  }
  return false;
}

// Points of the closed lens D_i cap D_j with norm inside [r_in, r_out].
// Emits up to two witnesses, one near each angular tip of the lens, so that
// an overlap region split in two by the inner disk contributes a constraint
// for both sides.
int lens_annulus_witnesses(const double* ci, double ri, const double* cj,
                           double rj, double r_in, double r_out,
                           std::array<double, 2>* out) {
  std::array<double, 2> cand[12];
  double cnorm[12];
  int nc = 0;
  auto in_disk = [](const std::array<double, 2>& p, const double* c, double r) {
    double dx = p[0] - c[0], dy = p[1] - c[1];
    return dx * dx + dy * dy <= r * r * (1.0 + 1e-9) + 1e-300;
  };
  auto add = [&](double x, double y) {
    std::array<double, 2> p{x, y};
    if (nc < 12 && in_disk(p, ci, ri) && in_disk(p, cj, rj)) {
      cand[nc] = p;
      cnorm[nc] = std::sqrt(x * x + y * y);
      ++nc;
    }
  };

  double Lx = cj[0] - ci[0], Ly = cj[1] - ci[1];
  double L2 = Lx * Lx + Ly * Ly, L = std::sqrt(L2);

  // norm extremes of each circle, or the origin when a disk covers it
  const double* cs[2] = {ci, cj};
  double rs[2] = {ri, rj};
  for (int k = 0; k < 2; ++k) {
    double n = norm2d(cs[k]);
    if (n > 0) {
      add(cs[k][0] * (1.0 - rs[k] / n), cs[k][1] * (1.0 - rs[k] / n));
      add(cs[k][0] * (1.0 + rs[k] / n), cs[k][1] * (1.0 + rs[k] / n));
    } else if (L > 0) {
      add(cs[k][0] + rs[k] * Lx / L, cs[k][1] + rs[k] * Ly / L);
      add(cs[k][0] - rs[k] * Lx / L, cs[k][1] - rs[k] * Ly / L);
    } else {
      add(rs[k], 0.0);
    }
    if (n <= rs[k]) add(0.0, 0.0);
  }
  // deep point on the center line, interior for overlapping disks
  if (L > 0) {
    double lo = std::max(-ri, L - rj), hi = std::min(ri, L + rj);
    double mref = 0.5 * (lo + hi) / L;
    add(ci[0] + mref * Lx, ci[1] + mref * Ly);
  }
  // corner points (boundary circle intersections)
  bool have_corners = false;
  std::array<double, 2> u{}, v{};
  if (L > 0 && L <= ri + rj) {
    double t = (L2 + ri * ri - rj * rj) / (2.0 * L2);
    double h2 = ri * ri - t * t * L2;
    if (h2 >= 0) {
      double h = std::sqrt(h2) / L;
      double mx = ci[0] + t * Lx, my = ci[1] + t * Ly;
      u = {mx - h * Ly, my + h * Lx};
      v = {mx + h * Ly, my - h * Lx};
      have_corners = true;
      add(u[0], u[1]);
      add(v[0], v[1]);
    }
  }
  if (nc == 0) return 0;

  int imin = 0, imax = 0;
  for (int k = 1; k < nc; ++k) {
    if (cnorm[k] < cnorm[imin]) imin = k;
    if (cnorm[k] > cnorm[imax]) imax = k;
  }
  const std::array<double, 2> pmin = cand[imin], pmax = cand[imax];
  if (cnorm[imax] < r_in || cnorm[imin] > r_out) return 0;

  int count = 0;
  auto push = [&](const std::array<double, 2>& w) {
    for (int k = 0; k < count; ++k) {
      double dx = out[k][0] - w[0], dy = out[k][1] - w[1];
      if (dx * dx + dy * dy < 1e-24) return;
    }
    if (count < 2) out[count++] = w;
  };
  auto clip_into_annulus = [&](const std::array<double, 2>& src) {
    double n = std::sqrt(src[0] * src[0] + src[1] * src[1]);
    if (n >= r_in && n <= r_out) {
      push(src);
      return;
    }
    std::array<double, 2> w;
    if (n > r_out) {
      double T = 0.5 * (std::max(r_in, cnorm[imin]) + r_out);
      if (point_at_norm(src, pmin, T, &w)) push(w);
    } else {
      double T = 0.5 * (r_in + std::min(r_out, cnorm[imax]));
      if (point_at_norm(src, pmax, T, &w)) push(w);
    }
  };
  if (have_corners) {
    clip_into_annulus(u);
    clip_into_annulus(v);
  }
  if (count == 0) {
    clip_into_annulus(pmin);
    if (count == 0) clip_into_annulus(pmax);
  }
  return count;
}

}  // namespace

bool annulus_circuit_event(const Realization& real, double r_in,
                           double r_out) {
  if (real.dimension() != 2)
    throw std::invalid_argument(
        "annulus_circuit_event: planar realizations only");
  if (!(r_in > 0) || !(r_in < r_out) ||
      r_out > real.window_radius() * (1.0 + 1e-12))
    throw std::invalid_argument(
        "annulus_circuit_event: need 0 < r_in < r_out <= window");

  Realization sub(2, real.window_radius());
  for (std::size_t i = 0; i < real.size(); ++i) {
    const double* c = real.center(i);
    const double r = real.radius(i);
    const double nrm = norm2d(c);
    if (nrm - r >= r_out || nrm + r <= r_in) continue;
    if (r > nrm + r_in) return true;  // this ball swallows the inner circle
    sub.add_ball(std::span<const double>(c, 2), r, real.scale_index(i),
                 real.source(i));
  }
  const std::size_t m = sub.size();
  if (m < 3) return false;  // two simply-overlapping disks cannot wind

  // representative point of piece i is the radial clamp of the center; its
  // angle sits at the center of the piece's angular span, which keeps every
  // wrapped increment below pi in absolute value
  std::vector<double> theta(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* c = sub.center(i);
    theta[i] = std::atan2(c[1], c[0]);
  }

  WindingDsu dsu(m);
  bool found = false;
  visit_overlapping_pairs(sub, [&](std::int32_t i, std::int32_t j) {
    if (found) return;
    std::array<double, 2> wit[2];
    int nw = lens_annulus_witnesses(sub.center(i), sub.radius(i),
                                    sub.center(j), sub.radius(j), r_in, r_out,
                                    wit);
    for (int w = 0; w < nw && !found; ++w) {
      double tw = std::atan2(wit[w][1], wit[w][0]);
      double inc = wrap_pi(tw - theta[i]) + wrap_pi(theta[j] - tw);
      std::int64_t delta = std::llround((theta[i] - theta[j] + inc) / kTau);
      if (!dsu.unite(j, i, delta)) found = true;
    }
  });
  return found;
}

}  // namespace boolperc
