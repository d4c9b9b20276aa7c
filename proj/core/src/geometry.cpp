#include "boolperc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "boolperc/io.hpp"
#include "measure_detail.hpp"

namespace boolperc {

Realization::Realization(int d, double window) : d_(d), window_(window) {
  if (d < 1) throw std::invalid_argument("Realization: d >= 1 required");
}

void Realization::reserve(std::size_t n) {
  centers_.reserve(n * static_cast<std::size_t>(d_));
  radii_.reserve(n);
  scale_.reserve(n);
  source_.reserve(n);
}

void Realization::add_ball(std::span<const double> center, double radius,
                           int scale, int source) {
  if (static_cast<int>(center.size()) != d_)
    throw std::invalid_argument("add_ball: center dimension mismatch");
  centers_.insert(centers_.end(), center.begin(), center.end());
  radii_.push_back(radius);
  scale_.push_back(scale);
  source_.push_back(source);
}

// ---- window intensity -------------------------------------------------------

namespace {

// integral of (a+r)^d over one part, radii restricted to [r_cut, inf);
// r_cut <= 0 means unrestricted. Binomial expansion over exact part moments.
double part_tilted(const ParametricPart& q, double a, int d, double r_cut) {
  double acc = 0.0;
  for (int k = 0; k <= d; ++k) {
    double mk = detail::part_tail_moment(q, r_cut, static_cast<double>(k));
    if (mk == kInf)
      throw std::invalid_argument(
          "window intensity diverges: pareto exponent <= d");
    acc += detail::binomial(d, k) * ipow(a, d - k) * mk;
  }
  return acc;
}

double tilted_total(const RadiusMeasure& mu, double a, int d, double r_cut) {
  double acc = 0.0;
  for (const Atom& at : mu.atoms())
    if (at.radius >= r_cut) acc += at.weight * ipow(a + at.radius, d);
  for (const ParametricPart& q : mu.parts()) acc += part_tilted(q, a, d, r_cut);
  return acc;
}

}  // namespace

double window_intensity(const RadiusMeasure& mu, double a, int d) {
  if (!(a > 0)) throw std::invalid_argument("window_intensity: a > 0 required");
  if (d < 1) throw std::invalid_argument("window_intensity: d >= 1 required");
  return unit_ball_volume(d) * tilted_total(mu, a, d, 0.0);
}

double window_intensity_tail(const RadiusMeasure& mu, double a, int d,
                             double r_cut) {
  if (!(a > 0) || !(r_cut > 0))
    throw std::invalid_argument("window_intensity_tail: a, r_cut > 0 required");
  return unit_ball_volume(d) * tilted_total(mu, a, d, r_cut);
}

// ---- sampler ----------------------------------------------------------------

namespace {

// Sampling groups for the tilted radius density proportional to
// (a+r)^d mu(dr). Uses ipow throughout so that all intermediate values are
// exact power-of-two multiples under the coupling (H^{2^k} mu at window a)
// vs (mu at window 2^k a); the two runs then take identical branches.
struct AtomGroup {
  const std::vector<Atom>* atoms;
  std::vector<double> cum;  // cumulative w_i * (a + r_i)^d
  double total = 0.0;
};

struct PartGroup {
  const ParametricPart* part;
  double total = 0.0;
  std::vector<double> cum;  // pareto: cumulative over k = 0..d
  double envelope = 0.0;    // uniform: (a + hi)^d
};

double draw_unit_radial(Rng& rng, int d) {
  // U^{1/d} < 1 must hold strictly so the sampled center stays inside
  // B(0, a+r); pow can round to 1 for U within a few ulps of 1.
  for (;;) {
    double f = std::pow(rng.uniform(), 1.0 / d);
    if (f < 1.0) return f;
  }
}

void draw_center(Rng& rng, int d, double s, double* out) {
  double radial = s * draw_unit_radial(rng, d);
  if (d == 1) {
    out[0] = rng.uniform() < 0.5 ? -radial : radial;
    return;
  }
  if (d == 2) {
    double theta = 6.283185307179586476925286766559 * rng.uniform();
    out[0] = radial * std::cos(theta);
    out[1] = radial * std::sin(theta);
    return;
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  double norm2 = 0.0;
  for (int j = 0; j < d; ++j) {
    out[j] = gauss(rng);
    norm2 += out[j] * out[j];
  }
  double norm = std::sqrt(norm2);
  if (norm == 0.0) {  // probability zero; keep a defined value
    out[0] = radial;
    for (int j = 1; j < d; ++j) out[j] = 0.0;
    return;
  }
  for (int j = 0; j < d; ++j) out[j] = out[j] * radial / norm;
}

double draw_pareto_radius(Rng& rng, const ParametricPart& q, int k) {
  double u = 1.0 - rng.uniform();  // in (0, 1], keeps pow finite
  return q.shift + q.r_min * std::pow(u, -1.0 / (q.exponent - k));
}

double draw_uniform_radius(Rng& rng, const ParametricPart& q, double a, int d,
                           double envelope) {
  for (;;) {
    double r = q.lo + (q.hi - q.lo) * rng.uniform();
    if (rng.uniform() * envelope < ipow(a + r, d)) return r;
  }
}

}  // namespace

Realization sample_boolean(const RadiusMeasure& mu, double a, int d,
                           StreamKey stream) {
  if (!(a > 0)) throw std::invalid_argument("sample_boolean: a > 0 required");
  if (d < 1) throw std::invalid_argument("sample_boolean: d >= 1 required");

  AtomGroup ag{&mu.atoms(), {}, 0.0};
  ag.cum.reserve(mu.atoms().size());
  for (const Atom& at : mu.atoms()) {
    ag.total += at.weight * ipow(a + at.radius, d);
    ag.cum.push_back(ag.total);
  }

  std::vector<PartGroup> pgs;
  pgs.reserve(mu.parts().size());
  for (const ParametricPart& q : mu.parts()) {
    PartGroup g{&q, 0.0, {}, 0.0};
    if (q.family == Family::Uniform) {
      g.total = part_tilted(q, a, d, 0.0);
      g.envelope = ipow(a + q.hi, d);
    } else {
      if (!(q.exponent > d))
        throw std::invalid_argument(
            "sample_boolean: divergent intensity (pareto exponent <= d)");
      double ap = a + q.shift;
      for (int k = 0; k <= d; ++k) {
        double mk = q.mass * q.exponent * ipow(q.r_min, k) / (q.exponent - k);
        g.total += detail::binomial(d, k) * ipow(ap, d - k) * mk;
        g.cum.push_back(g.total);
      }
    }
    pgs.push_back(std::move(g));
  }

  double grand = ag.total;
  for (const PartGroup& g : pgs) grand += g.total;

  Realization out(d, a);
  out.seeds().stream = stream.v;
  if (!(grand > 0)) return out;

  Rng rng = stream.rng();
  double mean = unit_ball_volume(d) * grand;
  std::poisson_distribution<long long> pois(mean);
  long long count = pois(rng);
  out.reserve(static_cast<std::size_t>(count));

  std::vector<double> c(d);
  for (long long i = 0; i < count; ++i) {
    double u = rng.uniform() * grand;
    double r = 0.0;
    int scale = 0, source = 0;
    if (u < ag.total) {
      std::size_t idx = static_cast<std::size_t>(
          std::upper_bound(ag.cum.begin(), ag.cum.end(), u) - ag.cum.begin());
      if (idx >= ag.atoms->size()) idx = ag.atoms->size() - 1;
      const Atom& at = (*ag.atoms)[idx];
      r = at.radius;
      scale = at.scale;
      source = at.source;
    } else {
      double v = u - ag.total;
      const PartGroup* chosen = &pgs.back();
      for (const PartGroup& g : pgs) {
        if (v < g.total) {
          chosen = &g;
          break;
        }
        v -= g.total;
      }
      const ParametricPart& q = *chosen->part;
      if (q.family == Family::Uniform) {
        r = draw_uniform_radius(rng, q, a, d, chosen->envelope);
      } else {
        std::size_t k = static_cast<std::size_t>(
            std::upper_bound(chosen->cum.begin(), chosen->cum.end(), v) -
            chosen->cum.begin());
        if (k >= chosen->cum.size()) k = chosen->cum.size() - 1;
        r = draw_pareto_radius(rng, q, static_cast<int>(k));
      }
      scale = q.scale;
      source = q.source;
    }
    draw_center(rng, d, a + r, c.data());
    out.add_ball(c, r, scale, source);
  }
  return out;
}

int auto_levels(const MultiscaleSpec& spec, double lambda, double a, int d,
                double delta_min, double eps) {
  if (spec.levels >= 0) return spec.levels;
  if (!(spec.rho > 1)) throw std::invalid_argument("auto_levels: rho > 1");
  if (!(a > 0)) throw std::invalid_argument("auto_levels: a > 0");
  if (!(lambda >= 0)) throw std::invalid_argument("auto_levels: lambda >= 0");
  if (lambda == 0.0 || spec.base.is_zero()) return 0;
  if (delta_min <= 0) delta_min = 1e-3 * a;
  double r_cut = 0.5 * delta_min;
  for (int k = 1; k <= 400; ++k) {
    if (k * d * std::log10(spec.rho) > 280.0) return k - 1;
    RadiusMeasure layer = spec.base.scaled(ipow(spec.rho, k), d);
    if (lambda * window_intensity_tail(layer, a, d, r_cut) < eps) return k - 1;
  }
  return 400;
}

Realization sample_multiscale(const MultiscaleSpec& spec, double lambda,
                              double a, int d, StreamKey stream) {
  if (!(lambda >= 0))
    throw std::invalid_argument("sample_multiscale: lambda >= 0 required");
  int levels = auto_levels(spec, lambda, a, d);
  Realization out(d, a);
  out.seeds().stream = stream.v;
  for (int k = 0; k <= levels; ++k) {
    StreamKey sub = stream.child(static_cast<std::uint64_t>(k));
    out.seeds().layer_streams.push_back(sub.v);
    if (lambda == 0.0) continue;
    RadiusMeasure layer =
        (k == 0) ? spec.base : spec.base.scaled(ipow(spec.rho, k), d);
    Realization rk = sample_boolean(layer.scaled_by(lambda), a, d, sub);
    for (std::size_t i = 0; i < rk.size(); ++i)
      out.add_ball(std::span<const double>(rk.center(i), d), rk.radius(i), k,
                   rk.source(i));
  }
  return out;
}

Realization fatten(const Realization& x, double eta) {
  if (!(eta > 0)) throw std::invalid_argument("fatten: eta > 0 required");
  // window is unchanged: the caller samples wide enough that events inside
  // the original window stay decidable (see the verification couplings)
  Realization out(x.dimension(), x.window_radius());
  out.seeds() = x.seeds();
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.add_ball(std::span<const double>(x.center(i), x.dimension()),
                 x.radius(i) + eta, x.scale_index(i), x.source(i));
  return out;
}

Realization rescale(const Realization& x, double factor) {
  if (!(factor > 0)) throw std::invalid_argument("rescale: factor > 0");
  Realization out(x.dimension(), x.window_radius() * factor);
  out.seeds() = x.seeds();
  out.reserve(x.size());
  std::vector<double> c(x.dimension());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double* src = x.center(i);
    for (int j = 0; j < x.dimension(); ++j) c[j] = src[j] * factor;
    out.add_ball(c, x.radius(i) * factor, x.scale_index(i), x.source(i));
  }
  return out;
}

Realization merge(const Realization& x, const Realization& y) {
  if (x.dimension() != y.dimension())
    throw std::invalid_argument("merge: dimension mismatch");
  // completeness only holds up to the smaller window
  Realization out(x.dimension(),
                  std::min(x.window_radius(), y.window_radius()));
  out.reserve(x.size() + y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.add_ball(std::span<const double>(x.center(i), x.dimension()),
                 x.radius(i), x.scale_index(i), x.source(i));
  for (std::size_t i = 0; i < y.size(); ++i)
    out.add_ball(std::span<const double>(y.center(i), y.dimension()),
                 y.radius(i), y.scale_index(i), y.source(i));
  return out;
}

Realization filter_scales(const Realization& x, int max_scale) {
  Realization out(x.dimension(), x.window_radius());
  out.seeds() = x.seeds();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x.scale_index(i) <= max_scale)
      out.add_ball(std::span<const double>(x.center(i), x.dimension()),
                   x.radius(i), x.scale_index(i), x.source(i));
  return out;
}

Realization filter_radius_below(const Realization& x, double r_cut) {
  Realization out(x.dimension(), x.window_radius());
  out.seeds() = x.seeds();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x.radius(i) < r_cut)
      out.add_ball(std::span<const double>(x.center(i), x.dimension()),
                   x.radius(i), x.scale_index(i), x.source(i));
  return out;
}

Realization restrict_window(const Realization& x, double a) {
  Realization out(x.dimension(), a);
  out.seeds() = x.seeds();
  for (std::size_t i = 0; i < x.size(); ++i) {
    double q = 0.0;
    for (int j = 0; j < x.dimension(); ++j) q += x.center(i)[j] * x.center(i)[j];
    if (std::sqrt(q) < a + x.radius(i))
      out.add_ball(std::span<const double>(x.center(i), x.dimension()),
                   x.radius(i), x.scale_index(i), x.source(i));
  }
  return out;
}

void write_realization_csv(std::ostream& os, const Realization& x,
                           const std::vector<int>* labels) {
  if (labels && labels->size() != x.size())
    throw std::invalid_argument("realization csv: one label per ball required");
  os << "scale_index";
  for (int j = 0; j < x.dimension(); ++j) os << ",c" << j;
  os << ",radius";
  if (labels) os << ",cluster";
  os << "\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    os << x.scale_index(i);
    const double* c = x.center(i);
    for (int j = 0; j < x.dimension(); ++j) os << ',' << fmt_double(c[j]);
    os << ',' << fmt_double(x.radius(i));
    if (labels) os << ',' << (*labels)[i];
    os << "\n";
  }
}

}  // namespace boolperc
