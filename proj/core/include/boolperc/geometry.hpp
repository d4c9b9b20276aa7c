#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "boolperc/measure.hpp"
#include "boolperc/rng.hpp"

namespace boolperc {

struct SeedManifest {
  std::uint64_t stream = 0;                  // key this realization was drawn from
  std::vector<std::uint64_t> layer_streams;  // per scale index, multiscale only
};

// One sampled ball configuration in R^d, restricted to balls meeting the
// open window ball B(0, window). Storage is flat: centers_ holds d doubles
// per ball. scale_index tags the multiscale layer, source the mixture term.
class Realization {
 public:
  Realization() = default;
  Realization(int d, double window);

  int dimension() const { return d_; }
  double window_radius() const { return window_; }
  void set_window(double a) { window_ = a; }
  std::size_t size() const { return radii_.size(); }
  bool empty() const { return radii_.empty(); }
  void reserve(std::size_t n);

  void add_ball(std::span<const double> center, double radius, int scale = 0,
                int source = 0);
  const double* center(std::size_t i) const { return centers_.data() + d_ * i; }
  double radius(std::size_t i) const { return radii_[i]; }
  int scale_index(std::size_t i) const { return scale_[i]; }
  int source(std::size_t i) const { return source_[i]; }
  std::span<const double> radii() const { return radii_; }

  SeedManifest& seeds() { return seeds_; }
  const SeedManifest& seeds() const { return seeds_; }

 private:
  int d_ = 0;
  double window_ = 0.0;
  std::vector<double> centers_;
  std::vector<double> radii_;
  std::vector<std::int32_t> scale_;
  std::vector<std::int32_t> source_;
  SeedManifest seeds_;
};

// M(a) = v_d * integral of (a+r)^d mu(dr): the mean number of balls of the
// Boolean model meeting B(0, a). Exact closed form; throws on divergence
// (pareto exponent <= d).
double window_intensity(const RadiusMeasure& mu, double a, int d);

// Same integral restricted to radii >= r_cut. Used by the truncation rule.
double window_intensity_tail(const RadiusMeasure& mu, double a, int d,
                             double r_cut);

// Exact-in-law sample of the balls of Sigma(mu) meeting B(0, a):
// count ~ Poisson(M(a)), radii iid with density proportional to
// (a+r)^d mu(dr), centers uniform in B(0, a+r). Deterministic in the stream.
Realization sample_boolean(const RadiusMeasure& mu, double a, int d,
                           StreamKey stream);

// Truncation rule for the infinite multiscale sum: keep layers while the
// expected number of balls with diameter >= delta_min meeting B(a) is
// >= eps. delta_min <= 0 selects the default 1e-3 * a. Returns spec.levels
// unchanged when it is already resolved (>= 0).
int auto_levels(const MultiscaleSpec& spec, double lambda, double a, int d,
                double delta_min = -1.0, double eps = 1e-3);

// Union of levels+1 independent single-scale samples, layer k driven by
// lambda * H^{rho^k} mu with substream stream.child(k), so the N-truncation
// is a prefix of the (N+1)-truncation under the same stream.
Realization sample_multiscale(const MultiscaleSpec& spec, double lambda,
                              double a, int d, StreamKey stream);

// Couplings. fatten adds eta to every radius; rescale multiplies centers,
// radii and the window by factor. Both are deterministic.
Realization fatten(const Realization& x, double eta);
Realization rescale(const Realization& x, double factor);

// Superposition of two samples over the same window and dimension.
Realization merge(const Realization& x, const Realization& y);

// Balls with scale_index <= max_scale: the prefix of the layer coupling.
Realization filter_scales(const Realization& x, int max_scale);

// Balls with radius < r_cut (strict), preserving order.
Realization filter_radius_below(const Realization& x, double r_cut);

// Balls meeting the smaller window B(0, a): |c| < a + r. By Poisson
// restriction this has exactly the law of sampling at window a, so nested
// windows can share one realization.
Realization restrict_window(const Realization& x, double a);

// One ball per row: scale_index, c0..c{d-1}, radius[, cluster]. Stable
// column order; labels, when given, must have one entry per ball.
void write_realization_csv(std::ostream& os, const Realization& x,
                           const std::vector<int>* labels = nullptr);

}  // namespace boolperc
