#ifndef BOOLPERC_MEASURE_HPP_INCLUDED
#define BOOLPERC_MEASURE_HPP_INCLUDED

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace boolperc {

// Divergent integrals are reported as +inf rather than as an error.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

// x^n by repeated multiplication, n >= 0. Unlike std::pow this commutes exactly
// with scaling by powers of two, which the samplers rely on for the bit-exact
// H^rho / window coupling at rho = 2^k.
double ipow(double x, int n);

struct Atom {
  double radius = 0;
  double weight = 0;
  int scale = 0;   // multiscale layer tag (k in H^{rho^k})
  int source = 0;  // combine() component tag; propagated to sampled balls
};

enum class Family { Uniform, Pareto };

// Parametric component with closed-form mass, moments and tails.
//   Uniform: density mass/(hi-lo) dr on [lo, hi]
//   Pareto:  density exponent*r_min^exponent*(r-shift)^-(exponent+1) dr on
//            [shift + r_min, inf); tail mass(a) = mass*(r_min/(a-shift))^exponent
// A radius shift (T_eta) keeps Uniform in-family; Pareto accumulates `shift`.
struct ParametricPart {
  Family family = Family::Uniform;
  double lo = 0, hi = 0;           // uniform
  double r_min = 0, exponent = 0;  // pareto
  double mass = 0;
  double shift = 0;  // pareto only
  int scale = 0;
  int source = 0;
};

// Finite measure on (0, inf): a list of atoms plus parametric components.
// Atoms are kept sorted by radius with duplicates (same radius/scale/source)
// merged. The zero measure (no atoms, no parts) is a valid value and is what
// scaling by lambda = 0 produces; the named constructors all require positive
// mass.
class RadiusMeasure {
 public:
  RadiusMeasure() = default;

  static RadiusMeasure atomic(std::vector<Atom> atoms);
  static RadiusMeasure delta(double radius, double mass = 1.0);
  static RadiusMeasure uniform(double lo, double hi, double mass);
  static RadiusMeasure pareto(double r_min, double exponent, double mass);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<ParametricPart>& parts() const { return parts_; }

  bool is_zero() const { return atoms_.empty() && parts_.empty(); }
  bool is_atomic() const { return parts_.empty(); }
  bool bounded_support() const;
  double max_radius() const;  // +inf for pareto parts, 0 for the zero measure

  // mu((0, inf))
  double total_mass() const;
  // int r^p mu(dr), p >= 0; +inf when divergent
  double moment(double p) const;
  // int_{[1,inf)} r^d ln r mu(dr); +inf when divergent
  double log_moment_d(int d) const;
  // mu([a, inf)), closed cutoff
  double tail_mass(double a) const;
  // int_{[a,inf)} r^p mu(dr), closed cutoff; +inf when divergent
  double tail_moment(double a, double p) const;

  // T_eta: radii + eta, masses unchanged
  RadiusMeasure shifted(double eta) const;
  // H^rho (rho > 1): atom (r, w) -> (r/rho, w*rho^d); preserves moment(d)
  // exactly and multiplies total mass by rho^d.
  RadiusMeasure scaled(double rho, int d) const;
  // lambda * mu, lambda >= 0
  RadiusMeasure scaled_by(double lambda) const;

  // sum_i coeff_i * mu_i; zero-coefficient terms are dropped, at least one
  // coefficient must be positive. The i-th term's atoms/parts get source tag i.
  static RadiusMeasure combine(
      const std::vector<std::pair<double, RadiusMeasure>>& terms);

  // JSON round-trip; see README for the schema.
  std::string to_json_string() const;
  static RadiusMeasure from_json_string(const std::string& text);

 private:
  std::vector<Atom> atoms_;
  std::vector<ParametricPart> parts_;

  void normalize();
  friend RadiusMeasure multiscale_truncated(const struct MultiscaleSpec&, int);
};

// Base measure mu, scale factor rho > 1, truncation level N >= 0
// (levels = -1 asks samplers to apply the auto truncation rule).
struct MultiscaleSpec {
  RadiusMeasure base;
  double rho = 2.0;
  int levels = -1;
};

// m_N^rho = sum_{k=0..N} H^{rho^k} mu, each layer's atoms tagged scale = k.
// Throws std::overflow_error when rho^{N*d} would overflow the mass scale
// (guard: rho^{N*d} > 1e300).
RadiusMeasure multiscale_truncated(const MultiscaleSpec& spec, int d);

// int_{[a,inf)} r^d m_inf^rho(dr), computed in closed form:
// each atom (r, w) with r >= a contributes w * r^d * (#{k >= 0 : a*rho^k <= r}).
// Equals sum_{k>=0} tail_moment(H^{rho^k} mu, a, d); +inf iff log_moment_d
// diverges (pareto exponent <= d).
double multiscale_tail_moment(const RadiusMeasure& mu, double rho, double a,
                              int d);

struct MomentSandwich {
  double lower = 0;  // int_{[1,inf)} r^{d+s} mu(dr)
  double value = 0;  // int_{[1,inf)} r^{d+s} m_inf^rho(dr)
  double upper = 0;  // lower / (1 - rho^{-s})
  bool holds = false;
};

// Requires bounded support (throws std::domain_error for pareto parts).
MomentSandwich moment_sandwich_check(const RadiusMeasure& mu, double rho,
                                     double s, int d);

struct AutosimRow {
  double a = 0;
  double sup_ratio = 0;  // sup over the r grid of a^d mu([ar,inf))/mu([r,inf))
};

// Finite-grid probe of sup_r a^d mu([ar,inf))/mu([r,inf)); 0/0 counts as 0.
// A finite grid can only under-estimate the true sup (lower bound).
// Grid constraint: r >= 1/2.
std::vector<AutosimRow> sub_autosimilarity_diagnostic(
    const RadiusMeasure& mu, std::span<const double> a_grid,
    std::span<const double> r_grid, int d);

}  // namespace boolperc

#endif
