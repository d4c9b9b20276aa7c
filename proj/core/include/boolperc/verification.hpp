#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "boolperc/estimators.hpp"
#include "boolperc/geometry.hpp"
#include "boolperc/measure.hpp"
#include "boolperc/rng.hpp"

namespace boolperc {

// Finite family of equal-radius balls covering a declared region. The
// realized cardinality is recorded instead of any a-priori constant.
struct CoveringFamily {
  int d = 0;
  double ball_radius = 0.0;
  std::string region;       // "ball" or "sphere"
  double region_param = 0;  // a for balls, s for spheres
  std::vector<double> centers;  // flat, d per point

  std::size_t size() const { return d ? centers.size() / d : 0; }
  const double* center(std::size_t i) const { return centers.data() + d * i; }
};

// Lattice (eta/(4 sqrt d)) Z^d intersected with B(a + eta/4), ball radius
// eta/4. Every point of B(a) lies within eta/8 of some center. Requires
// a >= 4 eta.
CoveringFamily build_ball_covering(double a, double eta, int d);

// Finite subset of S(s) whose radius-1/2 balls cover S(s): lattice points in
// the shell | ||x|| - s | <= 1/8 projected onto the sphere; actual covering
// distance is at most 1/4. Intended for s in {5, 10}.
CoveringFamily build_sphere_covering(double s, int d);

struct VerifyResult {
  std::string check;
  long long samples = 0;
  long long violations = 0;
  std::string params_json;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

// Per-sample inclusion: {S(a/2) <-> S(a) in Sigma(nu1 + nu2)} implies
// {same crossing in the eta-fattened Sigma(nu1)} or some covering point x of
// B(a) has {S(x, eta/4) <-> S(x, eta/2) in Sigma(nu2)}. Coupled sample:
// independent Sigma(nu1), Sigma(nu2) at window a + eta; the union and the
// fattening reuse the nu1 part. Requires a >= 4 eta.
VerifyResult verify_key_eta(const RadiusMeasure& nu1, const RadiusMeasure& nu2,
                            double eta, double a, int d, long long n,
                            StreamKey seed);

// Per-sample inclusion behind the square-root trick: if {S(5a) <-> S(10a)}
// occurs and no sampled ball has radius >= a, then some covering point k of
// S(5a) and l of S(10a) both carry a local crossing S(., a/2) <-> S(., a) in
// the radius-< a sub-model; every witness pair satisfies ||k - l|| >= 5a and
// the two local events are decided by disjoint ball sets (asserted).
VerifyResult verify_key_carre(const RadiusMeasure& nu, double a, int d,
                              long long n, StreamKey seed);

// Crossing indicator of (sample of mu at window rho*a, spheres rho*a/2,
// rho*a) equals the indicator of its rescale by 1/rho at spheres a/2, a.
VerifyResult verify_scaling_coupling(const RadiusMeasure& mu, double rho,
                                     double a, int d, long long n,
                                     StreamKey seed);

// Under the layer-prefix coupling the crossing indicator is nondecreasing in
// the truncation level, per sample.
VerifyResult verify_monotone_in_levels(const RadiusMeasure& mu, double rho,
                                       double lambda, double a, int d,
                                       int n_max, long long n, StreamKey seed);

// {0 <-> S(r)} implies {S(r/2) <-> S(r)}, per sample.
VerifyResult verify_one_arm_inclusion(const RadiusMeasure& mu, double r, int d,
                                      long long n, StreamKey seed);

struct MeasureIdentityReport {
  bool holds = false;
  double max_rel_error = 0.0;   // multiscale tail vs scale-sum enumeration
  MomentSandwich sandwich;
  std::vector<double> a_grid;
  long long violations = 0;
};

// Exact identities: multiscale_tail_moment against direct enumeration of
// scaled-layer tails over a_grid (<= 1e-12 relative), plus the geometric
// moment sandwich. Atomic and uniform-part inputs only.
MeasureIdentityReport verify_measure_identities(const RadiusMeasure& mu,
                                                double rho, double s,
                                                std::span<const double> a_grid,
                                                int d);

struct EtaProbeRow {
  double eta;
  std::vector<LadderPoint> points;
  bool decreasing;
};

struct EtaProbeResult {
  double lambda;
  std::vector<EtaProbeRow> rows;
  bool some_eta_decreasing = false;
};

// Qualitative probe: at lambda = 0.8 * lambda_mid the crossing ladder should
// stay decreasing for some small radius fattening eta in
// {0.01, 0.05, 0.1} * r_typ. Trend check only, no exact assertion.
EtaProbeResult eta_subcritical_probe(const RadiusMeasure& mu, int d,
                                     double lambda_mid, double r_typ,
                                     const ThresholdPolicy& policy,
                                     StreamKey seed);

// Exact embedding coupling for atomically dominated measures nu <= nu_prime:
// keeps each ball of a Sigma(nu_prime) sample with probability equal to the
// atom weight ratio at its radius. Requires both measures atomic and
// domination atom by atom.
Realization thin_to(const Realization& x, const RadiusMeasure& nu,
                    const RadiusMeasure& nu_prime, StreamKey stream);

}  // namespace boolperc
