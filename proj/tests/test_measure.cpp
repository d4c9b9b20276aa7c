#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "boolperc/measure.hpp"

using namespace boolperc;

namespace {
RadiusMeasure atoms(std::vector<std::pair<double, double>> rw) {
  std::vector<Atom> a;
  for (auto [r, w] : rw) a.push_back({r, w, 0, 0});
  return RadiusMeasure::atomic(std::move(a));
}
}  // namespace

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(unit_ball_volume(2) == doctest::Approx(M_PI).epsilon(1e-15));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-15));
  // Gamma recursion v_d = v_{d-2} * 2 pi / d
  CHECK(unit_ball_volume(7) ==
        doctest::Approx(unit_ball_volume(5) * 2.0 * M_PI / 7.0).epsilon(1e-14));
}

TEST_CASE("total mass of a two-scale mixture") {
  // 0.3 delta_1 + 0.7 H^2 delta_1 at d = 2: H^2 multiplies mass by 4
  RadiusMeasure mix = RadiusMeasure::combine(
      {{0.3, RadiusMeasure::delta(1.0)},
       {0.7, RadiusMeasure::delta(1.0).scaled(2.0, 2)}});
  CHECK(mix.total_mass() == doctest::Approx(3.1).epsilon(1e-15));
}

TEST_CASE("scaling preserves the d-th moment exactly") {
  RadiusMeasure mu = atoms({{1.0, 1.0}, {3.0, 0.5}});
  double m2 = mu.moment(2.0);
  CHECK(m2 == doctest::Approx(5.5).epsilon(1e-15));
  CHECK(mu.scaled(2.0, 2).moment(2.0) == doctest::Approx(5.5).epsilon(1e-14));
  CHECK(mu.scaled(7.0, 2).moment(2.0) == doctest::Approx(5.5).epsilon(1e-14));
  // parametric parts too
  RadiusMeasure par = RadiusMeasure::pareto(1.0, 5.0, 2.0);
  CHECK(par.scaled(3.0, 2).moment(2.0) ==
        doctest::Approx(par.moment(2.0)).epsilon(1e-13));
}

TEST_CASE("pareto moments diverge at the exponent") {
  RadiusMeasure par = RadiusMeasure::pareto(1.0, 3.0, 1.0);
  CHECK(par.moment(3.0) == kInf);
  CHECK(par.moment(2.0) < kInf);
  // exponent / (exponent - p) * r_min^p for p < exponent
  CHECK(par.moment(2.0) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("log moment convention") {
  // delta_e at d = 2: r^d ln r = e^2 * 1
  RadiusMeasure de = RadiusMeasure::delta(std::exp(1.0));
  CHECK(de.log_moment_d(2) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  // radii below 1 contribute nothing (integral over [1, inf))
  CHECK(RadiusMeasure::delta(0.5).log_moment_d(2) == 0.0);
  // pareto: finite iff exponent > d
  CHECK(RadiusMeasure::pareto(1.0, 3.0, 1.0).log_moment_d(2) ==
        doctest::Approx(3.0).epsilon(1e-13));
  CHECK(RadiusMeasure::pareto(1.0, 2.0, 1.0).log_moment_d(2) == kInf);
  CHECK(RadiusMeasure::pareto(1.0, 1.5, 1.0).log_moment_d(2) == kInf);
}

TEST_CASE("tail mass and tail moments use closed cutoffs") {
  RadiusMeasure mu = atoms({{1.0, 1.0}, {4.0, 0.5}});
  CHECK(mu.tail_mass(4.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mu.tail_mass(4.0 + 1e-9) == 0.0);
  CHECK(mu.tail_moment(2.0, 2.0) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(mu.tail_moment(0.5, 0.0) == doctest::Approx(1.5).epsilon(1e-15));
  // pareto tail: mass * (r_min / a)^exponent, a >= r_min
  RadiusMeasure par = RadiusMeasure::pareto(1.0, 3.0, 2.0);
  CHECK(par.tail_mass(2.0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("radius shift") {
  RadiusMeasure shifted = RadiusMeasure::delta(1.0).shifted(1.0);
  REQUIRE(shifted.atoms().size() == 1);
  CHECK(shifted.atoms()[0].radius == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(shifted.moment(2.0) == doctest::Approx(4.0).epsilon(1e-15));
  // uniform stays in-family
  RadiusMeasure u = RadiusMeasure::uniform(0.5, 1.5, 2.0).shifted(0.5);
  REQUIRE(u.parts().size() == 1);
  CHECK(u.parts()[0].lo == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(u.parts()[0].hi == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(u.total_mass() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("scaling operator on atoms") {
  RadiusMeasure h2 = RadiusMeasure::delta(1.0).scaled(2.0, 2);
  REQUIRE(h2.atoms().size() == 1);
  CHECK(h2.atoms()[0].radius == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(h2.atoms()[0].weight == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(RadiusMeasure::delta(1.0).scaled(3.0, 2).total_mass() ==
        doctest::Approx(9.0).epsilon(1e-15));
  CHECK_THROWS_AS(RadiusMeasure::delta(1.0).scaled(1.0, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(RadiusMeasure::delta(1.0).scaled(0.5, 2),
                  std::invalid_argument);
}

TEST_CASE("combine tags sources and drops zero terms") {
  RadiusMeasure mix = RadiusMeasure::combine(
      {{0.5, RadiusMeasure::delta(1.0)},
       {0.5, RadiusMeasure::delta(1.0).scaled(2.0, 2)}});
  REQUIRE(mix.atoms().size() == 2);
  CHECK(mix.atoms()[0].radius == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mix.atoms()[0].weight == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(mix.atoms()[1].radius == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mix.atoms()[1].weight == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mix.atoms()[0].source != mix.atoms()[1].source);

  RadiusMeasure dropped = RadiusMeasure::combine(
      {{0.0, RadiusMeasure::delta(5.0)}, {1.0, RadiusMeasure::delta(1.0)}});
  CHECK(dropped.atoms().size() == 1);
  CHECK_THROWS_AS(RadiusMeasure::combine({{0.0, RadiusMeasure::delta(1.0)}}),
                  std::invalid_argument);
}

TEST_CASE("truncated multiscale sum") {
  RadiusMeasure m2 = multiscale_truncated({RadiusMeasure::delta(1.0), 2.0, 2}, 2);
  REQUIRE(m2.atoms().size() == 3);
  CHECK(m2.atoms()[0].radius == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m2.atoms()[0].weight == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(m2.atoms()[0].scale == 2);
  CHECK(m2.atoms()[1].radius == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m2.atoms()[1].weight == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(m2.atoms()[2].radius == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m2.atoms()[2].weight == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m2.atoms()[2].scale == 0);
  // mass overflow guard
  CHECK_THROWS_AS(multiscale_truncated({RadiusMeasure::delta(1.0), 10.0, 200}, 2),
                  std::overflow_error);
}

TEST_CASE("multiscale tail moment closed form") {
  // delta_4, rho = 2, a = 1, d = 2: layers k = 0..2 have radius >= 1,
  // each contributes 16, so 48
  CHECK(multiscale_tail_moment(RadiusMeasure::delta(4.0), 2.0, 1.0, 2) ==
        doctest::Approx(48.0).epsilon(1e-14));
  // divergence iff the log moment diverges
  CHECK(multiscale_tail_moment(RadiusMeasure::pareto(1.0, 2.0, 1.0), 2.0, 1.0,
                               2) == kInf);
  CHECK(multiscale_tail_moment(RadiusMeasure::pareto(1.0, 3.0, 1.0), 2.0, 1.0,
                               2) < kInf);
}

TEST_CASE("geometric moment sandwich") {
  MomentSandwich s1 = moment_sandwich_check(RadiusMeasure::delta(1.0), 2.0,
                                            2.0, 2);
  CHECK(s1.lower == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s1.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s1.upper == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(s1.holds);

  MomentSandwich s2 = moment_sandwich_check(RadiusMeasure::delta(2.0), 2.0,
                                            1.0, 2);
  CHECK(s2.lower == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(s2.value == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(s2.upper == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(s2.holds);

  CHECK_THROWS_AS(
      moment_sandwich_check(RadiusMeasure::pareto(1.0, 4.0, 1.0), 2.0, 1.0, 2),
      std::domain_error);
}

TEST_CASE("uniform part closed-form moments") {
  // mass/(hi-lo) * int_lo^hi r^p dr
  RadiusMeasure u = RadiusMeasure::uniform(1.0, 3.0, 2.0);
  CHECK(u.total_mass() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(u.moment(1.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(u.moment(2.0) == doctest::Approx(26.0 / 3.0).epsilon(1e-14));
  CHECK(u.tail_mass(2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(u.tail_moment(2.0, 1.0) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("sub-autosimilarity diagnostic on a point mass") {
  std::vector<double> a_grid = {2.0};
  std::vector<double> r_grid = {0.5, 1.0};
  auto rows = sub_autosimilarity_diagnostic(RadiusMeasure::delta(1.0), a_grid,
                                            r_grid, 2);
  REQUIRE(rows.size() == 1);
  // r = 0.5: a^2 * mu([1,inf))/mu([0.5,inf)) = 4; r = 1: mu([2,inf)) = 0
  CHECK(rows[0].sup_ratio == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("json round trip") {
  RadiusMeasure mu = RadiusMeasure::combine(
      {{1.0, atoms({{1.0, 1.0}, {3.0, 0.5}})},
       {2.0, RadiusMeasure::uniform(0.5, 2.0, 1.0)},
       {1.0, RadiusMeasure::pareto(1.0, 3.5, 0.25)}});
  RadiusMeasure back = RadiusMeasure::from_json_string(mu.to_json_string());
  CHECK(back.total_mass() == doctest::Approx(mu.total_mass()).epsilon(1e-15));
  CHECK(back.moment(2.0) == doctest::Approx(mu.moment(2.0)).epsilon(1e-15));
  CHECK(back.atoms().size() == mu.atoms().size());
  CHECK(back.parts().size() == mu.parts().size());
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(RadiusMeasure::delta(0.0), std::invalid_argument);
  CHECK_THROWS_AS(RadiusMeasure::delta(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(RadiusMeasure::delta(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(RadiusMeasure::uniform(2.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(RadiusMeasure::pareto(1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(RadiusMeasure::delta(1.0).scaled_by(-1.0),
                  std::invalid_argument);
  CHECK(RadiusMeasure::delta(1.0).scaled_by(0.0).is_zero());
}

TEST_CASE("zero measure behaves") {
  RadiusMeasure z;
  CHECK(z.is_zero());
  CHECK(z.total_mass() == 0.0);
  CHECK(z.moment(2.0) == 0.0);
  CHECK(z.tail_mass(1.0) == 0.0);
  CHECK(z.max_radius() == 0.0);
}

TEST_CASE("bounded support flags") {
  CHECK(RadiusMeasure::delta(1.0).bounded_support());
  CHECK(RadiusMeasure::uniform(0.5, 2.0, 1.0).bounded_support());
  CHECK(!RadiusMeasure::pareto(1.0, 3.0, 1.0).bounded_support());
  CHECK(RadiusMeasure::pareto(1.0, 3.0, 1.0).max_radius() == kInf);
}
