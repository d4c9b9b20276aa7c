#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "boolperc/measure.hpp"
#include "boolperc/rng.hpp"
#include "boolperc/verification.hpp"

using namespace boolperc;

namespace {
double dist(const double* a, const double* b, int d) {
  double s = 0;
  for (int j = 0; j < d; ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}
}  // namespace

TEST_CASE("ball covering reaches every point of the target ball") {
  double a = 4.0, eta = 1.0;
  CoveringFamily fam = build_ball_covering(a, eta, 2);
  CHECK(fam.ball_radius == doctest::Approx(eta / 4).epsilon(1e-15));
  CHECK(fam.size() > 0);
  Rng rng = StreamKey{12}.rng();
  for (int rep = 0; rep < 2000; ++rep) {
    // rejection-sample a point of B(a)
    double p[2];
    do {
      p[0] = rng.uniform(-a, a);
      p[1] = rng.uniform(-a, a);
    } while (p[0] * p[0] + p[1] * p[1] > a * a);
    double best = 1e300;
    for (std::size_t i = 0; i < fam.size(); ++i)
      best = std::min(best, dist(p, fam.center(i), 2));
    CHECK(best <= eta / 8 + 1e-12);
  }
  CHECK_THROWS(build_ball_covering(3.0, 1.0, 2));  // needs a >= 4 eta
}

TEST_CASE("sphere covering reaches every point of the sphere") {
  double s = 5.0;
  CoveringFamily fam = build_sphere_covering(s, 2);
  CHECK(fam.size() > 0);
  Rng rng = StreamKey{13}.rng();
  for (int rep = 0; rep < 2000; ++rep) {
    double th = rng.uniform(0.0, 2.0 * M_PI);
    double p[2] = {s * std::cos(th), s * std::sin(th)};
    double best = 1e300;
    for (std::size_t i = 0; i < fam.size(); ++i)
      best = std::min(best, dist(p, fam.center(i), 2));
    CHECK(best <= 0.25 + 1e-12);
  }
  // the centers sit on the sphere
  for (std::size_t i = 0; i < fam.size(); ++i) {
    double r = std::sqrt(fam.center(i)[0] * fam.center(i)[0] +
                         fam.center(i)[1] * fam.center(i)[1]);
    CHECK(r == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("fattened union inclusion holds on coupled samples") {
  RadiusMeasure nu1 = RadiusMeasure::delta(1.0).scaled_by(0.25);
  RadiusMeasure nu2 = RadiusMeasure::delta(0.5).scaled_by(0.25);
  VerifyResult r = verify_key_eta(nu1, nu2, 1.0, 4.0, 2, 300, StreamKey{71});
  CHECK(r.samples == 300);
  CHECK(r.violations == 0);
}

TEST_CASE("square-root trick inclusion holds on coupled samples") {
  RadiusMeasure nu = RadiusMeasure::uniform(0.25, 0.9, 0.5);
  VerifyResult r = verify_key_carre(nu, 1.0, 2, 200, StreamKey{72});
  CHECK(r.samples == 200);
  CHECK(r.violations == 0);
}

TEST_CASE("power-of-two rescale preserves the crossing indicator exactly") {
  RadiusMeasure mu = RadiusMeasure::delta(1.0).scaled_by(0.35);
  VerifyResult r = verify_scaling_coupling(mu, 2.0, 6.0, 2, 400, StreamKey{73});
  CHECK(r.violations == 0);
  VerifyResult r4 = verify_scaling_coupling(mu, 4.0, 4.0, 2, 200, StreamKey{74});
  CHECK(r4.violations == 0);
}

TEST_CASE("crossing is monotone along the level prefix coupling") {
  VerifyResult r = verify_monotone_in_levels(RadiusMeasure::delta(1.0), 2.0,
                                             0.3, 6.0, 2, 3, 300, StreamKey{75});
  CHECK(r.violations == 0);
}

TEST_CASE("one-arm implies the annulus crossing") {
  RadiusMeasure mu = RadiusMeasure::delta(1.0).scaled_by(0.5);
  VerifyResult r = verify_one_arm_inclusion(mu, 6.0, 2, 400, StreamKey{76});
  CHECK(r.violations == 0);
}

TEST_CASE("measure identities on a mixed atomic input") {
  RadiusMeasure mu = RadiusMeasure::combine(
      {{1.0, RadiusMeasure::delta(1.0)},
       {0.5, RadiusMeasure::delta(3.0)},
       {0.25, RadiusMeasure::delta(0.4)}});
  std::vector<double> a_grid = {0.5, 1.0, 2.0, 4.0};
  MeasureIdentityReport rep =
      verify_measure_identities(mu, 2.0, 1.0, a_grid, 2);
  CHECK(rep.holds);
  CHECK(rep.violations == 0);
  CHECK(rep.max_rel_error <= 1e-12);
  CHECK(rep.sandwich.holds);
}

TEST_CASE("thinning embeds the smaller model in the larger one") {
  RadiusMeasure nu_prime = RadiusMeasure::combine(
      {{1.0, RadiusMeasure::delta(1.0)}, {1.0, RadiusMeasure::delta(2.0)}});
  RadiusMeasure nu = RadiusMeasure::combine(
      {{0.5, RadiusMeasure::delta(1.0)}, {1.0, RadiusMeasure::delta(2.0)}});
  StreamKey seed = master_stream(81);
  long long kept = 0, total = 0, kept_big = 0, total_big = 0;
  for (int rep = 0; rep < 200; ++rep) {
    Realization x = sample_boolean(nu_prime, 5.0, 2, seed.child(rep));
    Realization y = thin_to(x, nu, nu_prime, seed.child(10000 + rep));
    CHECK(y.size() <= x.size());
    // every kept ball appears in the source sample
    std::size_t xi = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      bool found = false;
      for (; xi < x.size(); ++xi)
        if (x.radius(xi) == y.radius(i) && x.center(xi)[0] == y.center(i)[0] &&
            x.center(xi)[1] == y.center(i)[1]) {
          found = true;
          ++xi;
          break;
        }
      CHECK(found);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      bool big = x.radius(i) > 1.5;
      total += !big;
      total_big += big;
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
      bool big = y.radius(i) > 1.5;
      kept += !big;
      kept_big += big;
    }
  }
  // radius-2 atoms are fully dominated: all kept
  CHECK(kept_big == total_big);
  // radius-1 atoms survive at rate 1/2
  double rate = double(kept) / double(total);
  CHECK(std::abs(rate - 0.5) < 5.0 * std::sqrt(0.25 / double(total)));

  CHECK_THROWS(thin_to(sample_boolean(nu_prime, 5.0, 2, seed.child(1)),
                       nu_prime, nu, seed.child(2)));
}

TEST_CASE("subcritical fattening probe returns the full grid") {
  ThresholdPolicy pol;
  pol.a0 = 4.0;
  pol.ladder_factors = {1, 2};
  pol.n = 60;
  EtaProbeResult r = eta_subcritical_probe(RadiusMeasure::delta(1.0), 2, 0.359,
                                           1.0, pol, StreamKey{82});
  CHECK(r.lambda == doctest::Approx(0.8 * 0.359).epsilon(1e-15));
  REQUIRE(r.rows.size() == 3);
  for (const EtaProbeRow& row : r.rows) {
    CHECK(row.points.size() == 2);
    CHECK(row.eta > 0.0);
  }
}
