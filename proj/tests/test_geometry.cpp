#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "boolperc/geometry.hpp"
#include "boolperc/measure.hpp"
#include "boolperc/rng.hpp"

using namespace boolperc;

namespace {
double norm(const double* x, int d) {
  double s = 0;
  for (int j = 0; j < d; ++j) s += x[j] * x[j];
  return std::sqrt(s);
}
}  // namespace

TEST_CASE("window intensity closed form") {
  // v_2 (a + 1)^2 at a = 3
  CHECK(window_intensity(RadiusMeasure::delta(1.0), 3.0, 2) ==
        doctest::Approx(16.0 * M_PI).epsilon(1e-14));
  // atoms plus uniform part against hand integration
  RadiusMeasure mix = RadiusMeasure::combine(
      {{1.0, RadiusMeasure::delta(2.0)}, {1.0, RadiusMeasure::uniform(0.0, 1.0, 1.0)}});
  // int (3+r)^2 dr over [0,1] = (4^3 - 3^3)/3
  double expect = M_PI * (25.0 + 37.0 / 3.0);
  CHECK(window_intensity(mix, 3.0, 2) == doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS(window_intensity(RadiusMeasure::pareto(1.0, 2.0, 1.0), 3.0, 2));
}

TEST_CASE("multiscale window intensity at one level") {
  // delta_1, rho 2, N 1, a 4: pi((4+1)^2 + 4(4+0.5)^2) = 106 pi
  RadiusMeasure m1 = multiscale_truncated({RadiusMeasure::delta(1.0), 2.0, 1}, 2);
  CHECK(window_intensity(m1, 4.0, 2) ==
        doctest::Approx(106.0 * M_PI).epsilon(1e-14));
}

TEST_CASE("sampling is deterministic in the stream key") {
  RadiusMeasure mu = RadiusMeasure::uniform(0.5, 2.0, 1.0);
  Realization a = sample_boolean(mu, 6.0, 2, StreamKey{42});
  Realization b = sample_boolean(mu, 6.0, 2, StreamKey{42});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.radius(i) == b.radius(i));
    CHECK(a.center(i)[0] == b.center(i)[0]);
    CHECK(a.center(i)[1] == b.center(i)[1]);
  }
  Realization c = sample_boolean(mu, 6.0, 2, StreamKey{43});
  bool differs = c.size() != a.size();
  for (std::size_t i = 0; !differs && i < a.size(); ++i)
    differs = a.radius(i) != c.radius(i) || a.center(i)[0] != c.center(i)[0];
  CHECK(differs);
}

TEST_CASE("every sampled ball meets the window") {
  RadiusMeasure mu = RadiusMeasure::combine(
      {{0.7, RadiusMeasure::delta(1.0)}, {0.3, RadiusMeasure::delta(4.0)}});
  StreamKey seed = master_stream(99);
  for (int rep = 0; rep < 50; ++rep) {
    Realization x = sample_boolean(mu, 5.0, 2, seed.child(rep));
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(norm(x.center(i), 2) < 5.0 + x.radius(i));
  }
  // d = 3 as well
  for (int rep = 0; rep < 20; ++rep) {
    Realization x = sample_boolean(mu, 4.0, 3, seed.child(1000 + rep));
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(norm(x.center(i), 3) < 4.0 + x.radius(i));
  }
}

TEST_CASE("sample counts track the window intensity") {
  RadiusMeasure mu = RadiusMeasure::delta(1.0);
  double m = window_intensity(mu, 6.0, 2);
  StreamKey seed = master_stream(7);
  long long total = 0;
  const int n = 400;
  for (int rep = 0; rep < n; ++rep)
    total += static_cast<long long>(sample_boolean(mu, 6.0, 2, seed.child(rep)).size());
  double mean = static_cast<double>(total) / n;
  double sigma = std::sqrt(m / n);
  CHECK(std::abs(mean - m) < 5.0 * sigma);
}

TEST_CASE("radius histogram follows the size-biased density") {
  // two atoms: P(r = 4) / P(r = 1) = (w4 (a+4)^d) / (w1 (a+1)^d)
  RadiusMeasure mu = RadiusMeasure::combine(
      {{0.7, RadiusMeasure::delta(1.0)}, {0.3, RadiusMeasure::delta(4.0)}});
  double a = 5.0;
  double p4 = 0.3 * std::pow(a + 4.0, 2) /
              (0.3 * std::pow(a + 4.0, 2) + 0.7 * std::pow(a + 1.0, 2));
  StreamKey seed = master_stream(11);
  long long big = 0, all = 0;
  for (int rep = 0; rep < 300; ++rep) {
    Realization x = sample_boolean(mu, a, 2, seed.child(rep));
    for (std::size_t i = 0; i < x.size(); ++i) {
      ++all;
      if (x.radius(i) > 2.0) ++big;
    }
  }
  double hat = static_cast<double>(big) / all;
  double sigma = std::sqrt(p4 * (1 - p4) / all);
  CHECK(std::abs(hat - p4) < 5.0 * sigma);
}

TEST_CASE("auto truncation level") {
  // layers stop once the layer diameter falls below 1e-3 * a
  MultiscaleSpec spec{RadiusMeasure::delta(1.0), 2.0, -1};
  CHECK(auto_levels(spec, 1.0, 8.0, 2) == 7);
  MultiscaleSpec fixed{RadiusMeasure::delta(1.0), 2.0, 3};
  CHECK(auto_levels(fixed, 1.0, 8.0, 2) == 3);
  CHECK(auto_levels(spec, 0.0, 8.0, 2) == 0);
}

TEST_CASE("multiscale layer coupling is a prefix coupling") {
  MultiscaleSpec s1{RadiusMeasure::delta(1.0), 2.0, 1};
  MultiscaleSpec s2{RadiusMeasure::delta(1.0), 2.0, 2};
  StreamKey key{555};
  Realization x1 = sample_multiscale(s1, 0.5, 6.0, 2, key);
  Realization x2 = sample_multiscale(s2, 0.5, 6.0, 2, key);
  Realization p = filter_scales(x2, 1);
  REQUIRE(p.size() == x1.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p.radius(i) == x1.radius(i));
    CHECK(p.center(i)[0] == x1.center(i)[0]);
    CHECK(p.center(i)[1] == x1.center(i)[1]);
    CHECK(p.scale_index(i) == x1.scale_index(i));
  }
  CHECK(x2.seeds().layer_streams.size() == 3);
  CHECK(x1.seeds().layer_streams.size() == 2);
  CHECK(x2.seeds().layer_streams[0] == x1.seeds().layer_streams[0]);
}

TEST_CASE("couplings are deterministic maps") {
  Realization x(2, 4.0);
  double c0[2] = {1.0, -2.0};
  double c1[2] = {0.25, 0.5};
  x.add_ball(c0, 1.5);
  x.add_ball(c1, 0.75, 1, 2);

  Realization fat = fatten(x, 0.5);
  CHECK(fat.radius(0) == 2.0);
  CHECK(fat.radius(1) == 1.25);
  CHECK(fat.center(1)[0] == 0.25);
  CHECK(fat.window_radius() == 4.0);
  CHECK(fat.scale_index(1) == 1);
  CHECK(fat.source(1) == 2);

  // power-of-two rescale is bit exact
  Realization half = rescale(x, 0.5);
  CHECK(half.window_radius() == 2.0);
  CHECK(half.radius(0) == 0.75);
  CHECK(half.center(0)[0] == 0.5);
  CHECK(half.center(0)[1] == -1.0);
  Realization back = rescale(half, 2.0);
  CHECK(back.radius(0) == x.radius(0));
  CHECK(back.center(0)[1] == x.center(0)[1]);

  Realization m = merge(x, half);
  CHECK(m.size() == 4);
}

TEST_CASE("radius filter is strict") {
  Realization x(2, 4.0);
  double c[2] = {0, 0};
  x.add_ball(c, 1.0);
  x.add_ball(c, 0.5);
  Realization f = filter_radius_below(x, 1.0);
  REQUIRE(f.size() == 1);
  CHECK(f.radius(0) == 0.5);
}

TEST_CASE("window restriction keeps exactly the balls meeting the subwindow") {
  Realization x(2, 8.0);
  double in[2] = {3.5, 0};        // |c| = 3.5 < 4 + 0.25
  double edge[2] = {4.25, 0};     // |c| = 4.25, tangent: excluded (open window)
  double reach[2] = {4.2, 0};     // |c| = 4.2 < 4 + 0.25
  double out[2] = {6.0, 0};
  x.add_ball(in, 0.25, 1, 2);
  x.add_ball(edge, 0.25);
  x.add_ball(reach, 0.25);
  x.add_ball(out, 0.25);
  Realization r = restrict_window(x, 4.0);
  CHECK(r.window_radius() == 4.0);
  REQUIRE(r.size() == 2);
  CHECK(r.center(0)[0] == 3.5);
  CHECK(r.scale_index(0) == 1);
  CHECK(r.source(0) == 2);
  CHECK(r.center(1)[0] == 4.2);

  // restricting a sampled realization to its own window is the identity
  Realization y = sample_boolean(RadiusMeasure::delta(1.0, 0.3), 6.0, 2,
                                 master_stream(11));
  Realization same = restrict_window(y, 6.0);
  CHECK(same.size() == y.size());
}

TEST_CASE("realization csv is stable") {
  Realization x(2, 4.0);
  double c[2] = {1.0, 2.0};
  x.add_ball(c, 0.5, 3, 0);
  std::ostringstream os;
  std::vector<int> labels = {7};
  write_realization_csv(os, x, &labels);
  CHECK(os.str() == "scale_index,c0,c1,radius,cluster\n3,1,2,0.5,7\n");
}
