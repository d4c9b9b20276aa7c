#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "boolperc/io.hpp"
#include "boolperc/measure.hpp"

using namespace boolperc;

TEST_CASE("double formatting is canonical") {
  CHECK(fmt_double(0.0) == "0");
  CHECK(fmt_double(-0.0) == "0");
  CHECK(fmt_double(1.0) == "1");
  CHECK(fmt_double(0.5) == "0.5");
  CHECK(fmt_double(0.1) == "0.1");
  CHECK(fmt_double(1e300) == "1e+300");
  CHECK(fmt_double(std::nan("")) == "nan");
  CHECK(fmt_double(INFINITY) == "inf");
  CHECK(fmt_double(-INFINITY) == "-inf");
  // 12 significant digits read back to the same value for our CSV ranges
  double x = 0.6763475;
  CHECK(std::stod(fmt_double(x)) == x);
}

TEST_CASE("csv rows are comma joined with newline") {
  std::ostringstream os;
  std::vector<std::string> cells = {"a", "", "1.5"};
  write_csv_row(os, cells);
  CHECK(os.str() == "a,,1.5\n");
}

TEST_CASE("fnv1a reference vectors") {
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("measure shorthand") {
  RadiusMeasure d1 = parse_measure("delta:1");
  REQUIRE(d1.atoms().size() == 1);
  CHECK(d1.atoms()[0].radius == 1.0);
  CHECK(d1.atoms()[0].weight == 1.0);

  RadiusMeasure d2 = parse_measure("delta:2:0.5");
  CHECK(d2.atoms()[0].weight == 0.5);

  RadiusMeasure u = parse_measure("uniform:0.5:2:1.5");
  REQUIRE(u.parts().size() == 1);
  CHECK(u.total_mass() == doctest::Approx(1.5).epsilon(1e-15));

  RadiusMeasure p = parse_measure("pareto:1:3");
  CHECK(p.moment(3.0) == kInf);
  CHECK(p.total_mass() == doctest::Approx(1.0).epsilon(1e-15));

  RadiusMeasure at = parse_measure("atomic:1:1:3:0.5");
  REQUIRE(at.atoms().size() == 2);
  CHECK(at.moment(2.0) == doctest::Approx(5.5).epsilon(1e-15));

  CHECK_THROWS_AS(parse_measure("delta"), std::invalid_argument);
  CHECK_THROWS_AS(parse_measure("delta:abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_measure("delta:1:2:3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_measure("atomic:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_measure("gamma:1:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_measure("delta:-1"), std::invalid_argument);
}

TEST_CASE("measure json and file forms") {
  RadiusMeasure mu = RadiusMeasure::combine(
      {{1.0, RadiusMeasure::delta(1.0)},
       {1.0, RadiusMeasure::pareto(1.0, 3.5, 0.25)}});
  RadiusMeasure fromjson = parse_measure(mu.to_json_string());
  CHECK(fromjson.total_mass() == doctest::Approx(mu.total_mass()).epsilon(1e-15));

  std::string path = "parse_measure_roundtrip.json";
  {
    std::ofstream f(path);
    f << mu.to_json_string();
  }
  RadiusMeasure fromfile = parse_measure("@" + path);
  CHECK(fromfile.moment(2.0) == doctest::Approx(mu.moment(2.0)).epsilon(1e-15));
  std::remove(path.c_str());

  CHECK_THROWS_AS(parse_measure("@no_such_file_here.json"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_measure("{not json"), std::invalid_argument);
}

TEST_CASE("grid syntax") {
  std::vector<double> g = parse_grid("1:2:0.5");
  REQUIRE(g.size() == 3);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 1.5);
  CHECK(g[2] == 2.0);

  // endpoint inclusion survives repeated-addition drift
  std::vector<double> f = parse_grid("0.1:0.9:0.2");
  REQUIRE(f.size() == 5);
  CHECK(f.back() == doctest::Approx(0.9).epsilon(1e-12));

  std::vector<double> l = parse_grid("1,2,4");
  REQUIRE(l.size() == 3);
  CHECK(l[2] == 4.0);

  CHECK_THROWS_AS(parse_grid("2:1:0.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("1:2:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("1:2:-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("1,,2"), std::invalid_argument);
}
