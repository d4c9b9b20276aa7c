#include "boolperc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "measure_detail.hpp"

namespace boolperc {

using json = nlohmann::json;

double unit_ball_volume(int d) {
  if (d < 1) throw std::invalid_argument("unit_ball_volume: d >= 1 required");
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double ipow(double x, int n) {
  if (n < 0) throw std::invalid_argument("ipow: negative exponent");
  double acc = 1.0;
  for (int i = 0; i < n; ++i) acc *= x;
  return acc;
}

namespace {

void check_finite_positive(double x, const char* what) {
  if (!(x > 0) || !std::isfinite(x))
    throw std::invalid_argument(std::string(what) + " must be finite and > 0");
}

// int_a^b r^p dr for 0 <= a <= b, p >= 0
double power_integral(double a, double b, double p) {
  if (b <= a) return 0.0;
  return (std::pow(b, p + 1) - std::pow(a, p + 1)) / (p + 1);
}

}  // namespace

// ---- per-part closed forms ------------------------------------------------

namespace detail {

bool is_small_integer(double p) {
  return p >= 0 && p <= 64 && p == std::floor(p);
}

double rpow(double x, double p) {
  return is_small_integer(p) ? ipow(x, static_cast<int>(p)) : std::pow(x, p);
}

double binomial(int n, int k) {
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return acc;
}

double part_tail_mass(const ParametricPart& q, double a) {
  if (q.family == Family::Uniform) {
    if (a <= q.lo) return q.mass;
    if (a >= q.hi) return 0.0;
    return q.mass * (q.hi - a) / (q.hi - q.lo);
  }
  double x = a - q.shift;
  if (x <= q.r_min) return q.mass;
  return q.mass * std::pow(q.r_min / x, q.exponent);
}

// int_{[a,inf)} r^p for one part; a <= 0 means the full moment
double part_tail_moment(const ParametricPart& q, double a, double p) {
  if (q.family == Family::Uniform) {
    double lo = std::max(a, q.lo);
    if (lo >= q.hi) return 0.0;
    return q.mass / (q.hi - q.lo) * power_integral(lo, q.hi, p);
  }
  // pareto
  if (q.shift == 0.0) {
    if (p >= q.exponent) return kInf;
    double x0 = std::max(a, q.r_min);
    return q.mass * q.exponent / (q.exponent - p) * std::pow(q.r_min, p) *
           std::pow(q.r_min / x0, q.exponent - p);
  }
  if (!is_small_integer(p))
    throw std::domain_error(
        "non-integer moment of a shifted pareto part has no closed form");
  // int_{[a,inf)} r^p dT_eta mu = int_{x >= a-eta} (x+eta)^p dmu(x)
  int ip = static_cast<int>(p);
  ParametricPart base = q;
  base.shift = 0.0;
  double cut = a - q.shift;
  double acc = 0.0;
  for (int k = 0; k <= ip; ++k) {
    double term = part_tail_moment(base, cut, static_cast<double>(k));
    if (term == kInf) return kInf;
    acc += binomial(ip, k) * ipow(q.shift, ip - k) * term;
  }
  return acc;
}

double part_moment(const ParametricPart& q, double p) {
  return part_tail_moment(q, 0.0, p);
}

// int_{[1,inf)} r^d ln r for one part
double part_log_moment(const ParametricPart& q, int d) {
  if (q.family == Family::Uniform) {
    if (q.hi <= 1.0) return 0.0;
    double m = std::max(q.lo, 1.0);
    // antiderivative of r^d ln r: r^{d+1}((d+1) ln r - 1)/(d+1)^2
    auto F = [&](double r) {
      return std::pow(r, d + 1) * ((d + 1) * std::log(r) - 1.0) /
             ((d + 1.0) * (d + 1.0));
    };
    return q.mass / (q.hi - q.lo) * (F(q.hi) - F(m));
  }
  if (q.shift != 0.0)
    throw std::domain_error(
        "log-moment of a shifted pareto part has no closed form");
  if (q.exponent <= d) return kInf;
  // int_m^inf r^{d-1-exponent+...}: with c = d - exponent < 0,
  // int_m^inf r^{c-1} ln r dr = m^c (1 - c ln m)/c^2
  double m = std::max(1.0, q.r_min);
  double c = d - q.exponent;
  double integral = std::pow(m, c) * (1.0 - c * std::log(m)) / (c * c);
  return q.mass * q.exponent * std::pow(q.r_min, q.exponent) * integral;
}

double part_max_radius(const ParametricPart& q) {
  return q.family == Family::Uniform ? q.hi : kInf;
}

}  // namespace detail

using detail::part_log_moment;
using detail::part_max_radius;
using detail::part_moment;
using detail::part_tail_mass;
using detail::part_tail_moment;
using detail::rpow;

// ---- RadiusMeasure --------------------------------------------------------

void RadiusMeasure::normalize() {
  for (const Atom& at : atoms_) {
    check_finite_positive(at.radius, "atom radius");
    check_finite_positive(at.weight, "atom weight");
  }
  for (const ParametricPart& q : parts_) {
    check_finite_positive(q.mass, "part mass");
    if (q.family == Family::Uniform) {
      if (!(q.lo >= 0) || !(q.hi > q.lo) || !std::isfinite(q.hi))
        throw std::invalid_argument("uniform part needs 0 <= lo < hi < inf");
    } else {
      check_finite_positive(q.r_min, "pareto r_min");
      check_finite_positive(q.exponent, "pareto exponent");
      if (!(q.shift >= 0)) throw std::invalid_argument("pareto shift < 0");
    }
  }
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) {
    if (a.radius != b.radius) return a.radius < b.radius;
    if (a.scale != b.scale) return a.scale < b.scale;
    return a.source < b.source;
  });
  std::vector<Atom> merged;
  merged.reserve(atoms_.size());
  for (const Atom& at : atoms_) {
    if (!merged.empty() && merged.back().radius == at.radius &&
        merged.back().scale == at.scale && merged.back().source == at.source) {
      merged.back().weight += at.weight;
    } else {
      merged.push_back(at);
    }
  }
  atoms_ = std::move(merged);
}

RadiusMeasure RadiusMeasure::atomic(std::vector<Atom> atoms) {
  if (atoms.empty())
    throw std::invalid_argument("atomic measure needs at least one atom");
  RadiusMeasure m;
  m.atoms_ = std::move(atoms);
  m.normalize();
  return m;
}

RadiusMeasure RadiusMeasure::delta(double radius, double mass) {
  return atomic({Atom{radius, mass, 0, 0}});
}

RadiusMeasure RadiusMeasure::uniform(double lo, double hi, double mass) {
  RadiusMeasure m;
  ParametricPart q;
  q.family = Family::Uniform;
  q.lo = lo;
  q.hi = hi;
  q.mass = mass;
  m.parts_.push_back(q);
  m.normalize();
  return m;
}

RadiusMeasure RadiusMeasure::pareto(double r_min, double exponent,
                                    double mass) {
  RadiusMeasure m;
  ParametricPart q;
  q.family = Family::Pareto;
  q.r_min = r_min;
  q.exponent = exponent;
  q.mass = mass;
  m.parts_.push_back(q);
  m.normalize();
  return m;
}

bool RadiusMeasure::bounded_support() const {
  for (const ParametricPart& q : parts_)
    if (q.family == Family::Pareto) return false;
  return true;
}

double RadiusMeasure::max_radius() const {
  double r = 0.0;
  if (!atoms_.empty()) r = atoms_.back().radius;
  for (const ParametricPart& q : parts_) r = std::max(r, part_max_radius(q));
  return r;
}

double RadiusMeasure::total_mass() const {
  double acc = 0.0;
  for (const Atom& at : atoms_) acc += at.weight;
  for (const ParametricPart& q : parts_) acc += q.mass;
  return acc;
}

double RadiusMeasure::moment(double p) const {
  if (!(p >= 0)) throw std::invalid_argument("moment: p >= 0 required");
  double acc = 0.0;
  for (const Atom& at : atoms_) acc += at.weight * rpow(at.radius, p);
  for (const ParametricPart& q : parts_) {
    double term = part_moment(q, p);
    if (term == kInf) return kInf;
    acc += term;
  }
  return acc;
}

double RadiusMeasure::log_moment_d(int d) const {
  if (d < 1) throw std::invalid_argument("log_moment_d: d >= 1 required");
  double acc = 0.0;
  for (const Atom& at : atoms_)
    if (at.radius >= 1.0)
      acc += at.weight * ipow(at.radius, d) * std::log(at.radius);
  for (const ParametricPart& q : parts_) {
    double term = part_log_moment(q, d);
    if (term == kInf) return kInf;
    acc += term;
  }
  return acc;
}

double RadiusMeasure::tail_mass(double a) const {
  double acc = 0.0;
  for (const Atom& at : atoms_)
    if (at.radius >= a) acc += at.weight;
  for (const ParametricPart& q : parts_) acc += part_tail_mass(q, a);
  return acc;
}

double RadiusMeasure::tail_moment(double a, double p) const {
  if (!(a > 0)) throw std::invalid_argument("tail_moment: a > 0 required");
  if (!(p >= 0)) throw std::invalid_argument("tail_moment: p >= 0 required");
  double acc = 0.0;
  for (const Atom& at : atoms_)
    if (at.radius >= a) acc += at.weight * rpow(at.radius, p);
  for (const ParametricPart& q : parts_) {
    double term = part_tail_moment(q, a, p);
    if (term == kInf) return kInf;
    acc += term;
  }
  return acc;
}

RadiusMeasure RadiusMeasure::shifted(double eta) const {
  if (!(eta >= 0)) throw std::invalid_argument("shifted: eta >= 0 required");
  RadiusMeasure out = *this;
  for (Atom& at : out.atoms_) at.radius += eta;
  for (ParametricPart& q : out.parts_) {
    if (q.family == Family::Uniform) {
      q.lo += eta;
      q.hi += eta;
    } else {
      q.shift += eta;
    }
  }
  out.normalize();
  return out;
}

RadiusMeasure RadiusMeasure::scaled(double rho, int d) const {
  if (!(rho > 1)) throw std::invalid_argument("scaled: rho > 1 required");
  if (d < 1) throw std::invalid_argument("scaled: d >= 1 required");
  double factor = ipow(rho, d);
  RadiusMeasure out = *this;
  for (Atom& at : out.atoms_) {
    at.radius /= rho;
    at.weight *= factor;
  }
  for (ParametricPart& q : out.parts_) {
    q.mass *= factor;
    if (q.family == Family::Uniform) {
      q.lo /= rho;
      q.hi /= rho;
    } else {
      q.r_min /= rho;
      q.shift /= rho;
    }
  }
  out.normalize();
  return out;
}

RadiusMeasure RadiusMeasure::scaled_by(double lambda) const {
  if (!(lambda >= 0) || !std::isfinite(lambda))
    throw std::invalid_argument("scaled_by: finite lambda >= 0 required");
  if (lambda == 0.0) return RadiusMeasure{};
  RadiusMeasure out = *this;
  for (Atom& at : out.atoms_) at.weight *= lambda;
  for (ParametricPart& q : out.parts_) q.mass *= lambda;
  return out;
}

RadiusMeasure RadiusMeasure::combine(
    const std::vector<std::pair<double, RadiusMeasure>>& terms) {
  RadiusMeasure out;
  bool any = false;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    double c = terms[i].first;
    if (!(c >= 0) || !std::isfinite(c))
      throw std::invalid_argument("combine: coefficients must be >= 0");
    if (c == 0.0) continue;
    any = true;
    RadiusMeasure term = terms[i].second.scaled_by(c);
    for (Atom at : term.atoms_) {
      at.source = static_cast<int>(i);
      out.atoms_.push_back(at);
    }
    for (ParametricPart q : term.parts_) {
      q.source = static_cast<int>(i);
      out.parts_.push_back(q);
    }
  }
  if (!any)
    throw std::invalid_argument("combine: all coefficients are zero");
  out.normalize();
  return out;
}

// ---- multiscale closures --------------------------------------------------

RadiusMeasure multiscale_truncated(const MultiscaleSpec& spec, int d) {
  if (spec.levels < 0)
    throw std::invalid_argument(
        "multiscale_truncated: levels must be resolved (>= 0)");
  if (!(spec.rho > 1))
    throw std::invalid_argument("multiscale_truncated: rho > 1 required");
  if (d < 1) throw std::invalid_argument("multiscale_truncated: d >= 1");
  if (spec.levels * d * std::log10(spec.rho) > 300.0)
    throw std::overflow_error(
        "multiscale_truncated: mass scale rho^{N d} exceeds 1e300");
  RadiusMeasure out;
  for (int k = 0; k <= spec.levels; ++k) {
    RadiusMeasure layer =
        (k == 0) ? spec.base : spec.base.scaled(ipow(spec.rho, k), d);
    for (Atom at : layer.atoms_) {
      at.scale = k;
      out.atoms_.push_back(at);
    }
    for (ParametricPart q : layer.parts_) {
      q.scale = k;
      out.parts_.push_back(q);
    }
  }
  out.normalize();
  return out;
}

double multiscale_tail_moment(const RadiusMeasure& mu, double rho, double a,
                              int d) {
  if (!(a > 0)) throw std::invalid_argument("multiscale_tail_moment: a > 0");
  if (!(rho > 1))
    throw std::invalid_argument("multiscale_tail_moment: rho > 1");
  double acc = 0.0;
  const double lr = std::log(rho);
  for (const Atom& at : mu.atoms()) {
    if (at.radius < a) continue;
    // n = floor(log_rho(r/a)), fixed up so a*rho^n <= r < a*rho^{n+1} exactly
    int n = std::max(0, static_cast<int>(
                            std::floor(std::log(at.radius / a) / lr)));
    while (a * ipow(rho, n + 1) <= at.radius) ++n;
    while (n > 0 && a * ipow(rho, n) > at.radius) --n;
    acc += at.weight * ipow(at.radius, d) * (n + 1);
  }
  for (const ParametricPart& q : mu.parts()) {
    if (q.family == Family::Uniform) {
      double cutoff = a;
      while (cutoff <= q.hi) {
        acc += part_tail_moment(q, cutoff, static_cast<double>(d));
        cutoff *= rho;
      }
    } else {
      if (q.shift != 0.0)
        throw std::domain_error(
            "multiscale tail of a shifted pareto part has no closed form");
      if (q.exponent <= d) return kInf;
      // constant full-moment terms while the cutoff is below r_min, then a
      // geometric series with ratio rho^{d-exponent} < 1
      double cutoff = a;
      while (cutoff <= q.r_min) {
        acc += part_tail_moment(q, cutoff, static_cast<double>(d));
        cutoff *= rho;
      }
      double head = part_tail_moment(q, cutoff, static_cast<double>(d));
      acc += head / (1.0 - std::pow(rho, d - q.exponent));
    }
  }
  return acc;
}

MomentSandwich moment_sandwich_check(const RadiusMeasure& mu, double rho,
                                     double s, int d) {
  if (!(rho > 1)) throw std::invalid_argument("moment_sandwich: rho > 1");
  if (!(s > 0)) throw std::invalid_argument("moment_sandwich: s > 0");
  if (!mu.bounded_support())
    throw std::domain_error(
        "moment_sandwich_check: unbounded-support parametric input "
        "unsupported");
  const double p = d + s;
  MomentSandwich out;
  out.lower = mu.tail_moment(1.0, p);
  double rmax = mu.max_radius();
  double value = 0.0;
  double cutoff = 1.0;
  for (int k = 0; cutoff <= rmax; ++k, cutoff *= rho)
    value += std::pow(rho, -k * s) * mu.tail_moment(cutoff, p);
  out.value = value;
  out.upper = out.lower / (1.0 - std::pow(rho, -s));
  const double slack = 1e-12 * std::max(1.0, out.upper);
  out.holds = out.lower <= out.value + slack && out.value <= out.upper + slack;
  return out;
}

std::vector<AutosimRow> sub_autosimilarity_diagnostic(
    const RadiusMeasure& mu, std::span<const double> a_grid,
    std::span<const double> r_grid, int d) {
  for (double r : r_grid)
    if (!(r >= 0.5))
      throw std::invalid_argument("sub_autosimilarity: grid needs r >= 1/2");
  std::vector<AutosimRow> rows;
  rows.reserve(a_grid.size());
  for (double a : a_grid) {
    if (!(a > 0))
      throw std::invalid_argument("sub_autosimilarity: a > 0 required");
    double sup = 0.0;
    for (double r : r_grid) {
      double denom = mu.tail_mass(r);
      double num = mu.tail_mass(a * r);
      if (denom == 0.0) {
        if (num > 0.0) sup = kInf;  // only possible for a < 1
        continue;                   // 0/0 counts as 0
      }
      sup = std::max(sup, ipow(a, d) * num / denom);
    }
    rows.push_back({a, sup});
  }
  return rows;
}

// ---- JSON -----------------------------------------------------------------

namespace {

json atom_to_json(const Atom& at) {
  if (at.scale == 0 && at.source == 0) return json::array({at.radius, at.weight});
  return json::array({at.radius, at.weight, at.scale, at.source});
}

Atom atom_from_json(const json& j) {
  if (!j.is_array() || j.size() < 2 || j.size() > 4)
    throw std::invalid_argument("measure json: atom must be [r, w(, scale, source)]");
  Atom at;
  at.radius = j[0].get<double>();
  at.weight = j[1].get<double>();
  if (j.size() > 2) at.scale = j[2].get<int>();
  if (j.size() > 3) at.source = j[3].get<int>();
  return at;
}

json part_to_json(const ParametricPart& q) {
  json j;
  if (q.family == Family::Uniform) {
    j["family"] = "uniform";
    j["r_lo"] = q.lo;
    j["r_hi"] = q.hi;
  } else {
    j["family"] = "pareto";
    j["r_min"] = q.r_min;
    j["exponent"] = q.exponent;
    if (q.shift != 0.0) j["shift"] = q.shift;
  }
  j["mass"] = q.mass;
  if (q.scale != 0) j["scale"] = q.scale;
  if (q.source != 0) j["source"] = q.source;
  return j;
}

ParametricPart part_from_json(const json& j) {
  ParametricPart q;
  std::string fam = j.at("family").get<std::string>();
  if (fam == "uniform") {
    q.family = Family::Uniform;
    q.lo = j.at("r_lo").get<double>();
    q.hi = j.at("r_hi").get<double>();
  } else if (fam == "pareto") {
    q.family = Family::Pareto;
    q.r_min = j.at("r_min").get<double>();
    q.exponent = j.at("exponent").get<double>();
    q.shift = j.value("shift", 0.0);
  } else {
    throw std::invalid_argument("measure json: unknown family " + fam);
  }
  q.mass = j.at("mass").get<double>();
  q.scale = j.value("scale", 0);
  q.source = j.value("source", 0);
  return q;
}

}  // namespace

std::string RadiusMeasure::to_json_string() const {
  json j;
  if (parts_.empty()) {
    j["kind"] = "atomic";
    j["atoms"] = json::array();
    for (const Atom& at : atoms_) j["atoms"].push_back(atom_to_json(at));
  } else if (atoms_.empty() && parts_.size() == 1 && parts_[0].scale == 0 &&
             parts_[0].source == 0 && parts_[0].shift == 0.0) {
    const ParametricPart& q = parts_[0];
    if (q.family == Family::Uniform) {
      j["kind"] = "uniform";
      j["r_lo"] = q.lo;
      j["r_hi"] = q.hi;
    } else {
      j["kind"] = "pareto";
      j["r_min"] = q.r_min;
      j["exponent"] = q.exponent;
    }
    j["mass"] = q.mass;
  } else {
    j["kind"] = "mixture";
    j["atoms"] = json::array();
    for (const Atom& at : atoms_) j["atoms"].push_back(atom_to_json(at));
    j["parts"] = json::array();
    for (const ParametricPart& q : parts_) j["parts"].push_back(part_to_json(q));
  }
  return j.dump();
}

RadiusMeasure RadiusMeasure::from_json_string(const std::string& text) {
  json j = json::parse(text);
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "atomic") {
    std::vector<Atom> atoms;
    for (const json& a : j.at("atoms")) atoms.push_back(atom_from_json(a));
    return RadiusMeasure::atomic(std::move(atoms));
  }
  if (kind == "delta") {
    double r = j.contains("r") ? j.at("r").get<double>()
                               : j.at("radius").get<double>();
    return RadiusMeasure::delta(r, j.value("mass", 1.0));
  }
  if (kind == "uniform")
    return RadiusMeasure::uniform(j.at("r_lo").get<double>(),
                                  j.at("r_hi").get<double>(),
                                  j.value("mass", 1.0));
  if (kind == "pareto")
    return RadiusMeasure::pareto(j.at("r_min").get<double>(),
                                 j.at("exponent").get<double>(),
                                 j.value("mass", 1.0));
  if (kind == "mixture") {
    RadiusMeasure out;
    if (j.contains("atoms"))
      for (const json& a : j.at("atoms")) out.atoms_.push_back(atom_from_json(a));
    if (j.contains("parts"))
      for (const json& q : j.at("parts")) out.parts_.push_back(part_from_json(q));
    if (out.is_zero())
      throw std::invalid_argument("measure json: empty mixture");
    out.normalize();
    return out;
  }
  throw std::invalid_argument("measure json: unknown kind " + kind);
}

}  // namespace boolperc
