#include "boolperc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace boolperc {

std::string fmt_double(double x) {
  if (x == 0.0) return "0";  // normalizes -0
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_csv_row(std::ostream& os, std::span<const std::string> cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

double tod(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size())
    throw std::invalid_argument("bad numeric field: " + s);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

namespace {

RadiusMeasure measure_from_json(const std::string& text) {
  try {
    return RadiusMeasure::from_json_string(text);
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("bad measure json: ") + e.what());
  }
}

}  // namespace

RadiusMeasure parse_measure(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty measure spec");
  if (text[0] == '{' || text[0] == '[')
    return measure_from_json(text);
  if (text[0] == '@') {
    std::ifstream in(text.substr(1));
    if (!in) throw std::invalid_argument("cannot open measure file " + text.substr(1));
    std::ostringstream ss;
    ss << in.rdbuf();
    return measure_from_json(ss.str());
  }
  std::vector<std::string> tok = split(text, ':');
  const std::string& kind = tok[0];
  if (kind == "delta") {
    if (tok.size() < 2 || tok.size() > 3)
      throw std::invalid_argument("delta:<radius>[:<mass>]");
    double mass = tok.size() == 3 ? tod(tok[2]) : 1.0;
    return RadiusMeasure::delta(tod(tok[1]), mass);
  }
  if (kind == "uniform") {
    if (tok.size() < 3 || tok.size() > 4)
      throw std::invalid_argument("uniform:<lo>:<hi>[:<mass>]");
    double mass = tok.size() == 4 ? tod(tok[3]) : 1.0;
    return RadiusMeasure::uniform(tod(tok[1]), tod(tok[2]), mass);
  }
  if (kind == "pareto") {
    if (tok.size() < 3 || tok.size() > 4)
      throw std::invalid_argument("pareto:<r_min>:<exponent>[:<mass>]");
    double mass = tok.size() == 4 ? tod(tok[3]) : 1.0;
    return RadiusMeasure::pareto(tod(tok[1]), tod(tok[2]), mass);
  }
  if (kind == "atomic") {
    if (tok.size() < 3 || tok.size() % 2 == 0)
      throw std::invalid_argument("atomic:<r>:<w>[:<r>:<w>...]");
    std::vector<Atom> atoms;
    for (std::size_t i = 1; i + 1 < tok.size(); i += 2)
      atoms.push_back({tod(tok[i]), tod(tok[i + 1]), 0, 0});
    return RadiusMeasure::atomic(atoms);
  }
  throw std::invalid_argument("unknown measure kind: " + kind);
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty grid spec");
  if (text.find(',') != std::string::npos) {
    std::vector<double> out;
    for (const std::string& s : split(text, ',')) out.push_back(tod(s));
    return out;
  }
  std::vector<std::string> tok = split(text, ':');
  if (tok.size() == 1) return {tod(tok[0])};
  if (tok.size() != 3) throw std::invalid_argument("grid is lo:hi:step or comma list");
  double lo = tod(tok[0]), hi = tod(tok[1]), step = tod(tok[2]);
  if (!(step > 0) || hi < lo) throw std::invalid_argument("grid needs hi >= lo, step > 0");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    double v = lo + i * step;
    if (v > hi * (1 + 1e-12) + 1e-300) break;
    out.push_back(v);
  }
  return out;
}

}  // namespace boolperc
