#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "boolperc/measure.hpp"

namespace boolperc {

// Deterministic shortest-ish decimal rendering (%.12g), stable across reruns
// of the same binary. Used for every CSV number so bodies are byte-identical.
std::string fmt_double(double x);

void write_csv_row(std::ostream& os, std::span<const std::string> cells);

std::uint64_t fnv1a(std::string_view text);

// Measure CLI syntax: inline JSON ({...}), @file, or shorthand
// delta:r[:mass] | uniform:lo:hi[:mass] | pareto:rmin:exponent[:mass] |
// atomic:r:w[:r:w...]. Throws std::invalid_argument with a usable message.
RadiusMeasure parse_measure(const std::string& text);

// Grid syntax: "lo:hi:step" (inclusive, step > 0) or comma list "1,2,4".
std::vector<double> parse_grid(const std::string& text);

}  // namespace boolperc
