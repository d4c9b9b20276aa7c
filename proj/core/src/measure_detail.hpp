#pragma once

#include "boolperc/measure.hpp"

// Closed forms for single parametric parts, shared by the measure functionals
// and the tilted-density sampler. Not installed.
namespace boolperc::detail {

bool is_small_integer(double p);
double rpow(double x, double p);
double binomial(int n, int k);

double part_tail_mass(const ParametricPart& q, double a);
// int_{[max(a, support), inf)} r^p; a <= 0 gives the full moment
double part_tail_moment(const ParametricPart& q, double a, double p);
double part_moment(const ParametricPart& q, double p);
double part_log_moment(const ParametricPart& q, int d);
double part_max_radius(const ParametricPart& q);

}  // namespace boolperc::detail
