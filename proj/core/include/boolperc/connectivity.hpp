#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "boolperc/geometry.hpp"

namespace boolperc {

// Open-ball intersection: ||c1 - c2|| < r1 + r2, strict.
bool balls_overlap(int d, const double* c1, double r1, const double* c2,
                   double r2);

// Ball meets the sphere S(center, s): | ||c - center|| - s | < r, strict.
bool ball_meets_sphere_at(int d, const double* c, double r,
                          const double* sphere_center, double s);

// Sphere centered at the origin.
bool ball_meets_sphere(int d, const double* c, double r, double s);

// Planar (d == 2) only: does the union of open balls contain a closed curve
// inside the closed annulus r_in <= ||x|| <= r_out that winds around the
// origin? Occupied circuits block vacant radial crossings, so this is the
// dual witness of supercriticality; circuits die off subcritically. Decided
// exactly by lifting ball angles to the universal cover and detecting a
// cycle with nonzero holonomy in a potential union-find. Balls whose radius
// exceeds ||c|| + r_in wrap by themselves and short-circuit to true.
bool annulus_circuit_event(const Realization& real, double r_in, double r_out);

// Connected components of the ball-intersection graph. build() uses a
// hierarchical spatial hash (balls bucketed by radius level ceil(log2 r),
// cell size 2^{level+1}; each ball is checked against its own and all
// coarser levels), build_brute_force() the all-pairs oracle. Both produce
// identical components. The source Realization must outlive the structure.
class ComponentStructure {
 public:
  static ComponentStructure build(const Realization& real);
  static ComponentStructure build_brute_force(const Realization& real);

  std::size_t size() const { return parent_.size(); }
  int find(std::size_t i) const { return parent_[i]; }  // root, post-compression
  bool same_component(std::size_t i, std::size_t j) const {
    return parent_[i] == parent_[j];
  }

  // Event {S(s1) <-> S(s2)}: some component holds a ball meeting S(s1) and a
  // ball meeting S(s2). Requires 0 < s1 < s2 <= window radius: any path
  // between the spheres can be truncated at its first contact with S(s2),
  // hence is decided by balls meeting B(s2), all of which are present.
  bool crossing_event(double s1, double s2) const;

  // Event {0 <-> S(r)}: some ball contains the origin and its component
  // meets S(r). Requires r <= window radius.
  bool one_arm_event(double r) const;

  // Max over ball pairs (i, j) of the origin component of
  // ||ci - cj|| + ri + rj (a single ball gives 2r); (0, false) when the
  // origin is uncovered. censored is true when the component holds a ball
  // meeting S(window): only then can the true component extend further.
  std::pair<double, bool> origin_component_diameter() const;

  // Dense labels 0..k-1 in order of first appearance.
  std::vector<int> component_labels() const;

  const Realization& realization() const { return *real_; }

 private:
  const Realization* real_ = nullptr;
  std::vector<std::int32_t> parent_;
};

}  // namespace boolperc
