#pragma once

#include <functional>
#include <optional>
#include <string>

#include "c0ip/estimator.hpp"
#include "c0ip/mesh.hpp"

namespace c0ip {

enum class BoundaryMode { homogeneous, from_exact };

// One benchmark problem: load, obstacle, boundary treatment, and (when the
// solution is known in closed form) the exact solution and multiplier mass.
struct ProblemSpec {
  std::string name;
  Domain domain = Domain::square;
  std::function<double(const Vec2&)> f;
  std::function<double(const Vec2&)> psi;
  BoundaryMode boundary = BoundaryMode::homogeneous;
  std::optional<ExactSolution> exact;
  std::optional<double> lambda_mass;

  static double default_sigma(int degree);  // 6 for quadratics, 18 for cubics
};

// Square domain, f = 0, psi = 1 - |x|^2, boundary data from the known radial
// solution; the contact disc has radius r0 and |lambda| = 8 pi C1.
ProblemSpec example1();

// L-shape, f = 0, elliptic obstacle centered at (-1/4, 0), clamped boundary.
ProblemSpec example2();

// L-shape, oscillatory obstacle and a piecewise load; evaluating f in the
// removed quadrant throws std::domain_error.
ProblemSpec example3();

ProblemSpec problem_by_name(const std::string& name);

}  // namespace c0ip
