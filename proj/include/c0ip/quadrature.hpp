#pragma once

#include <vector>

#include <Eigen/Core>

namespace c0ip {

using Vec2 = Eigen::Vector2d;

struct QuadRule {
  std::vector<Vec2> points;  // triangle rules: reference coordinates; edge rules: (t, 0), t in [0,1]
  std::vector<double> weights;
  int degree = 0;  // polynomial degree integrated exactly
};

// Rule on the reference triangle (0,0),(1,0),(0,1), weights summing to 1/2.
// Symmetric orbit tables up to degree 6, conical Gauss products above.
// Throws std::invalid_argument for degree < 1 or > 12.
const QuadRule& triangle_rule(int degree);

// Gauss-Legendre rule on [0,1], weights summing to 1.
const QuadRule& edge_rule(int degree);

}  // namespace c0ip
