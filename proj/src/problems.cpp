#include "c0ip/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace c0ip {

double ProblemSpec::default_sigma(int degree) {
  if (degree == 2) return 6.0;
  if (degree == 3) return 18.0;
  throw std::invalid_argument("default_sigma: degree must be 2 or 3");
}

namespace {

// Radial solution of example 1. Inside the contact disc u coincides with the
// obstacle 1 - r^2; outside it is the biharmonic extension
// C1 r^2 ln r + C2 r^2 + C3 ln r + C4 matched to eight digits at r0.
constexpr double kR0 = 0.18134453;
constexpr double kC1 = 0.52504063;
constexpr double kC2 = -0.62860905;
constexpr double kC3 = 0.017266401;
constexpr double kC4 = 1.0467463;

double radial_value(double r) {
  if (r <= kR0) return 1.0 - r * r;
  double lr = std::log(r);
  return kC1 * r * r * lr + kC2 * r * r + kC3 * lr + kC4;
}

double radial_d1(double r) {
  if (r <= kR0) return -2.0 * r;
  double lr = std::log(r);
  return kC1 * (2.0 * r * lr + r) + 2.0 * kC2 * r + kC3 / r;
}

double radial_d2(double r) {
  if (r <= kR0) return -2.0;
  double lr = std::log(r);
  return kC1 * (2.0 * lr + 3.0) + 2.0 * kC2 - kC3 / (r * r);
}

ExactSolution example1_solution() {
  ExactSolution u;
  u.value = [](const Vec2& p) { return radial_value(p.norm()); };
  u.gradient = [](const Vec2& p) -> Vec2 {
    double r = p.norm();
    if (r <= kR0) return -2.0 * p;
    return radial_d1(r) / r * p;
  };
  u.hessian = [](const Vec2& p) -> std::array<double, 3> {
    double r = p.norm();
    if (r <= kR0) return {-2.0, 0.0, -2.0};
    double ex = p.x() / r, ey = p.y() / r;
    double rad = radial_d2(r), tan = radial_d1(r) / r;
    return {rad * ex * ex + tan * ey * ey, (rad - tan) * ex * ey,
            rad * ey * ey + tan * ex * ex};
  };
  return u;
}

}  // namespace

ProblemSpec example1() {
  ProblemSpec spec;
  spec.name = "example1";
  spec.domain = Domain::square;
  spec.f = [](const Vec2&) { return 0.0; };
  spec.psi = [](const Vec2& p) { return 1.0 - p.squaredNorm(); };
  spec.boundary = BoundaryMode::from_exact;
  spec.exact = example1_solution();
  spec.lambda_mass = 8.0 * M_PI * kC1;
  return spec;
}

ProblemSpec example2() {
  ProblemSpec spec;
  spec.name = "example2";
  spec.domain = Domain::lshape;
  spec.f = [](const Vec2&) { return 0.0; };
  spec.psi = [](const Vec2& p) {
    double a = (p.x() + 0.25) / 0.2;
    double b = p.y() / 0.35;
    return 1.0 - (a * a + b * b);
  };
  return spec;
}

ProblemSpec example3() {
  ProblemSpec spec;
  spec.name = "example3";
  spec.domain = Domain::lshape;
  spec.psi = [](const Vec2& p) {
    return -std::sin(2.0 * M_PI * (p.x() + 0.5) * (p.y() + 0.5)) *
               std::sin(4.0 * M_PI * (p.x() - 0.5) * (p.y() - 0.5)) -
           0.35;
  };
  spec.f = [](const Vec2& p) {
    double x = p.x(), y = p.y();
    if (x > 0.0 && y > 0.0) throw std::domain_error("example3: load evaluated outside the L");
    if (x <= 0.0 && y > 0.0) {
      double dx = x + 0.25, dy = y + 0.25;
      return 1e3 * 0.5 * std::exp(dx * dx + dy * dy);
    }
    if (x <= 0.0) return 0.0;
    double dx = x - 0.25, dy = y + 0.25;
    double q = dx * dx + dy * dy;
    return 1e3 * (0.5 + q * std::sqrt(q));
  };
  return spec;
}

ProblemSpec problem_by_name(const std::string& name) {
  if (name == "example1") return example1();
  if (name == "example2") return example2();
  if (name == "example3") return example3();
  throw std::invalid_argument("unknown problem: " + name);
}

}  // namespace c0ip
