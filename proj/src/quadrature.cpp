#include "c0ip/quadrature.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace c0ip {

namespace {

constexpr int kMaxTriangleDegree = 12;
constexpr int kMaxEdgePoints = 32;

// Golub-Welsch: nodes and weights from the symmetric tridiagonal recurrence
// matrix. diag/offdiag are the three-term coefficients, mu0 the weight mass.
void golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0,
                  std::vector<double>& nodes, std::vector<double>& weights) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    j(i, i) = diag[i];
    if (i + 1 < n) j(i, i + 1) = j(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = mu0 * v0 * v0;
  }
}

// Gauss-Legendre on [0,1].
void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  golub_welsch(diag, off, 2.0, nodes, weights);
  for (int i = 0; i < n; ++i) {
    nodes[i] = 0.5 * (nodes[i] + 1.0);
    weights[i] *= 0.5;
  }
}

// Gauss-Jacobi with weight (1-x) on [0,1].
void gauss_jacobi10_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag[k] = -1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(k * (k + 1.0)) / (2.0 * k + 1.0);
  golub_welsch(diag, off, 2.0, nodes, weights);
  for (int i = 0; i < n; ++i) {
    nodes[i] = 0.5 * (nodes[i] + 1.0);
    weights[i] *= 0.25;
  }
}

void add_orbit3(QuadRule& rule, double a, double w) {
  // permutations of barycentric (1-2a, a, a) mapped to reference coordinates
  const double b = 1.0 - 2.0 * a;
  rule.points.emplace_back(a, a);
  rule.points.emplace_back(b, a);
  rule.points.emplace_back(a, b);
  for (int i = 0; i < 3; ++i) rule.weights.push_back(0.5 * w);
}

void add_orbit6(QuadRule& rule, double a, double b, double w) {
  const double c = 1.0 - a - b;
  const std::array<Vec2, 6> pts = {Vec2(b, c), Vec2(c, b), Vec2(a, c),
                                   Vec2(c, a), Vec2(a, b), Vec2(b, a)};
  for (const Vec2& p : pts) {
    rule.points.push_back(p);
    rule.weights.push_back(0.5 * w);
  }
}

QuadRule centroid_rule() {
  QuadRule r;
  r.degree = 1;
  r.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
  r.weights.push_back(0.5);
  return r;
}

QuadRule degree2_rule() {
  QuadRule r;
  r.degree = 2;
  add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
  return r;
}

QuadRule degree4_rule() {
  QuadRule r;
  r.degree = 4;
  add_orbit3(r, 0.445948490915965, 0.223381589678011);
  add_orbit3(r, 0.091576213509771, 0.109951743655322);
  return r;
}

QuadRule degree5_rule() {
  QuadRule r;
  r.degree = 5;
  r.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
  r.weights.push_back(0.5 * 0.225);
  add_orbit3(r, 0.470142064105115, 0.132394152788506);
  add_orbit3(r, 0.101286507323456, 0.125939180544827);
  return r;
}

QuadRule degree6_rule() {
  QuadRule r;
  r.degree = 6;
  add_orbit3(r, 0.249286745170910, 0.116786275726379);
  add_orbit3(r, 0.063089014491502, 0.050844906370207);
  add_orbit6(r, 0.310352451033785, 0.053145049844816, 0.082851075618374);
  return r;
}

// Conical product of Gauss-Jacobi (xi) and Gauss-Legendre (eta): the map
// (xi, eta) -> (xi, eta(1-xi)) absorbs the Jacobian into the Jacobi weight.
QuadRule conical_rule(int degree) {
  const int n = (degree + 2) / 2;
  std::vector<double> xi, wxi, eta, weta;
  gauss_jacobi10_01(n, xi, wxi);
  gauss_legendre01(n, eta, weta);
  QuadRule r;
  r.degree = degree;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      r.points.emplace_back(xi[i], eta[j] * (1.0 - xi[i]));
      r.weights.push_back(wxi[i] * weta[j]);
    }
  return r;
}

std::vector<QuadRule> build_triangle_table() {
  std::vector<QuadRule> table(kMaxTriangleDegree + 1);
  table[1] = centroid_rule();
  table[2] = degree2_rule();
  table[4] = degree4_rule();
  table[3] = table[4];
  table[5] = degree5_rule();
  table[6] = degree6_rule();
  for (int d = 7; d <= kMaxTriangleDegree; ++d) table[d] = conical_rule(d);
  return table;
}

std::vector<QuadRule> build_edge_table() {
  std::vector<QuadRule> table(kMaxEdgePoints + 1);
  for (int n = 1; n <= kMaxEdgePoints; ++n) {
    std::vector<double> nodes, weights;
    gauss_legendre01(n, nodes, weights);
    QuadRule& r = table[n];
    r.degree = 2 * n - 1;
    for (int i = 0; i < n; ++i) {
      r.points.emplace_back(nodes[i], 0.0);
      r.weights.push_back(weights[i]);
    }
  }
  return table;
}

}  // namespace

const QuadRule& triangle_rule(int degree) {
  static const std::vector<QuadRule> table = build_triangle_table();
  if (degree < 1 || degree > kMaxTriangleDegree)
    throw std::invalid_argument("triangle_rule: degree beyond table");
  return table[degree];
}

const QuadRule& edge_rule(int degree) {
  static const std::vector<QuadRule> table = build_edge_table();
  const int n = degree / 2 + 1;
  if (degree < 0 || n > kMaxEdgePoints)
    throw std::invalid_argument("edge_rule: degree beyond table");
  return table[n];
}

}  // namespace c0ip
