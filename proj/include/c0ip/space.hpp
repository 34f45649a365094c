#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "c0ip/mesh.hpp"

namespace c0ip {

// Lagrange basis of degree 2 or 3 on the reference triangle (0,0),(1,0),(0,1),
// expanded in monomials. Local node order: the three vertices, then the nodes
// interior to local edge j (walking from v[j] to v[(j+1)%3]), then the center.
struct ReferenceBasis {
  int degree = 0;
  int n_basis = 0;
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 2>> powers;
  Eigen::MatrixXd coeff;  // basis i = sum_j coeff(i,j) x^powers[j][0] y^powers[j][1]
};
const ReferenceBasis& reference_basis(int degree);

// Continuous P_k dofs: vertex dofs first (dof id = vertex id), then k-1 dofs
// per edge ordered from the lower to the higher vertex id, then one dof per
// triangle for k = 3.
struct DofMap {
  int degree = 0;
  int n_dofs = 0;
  std::vector<std::array<int, 10>> cell_dofs;  // -1 past dofs_per_cell()
  std::vector<Vec2> node;
  std::vector<bool> boundary;
  std::vector<int> interior_vertices;  // obstacle-constrained dofs
  int dofs_per_cell() const { return degree == 2 ? 6 : 10; }
};
DofMap build_dofmap(const Mesh& mesh, int degree);

// Basis values and physical-frame derivatives at a batch of reference points.
struct BasisEval {
  int n_points = 0;
  int n_basis = 0;
  int max_deriv = 0;
  std::vector<double> value;
  std::vector<Vec2> grad;
  std::vector<std::array<double, 3>> hess;   // xx, xy, yy
  std::vector<std::array<double, 4>> third;  // xxx, xxy, xyy, yyy
  double val(int q, int i) const { return value[q * n_basis + i]; }
  const Vec2& gr(int q, int i) const { return grad[q * n_basis + i]; }
  const std::array<double, 3>& he(int q, int i) const { return hess[q * n_basis + i]; }
  const std::array<double, 4>& th(int q, int i) const { return third[q * n_basis + i]; }
};
BasisEval eval_basis(const Mesh& mesh, int t, int degree, std::span<const Vec2> ref_points,
                     int max_deriv);

// Nodal interpolant.
Eigen::VectorXd interpolate(const DofMap& dofmap, const std::function<double(const Vec2&)>& g);

// Point evaluation of a finite element field. Locates by walking from the
// last hit with a brute-force fallback, so batches of nearby points are cheap.
class FieldEvaluator {
 public:
  FieldEvaluator(const Mesh& mesh, const DofMap& dofmap, Eigen::VectorXd coeffs);

  struct Values {
    double value = 0.0;
    Vec2 grad = Vec2::Zero();
    std::array<double, 3> hess{0.0, 0.0, 0.0};
  };
  Values operator()(const Vec2& p, int max_deriv = 2) const;
  int locate(const Vec2& p) const;

 private:
  const Mesh* mesh_;
  const DofMap* dofmap_;
  Eigen::VectorXd coeffs_;
  mutable int last_ = 0;
};

}  // namespace c0ip
