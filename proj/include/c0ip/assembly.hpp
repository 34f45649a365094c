#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "c0ip/mesh.hpp"
#include "c0ip/quadrature.hpp"
#include "c0ip/space.hpp"

namespace c0ip {

using SparseMatrix = Eigen::SparseMatrix<double>;

// One-sided traces at edge quadrature points of every basis function living
// on the triangles adjacent to an edge. Jumps subtract the trace on the side
// the normal leaves from the trace on the side it enters (the exterior trace
// counts as zero on boundary edges), which makes all jump quantities of the
// bilinear form independent of the orientation handed in. Boundary means are
// one-sided with no averaging factor.
struct EdgeTraces {
  std::vector<int> dofs;         // union of both sides' cell dofs
  std::vector<double> weights;   // rule weight times edge length
  std::vector<Vec2> points;      // physical quadrature points
  Eigen::MatrixXd jump_dn;       // rows: points, cols: dofs; [[grad v . n]]
  Eigen::MatrixXd mean_d2n;      // {{n^T D^2 v n}}
  Eigen::MatrixXd jump_d2n;      // [[n^T D^2 v n]]
  Eigen::MatrixXd jump_d3n;      // [[n . D^3 v . n^2]]
};
EdgeTraces edge_traces(const Mesh& mesh, const DofMap& dofmap, int e, const QuadRule& rule,
                       const Vec2& normal, int max_deriv);

// Piecewise Hessian products plus symmetrized consistency terms and the
// sigma/|e| normal-derivative jump penalty on every edge; boundary edges use
// one-sided traces, which enforces the clamped normal derivative weakly.
SparseMatrix assemble_stiffness(const Mesh& mesh, const DofMap& dofmap, double sigma);

// Coupling block of a single edge against the given normal; `dofs` receives
// the union dof list. Exposed for the orientation-invariance checks.
Eigen::MatrixXd edge_stiffness_block(const Mesh& mesh, const DofMap& dofmap, int e, double sigma,
                                     const Vec2& normal, std::vector<int>& dofs);

Eigen::VectorXd assemble_load(const Mesh& mesh, const DofMap& dofmap,
                              const std::function<double(const Vec2&)>& f);

// Boundary terms of the load functional when the clamped data comes from a
// field u: sum over boundary edges of ({{d2 v/dn2}} + sigma/|e| [[dv/dn]])
// times the boundary jump of u, which is -grad u . n with the outward normal.
Eigen::VectorXd assemble_boundary_load(const Mesh& mesh, const DofMap& dofmap, double sigma,
                                       const std::function<Vec2(const Vec2&)>& grad_u);

// Contribution of a single boundary edge against the given normal; `dofs`
// receives the dof list. Flipping the normal flips the sign of the result.
Eigen::VectorXd boundary_load_edge(const Mesh& mesh, const DofMap& dofmap, int e, double sigma,
                                   const Vec2& normal, const std::function<Vec2(const Vec2&)>& grad_u,
                                   std::vector<int>& dofs);

struct ReducedSystem {
  SparseMatrix matrix;  // SPD on the free dofs
  Eigen::VectorXd rhs;
  std::vector<int> free_to_full;
  std::vector<int> full_to_free;  // -1 at fixed dofs
  Eigen::VectorXd fixed;          // full length, boundary values at fixed dofs

  Eigen::VectorXd to_full(const Eigen::VectorXd& x) const;
};

// Eliminates the boundary dofs symmetrically. boundary_values: full-length
// vector read at boundary dofs, nullptr for the homogeneous case.
ReducedSystem impose_boundary(const SparseMatrix& a, const Eigen::VectorXd& b,
                              const DofMap& dofmap, const Eigen::VectorXd* boundary_values);

}  // namespace c0ip
