#pragma once

#include <array>
#include <functional>

#include <Eigen/Core>

#include "c0ip/mesh.hpp"
#include "c0ip/space.hpp"

namespace c0ip {

// Exact solution data for benchmark problems with inhomogeneous boundary
// values. Hessian components are ordered xx, xy, yy.
struct ExactSolution {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;
  std::function<std::array<double, 3>(const Vec2&)> hessian;
};

// Residual estimator split into its per-edge and per-element pieces.
// eta_e1 holds the scaled gradient-jump terms; on boundary edges it measures
// the mismatch against the boundary data (the one-sided jump when no exact
// solution is supplied). eta_e2 and eta_e3 are the second- and third-normal-
// derivative jumps on interior edges and zero on boundary edges. eta_T is the
// element residual and osc_T the data oscillation.
struct EstimatorReport {
  Eigen::VectorXd eta_e1;
  Eigen::VectorXd eta_e2;
  Eigen::VectorXd eta_e3;
  Eigen::VectorXd eta_T;
  Eigen::VectorXd osc_T;
  double eta = 0.0;
  double osc = 0.0;
  double edge_total2(int e) const {
    return eta_e1[e] * eta_e1[e] + eta_e2[e] * eta_e2[e] + eta_e3[e] * eta_e3[e];
  }
};

EstimatorReport estimate(const Mesh& mesh, const DofMap& dofmap, const Eigen::VectorXd& coeffs,
                         const std::function<double(const Vec2&)>& f, double sigma,
                         const ExactSolution* exact = nullptr);

// Contact-zone indicator built from the scaled gradient jumps accumulated
// over edge stars, and the maximal obstacle violation sampled at the Lagrange
// nodes plus six interior points per triangle.
double q1(const Mesh& mesh, const DofMap& dofmap, const Eigen::VectorXd& coeffs,
          const ExactSolution* exact = nullptr);
double q2(const Mesh& mesh, const DofMap& dofmap, const Eigen::VectorXd& coeffs,
          const std::function<double(const Vec2&)>& psi);

// |lambda| gap between consecutive levels and the computable reliability
// bound C * (eta + sqrt(|lambda|) * Q1) + sqrt(|lambda|) * Q2.
double lambda_gap(double prev_mass, double cur_mass);
double reliability_bound(double c_const, double eta, double q1_value, double q2_value,
                         double lambda_mass);

// Mesh-dependent energy error: broken H2 seminorm plus the penalized gradient
// jumps (boundary edges measure the mismatch against the exact data).
double error_norm_exact(const Mesh& mesh, const DofMap& dofmap, const Eigen::VectorXd& coeffs,
                        const ExactSolution& u, double sigma);

// Same norm against a reference solution on a uniformly refined mesh. The
// fine mesh must be nested in the coarse one; jumps are taken on coarse edges
// and the penalty uses the coarse edge lengths.
double error_norm_reference(const Mesh& coarse, const DofMap& coarse_dofmap,
                            const Eigen::VectorXd& coarse_coeffs, const Mesh& fine,
                            const DofMap& fine_dofmap, const Eigen::VectorXd& fine_coeffs,
                            double sigma);

}  // namespace c0ip
