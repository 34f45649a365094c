#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "c0ip/assembly.hpp"
#include "c0ip/space.hpp"

namespace c0ip {

struct PdasOptions {
  double c_scale = 100.0;   // active-set weight c = c_scale * max diagonal of A
  int max_iterations = 100;
  double solver_tol = 1e-10;
  std::optional<Eigen::VectorXd> x0;       // warm start, size of the system
  std::optional<Eigen::VectorXd> lambda0;  // warm start, size of `constrained`
};

struct PdasResult {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;   // one entry per constrained dof, >= 0 where active
  std::vector<bool> active;
  int iterations = 0;       // number of constrained solves
  bool cycled = false;      // a non-consecutive active set repeated
};

// Primal-dual active set iteration for the complementarity system
//   A x = b + lambda,  x >= psi on the constrained dofs,
//   lambda >= 0 supported on the constrained dofs, lambda (x - psi) = 0.
// Each sweep fixes x = psi on A = {p : lambda_p + c (psi_p - x_p) > 0},
// solves the remaining SPD block, and recovers lambda = (A x - b) on A;
// consecutive repetition of the active set is the exact KKT certificate.
// Starts from the unconstrained solve when no warm start is given, so an
// inactive obstacle terminates after one sweep with the unconstrained result.
PdasResult pdas(const SparseMatrix& a, const Eigen::VectorXd& b,
                const std::vector<int>& constrained, const Eigen::VectorXd& psi,
                const PdasOptions& opts = {});

struct DiscreteSolution {
  Eigen::VectorXd coeffs;            // full dof vector, boundary values included
  std::vector<int> constrained_dofs; // interior vertex dofs
  Eigen::VectorXd lambda;            // multiplier per constrained dof
  std::vector<bool> active;
  int pdas_iterations = 0;
  bool cycled = false;

  double lambda_mass() const { return lambda.sum(); }
};

// Solves the discrete obstacle problem on a boundary-reduced system: the
// obstacle constrains the interior vertex dofs at their nodes.
DiscreteSolution solve_obstacle(const ReducedSystem& sys, const DofMap& dofmap,
                                const std::function<double(const Vec2&)>& psi,
                                const PdasOptions& opts = {});

struct KktReport {
  double max_infeasibility = 0.0;   // max (psi - x)^+ over constrained dofs
  double max_negative_lambda = 0.0; // max (-lambda)^+
  double complementarity = 0.0;     // sum lambda_p (x_p - psi_p)
  double stationarity = 0.0;        // ||A x - b - lambda|| / (||A|| ||x|| + ||b|| + ||lambda||)
};
KktReport complementarity_report(const SparseMatrix& a, const Eigen::VectorXd& b,
                                 const std::vector<int>& constrained, const Eigen::VectorXd& psi,
                                 const PdasResult& result);

}  // namespace c0ip
