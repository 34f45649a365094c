#pragma once

#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace c0ip {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct SolveReport {
  Eigen::VectorXd x;
  double rel_residual = 0.0;
  int iterations = 0;        // 0 for the direct path
  std::string method;        // "llt" or "cg"
};

// Sparse SPD solve: Cholesky up to a size cutoff, diagonally preconditioned
// conjugate gradients beyond it. Throws std::runtime_error when the matrix is
// not SPD or the tolerance cannot be met. Deterministic for identical inputs.
SolveReport solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b, double tol = 1e-10,
                      int direct_limit = 300000);

}  // namespace c0ip
