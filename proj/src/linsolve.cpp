#include "c0ip/linsolve.hpp"

#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

namespace c0ip {

SolveReport solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b, double tol,
                      int direct_limit) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw std::invalid_argument("solve_spd: dimension mismatch");

  SolveReport rep;
  if (b.size() == 0) {
    rep.method = "llt";
    rep.x.resize(0);
    return rep;
  }

  double bnorm = b.norm();
  if (a.rows() <= direct_limit) {
    Eigen::SimplicialLLT<SparseMatrix> llt(a);
    if (llt.info() == Eigen::Success) {
      rep.x = llt.solve(b);
      rep.method = "llt";
      rep.rel_residual = bnorm > 0.0 ? (a * rep.x - b).norm() / bnorm : 0.0;
      if (rep.rel_residual <= std::max(tol, 1e-8)) return rep;
    }
    // fall through to CG when the factorization failed or lost too much
    // accuracy; CG will reject genuinely indefinite matrices below
  }

  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(20 * a.rows());
  cg.compute(a);
  if (cg.info() != Eigen::Success) throw std::runtime_error("solve_spd: preconditioner failed");
  rep.x = cg.solve(b);
  rep.iterations = static_cast<int>(cg.iterations());
  rep.method = "cg";
  rep.rel_residual = bnorm > 0.0 ? (a * rep.x - b).norm() / bnorm : 0.0;
  if (!rep.x.allFinite() || rep.rel_residual > std::max(tol * 10.0, 1e-8))
    throw std::runtime_error("solve_spd: matrix not SPD or iteration exhausted");
  return rep;
}

}  // namespace c0ip
