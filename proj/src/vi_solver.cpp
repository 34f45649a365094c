#include "c0ip/vi_solver.hpp"

#include <set>
#include <stdexcept>

#include "c0ip/linsolve.hpp"

namespace c0ip {
namespace {

// Solve with x pinned to psi on the active constrained dofs. Extraction
// preserves the stored order of A, so an empty active set reproduces the
// plain solve_spd call bitwise.
Eigen::VectorXd constrained_solve(const SparseMatrix& a, const Eigen::VectorXd& b,
                                  const std::vector<int>& constrained, const Eigen::VectorXd& psi,
                                  const std::vector<bool>& active, double tol) {
  int n = static_cast<int>(a.rows());
  std::vector<int> full_to_free(n, 0);
  Eigen::VectorXd pinned = Eigen::VectorXd::Zero(n);
  for (std::size_t p = 0; p < constrained.size(); ++p) {
    if (active[p]) {
      full_to_free[constrained[p]] = -1;
      pinned(constrained[p]) = psi(static_cast<int>(p));
    }
  }
  std::vector<int> free_to_full;
  free_to_full.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (full_to_free[i] == 0) {
      full_to_free[i] = static_cast<int>(free_to_full.size());
      free_to_full.push_back(i);
    }
  }
  int nf = static_cast<int>(free_to_full.size());

  Eigen::VectorXd shift = a * pinned;
  Eigen::VectorXd rhs(nf);
  for (int i = 0; i < nf; ++i) rhs(i) = b(free_to_full[i]) - shift(free_to_full[i]);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (int col = 0; col < a.outerSize(); ++col) {
    int fc = full_to_free[col];
    if (fc < 0) continue;
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      int fr = full_to_free[it.row()];
      if (fr >= 0) triplets.emplace_back(fr, fc, it.value());
    }
  }
  SparseMatrix red(nf, nf);
  red.setFromTriplets(triplets.begin(), triplets.end());
  red.makeCompressed();

  SolveReport rep = solve_spd(red, rhs, tol);
  Eigen::VectorXd x = pinned;
  for (int i = 0; i < nf; ++i) x(free_to_full[i]) = rep.x(i);
  return x;
}

}  // namespace

PdasResult pdas(const SparseMatrix& a, const Eigen::VectorXd& b,
                const std::vector<int>& constrained, const Eigen::VectorXd& psi,
                const PdasOptions& opts) {
  int n = static_cast<int>(a.rows());
  int m = static_cast<int>(constrained.size());
  if (psi.size() != m) throw std::invalid_argument("pdas: psi size mismatch");
  for (int g : constrained)
    if (g < 0 || g >= n) throw std::invalid_argument("pdas: constrained dof out of range");

  double c = 0.0;
  for (int i = 0; i < n; ++i) c = std::max(c, a.coeff(i, i));
  c *= opts.c_scale;

  PdasResult res;
  res.lambda = opts.lambda0.value_or(Eigen::VectorXd::Zero(m));
  if (res.lambda.size() != m) throw std::invalid_argument("pdas: lambda0 size mismatch");

  std::vector<bool> last_active;
  bool has_last = false;
  if (opts.x0) {
    if (opts.x0->size() != n) throw std::invalid_argument("pdas: x0 size mismatch");
    res.x = *opts.x0;
  } else {
    // the unconstrained solve doubles as the empty-active-set sweep
    res.x = solve_spd(a, b, opts.solver_tol).x;
    res.lambda = Eigen::VectorXd::Zero(m);
    res.iterations = 1;
    last_active.assign(m, false);
    has_last = true;
  }

  std::set<std::vector<bool>> visited;
  if (has_last) visited.insert(last_active);

  while (true) {
    std::vector<bool> active(m);
    for (int p = 0; p < m; ++p)
      active[p] = res.lambda(p) + c * (psi(p) - res.x(constrained[p])) > 0.0;

    if (has_last && active == last_active) {
      res.active = active;
      return res;
    }
    if (visited.count(active)) {
      res.active = active;
      res.cycled = true;
      return res;
    }
    if (res.iterations >= opts.max_iterations)
      throw std::runtime_error("pdas: iteration limit exceeded");

    res.x = constrained_solve(a, b, constrained, psi, active, opts.solver_tol);
    Eigen::VectorXd residual = a * res.x - b;
    for (int p = 0; p < m; ++p) res.lambda(p) = active[p] ? residual(constrained[p]) : 0.0;
    ++res.iterations;
    visited.insert(active);
    last_active = active;
    has_last = true;
  }
}

DiscreteSolution solve_obstacle(const ReducedSystem& sys, const DofMap& dofmap,
                                const std::function<double(const Vec2&)>& psi,
                                const PdasOptions& opts) {
  DiscreteSolution sol;
  std::vector<int> constrained;
  constrained.reserve(dofmap.interior_vertices.size());
  sol.constrained_dofs = dofmap.interior_vertices;
  Eigen::VectorXd psi_vals(static_cast<int>(dofmap.interior_vertices.size()));
  for (std::size_t p = 0; p < dofmap.interior_vertices.size(); ++p) {
    int full = dofmap.interior_vertices[p];
    int red = sys.full_to_free[full];
    if (red < 0) throw std::invalid_argument("solve_obstacle: constrained dof not free");
    constrained.push_back(red);
    psi_vals(static_cast<int>(p)) = psi(dofmap.node[full]);
  }

  PdasResult res = pdas(sys.matrix, sys.rhs, constrained, psi_vals, opts);
  sol.coeffs = sys.to_full(res.x);
  sol.lambda = res.lambda;
  sol.active = res.active;
  sol.pdas_iterations = res.iterations;
  sol.cycled = res.cycled;
  return sol;
}

KktReport complementarity_report(const SparseMatrix& a, const Eigen::VectorXd& b,
                                 const std::vector<int>& constrained, const Eigen::VectorXd& psi,
                                 const PdasResult& result) {
  KktReport rep;
  Eigen::VectorXd residual = a * result.x - b;
  int m = static_cast<int>(constrained.size());
  for (int p = 0; p < m; ++p) {
    double gap = result.x(constrained[p]) - psi(p);
    rep.max_infeasibility = std::max(rep.max_infeasibility, -gap);
    rep.max_negative_lambda = std::max(rep.max_negative_lambda, -result.lambda(p));
    rep.complementarity += result.lambda(p) * gap;
    residual(constrained[p]) -= result.lambda(p);
  }
  // Normwise backward error: ||b||-relative residuals are meaningless here
  // because ||A||*||x|| dwarfs ||b|| on fine fourth-order systems (and b may
  // vanish entirely), so scale by the full data instead.
  double anorm = 0.0;  // infinity norm = max absolute row sum
  {
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(a.rows());
    for (int k = 0; k < a.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(a, k); it; ++it)
        row_sums(it.row()) += std::abs(it.value());
    if (a.rows() > 0) anorm = row_sums.maxCoeff();
  }
  double xnorm = result.x.size() > 0 ? result.x.lpNorm<Eigen::Infinity>() : 0.0;
  double lnorm = result.lambda.size() > 0 ? result.lambda.lpNorm<Eigen::Infinity>() : 0.0;
  double bnorm = b.size() > 0 ? b.lpNorm<Eigen::Infinity>() : 0.0;
  double scale = anorm * xnorm + bnorm + lnorm;
  double rnorm = residual.size() > 0 ? residual.lpNorm<Eigen::Infinity>() : 0.0;
  rep.stationarity = scale > 0.0 ? rnorm / scale : rnorm;
  return rep;
}

}  // namespace c0ip
