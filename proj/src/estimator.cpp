#include "c0ip/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "c0ip/assembly.hpp"
#include "c0ip/quadrature.hpp"

namespace c0ip {

namespace {

int estimator_quad_degree(int degree) { return std::max(2 * degree, 6); }

// L2 norms of the normal-derivative jumps of order 1..3 on every edge.
// Boundary edges: the first-order jump is one-sided; with exact data the
// exact normal derivative is added so the slot holds the data mismatch.
// Higher-order jumps are zeroed on boundary edges.
struct EdgeJumpNorms {
  Eigen::VectorXd j1, j2, j3;
};

EdgeJumpNorms edge_jump_norms(const Mesh& mesh, const DofMap& dofmap,
                              const Eigen::VectorXd& coeffs, const ExactSolution* exact) {
  const QuadRule& rule = edge_rule(estimator_quad_degree(dofmap.degree));
  EdgeJumpNorms norms;
  norms.j1 = Eigen::VectorXd::Zero(mesh.n_edges());
  norms.j2 = Eigen::VectorXd::Zero(mesh.n_edges());
  norms.j3 = Eigen::VectorXd::Zero(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    Vec2 normal = mesh.unit_normal(e);
    EdgeTraces tr = edge_traces(mesh, dofmap, e, rule, normal, 3);
    Eigen::VectorXd local(static_cast<int>(tr.dofs.size()));
    for (int i = 0; i < local.size(); ++i) local[i] = coeffs[tr.dofs[i]];
    bool boundary = mesh.edge(e).boundary;
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (int q = 0; q < static_cast<int>(tr.points.size()); ++q) {
      double w = tr.weights[q];
      double v1 = tr.jump_dn.row(q).dot(local);
      if (boundary && exact) v1 += exact->gradient(tr.points[q]).dot(normal);
      s1 += w * v1 * v1;
      if (!boundary) {
        double v2 = tr.jump_d2n.row(q).dot(local);
        double v3 = tr.jump_d3n.row(q).dot(local);
        s2 += w * v2 * v2;
        s3 += w * v3 * v3;
      }
    }
    norms.j1[e] = std::sqrt(s1);
    norms.j2[e] = std::sqrt(s2);
    norms.j3[e] = std::sqrt(s3);
  }
  return norms;
}

}  // namespace

EstimatorReport estimate(const Mesh& mesh, const DofMap& dofmap, const Eigen::VectorXd& coeffs,
                         const std::function<double(const Vec2&)>& f, double sigma,
                         const ExactSolution* exact) {
  if (dofmap.degree > 3)
    throw std::invalid_argument("estimate: element residual needs the bilaplacian for degree > 3");
  EstimatorReport rep;
  EdgeJumpNorms jumps = edge_jump_norms(mesh, dofmap, coeffs, exact);
  rep.eta_e1 = Eigen::VectorXd::Zero(mesh.n_edges());
  rep.eta_e2 = Eigen::VectorXd::Zero(mesh.n_edges());
  rep.eta_e3 = Eigen::VectorXd::Zero(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    double len = mesh.edge_length(e);
    rep.eta_e1[e] = sigma / std::sqrt(len) * jumps.j1[e];
    rep.eta_e2[e] = std::sqrt(len) * jumps.j2[e];
    rep.eta_e3[e] = len * std::sqrt(len) * jumps.j3[e];
  }

  // For degree <= 3 the broken bilaplacian of the discrete solution vanishes,
  // so the element residual only sees the load.
  const QuadRule& rule = triangle_rule(estimator_quad_degree(dofmap.degree));
  rep.eta_T = Eigen::VectorXd::Zero(mesh.n_triangles());
  rep.osc_T = Eigen::VectorXd::Zero(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    double jac = 2.0 * mesh.area(t);
    Vec2 v0 = mesh.vertex(mesh.triangle(t).v[0]);
    Vec2 v1 = mesh.vertex(mesh.triangle(t).v[1]);
    Vec2 v2 = mesh.vertex(mesh.triangle(t).v[2]);
    double int_f = 0.0, int_f2 = 0.0;
    for (int q = 0; q < static_cast<int>(rule.points.size()); ++q) {
      Vec2 r = rule.points[q];
      Vec2 p = v0 + r[0] * (v1 - v0) + r[1] * (v2 - v0);
      double w = rule.weights[q] * jac;
      double fv = f(p);
      int_f += w * fv;
      int_f2 += w * fv * fv;
    }
    double h2 = mesh.h_T(t) * mesh.h_T(t);
    rep.eta_T[t] = h2 * std::sqrt(std::max(0.0, int_f2));
    double dev2 = int_f2 - int_f * int_f / mesh.area(t);
    rep.osc_T[t] = h2 * std::sqrt(std::max(0.0, dev2));
  }

  double total2 = rep.eta_T.squaredNorm();
  for (int e = 0; e < mesh.n_edges(); ++e) total2 += rep.edge_total2(e);
  rep.eta = std::sqrt(total2);
  rep.osc = rep.osc_T.norm();
  return rep;
}

double q1(const Mesh& mesh, const DofMap& dofmap, const Eigen::VectorXd& coeffs,
          const ExactSolution* exact) {
  EdgeJumpNorms jumps = edge_jump_norms(mesh, dofmap, coeffs, exact);
  double worst = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    double sum = 0.0;
    for (int e : mesh.edge_star(t)) sum += jumps.j1[e] / std::sqrt(mesh.edge_length(e));
    worst = std::max(worst, mesh.h_T(t) * sum);
  }
  return std::sqrt(worst);
}

double q2(const Mesh& mesh, const DofMap& dofmap, const Eigen::VectorXd& coeffs,
          const std::function<double(const Vec2&)>& psi) {
  double worst = 0.0;
  for (int i = 0; i < dofmap.n_dofs; ++i)
    worst = std::max(worst, psi(dofmap.node[i]) - coeffs[i]);

  // Six interior sample points per triangle: the barycentric permutations of
  // (3,1,1)/5 and (2,2,1)/5.
  static const std::array<Vec2, 6> lattice = {
      Vec2(0.2, 0.2), Vec2(0.6, 0.2), Vec2(0.2, 0.6),
      Vec2(0.4, 0.4), Vec2(0.4, 0.2), Vec2(0.2, 0.4)};
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    BasisEval be = eval_basis(mesh, t, dofmap.degree, lattice, 0);
    Vec2 v0 = mesh.vertex(mesh.triangle(t).v[0]);
    Vec2 v1 = mesh.vertex(mesh.triangle(t).v[1]);
    Vec2 v2 = mesh.vertex(mesh.triangle(t).v[2]);
    const auto& cell = dofmap.cell_dofs[t];
    for (int q = 0; q < static_cast<int>(lattice.size()); ++q) {
      Vec2 p = v0 + lattice[q][0] * (v1 - v0) + lattice[q][1] * (v2 - v0);
      double uh = 0.0;
      for (int i = 0; i < dofmap.dofs_per_cell(); ++i) uh += coeffs[cell[i]] * be.val(q, i);
      worst = std::max(worst, psi(p) - uh);
    }
  }
  return std::sqrt(std::max(0.0, worst));
}

double lambda_gap(double prev_mass, double cur_mass) {
  return std::abs(std::abs(prev_mass) - std::abs(cur_mass));
}

double reliability_bound(double c_const, double eta, double q1_value, double q2_value,
                         double lambda_mass) {
  double root = std::sqrt(std::abs(lambda_mass));
  return c_const * (eta + root * q1_value) + root * q2_value;
}

double error_norm_exact(const Mesh& mesh, const DofMap& dofmap, const Eigen::VectorXd& coeffs,
                        const ExactSolution& u, double sigma) {
  int qdeg = estimator_quad_degree(dofmap.degree);
  const QuadRule& vrule = triangle_rule(qdeg);
  double total = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    BasisEval be = eval_basis(mesh, t, dofmap.degree, vrule.points, 2);
    double jac = 2.0 * mesh.area(t);
    Vec2 v0 = mesh.vertex(mesh.triangle(t).v[0]);
    Vec2 v1 = mesh.vertex(mesh.triangle(t).v[1]);
    Vec2 v2 = mesh.vertex(mesh.triangle(t).v[2]);
    const auto& cell = dofmap.cell_dofs[t];
    for (int q = 0; q < static_cast<int>(vrule.points.size()); ++q) {
      Vec2 r = vrule.points[q];
      Vec2 p = v0 + r[0] * (v1 - v0) + r[1] * (v2 - v0);
      std::array<double, 3> d = u.hessian(p);
      for (int i = 0; i < dofmap.dofs_per_cell(); ++i) {
        const std::array<double, 3>& h = be.he(q, i);
        double c = coeffs[cell[i]];
        d[0] -= c * h[0];
        d[1] -= c * h[1];
        d[2] -= c * h[2];
      }
      total += vrule.weights[q] * jac * (d[0] * d[0] + 2.0 * d[1] * d[1] + d[2] * d[2]);
    }
  }

  const QuadRule& erule = edge_rule(qdeg);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    Vec2 normal = mesh.unit_normal(e);
    EdgeTraces tr = edge_traces(mesh, dofmap, e, erule, normal, 1);
    Eigen::VectorXd local(static_cast<int>(tr.dofs.size()));
    for (int i = 0; i < local.size(); ++i) local[i] = coeffs[tr.dofs[i]];
    bool boundary = mesh.edge(e).boundary;
    double s = 0.0;
    for (int q = 0; q < static_cast<int>(tr.points.size()); ++q) {
      // Interior edges: the exact gradient jump vanishes, so the jump of the
      // error is minus the discrete jump and only the magnitude matters.
      double v = tr.jump_dn.row(q).dot(local);
      if (boundary) v += u.gradient(tr.points[q]).dot(normal);
      s += tr.weights[q] * v * v;
    }
    total += sigma / mesh.edge_length(e) * s;
  }
  return std::sqrt(total);
}

double error_norm_reference(const Mesh& coarse, const DofMap& coarse_dofmap,
                            const Eigen::VectorXd& coarse_coeffs, const Mesh& fine,
                            const DofMap& fine_dofmap, const Eigen::VectorXd& fine_coeffs,
                            double sigma) {
  FieldEvaluator uc(coarse, coarse_dofmap, coarse_coeffs);

  // Nested-mesh check: every fine triangle must sit inside one coarse
  // triangle. The containing triangle is found geometrically so the fine mesh
  // may be any refinement of the coarse one.
  for (int t = 0; t < fine.n_triangles(); ++t) {
    Vec2 c = (fine.vertex(fine.triangle(t).v[0]) + fine.vertex(fine.triangle(t).v[1]) +
              fine.vertex(fine.triangle(t).v[2])) /
             3.0;
    int host = uc.locate(c);
    Vec2 a = coarse.vertex(coarse.triangle(host).v[0]);
    Eigen::Matrix2d b;
    b.col(0) = coarse.vertex(coarse.triangle(host).v[1]) - a;
    b.col(1) = coarse.vertex(coarse.triangle(host).v[2]) - a;
    double tol = 1e-9 * fine.h_T(t);
    for (int k = 0; k < 3; ++k) {
      Vec2 r = b.inverse() * (fine.vertex(fine.triangle(t).v[k]) - a);
      if (r[0] < -tol || r[1] < -tol || r[0] + r[1] > 1.0 + tol)
        throw std::invalid_argument("error_norm_reference: meshes are not nested");
    }
  }

  int qdeg = estimator_quad_degree(std::max(coarse_dofmap.degree, fine_dofmap.degree));
  const QuadRule& vrule = triangle_rule(qdeg);
  double total = 0.0;
  for (int t = 0; t < fine.n_triangles(); ++t) {
    BasisEval be = eval_basis(fine, t, fine_dofmap.degree, vrule.points, 2);
    double jac = 2.0 * fine.area(t);
    Vec2 v0 = fine.vertex(fine.triangle(t).v[0]);
    Vec2 v1 = fine.vertex(fine.triangle(t).v[1]);
    Vec2 v2 = fine.vertex(fine.triangle(t).v[2]);
    const auto& cell = fine_dofmap.cell_dofs[t];
    for (int q = 0; q < static_cast<int>(vrule.points.size()); ++q) {
      Vec2 r = vrule.points[q];
      Vec2 p = v0 + r[0] * (v1 - v0) + r[1] * (v2 - v0);
      std::array<double, 3> d = uc(p).hess;
      for (int i = 0; i < fine_dofmap.dofs_per_cell(); ++i) {
        const std::array<double, 3>& h = be.he(q, i);
        double c = fine_coeffs[cell[i]];
        d[0] -= c * h[0];
        d[1] -= c * h[1];
        d[2] -= c * h[2];
      }
      total += vrule.weights[q] * jac * (d[0] * d[0] + 2.0 * d[1] * d[1] + d[2] * d[2]);
    }
  }

  // Jumps live on the coarse edges. The coarse side comes from edge traces;
  // the fine side is sampled just off the edge on both sides since the point
  // may lie on a fine edge. A composite rule keeps the fine-side breakpoints
  // inside quadrature subintervals.
  FieldEvaluator uf(fine, fine_dofmap, fine_coeffs);
  const QuadRule& gauss = edge_rule(7);  // 4 points on [0,1]
  constexpr int kPieces = 8;
  QuadRule composite;
  composite.degree = gauss.degree;
  for (int s = 0; s < kPieces; ++s)
    for (int q = 0; q < static_cast<int>(gauss.points.size()); ++q) {
      composite.points.emplace_back((s + gauss.points[q][0]) / kPieces, 0.0);
      composite.weights.push_back(gauss.weights[q] / kPieces);
    }
  for (int e = 0; e < coarse.n_edges(); ++e) {
    Vec2 normal = coarse.unit_normal(e);
    EdgeTraces tr = edge_traces(coarse, coarse_dofmap, e, composite, normal, 1);
    Eigen::VectorXd local(static_cast<int>(tr.dofs.size()));
    for (int i = 0; i < local.size(); ++i) local[i] = coarse_coeffs[tr.dofs[i]];
    bool boundary = coarse.edge(e).boundary;
    double len = coarse.edge_length(e);
    double delta = 1e-10 * len;
    double s = 0.0;
    for (int q = 0; q < static_cast<int>(tr.points.size()); ++q) {
      double jump_c = tr.jump_dn.row(q).dot(local);
      Vec2 p = tr.points[q];
      double jump_f;
      if (boundary) {
        // One-sided jump from the interior side; the boundary normal points
        // outward, matching the sign tr.jump_dn uses for the coarse trace.
        jump_f = -uf(p - delta * normal, 1).grad.dot(normal);
      } else {
        jump_f = (uf(p + delta * normal, 1).grad - uf(p - delta * normal, 1).grad).dot(normal);
      }
      double v = jump_f - jump_c;
      s += tr.weights[q] * v * v;
    }
    total += sigma / len * s;
  }
  return std::sqrt(total);
}

}  // namespace c0ip
