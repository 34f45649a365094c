#include "c0ip/assembly.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/Dense>

namespace c0ip {
namespace {

std::vector<Vec2> pull_back(const Mesh& mesh, int t, const std::vector<Vec2>& physical) {
  const auto& tri = mesh.triangle(t);
  Vec2 v0 = mesh.vertex(tri.v[0]);
  Eigen::Matrix2d bmat;
  bmat.col(0) = mesh.vertex(tri.v[1]) - v0;
  bmat.col(1) = mesh.vertex(tri.v[2]) - v0;
  Eigen::Matrix2d inv = bmat.inverse();
  std::vector<Vec2> ref(physical.size());
  for (std::size_t q = 0; q < physical.size(); ++q) ref[q] = inv * (physical[q] - v0);
  return ref;
}

}  // namespace

EdgeTraces edge_traces(const Mesh& mesh, const DofMap& dofmap, int e, const QuadRule& rule,
                       const Vec2& normal, int max_deriv) {
  const Edge& edge = mesh.edge(e);
  Vec2 a = mesh.vertex(edge.v[0]);
  Vec2 b = mesh.vertex(edge.v[1]);
  double len = (b - a).norm();
  int nq = static_cast<int>(rule.points.size());

  EdgeTraces tr;
  tr.weights.resize(nq);
  tr.points.resize(nq);
  for (int q = 0; q < nq; ++q) {
    double t = rule.points[q].x();
    tr.points[q] = a + t * (b - a);
    tr.weights[q] = rule.weights[q] * len;
  }

  // Order the sides so the first is the one the normal leaves; jumps below
  // subtract it from the entering side (the exterior, counted as zero, on
  // boundary edges), which makes them independent of the orientation handed
  // in. `leave_sign` tracks the boundary triangle's role instead.
  std::array<int, 2> side = edge.tri;
  Vec2 mid = mesh.edge_midpoint(e);
  const auto& tri0 = mesh.triangle(side[0]);
  Vec2 c0 = (mesh.vertex(tri0.v[0]) + mesh.vertex(tri0.v[1]) + mesh.vertex(tri0.v[2])) / 3.0;
  bool away_from_first = normal.dot(mid - c0) >= 0.0;
  double leave_sign = away_from_first ? -1.0 : 1.0;
  if (!edge.boundary && !away_from_first) std::swap(side[0], side[1]);

  tr.dofs.reserve(2 * dofmap.dofs_per_cell());
  std::vector<std::array<int, 10>> local_of_side;
  int n_sides = edge.boundary ? 1 : 2;
  for (int s = 0; s < n_sides; ++s) {
    const auto& cd = dofmap.cell_dofs[side[s]];
    std::array<int, 10> loc{};
    for (int i = 0; i < dofmap.dofs_per_cell(); ++i) {
      auto it = std::find(tr.dofs.begin(), tr.dofs.end(), cd[i]);
      if (it == tr.dofs.end()) {
        tr.dofs.push_back(cd[i]);
        loc[i] = static_cast<int>(tr.dofs.size()) - 1;
      } else {
        loc[i] = static_cast<int>(it - tr.dofs.begin());
      }
    }
    local_of_side.push_back(loc);
  }
  int nu = static_cast<int>(tr.dofs.size());

  tr.jump_dn = Eigen::MatrixXd::Zero(nq, nu);
  tr.mean_d2n = Eigen::MatrixXd::Zero(nq, nu);
  if (max_deriv >= 2) tr.jump_d2n = Eigen::MatrixXd::Zero(nq, nu);
  if (max_deriv >= 3) tr.jump_d3n = Eigen::MatrixXd::Zero(nq, nu);

  double mean_factor = edge.boundary ? 1.0 : 0.5;
  for (int s = 0; s < n_sides; ++s) {
    double sgn = edge.boundary ? leave_sign : (s == 0 ? -1.0 : 1.0);
    auto ref = pull_back(mesh, side[s], tr.points);
    BasisEval be = eval_basis(mesh, side[s], dofmap.degree, ref, std::max(2, max_deriv));
    for (int q = 0; q < nq; ++q) {
      for (int i = 0; i < be.n_basis; ++i) {
        int col = local_of_side[s][i];
        tr.jump_dn(q, col) += sgn * be.gr(q, i).dot(normal);
        const auto& h = be.he(q, i);
        double d2n = normal.x() * normal.x() * h[0] + 2.0 * normal.x() * normal.y() * h[1] +
                     normal.y() * normal.y() * h[2];
        tr.mean_d2n(q, col) += mean_factor * d2n;
        if (max_deriv >= 2) tr.jump_d2n(q, col) += sgn * d2n;
        if (max_deriv >= 3) {
          const auto& t3 = be.th(q, i);
          double nx = normal.x(), ny = normal.y();
          double d3n = t3[0] * nx * nx * nx + 3.0 * t3[1] * nx * nx * ny +
                       3.0 * t3[2] * nx * ny * ny + t3[3] * ny * ny * ny;
          tr.jump_d3n(q, col) += sgn * d3n;
        }
      }
    }
  }
  return tr;
}

Eigen::MatrixXd edge_stiffness_block(const Mesh& mesh, const DofMap& dofmap, int e, double sigma,
                                     const Vec2& normal, std::vector<int>& dofs) {
  const QuadRule& rule = edge_rule(2 * dofmap.degree);
  EdgeTraces tr = edge_traces(mesh, dofmap, e, rule, normal, 2);
  dofs = tr.dofs;
  int nu = static_cast<int>(tr.dofs.size());
  int nq = static_cast<int>(tr.weights.size());
  double pen = sigma / mesh.edge_length(e);
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(nu, nu);
  for (int q = 0; q < nq; ++q) {
    double w = tr.weights[q];
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j < nu; ++j) {
        block(i, j) += w * (tr.mean_d2n(q, i) * tr.jump_dn(q, j) +
                            tr.mean_d2n(q, j) * tr.jump_dn(q, i) +
                            pen * tr.jump_dn(q, i) * tr.jump_dn(q, j));
      }
    }
  }
  return block;
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const DofMap& dofmap, double sigma) {
  int k = dofmap.degree;
  int nb = dofmap.dofs_per_cell();
  const QuadRule& vol_rule = triangle_rule(2 * k);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.n_triangles()) * nb * nb * 3);

  std::vector<Vec2> ref_points(vol_rule.points.begin(), vol_rule.points.end());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    BasisEval be = eval_basis(mesh, t, k, ref_points, 2);
    double jac = 2.0 * mesh.area(t);
    const auto& cd = dofmap.cell_dofs[t];
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nb, nb);
    for (std::size_t q = 0; q < ref_points.size(); ++q) {
      double w = vol_rule.weights[q] * jac;
      for (int i = 0; i < nb; ++i) {
        const auto& hi = be.he(static_cast<int>(q), i);
        for (int j = 0; j < nb; ++j) {
          const auto& hj = be.he(static_cast<int>(q), j);
          local(i, j) += w * (hi[0] * hj[0] + 2.0 * hi[1] * hj[1] + hi[2] * hj[2]);
        }
      }
    }
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) triplets.emplace_back(cd[i], cd[j], local(i, j));
  }

  std::vector<int> dofs;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    Eigen::MatrixXd block = edge_stiffness_block(mesh, dofmap, e, sigma, mesh.unit_normal(e), dofs);
    int nu = static_cast<int>(dofs.size());
    for (int i = 0; i < nu; ++i)
      for (int j = 0; j < nu; ++j) triplets.emplace_back(dofs[i], dofs[j], block(i, j));
  }

  SparseMatrix a(dofmap.n_dofs, dofmap.n_dofs);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const DofMap& dofmap,
                              const std::function<double(const Vec2&)>& f) {
  int k = dofmap.degree;
  int nb = dofmap.dofs_per_cell();
  const QuadRule& rule = triangle_rule(std::min(12, 2 * k + 2));
  std::vector<Vec2> ref_points(rule.points.begin(), rule.points.end());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dofmap.n_dofs);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    Vec2 v0 = mesh.vertex(tri.v[0]);
    Vec2 d1 = mesh.vertex(tri.v[1]) - v0;
    Vec2 d2 = mesh.vertex(tri.v[2]) - v0;
    BasisEval be = eval_basis(mesh, t, k, ref_points, 0);
    double jac = 2.0 * mesh.area(t);
    const auto& cd = dofmap.cell_dofs[t];
    for (std::size_t q = 0; q < ref_points.size(); ++q) {
      Vec2 p = v0 + ref_points[q].x() * d1 + ref_points[q].y() * d2;
      double w = rule.weights[q] * jac * f(p);
      for (int i = 0; i < nb; ++i) b(cd[i]) += w * be.val(static_cast<int>(q), i);
    }
  }
  return b;
}

Eigen::VectorXd boundary_load_edge(const Mesh& mesh, const DofMap& dofmap, int e, double sigma,
                                   const Vec2& normal, const std::function<Vec2(const Vec2&)>& grad_u,
                                   std::vector<int>& dofs) {
  const QuadRule& rule = edge_rule(2 * dofmap.degree + 2);
  EdgeTraces tr = edge_traces(mesh, dofmap, e, rule, normal, 2);
  dofs = tr.dofs;
  double pen = sigma / mesh.edge_length(e);
  int nu = static_cast<int>(tr.dofs.size());
  Eigen::VectorXd contrib = Eigen::VectorXd::Zero(nu);
  for (std::size_t q = 0; q < tr.weights.size(); ++q) {
    // the boundary jump of the exact field is -grad u . n with n outward
    double g = -grad_u(tr.points[q]).dot(normal);
    double w = tr.weights[q] * g;
    for (int i = 0; i < nu; ++i)
      contrib(i) +=
          w * (tr.mean_d2n(static_cast<int>(q), i) + pen * tr.jump_dn(static_cast<int>(q), i));
  }
  return contrib;
}

Eigen::VectorXd assemble_boundary_load(const Mesh& mesh, const DofMap& dofmap, double sigma,
                                       const std::function<Vec2(const Vec2&)>& grad_u) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dofmap.n_dofs);
  std::vector<int> dofs;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (!mesh.edge(e).boundary) continue;
    Eigen::VectorXd contrib =
        boundary_load_edge(mesh, dofmap, e, sigma, mesh.unit_normal(e), grad_u, dofs);
    for (std::size_t i = 0; i < dofs.size(); ++i) b(dofs[i]) += contrib(static_cast<int>(i));
  }
  return b;
}

Eigen::VectorXd ReducedSystem::to_full(const Eigen::VectorXd& x) const {
  if (x.size() != static_cast<Eigen::Index>(free_to_full.size()))
    throw std::invalid_argument("to_full: size mismatch");
  Eigen::VectorXd full = fixed;
  for (std::size_t i = 0; i < free_to_full.size(); ++i) full(free_to_full[i]) = x(i);
  return full;
}

ReducedSystem impose_boundary(const SparseMatrix& a, const Eigen::VectorXd& b,
                              const DofMap& dofmap, const Eigen::VectorXd* boundary_values) {
  int n = dofmap.n_dofs;
  if (a.rows() != n || a.cols() != n || b.size() != n)
    throw std::invalid_argument("impose_boundary: dimension mismatch");

  ReducedSystem sys;
  sys.full_to_free.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (!dofmap.boundary[i]) {
      sys.full_to_free[i] = static_cast<int>(sys.free_to_full.size());
      sys.free_to_full.push_back(i);
    }
  }
  int nf = static_cast<int>(sys.free_to_full.size());

  sys.fixed = Eigen::VectorXd::Zero(n);
  if (boundary_values) {
    if (boundary_values->size() != n)
      throw std::invalid_argument("impose_boundary: boundary values size mismatch");
    for (int i = 0; i < n; ++i)
      if (dofmap.boundary[i]) sys.fixed(i) = (*boundary_values)(i);
  }

  Eigen::VectorXd shift = a * sys.fixed;
  sys.rhs.resize(nf);
  for (int i = 0; i < nf; ++i) sys.rhs(i) = b(sys.free_to_full[i]) - shift(sys.free_to_full[i]);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (int col = 0; col < a.outerSize(); ++col) {
    int fc = sys.full_to_free[col];
    if (fc < 0) continue;
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      int fr = sys.full_to_free[it.row()];
      if (fr >= 0) triplets.emplace_back(fr, fc, it.value());
    }
  }
  sys.matrix.resize(nf, nf);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

}  // namespace c0ip
