#include "c0ip/assembly.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "c0ip/linsolve.hpp"
#include "c0ip/mesh.hpp"
#include "c0ip/quadrature.hpp"
#include "c0ip/space.hpp"
#include "doctest.h"

using c0ip::DofMap;
using c0ip::Mesh;
using c0ip::Vec2;

namespace {

double powi(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// Independent oracle: per-triangle nodal basis expressed directly in physical
// monomials x^a y^b (no reference mapping), differentiated analytically.
struct PhysBasis {
  std::vector<std::array<int, 2>> powers;
  Eigen::MatrixXd coeff;  // column l: monomial coefficients of local basis l
};

PhysBasis make_phys_basis(const Mesh& mesh, const DofMap& dm, int t) {
  PhysBasis pb;
  for (int total = 0; total <= dm.degree; ++total)
    for (int a = total; a >= 0; --a) pb.powers.push_back({a, total - a});
  int nb = dm.dofs_per_cell();
  Eigen::MatrixXd vand(nb, nb);
  for (int l = 0; l < nb; ++l) {
    Vec2 p = dm.node[dm.cell_dofs[t][l]];
    for (int m = 0; m < nb; ++m)
      vand(l, m) = powi(p.x(), pb.powers[m][0]) * powi(p.y(), pb.powers[m][1]);
  }
  pb.coeff = vand.inverse();
  return pb;
}

double phys_eval(const PhysBasis& pb, int local, Vec2 p, int dx, int dy) {
  double s = 0.0;
  for (std::size_t m = 0; m < pb.powers.size(); ++m) {
    int a = pb.powers[m][0], b = pb.powers[m][1];
    if (a < dx || b < dy) continue;
    double f = pb.coeff(static_cast<int>(m), local);
    for (int i = 0; i < dx; ++i) f *= a - i;
    for (int i = 0; i < dy; ++i) f *= b - i;
    s += f * powi(p.x(), a - dx) * powi(p.y(), b - dy);
  }
  return s;
}

// Derivative of global basis i at p seen from triangle t; zero if i is not a
// dof of t.
double side_eval(const Mesh& mesh, const DofMap& dm, int t, int i, Vec2 p, int dx, int dy) {
  if (t < 0) return 0.0;
  const auto& cd = dm.cell_dofs[t];
  for (int l = 0; l < dm.dofs_per_cell(); ++l) {
    if (cd[l] == i) {
      PhysBasis pb = make_phys_basis(mesh, dm, t);
      return phys_eval(pb, l, p, dx, dy);
    }
  }
  return 0.0;
}

struct EdgeGeom {
  Vec2 a, b, n;
  double len;
  int enter, leave;  // triangle indices; enter = -1 on boundary (exterior)
};

EdgeGeom edge_geom(const Mesh& mesh, int e) {
  const auto& edge = mesh.edge(e);
  EdgeGeom g;
  g.a = mesh.vertex(edge.v[0]);
  g.b = mesh.vertex(edge.v[1]);
  Vec2 d = g.b - g.a;
  g.len = d.norm();
  g.n = Vec2(d.y(), -d.x()) / g.len;
  Vec2 mid = 0.5 * (g.a + g.b);
  auto centroid = [&](int t) {
    const auto& tri = mesh.triangle(t);
    return Vec2((mesh.vertex(tri.v[0]) + mesh.vertex(tri.v[1]) + mesh.vertex(tri.v[2])) / 3.0);
  };
  if (edge.boundary) {
    g.leave = edge.tri[0];
    g.enter = -1;
    if (g.n.dot(mid - centroid(g.leave)) < 0.0) g.n = -g.n;  // outward
  } else {
    g.leave = edge.tri[0];
    g.enter = edge.tri[1];
    if (g.n.dot(mid - centroid(g.leave)) < 0.0) std::swap(g.leave, g.enter);
  }
  return g;
}

// Brute-force a_h(phi_i, phi_j) over the whole mesh with the physical basis.
double oracle_ah(const Mesh& mesh, const DofMap& dm, double sigma, int i, int j) {
  double total = 0.0;
  const auto& vr = c0ip::triangle_rule(6);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& cd = dm.cell_dofs[t];
    bool has_i = false, has_j = false;
    for (int l = 0; l < dm.dofs_per_cell(); ++l) {
      has_i |= cd[l] == i;
      has_j |= cd[l] == j;
    }
    if (!has_i || !has_j) continue;
    const auto& tri = mesh.triangle(t);
    Vec2 v0 = mesh.vertex(tri.v[0]);
    Vec2 d1 = mesh.vertex(tri.v[1]) - v0;
    Vec2 d2 = mesh.vertex(tri.v[2]) - v0;
    double jac = 2.0 * mesh.area(t);
    for (std::size_t q = 0; q < vr.points.size(); ++q) {
      Vec2 p = v0 + vr.points[q].x() * d1 + vr.points[q].y() * d2;
      double w = vr.weights[q] * jac;
      double ixx = side_eval(mesh, dm, t, i, p, 2, 0);
      double ixy = side_eval(mesh, dm, t, i, p, 1, 1);
      double iyy = side_eval(mesh, dm, t, i, p, 0, 2);
      double jxx = side_eval(mesh, dm, t, j, p, 2, 0);
      double jxy = side_eval(mesh, dm, t, j, p, 1, 1);
      double jyy = side_eval(mesh, dm, t, j, p, 0, 2);
      total += w * (ixx * jxx + 2.0 * ixy * jxy + iyy * jyy);
    }
  }

  const auto& er = c0ip::edge_rule(12);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    EdgeGeom g = edge_geom(mesh, e);
    double pen = sigma / g.len;
    for (std::size_t q = 0; q < er.points.size(); ++q) {
      Vec2 p = g.a + er.points[q].x() * (g.b - g.a);
      double w = er.weights[q] * g.len;
      auto dn = [&](int t, int dof) {
        return g.n.x() * side_eval(mesh, dm, t, dof, p, 1, 0) +
               g.n.y() * side_eval(mesh, dm, t, dof, p, 0, 1);
      };
      auto d2n = [&](int t, int dof) {
        return g.n.x() * g.n.x() * side_eval(mesh, dm, t, dof, p, 2, 0) +
               2.0 * g.n.x() * g.n.y() * side_eval(mesh, dm, t, dof, p, 1, 1) +
               g.n.y() * g.n.y() * side_eval(mesh, dm, t, dof, p, 0, 2);
      };
      double half = g.enter < 0 ? 1.0 : 0.5;
      double jump_i = dn(g.enter, i) - dn(g.leave, i);
      double jump_j = dn(g.enter, j) - dn(g.leave, j);
      double mean_i = half * (d2n(g.enter, i) + d2n(g.leave, i));
      double mean_j = half * (d2n(g.enter, j) + d2n(g.leave, j));
      total += w * (mean_i * jump_j + mean_j * jump_i + pen * jump_i * jump_j);
    }
  }
  return total;
}

double max_abs(const c0ip::SparseMatrix& a) {
  double m = 0.0;
  for (int col = 0; col < a.outerSize(); ++col)
    for (c0ip::SparseMatrix::InnerIterator it(a, col); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

}  // namespace

TEST_CASE("stiffness annihilates constants and is symmetric") {
  struct Case {
    c0ip::Domain domain;
    int degree;
    double sigma;
  };
  for (Case c : {Case{c0ip::Domain::square, 2, 6.0}, Case{c0ip::Domain::square, 3, 18.0},
                 Case{c0ip::Domain::lshape, 2, 6.0}, Case{c0ip::Domain::lshape, 3, 18.0}}) {
    Mesh mesh = Mesh::initial(c.domain);
    DofMap dm = c0ip::build_dofmap(mesh, c.degree);
    c0ip::SparseMatrix a = c0ip::assemble_stiffness(mesh, dm, c.sigma);
    double scale = max_abs(a);
    CHECK(scale > 1.0);

    Eigen::VectorXd ones = Eigen::VectorXd::Ones(dm.n_dofs);
    CHECK((a * ones).lpNorm<Eigen::Infinity>() <= 1e-11 * scale);

    c0ip::SparseMatrix at = c0ip::SparseMatrix(a.transpose());
    c0ip::SparseMatrix diff = a - at;
    CHECK(max_abs(diff) <= 1e-12 * scale);
  }
}

TEST_CASE("penalty enters linearly in sigma") {
  Mesh mesh = Mesh::initial(c0ip::Domain::square).uniformly_refined();
  DofMap dm = c0ip::build_dofmap(mesh, 2);
  c0ip::SparseMatrix a0 = c0ip::assemble_stiffness(mesh, dm, 0.0);
  c0ip::SparseMatrix a1 = c0ip::assemble_stiffness(mesh, dm, 1.0);
  c0ip::SparseMatrix a6 = c0ip::assemble_stiffness(mesh, dm, 6.0);
  c0ip::SparseMatrix resid = a6 - a0 - 6.0 * (a1 - a0);
  CHECK(max_abs(resid) <= 1e-12 * max_abs(a6));
}

TEST_CASE("edge blocks do not depend on the normal orientation") {
  Mesh mesh = Mesh::initial(c0ip::Domain::lshape);
  DofMap dm = c0ip::build_dofmap(mesh, 2);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    Vec2 n = mesh.unit_normal(e);
    std::vector<int> dofs_p, dofs_m;
    Eigen::MatrixXd bp = c0ip::edge_stiffness_block(mesh, dm, e, 6.0, n, dofs_p);
    Eigen::MatrixXd bm = c0ip::edge_stiffness_block(mesh, dm, e, 6.0, Vec2(-n), dofs_m);
    std::map<std::pair<int, int>, double> mp, mm;
    for (std::size_t i = 0; i < dofs_p.size(); ++i)
      for (std::size_t j = 0; j < dofs_p.size(); ++j)
        mp[{dofs_p[i], dofs_p[j]}] = bp(static_cast<int>(i), static_cast<int>(j));
    for (std::size_t i = 0; i < dofs_m.size(); ++i)
      for (std::size_t j = 0; j < dofs_m.size(); ++j)
        mm[{dofs_m[i], dofs_m[j]}] = bm(static_cast<int>(i), static_cast<int>(j));
    REQUIRE(mp.size() == mm.size());
    double scale = std::max(1.0, bp.lpNorm<Eigen::Infinity>());
    for (const auto& [key, val] : mp) CHECK(std::abs(val - mm.at(key)) <= 1e-12 * scale);
  }
}

TEST_CASE("matrix entries match a physical-monomial oracle") {
  SUBCASE("quadratic on the square") {
    Mesh mesh = Mesh::initial(c0ip::Domain::square);
    DofMap dm = c0ip::build_dofmap(mesh, 2);
    double sigma = 6.0;
    c0ip::SparseMatrix a = c0ip::assemble_stiffness(mesh, dm, sigma);
    Eigen::MatrixXd ad = Eigen::MatrixXd(a);
    double scale = max_abs(a);

    // union of the two triangles adjacent to the diagonal edge of the cell
    // [-0.25,0]^2, whose five edges are all interior
    int target = -1;
    for (int e = 0; e < mesh.n_edges(); ++e) {
      Vec2 lo = mesh.vertex(mesh.edge(e).v[0]);
      Vec2 hi = mesh.vertex(mesh.edge(e).v[1]);
      if ((lo - Vec2(-0.25, -0.25)).norm() < 1e-12 && hi.norm() < 1e-12) target = e;
    }
    REQUIRE(target >= 0);
    REQUIRE(!mesh.edge(target).boundary);
    std::vector<int> dofs;
    for (int t : mesh.edge(target).tri)
      for (int l = 0; l < dm.dofs_per_cell(); ++l) {
        int d = dm.cell_dofs[t][l];
        if (std::find(dofs.begin(), dofs.end(), d) == dofs.end()) dofs.push_back(d);
      }
    REQUIRE(dofs.size() == 9);
    for (int i : dofs)
      for (int j : dofs) CHECK(std::abs(ad(i, j) - oracle_ah(mesh, dm, sigma, i, j)) <= 1e-12 * scale);

    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pick(0, dm.n_dofs - 1);
    for (int r = 0; r < 20; ++r) {
      int i = pick(rng), j = pick(rng);
      CHECK(std::abs(ad(i, j) - oracle_ah(mesh, dm, sigma, i, j)) <= 1e-12 * scale);
    }
  }

  SUBCASE("cubic on the L-shape") {
    Mesh mesh = Mesh::initial(c0ip::Domain::lshape);
    DofMap dm = c0ip::build_dofmap(mesh, 3);
    double sigma = 18.0;
    c0ip::SparseMatrix a = c0ip::assemble_stiffness(mesh, dm, sigma);
    Eigen::MatrixXd ad = Eigen::MatrixXd(a);
    double scale = max_abs(a);

    int target = -1;
    for (int e = 0; e < mesh.n_edges(); ++e)
      if (!mesh.edge(e).boundary) {
        target = e;
        break;
      }
    REQUIRE(target >= 0);
    std::vector<int> dofs;
    for (int t : mesh.edge(target).tri)
      for (int l = 0; l < dm.dofs_per_cell(); ++l) {
        int d = dm.cell_dofs[t][l];
        if (std::find(dofs.begin(), dofs.end(), d) == dofs.end()) dofs.push_back(d);
      }
    REQUIRE(dofs.size() == 16);
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(dofs.size()) - 1);
    for (int r = 0; r < 60; ++r) {
      int i = dofs[pick(rng)], j = dofs[pick(rng)];
      CHECK(std::abs(ad(i, j) - oracle_ah(mesh, dm, sigma, i, j)) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("load vector integrates the forcing against the basis") {
  Mesh sq = Mesh::initial(c0ip::Domain::square);
  Mesh ls = Mesh::initial(c0ip::Domain::lshape);
  for (int degree : {2, 3}) {
    DofMap dsq = c0ip::build_dofmap(sq, degree);
    DofMap dls = c0ip::build_dofmap(ls, degree);
    auto one = [](const Vec2&) { return 1.0; };
    CHECK(c0ip::assemble_load(sq, dsq, one).sum() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(c0ip::assemble_load(ls, dls, one).sum() == doctest::Approx(0.75).epsilon(1e-13));
    // partition of unity turns the coefficient sum into the integral of f
    auto linear = [](const Vec2& p) { return p.x(); };
    CHECK(std::abs(c0ip::assemble_load(sq, dsq, linear).sum()) <= 1e-14);
    CHECK(c0ip::assemble_load(ls, dls, linear).sum() == doctest::Approx(-0.0625).epsilon(1e-12));
  }
}

TEST_CASE("boundary load matches an independent computation and flips with the normal") {
  Mesh mesh = Mesh::initial(c0ip::Domain::square);
  DofMap dm = c0ip::build_dofmap(mesh, 2);
  double sigma = 6.0;
  auto grad_u = [](const Vec2& p) {
    return Vec2(std::cos(p.x()) * std::cos(p.y()), -std::sin(p.x()) * std::sin(p.y()));
  };
  Eigen::VectorXd b = c0ip::assemble_boundary_load(mesh, dm, sigma, grad_u);

  Eigen::VectorXd oracle = Eigen::VectorXd::Zero(dm.n_dofs);
  const auto& er = c0ip::edge_rule(12);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (!mesh.edge(e).boundary) continue;
    EdgeGeom g = edge_geom(mesh, e);
    double pen = sigma / g.len;
    for (int i = 0; i < dm.n_dofs; ++i) {
      double s = 0.0;
      for (std::size_t q = 0; q < er.points.size(); ++q) {
        Vec2 p = g.a + er.points[q].x() * (g.b - g.a);
        double w = er.weights[q] * g.len;
        double dn = g.n.x() * side_eval(mesh, dm, g.leave, i, p, 1, 0) +
                    g.n.y() * side_eval(mesh, dm, g.leave, i, p, 0, 1);
        double d2n = g.n.x() * g.n.x() * side_eval(mesh, dm, g.leave, i, p, 2, 0) +
                     2.0 * g.n.x() * g.n.y() * side_eval(mesh, dm, g.leave, i, p, 1, 1) +
                     g.n.y() * g.n.y() * side_eval(mesh, dm, g.leave, i, p, 0, 2);
        // exterior trace is zero: jump of the basis is -dn, data jump -du.n
        s += w * (-grad_u(p).dot(g.n)) * (d2n + pen * (-dn));
      }
      oracle(i) += s;
    }
  }
  double scale = std::max(1.0, oracle.lpNorm<Eigen::Infinity>());
  CHECK((b - oracle).lpNorm<Eigen::Infinity>() <= 1e-12 * scale);

  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (!mesh.edge(e).boundary) continue;
    Vec2 n = mesh.unit_normal(e);
    std::vector<int> dp, dmn;
    Eigen::VectorXd cp = c0ip::boundary_load_edge(mesh, dm, e, sigma, n, grad_u, dp);
    Eigen::VectorXd cm = c0ip::boundary_load_edge(mesh, dm, e, sigma, Vec2(-n), grad_u, dmn);
    REQUIRE(dp == dmn);
    CHECK((cp + cm).lpNorm<Eigen::Infinity>() <= 1e-13 * std::max(1.0, cp.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("discrete solve reproduces polynomials of the space's degree") {
  SUBCASE("quadratic, degree 2, square") {
    Mesh mesh = Mesh::initial(c0ip::Domain::square).uniformly_refined();
    DofMap dm = c0ip::build_dofmap(mesh, 2);
    double sigma = 6.0;
    auto g = [](const Vec2& p) {
      return 0.7 * p.x() * p.x() - 1.3 * p.x() * p.y() + 0.4 * p.y() * p.y() + 0.9 * p.x() -
             0.2 * p.y() + 0.35;
    };
    auto dg = [](const Vec2& p) {
      return Vec2(1.4 * p.x() - 1.3 * p.y() + 0.9, -1.3 * p.x() + 0.8 * p.y() - 0.2);
    };
    c0ip::SparseMatrix a = c0ip::assemble_stiffness(mesh, dm, sigma);
    Eigen::VectorXd b = c0ip::assemble_boundary_load(mesh, dm, sigma, dg);
    Eigen::VectorXd gi = c0ip::interpolate(dm, g);
    c0ip::ReducedSystem sys = c0ip::impose_boundary(a, b, dm, &gi);
    c0ip::SolveReport rep = c0ip::solve_spd(sys.matrix, sys.rhs, 1e-12);
    Eigen::VectorXd x = sys.to_full(rep.x);
    CHECK((x - gi).lpNorm<Eigen::Infinity>() <= 1e-7 * gi.lpNorm<Eigen::Infinity>());
  }

  SUBCASE("cubic, degree 3, L-shape") {
    Mesh mesh = Mesh::initial(c0ip::Domain::lshape).uniformly_refined();
    DofMap dm = c0ip::build_dofmap(mesh, 3);
    double sigma = 18.0;
    auto g = [](const Vec2& p) {
      double x = p.x(), y = p.y();
      return 0.3 * x * x * x - 0.7 * x * x * y + 0.2 * x * y * y + 0.5 * y * y * y - x * x +
             x * y + 0.4 * y * y + 0.1 * x - 0.6 * y + 0.2;
    };
    auto dg = [](const Vec2& p) {
      double x = p.x(), y = p.y();
      return Vec2(0.9 * x * x - 1.4 * x * y + 0.2 * y * y - 2.0 * x + y + 0.1,
                  -0.7 * x * x + 0.4 * x * y + 1.5 * y * y + x + 0.8 * y - 0.6);
    };
    c0ip::SparseMatrix a = c0ip::assemble_stiffness(mesh, dm, sigma);
    Eigen::VectorXd b = c0ip::assemble_boundary_load(mesh, dm, sigma, dg);
    Eigen::VectorXd gi = c0ip::interpolate(dm, g);
    c0ip::ReducedSystem sys = c0ip::impose_boundary(a, b, dm, &gi);
    c0ip::SolveReport rep = c0ip::solve_spd(sys.matrix, sys.rhs, 1e-12);
    Eigen::VectorXd x = sys.to_full(rep.x);
    CHECK((x - gi).lpNorm<Eigen::Infinity>() <= 1e-7 * gi.lpNorm<Eigen::Infinity>());
  }
}

TEST_CASE("boundary elimination matches dense Schur reduction and stays SPD") {
  Mesh mesh = Mesh::initial(c0ip::Domain::lshape);
  DofMap dm = c0ip::build_dofmap(mesh, 2);
  c0ip::SparseMatrix a = c0ip::assemble_stiffness(mesh, dm, 6.0);
  Eigen::VectorXd b = c0ip::assemble_load(mesh, dm, [](const Vec2& p) { return p.x() + 2.0; });
  Eigen::VectorXd g(dm.n_dofs);
  for (int i = 0; i < dm.n_dofs; ++i) g(i) = std::sin(0.3 * i);

  c0ip::ReducedSystem sys = c0ip::impose_boundary(a, b, dm, &g);
  int nf = static_cast<int>(sys.free_to_full.size());
  int nb = 0;
  for (int i = 0; i < dm.n_dofs; ++i) nb += dm.boundary[i] ? 1 : 0;
  REQUIRE(nf + nb == dm.n_dofs);
  REQUIRE(sys.matrix.rows() == nf);

  Eigen::MatrixXd ad = Eigen::MatrixXd(a);
  Eigen::MatrixXd red = Eigen::MatrixXd(sys.matrix);
  for (int i = 0; i < nf; ++i) {
    int fi = sys.free_to_full[i];
    CHECK(sys.full_to_free[fi] == i);
    double rhs = b(fi);
    for (int j = 0; j < dm.n_dofs; ++j) {
      if (dm.boundary[j]) rhs -= ad(fi, j) * g(j);
    }
    CHECK(std::abs(sys.rhs(i) - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
    for (int j = 0; j < nf; ++j) CHECK(red(i, j) == ad(fi, sys.free_to_full[j]));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(red);
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  Eigen::VectorXd xf = Eigen::VectorXd::LinSpaced(nf, 0.0, 1.0);
  Eigen::VectorXd full = sys.to_full(xf);
  for (int i = 0; i < dm.n_dofs; ++i) {
    if (dm.boundary[i])
      CHECK(full(i) == g(i));
    else
      CHECK(full(i) == xf(sys.full_to_free[i]));
  }
}
