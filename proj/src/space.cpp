#include "c0ip/space.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace c0ip {

namespace {

double powi(double x, int n) {
  double r = 1.0;
  for (; n > 0; --n) r *= x;
  return r;
}

// d^(dx+dy)/(dx dy) of x^a y^b
double monomial_deriv(double x, double y, int a, int b, int dx, int dy) {
  if (a < dx || b < dy) return 0.0;
  double c = 1.0;
  for (int i = 0; i < dx; ++i) c *= a - i;
  for (int i = 0; i < dy; ++i) c *= b - i;
  return c * powi(x, a - dx) * powi(y, b - dy);
}

ReferenceBasis build_reference_basis(int degree) {
  ReferenceBasis rb;
  rb.degree = degree;
  rb.n_basis = (degree + 1) * (degree + 2) / 2;
  const Vec2 corner[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  for (int j = 0; j < 3; ++j) rb.nodes.push_back(corner[j]);
  for (int j = 0; j < 3; ++j) {
    const Vec2 a = corner[j], b = corner[(j + 1) % 3];
    for (int i = 1; i < degree; ++i)
      rb.nodes.push_back(a + (static_cast<double>(i) / degree) * (b - a));
  }
  if (degree == 3) rb.nodes.emplace_back(1.0 / 3.0, 1.0 / 3.0);

  for (int total = 0; total <= degree; ++total)
    for (int a = total; a >= 0; --a) rb.powers.push_back({a, total - a});

  Eigen::MatrixXd vand(rb.n_basis, rb.n_basis);
  for (int l = 0; l < rb.n_basis; ++l)
    for (int j = 0; j < rb.n_basis; ++j)
      vand(l, j) = powi(rb.nodes[l].x(), rb.powers[j][0]) * powi(rb.nodes[l].y(), rb.powers[j][1]);
  Eigen::MatrixXd inv = vand.fullPivLu().inverse();
  if ((vand * inv - Eigen::MatrixXd::Identity(rb.n_basis, rb.n_basis)).cwiseAbs().maxCoeff() > 1e-12)
    throw std::logic_error("reference basis Vandermonde is ill-conditioned");
  rb.coeff = inv.transpose();
  return rb;
}

}  // namespace

const ReferenceBasis& reference_basis(int degree) {
  static const ReferenceBasis p2 = build_reference_basis(2);
  static const ReferenceBasis p3 = build_reference_basis(3);
  if (degree == 2) return p2;
  if (degree == 3) return p3;
  throw std::invalid_argument("reference_basis: degree must be 2 or 3");
}

DofMap build_dofmap(const Mesh& mesh, int degree) {
  if (degree != 2 && degree != 3) throw std::invalid_argument("build_dofmap: degree must be 2 or 3");
  const int k = degree;
  const int nv = mesh.n_vertices(), ne = mesh.n_edges(), nt = mesh.n_triangles();
  DofMap dm;
  dm.degree = k;
  dm.n_dofs = nv + (k - 1) * ne + (k == 3 ? nt : 0);
  dm.node.resize(dm.n_dofs);
  dm.boundary.assign(dm.n_dofs, false);

  for (int v = 0; v < nv; ++v) {
    dm.node[v] = mesh.vertex(v);
    dm.boundary[v] = mesh.vertex_on_boundary(v);
    if (!dm.boundary[v]) dm.interior_vertices.push_back(v);
  }
  for (int e = 0; e < ne; ++e) {
    const Edge& edge = mesh.edge(e);
    const Vec2 lo = mesh.vertex(edge.v[0]), hi = mesh.vertex(edge.v[1]);
    for (int m = 0; m < k - 1; ++m) {
      const int dof = nv + e * (k - 1) + m;
      dm.node[dof] = lo + (static_cast<double>(m + 1) / k) * (hi - lo);
      dm.boundary[dof] = edge.boundary;
    }
  }
  if (k == 3)
    for (int t = 0; t < nt; ++t) {
      const auto& v = mesh.triangle(t).v;
      dm.node[nv + 2 * ne + t] = (mesh.vertex(v[0]) + mesh.vertex(v[1]) + mesh.vertex(v[2])) / 3.0;
    }

  dm.cell_dofs.assign(nt, {-1, -1, -1, -1, -1, -1, -1, -1, -1, -1});
  for (int t = 0; t < nt; ++t) {
    const auto& v = mesh.triangle(t).v;
    auto& cd = dm.cell_dofs[t];
    for (int j = 0; j < 3; ++j) cd[j] = v[j];
    for (int j = 0; j < 3; ++j) {
      const int a = v[j], b = v[(j + 1) % 3];
      const int e = mesh.triangle_edges(t)[j];
      for (int i = 0; i < k - 1; ++i) {
        const int m = a < b ? i : k - 2 - i;  // global edge dofs run low id -> high id
        cd[3 + (k - 1) * j + i] = nv + e * (k - 1) + m;
      }
    }
    if (k == 3) cd[9] = nv + 2 * ne + t;
  }
  return dm;
}

BasisEval eval_basis(const Mesh& mesh, int t, int degree, std::span<const Vec2> ref_points,
                     int max_deriv) {
  const ReferenceBasis& rb = reference_basis(degree);
  const auto& v = mesh.triangle(t).v;
  Eigen::Matrix2d bmat;
  bmat.col(0) = mesh.vertex(v[1]) - mesh.vertex(v[0]);
  bmat.col(1) = mesh.vertex(v[2]) - mesh.vertex(v[0]);
  const Eigen::Matrix2d jac = bmat.inverse();  // jac(i,a) = d xi_i / d x_a

  const int np = static_cast<int>(ref_points.size());
  const int nb = rb.n_basis;
  BasisEval be;
  be.n_points = np;
  be.n_basis = nb;
  be.max_deriv = max_deriv;
  be.value.assign(np * nb, 0.0);
  if (max_deriv >= 1) be.grad.assign(np * nb, Vec2::Zero());
  if (max_deriv >= 2) be.hess.assign(np * nb, {0.0, 0.0, 0.0});
  if (max_deriv >= 3) be.third.assign(np * nb, {0.0, 0.0, 0.0, 0.0});

  // reference derivatives of the monomials at one point, then coeff * table
  std::vector<std::array<double, 10>> mono(nb);
  for (int q = 0; q < np; ++q) {
    const double x = ref_points[q].x(), y = ref_points[q].y();
    for (int j = 0; j < nb; ++j) {
      const int a = rb.powers[j][0], b = rb.powers[j][1];
      auto& m = mono[j];
      m[0] = monomial_deriv(x, y, a, b, 0, 0);
      if (max_deriv >= 1) {
        m[1] = monomial_deriv(x, y, a, b, 1, 0);
        m[2] = monomial_deriv(x, y, a, b, 0, 1);
      }
      if (max_deriv >= 2) {
        m[3] = monomial_deriv(x, y, a, b, 2, 0);
        m[4] = monomial_deriv(x, y, a, b, 1, 1);
        m[5] = monomial_deriv(x, y, a, b, 0, 2);
      }
      if (max_deriv >= 3) {
        m[6] = monomial_deriv(x, y, a, b, 3, 0);
        m[7] = monomial_deriv(x, y, a, b, 2, 1);
        m[8] = monomial_deriv(x, y, a, b, 1, 2);
        m[9] = monomial_deriv(x, y, a, b, 0, 3);
      }
    }
    for (int i = 0; i < nb; ++i) {
      std::array<double, 10> d{};
      for (int j = 0; j < nb; ++j) {
        const double c = rb.coeff(i, j);
        if (c == 0.0) continue;
        for (int s = 0; s < 10; ++s) d[s] += c * mono[j][s];
      }
      be.value[q * nb + i] = d[0];
      if (max_deriv >= 1) {
        // grad_a = sum_i jac(i,a) dref_i
        be.grad[q * nb + i] = Vec2(jac(0, 0) * d[1] + jac(1, 0) * d[2],
                                   jac(0, 1) * d[1] + jac(1, 1) * d[2]);
      }
      if (max_deriv >= 2) {
        Eigen::Matrix2d href;
        href << d[3], d[4], d[4], d[5];
        const Eigen::Matrix2d hp = jac.transpose() * href * jac;
        be.hess[q * nb + i] = {hp(0, 0), hp(0, 1), hp(1, 1)};
      }
      if (max_deriv >= 3) {
        double tref[2][2][2];
        tref[0][0][0] = d[6];
        tref[0][0][1] = tref[0][1][0] = tref[1][0][0] = d[7];
        tref[0][1][1] = tref[1][0][1] = tref[1][1][0] = d[8];
        tref[1][1][1] = d[9];
        std::array<double, 4> tp{0.0, 0.0, 0.0, 0.0};
        const int comp[4][3] = {{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 1, 1}};
        for (int s = 0; s < 4; ++s) {
          const int a = comp[s][0], b2 = comp[s][1], c2 = comp[s][2];
          double acc = 0.0;
          for (int i2 = 0; i2 < 2; ++i2)
            for (int j2 = 0; j2 < 2; ++j2)
              for (int k2 = 0; k2 < 2; ++k2)
                acc += jac(i2, a) * jac(j2, b2) * jac(k2, c2) * tref[i2][j2][k2];
          tp[s] = acc;
        }
        be.third[q * nb + i] = tp;
      }
    }
  }
  return be;
}

Eigen::VectorXd interpolate(const DofMap& dofmap, const std::function<double(const Vec2&)>& g) {
  Eigen::VectorXd u(dofmap.n_dofs);
  for (int i = 0; i < dofmap.n_dofs; ++i) u[i] = g(dofmap.node[i]);
  return u;
}

FieldEvaluator::FieldEvaluator(const Mesh& mesh, const DofMap& dofmap, Eigen::VectorXd coeffs)
    : mesh_(&mesh), dofmap_(&dofmap), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != dofmap.n_dofs)
    throw std::invalid_argument("FieldEvaluator: coefficient size mismatch");
}

namespace {

// barycentric coordinates of p in triangle t, ordered like the vertices
Eigen::Vector3d barycentric(const Mesh& mesh, int t, const Vec2& p) {
  const auto& v = mesh.triangle(t).v;
  Eigen::Matrix2d bmat;
  bmat.col(0) = mesh.vertex(v[1]) - mesh.vertex(v[0]);
  bmat.col(1) = mesh.vertex(v[2]) - mesh.vertex(v[0]);
  const Vec2 xi = bmat.inverse() * (p - mesh.vertex(v[0]));
  return {1.0 - xi.x() - xi.y(), xi.x(), xi.y()};
}

}  // namespace

int FieldEvaluator::locate(const Vec2& p) const {
  const Mesh& mesh = *mesh_;
  int t = last_ >= 0 && last_ < mesh.n_triangles() ? last_ : 0;
  const int cap = mesh.n_triangles();
  for (int step = 0; step < cap; ++step) {
    const Eigen::Vector3d lam = barycentric(mesh, t, p);
    int worst = 0;
    for (int i = 1; i < 3; ++i)
      if (lam[i] < lam[worst]) worst = i;
    if (lam[worst] >= -1e-12) {
      last_ = t;
      return t;
    }
    const int nb = mesh.neighbors(t)[(worst + 1) % 3];  // edge opposite the worst vertex
    if (nb < 0) break;
    t = nb;
  }
  // brute force: triangle whose barycentric minimum is largest
  int best = 0;
  double best_min = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < mesh.n_triangles(); ++s) {
    const Eigen::Vector3d lam = barycentric(mesh, s, p);
    const double m = lam.minCoeff();
    if (m > best_min) {
      best_min = m;
      best = s;
    }
  }
  if (best_min < -1e-8)
    throw std::invalid_argument("FieldEvaluator: point outside the mesh");
  last_ = best;
  return best;
}

FieldEvaluator::Values FieldEvaluator::operator()(const Vec2& p, int max_deriv) const {
  const Mesh& mesh = *mesh_;
  const int t = locate(p);
  const auto& v = mesh.triangle(t).v;
  Eigen::Matrix2d bmat;
  bmat.col(0) = mesh.vertex(v[1]) - mesh.vertex(v[0]);
  bmat.col(1) = mesh.vertex(v[2]) - mesh.vertex(v[0]);
  const Vec2 xi = bmat.inverse() * (p - mesh.vertex(v[0]));
  const BasisEval be = eval_basis(mesh, t, dofmap_->degree, std::span<const Vec2>(&xi, 1),
                                  max_deriv);
  Values out;
  const auto& cd = dofmap_->cell_dofs[t];
  for (int i = 0; i < dofmap_->dofs_per_cell(); ++i) {
    const double c = coeffs_[cd[i]];
    out.value += c * be.val(0, i);
    if (max_deriv >= 1) out.grad += c * be.gr(0, i);
    if (max_deriv >= 2)
      for (int s = 0; s < 3; ++s) out.hess[s] += c * be.he(0, i)[s];
  }
  return out;
}

}  // namespace c0ip
