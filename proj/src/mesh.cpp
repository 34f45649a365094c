#include "c0ip/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace c0ip {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

std::pair<int, int> sorted_pair(int a, int b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

// Mutable triangle soup used while refining. Triangles are never edited in
// place: a bisection kills the parent and appends two children. `origin`
// tracks the ancestor in the input mesh.
struct RefineWork {
  std::vector<Vec2> verts;
  std::vector<Triangle> tris;
  std::vector<int> origin;
  std::vector<char> alive;
  std::map<std::pair<int, int>, int> midpoint;
  long bisections = 0;
  long bisection_cap = 0;

  explicit RefineWork(const Mesh& m) {
    verts.reserve(m.n_vertices() * 2);
    for (int v = 0; v < m.n_vertices(); ++v) verts.push_back(m.vertex(v));
    tris.reserve(m.n_triangles() * 4);
    origin.reserve(m.n_triangles() * 4);
    for (int t = 0; t < m.n_triangles(); ++t) {
      tris.push_back(m.triangle(t));
      origin.push_back(t);
    }
    alive.assign(tris.size(), 1);
    bisection_cap = 64L * m.n_triangles();
  }

  int midpoint_of(int a, int b) {
    auto key = sorted_pair(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    int m = static_cast<int>(verts.size());
    verts.push_back(0.5 * (verts[a] + verts[b]));
    midpoint.emplace(key, m);
    return m;
  }

  void bisect(int t) {
    if (!alive[t]) throw std::logic_error("bisect: triangle already split");
    if (++bisections > bisection_cap)
      throw std::logic_error("refinement closure exceeded bisection cap");
    const Triangle tri = tris[t];
    const int a = tri.v[0], b = tri.v[1], c = tri.v[2];
    const int m = midpoint_of(a, b);
    alive[t] = 0;
    Triangle c1{{c, a, m}, tri.generation + 1, -1};
    Triangle c2{{b, c, m}, tri.generation + 1, -1};
    tris.push_back(c1);
    origin.push_back(origin[t]);
    alive.push_back(1);
    tris.push_back(c2);
    origin.push_back(origin[t]);
    alive.push_back(1);
  }

  bool has_hanging_node(int t) const {
    const auto& v = tris[t].v;
    for (int j = 0; j < 3; ++j)
      if (midpoint.count(sorted_pair(v[j], v[(j + 1) % 3]))) return true;
    return false;
  }

  // Bisect triangles with a split edge until the mesh is conforming again.
  void close() {
    for (;;) {
      bool changed = false;
      const int n = static_cast<int>(tris.size());
      for (int t = 0; t < n; ++t) {
        if (alive[t] && has_hanging_node(t)) {
          bisect(t);
          changed = true;
        }
      }
      if (!changed) break;
    }
  }

  void split_edge(int a, int b) {
    while (!midpoint.count(sorted_pair(a, b))) {
      bool found = false;
      const int n = static_cast<int>(tris.size());
      for (int t = 0; t < n; ++t) {
        if (!alive[t]) continue;
        const auto& v = tris[t].v;
        const bool has_a = v[0] == a || v[1] == a || v[2] == a;
        const bool has_b = v[0] == b || v[1] == b || v[2] == b;
        if (has_a && has_b) {
          bisect(t);
          found = true;
        }
      }
      if (!found) throw std::logic_error("marked edge not present in mesh");
    }
  }

  void bisect_all_alive() {
    const int n = static_cast<int>(tris.size());
    for (int t = 0; t < n; ++t)
      if (alive[t]) bisect(t);
  }

  std::pair<std::vector<Vec2>, std::vector<Triangle>> compact() const {
    std::vector<Triangle> out;
    out.reserve(tris.size());
    for (size_t t = 0; t < tris.size(); ++t) {
      if (!alive[t]) continue;
      Triangle tri = tris[t];
      tri.parent = origin[t];
      out.push_back(tri);
    }
    return {verts, out};
  }
};

std::pair<std::vector<Vec2>, std::vector<Triangle>> grid_mesh(
    double x0, double y0, double spacing, int nx, int ny,
    const std::function<bool(int, int)>& keep_cell) {
  // Shared vertex grid; only vertices touched by kept cells are emitted.
  std::vector<int> vid((nx + 1) * (ny + 1), -1);
  std::vector<Vec2> verts;
  std::vector<Triangle> tris;
  auto vertex_at = [&](int i, int j) {
    int& id = vid[j * (nx + 1) + i];
    if (id < 0) {
      id = static_cast<int>(verts.size());
      verts.emplace_back(x0 + spacing * i, y0 + spacing * j);
    }
    return id;
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!keep_cell(i, j)) continue;
      const int ll = vertex_at(i, j), lr = vertex_at(i + 1, j);
      const int ul = vertex_at(i, j + 1), ur = vertex_at(i + 1, j + 1);
      // Split along the ll-ur diagonal; the diagonal is the longest edge and
      // becomes the refinement edge of both halves.
      tris.push_back({{ur, ll, lr}, 0, -1});
      tris.push_back({{ll, ur, ul}, 0, -1});
    }
  }
  return {std::move(verts), std::move(tris)};
}

}  // namespace

Mesh Mesh::initial(Domain d) {
  if (d == Domain::square) {
    auto [verts, tris] = grid_mesh(-0.5, -0.5, 0.25, 4, 4, [](int, int) { return true; });
    return Mesh(d, std::move(verts), std::move(tris));
  }
  // L-shape: (-0.5,0.5)^2 minus the closed quadrant [0,0.5]^2.
  auto [verts, tris] = grid_mesh(-0.5, -0.5, 0.25, 4, 4,
                                 [](int i, int j) { return !(i >= 2 && j >= 2); });
  return Mesh(d, std::move(verts), std::move(tris));
}

Mesh Mesh::refined(const std::vector<int>& marked_triangles,
                   const std::vector<int>& marked_edges) const {
  RefineWork work(*this);
  std::vector<int> mt = marked_triangles;
  std::sort(mt.begin(), mt.end());
  mt.erase(std::unique(mt.begin(), mt.end()), mt.end());
  for (int t : mt) {
    if (t < 0 || t >= n_triangles()) throw std::invalid_argument("marked triangle out of range");
    if (work.alive[t]) work.bisect(t);
  }
  std::vector<int> me = marked_edges;
  std::sort(me.begin(), me.end());
  me.erase(std::unique(me.begin(), me.end()), me.end());
  for (int e : me) {
    if (e < 0 || e >= n_edges()) throw std::invalid_argument("marked edge out of range");
    work.split_edge(edges_[e].v[0], edges_[e].v[1]);
  }
  work.close();
  auto [verts, tris] = work.compact();
  return Mesh(domain_, std::move(verts), std::move(tris));
}

Mesh Mesh::uniformly_refined() const {
  RefineWork work(*this);
  for (int sweep = 0; sweep < 2; ++sweep) {
    work.bisect_all_alive();
    work.close();
  }
  auto [verts, tris] = work.compact();
  return Mesh(domain_, std::move(verts), std::move(tris));
}

Mesh::Mesh(Domain d, std::vector<Vec2> vertices, std::vector<Triangle> triangles)
    : domain_(d), vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const int nt = n_triangles();
  std::map<std::pair<int, int>, int> edge_id;
  tri_edges_.assign(nt, {-1, -1, -1});
  for (int t = 0; t < nt; ++t) {
    const auto& v = triangles_[t].v;
    if (signed_area(vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]) <= 0.0)
      throw std::logic_error("triangle with non-positive area");
    for (int j = 0; j < 3; ++j) {
      const auto key = sorted_pair(v[j], v[(j + 1) % 3]);
      auto it = edge_id.find(key);
      int e;
      if (it == edge_id.end()) {
        e = static_cast<int>(edges_.size());
        edge_id.emplace(key, e);
        edges_.push_back({{key.first, key.second}, {t, -1}, false});
      } else {
        e = it->second;
        Edge& edge = edges_[e];
        if (edge.tri[1] != -1) throw std::logic_error("edge shared by more than two triangles");
        edge.tri[1] = t;
      }
      tri_edges_[t][j] = e;
    }
  }
  boundary_vertex_.assign(n_vertices(), false);
  vertex_edges_.assign(n_vertices(), {});
  for (int e = 0; e < n_edges(); ++e) {
    Edge& edge = edges_[e];
    edge.boundary = edge.tri[1] == -1;
    if (edge.boundary) {
      boundary_vertex_[edge.v[0]] = true;
      boundary_vertex_[edge.v[1]] = true;
    }
    vertex_edges_[edge.v[0]].push_back(e);
    vertex_edges_[edge.v[1]].push_back(e);
  }
  tri_neighbors_.assign(nt, {-1, -1, -1});
  for (int t = 0; t < nt; ++t) {
    for (int j = 0; j < 3; ++j) {
      const Edge& edge = edges_[tri_edges_[t][j]];
      tri_neighbors_[t][j] = edge.tri[0] == t ? edge.tri[1] : edge.tri[0];
    }
  }
}

double Mesh::area(int t) const {
  const auto& v = triangles_[t].v;
  return signed_area(vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]);
}

double Mesh::h_T(int t) const {
  const auto& v = triangles_[t].v;
  double h = 0.0;
  for (int j = 0; j < 3; ++j)
    h = std::max(h, (vertices_[v[j]] - vertices_[v[(j + 1) % 3]]).norm());
  return h;
}

double Mesh::h_max() const {
  double h = 0.0;
  for (int t = 0; t < n_triangles(); ++t) h = std::max(h, h_T(t));
  return h;
}

double Mesh::edge_length(int e) const {
  return (vertices_[edges_[e].v[1]] - vertices_[edges_[e].v[0]]).norm();
}

Vec2 Mesh::edge_midpoint(int e) const {
  return 0.5 * (vertices_[edges_[e].v[0]] + vertices_[edges_[e].v[1]]);
}

Vec2 Mesh::unit_normal(int e) const {
  const Edge& edge = edges_[e];
  const Vec2 d = (vertices_[edge.v[1]] - vertices_[edge.v[0]]).normalized();
  Vec2 n(d.y(), -d.x());
  const auto& tv = triangles_[edge.tri[0]].v;
  const Vec2 centroid = (vertices_[tv[0]] + vertices_[tv[1]] + vertices_[tv[2]]) / 3.0;
  if (n.dot(edge_midpoint(e) - centroid) < 0.0) n = -n;
  return n;
}

std::vector<int> Mesh::edge_star(int t) const {
  std::set<int> star;
  for (int v : triangles_[t].v)
    star.insert(vertex_edges_[v].begin(), vertex_edges_[v].end());
  return {star.begin(), star.end()};
}

double Mesh::min_angle() const {
  double amin = M_PI;
  for (const Triangle& tri : triangles_) {
    for (int j = 0; j < 3; ++j) {
      const Vec2& a = vertices_[tri.v[j]];
      const Vec2 u = vertices_[tri.v[(j + 1) % 3]] - a;
      const Vec2 w = vertices_[tri.v[(j + 2) % 3]] - a;
      amin = std::min(amin, std::acos(std::clamp(u.dot(w) / (u.norm() * w.norm()), -1.0, 1.0)));
    }
  }
  return amin;
}

bool Mesh::point_on_domain_boundary(const Vec2& p) const {
  const double eps = 1e-12;
  const bool on_box = std::abs(std::abs(p.x()) - 0.5) < eps || std::abs(std::abs(p.y()) - 0.5) < eps;
  if (domain_ == Domain::square) return on_box;
  const bool reentrant = (std::abs(p.x()) < eps && p.y() > -eps) ||
                         (std::abs(p.y()) < eps && p.x() > -eps);
  return on_box || reentrant;
}

void Mesh::check_invariants(bool thorough) const {
  for (int t = 0; t < n_triangles(); ++t)
    if (area(t) <= 0.0) throw std::logic_error("non-positive triangle area");
  for (int e = 0; e < n_edges(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.boundary) {
      if (!point_on_domain_boundary(vertices_[edge.v[0]]) ||
          !point_on_domain_boundary(vertices_[edge.v[1]]) ||
          !point_on_domain_boundary(edge_midpoint(e)))
        throw std::logic_error("single-triangle edge not on the domain boundary");
    }
  }
  // Euler characteristic of a simply connected triangulated domain.
  if (n_vertices() - n_edges() + n_triangles() != 1)
    throw std::logic_error("Euler characteristic violated");
  if (thorough) {
    for (int e = 0; e < n_edges(); ++e) {
      const Vec2& a = vertices_[edges_[e].v[0]];
      const Vec2& b = vertices_[edges_[e].v[1]];
      const double len = (b - a).norm();
      for (int v = 0; v < n_vertices(); ++v) {
        if (v == edges_[e].v[0] || v == edges_[e].v[1]) continue;
        const Vec2& p = vertices_[v];
        const double cross = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
        const double dot = (p - a).dot(b - a);
        if (std::abs(cross) < 1e-12 * len && dot > 1e-12 && dot < len * len - 1e-12)
          throw std::logic_error("hanging node: vertex inside an edge");
      }
    }
  }
}

void Mesh::dump(std::ostream& os) const {
  os << "vertices " << n_vertices() << " triangles " << n_triangles() << "\n";
  os.precision(17);
  for (const Vec2& p : vertices_) os << p.x() << " " << p.y() << "\n";
  for (const Triangle& t : triangles_) os << t.v[0] << " " << t.v[1] << " " << t.v[2] << "\n";
}

}  // namespace c0ip
