#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace c0ip {

using Vec2 = Eigen::Vector2d;

enum class Domain { square, lshape };

// Triangle with counterclockwise vertices. The newest-vertex-bisection
// refinement edge is (v[0], v[1]); bisecting at its midpoint m yields the
// children (v[2], v[0], m) and (v[1], v[2], m), which keeps the convention.
struct Triangle {
  std::array<int, 3> v{-1, -1, -1};
  int generation = 0;
  int parent = -1;  // triangle id in the mesh this mesh was refined from
};

struct Edge {
  std::array<int, 2> v{-1, -1};    // vertex ids, v[0] < v[1]
  std::array<int, 2> tri{-1, -1};  // adjacent triangles, ascending; tri[1] = -1 on boundary
  bool boundary = false;
};

// Conforming triangulation, immutable after construction. Refinement returns
// a new mesh; vertex ids of the input survive unchanged in the output.
class Mesh {
 public:
  static Mesh initial(Domain d);

  // Bisects every marked triangle at least once and splits every marked edge
  // (edge ids of *this), then closes the mesh until no hanging nodes remain.
  Mesh refined(const std::vector<int>& marked_triangles,
               const std::vector<int>& marked_edges) const;

  // Two bisection sweeps: every triangle splits into four similar children.
  Mesh uniformly_refined() const;

  Domain domain() const { return domain_; }
  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_triangles() const { return static_cast<int>(triangles_.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }

  const Vec2& vertex(int v) const { return vertices_[v]; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  const Edge& edge(int e) const { return edges_[e]; }

  // Edge ids per triangle; local edge j runs from v[j] to v[(j+1)%3].
  const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[t]; }
  // Neighbor across local edge j, -1 on the boundary.
  const std::array<int, 3>& neighbors(int t) const { return tri_neighbors_[t]; }
  const std::vector<int>& vertex_edges(int v) const { return vertex_edges_[v]; }
  bool vertex_on_boundary(int v) const { return boundary_vertex_[v]; }

  double area(int t) const;
  double h_T(int t) const;  // longest edge
  double h_max() const;
  double edge_length(int e) const;
  Vec2 edge_midpoint(int e) const;
  // Unit normal pointing from the lower-id adjacent triangle toward the
  // other; outward on boundary edges.
  Vec2 unit_normal(int e) const;
  // All edges with at least one endpoint among t's vertices, ascending.
  std::vector<int> edge_star(int t) const;
  double min_angle() const;  // radians

  // Throws std::logic_error on conformity violations. The thorough variant
  // additionally scans for vertices in the interior of edges (O(V*E)).
  void check_invariants(bool thorough = false) const;

  // Text format: "vertices N triangles M", N coordinate lines, M index lines.
  void dump(std::ostream& os) const;

 private:
  Mesh(Domain d, std::vector<Vec2> vertices, std::vector<Triangle> triangles);
  bool point_on_domain_boundary(const Vec2& p) const;

  Domain domain_;
  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<std::array<int, 3>> tri_neighbors_;
  std::vector<std::vector<int>> vertex_edges_;
  std::vector<bool> boundary_vertex_;
};

}  // namespace c0ip
