#include "c0ip/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <doctest.h>

using namespace c0ip;

namespace {

// Star of t recomputed directly from the edge list.
std::vector<int> brute_force_star(const Mesh& m, int t) {
  std::set<int> verts(m.triangle(t).v.begin(), m.triangle(t).v.end());
  std::vector<int> star;
  for (int e = 0; e < m.n_edges(); ++e)
    if (verts.count(m.edge(e).v[0]) || verts.count(m.edge(e).v[1])) star.push_back(e);
  return star;
}

double total_area(const Mesh& m) {
  double a = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) a += m.area(t);
  return a;
}

}  // namespace

TEST_CASE("initial meshes have the expected entity counts") {
  const Mesh sq = Mesh::initial(Domain::square);
  CHECK(sq.n_vertices() == 25);
  CHECK(sq.n_triangles() == 32);
  CHECK(sq.n_edges() == 56);
  CHECK(total_area(sq) == doctest::Approx(1.0).epsilon(1e-14));
  sq.check_invariants(true);

  const Mesh ls = Mesh::initial(Domain::lshape);
  CHECK(ls.n_vertices() == 21);
  CHECK(ls.n_triangles() == 24);
  CHECK(ls.n_edges() == 44);
  CHECK(total_area(ls) == doctest::Approx(0.75).epsilon(1e-14));
  ls.check_invariants(true);
}

TEST_CASE("uniform refinement quadruples triangles and halves h_max") {
  const Mesh sq = Mesh::initial(Domain::square);
  const Mesh fine = sq.uniformly_refined();
  CHECK(fine.n_triangles() == 128);
  CHECK(fine.h_max() == doctest::Approx(0.5 * sq.h_max()).epsilon(1e-14));
  CHECK(total_area(fine) == doctest::Approx(1.0).epsilon(1e-13));
  fine.check_invariants(true);

  const Mesh lf = Mesh::initial(Domain::lshape).uniformly_refined();
  CHECK(lf.n_triangles() == 96);
  lf.check_invariants(true);
}

TEST_CASE("uniform refinement children partition their parent") {
  const Mesh sq = Mesh::initial(Domain::square);
  const Mesh fine = sq.uniformly_refined();
  std::vector<double> child_area(sq.n_triangles(), 0.0);
  std::vector<int> child_count(sq.n_triangles(), 0);
  for (int t = 0; t < fine.n_triangles(); ++t) {
    const int p = fine.triangle(t).parent;
    REQUIRE(p >= 0);
    REQUIRE(p < sq.n_triangles());
    child_area[p] += fine.area(t);
    child_count[p] += 1;
    CHECK(fine.triangle(t).generation == sq.triangle(p).generation + 2);
  }
  for (int p = 0; p < sq.n_triangles(); ++p) {
    CHECK(child_count[p] == 4);
    CHECK(child_area[p] == doctest::Approx(sq.area(p)).epsilon(1e-13));
  }
}

TEST_CASE("single-triangle refinement stays conforming and splits the mark") {
  const Mesh sq = Mesh::initial(Domain::square);
  const Mesh after = sq.refined({5}, {});
  after.check_invariants(true);
  CHECK(after.n_triangles() > sq.n_triangles());
  int children_of_5 = 0;
  for (int t = 0; t < after.n_triangles(); ++t)
    if (after.triangle(t).parent == 5) ++children_of_5;
  CHECK(children_of_5 >= 2);
  // input vertices survive with their ids
  for (int v = 0; v < sq.n_vertices(); ++v)
    CHECK((after.vertex(v) - sq.vertex(v)).norm() == 0.0);
}

TEST_CASE("marked edge forces bisection of both adjacent triangles") {
  const Mesh sq = Mesh::initial(Domain::square);
  int e = -1;
  for (int i = 0; i < sq.n_edges(); ++i)
    if (!sq.edge(i).boundary) { e = i; break; }
  REQUIRE(e >= 0);
  const Edge edge = sq.edge(e);
  const Vec2 mid = sq.edge_midpoint(e);
  const Mesh after = sq.refined({}, {e});
  after.check_invariants(true);
  bool midpoint_exists = false;
  for (int v = sq.n_vertices(); v < after.n_vertices(); ++v)
    if ((after.vertex(v) - mid).norm() < 1e-14) midpoint_exists = true;
  CHECK(midpoint_exists);
  for (int side = 0; side < 2; ++side) {
    int children = 0;
    for (int t = 0; t < after.n_triangles(); ++t)
      if (after.triangle(t).parent == edge.tri[side]) ++children;
    CHECK(children >= 2);
  }
}

TEST_CASE("refinement with no marks returns an identical mesh") {
  const Mesh sq = Mesh::initial(Domain::square);
  const Mesh same = sq.refined({}, {});
  std::ostringstream a, b;
  sq.dump(a);
  same.dump(b);
  CHECK(a.str() == b.str());
}

TEST_CASE("refinement is deterministic") {
  const Mesh sq = Mesh::initial(Domain::square);
  const Mesh r1 = sq.refined({0, 7, 12}, {3, 40});
  const Mesh r2 = sq.refined({0, 7, 12}, {3, 40});
  std::ostringstream a, b;
  r1.dump(a);
  r2.dump(b);
  CHECK(a.str() == b.str());
}

TEST_CASE("repeated refinement keeps shape regularity") {
  Mesh m = Mesh::initial(Domain::lshape);
  const double angle0 = m.min_angle();
  for (int round = 0; round < 10; ++round) {
    std::vector<int> tris, edges;
    for (int t = 0; t < m.n_triangles(); t += 3) tris.push_back(t);
    for (int e = 0; e < m.n_edges(); e += 5) edges.push_back(e);
    m = m.refined(tris, edges);
    m.check_invariants(round < 5);
    CHECK(m.min_angle() >= 0.5 * angle0 - 1e-12);
  }
  CHECK(m.n_triangles() > 1000);
}

TEST_CASE("edge_star matches a brute-force scan") {
  Mesh m = Mesh::initial(Domain::square).refined({1, 2, 3}, {});
  for (int t = 0; t < m.n_triangles(); t += 7) {
    CHECK(m.edge_star(t) == brute_force_star(m, t));
  }
  // every edge of t belongs to its star
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto star = m.edge_star(t);
    for (int e : m.triangle_edges(t))
      CHECK(std::find(star.begin(), star.end(), e) != star.end());
  }
}

TEST_CASE("unit normals have the documented orientation") {
  const Mesh m = Mesh::initial(Domain::lshape).uniformly_refined();
  for (int e = 0; e < m.n_edges(); ++e) {
    const Edge& edge = m.edge(e);
    const Vec2 n = m.unit_normal(e);
    CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-14));
    const Vec2 d = m.vertex(edge.v[1]) - m.vertex(edge.v[0]);
    CHECK(std::abs(n.dot(d)) < 1e-14);
    auto centroid = [&](int t) {
      const auto& v = m.triangle(t).v;
      return Vec2((m.vertex(v[0]) + m.vertex(v[1]) + m.vertex(v[2])) / 3.0);
    };
    if (edge.boundary) {
      CHECK(n.dot(m.edge_midpoint(e) - centroid(edge.tri[0])) > 0.0);
    } else {
      CHECK(n.dot(centroid(edge.tri[1]) - centroid(edge.tri[0])) > 0.0);
    }
  }
}

TEST_CASE("mesh dump uses the documented text format") {
  const Mesh m = Mesh::initial(Domain::square);
  std::ostringstream os;
  m.dump(os);
  std::istringstream is(os.str());
  std::string word;
  int nv = 0, nt = 0;
  is >> word >> nv;
  CHECK(word == "vertices");
  is >> word >> nt;
  CHECK(word == "triangles");
  CHECK(nv == 25);
  CHECK(nt == 32);
  for (int v = 0; v < nv; ++v) {
    double x, y;
    is >> x >> y;
    CHECK((Vec2(x, y) - m.vertex(v)).norm() == 0.0);
  }
  for (int t = 0; t < nt; ++t) {
    int i, j, k;
    is >> i >> j >> k;
    CHECK(i == m.triangle(t).v[0]);
    CHECK(j == m.triangle(t).v[1]);
    CHECK(k == m.triangle(t).v[2]);
  }
}
