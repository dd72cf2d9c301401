#include "chdg/mesh.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace chdg;

TEST_CASE("quad mesh counts and measures") {
  const auto m = build_quad_mesh(3, 2, {0.0, 3.0, 0.0, 1.0});
  CHECK(m.num_cells() == 6);
  CHECK(m.vertices().size() == 12);
  // 3x2 grid: (nx-1)ny + nx(ny-1) interior edges.
  CHECK(m.num_interior_faces() == 2 * 2 + 3 * 1);
  CHECK(m.num_boundary_faces() == 2 * (3 + 2));
  CHECK(m.total_measure() == doctest::Approx(3.0).epsilon(1e-14));
  for (const auto& c : m.cells()) CHECK(c.measure == doctest::Approx(0.5));
}

TEST_CASE("tri mesh splits every quad in two") {
  const auto m = build_tri_mesh(4, 4);
  CHECK(m.num_cells() == 32);
  CHECK(m.total_measure() == doctest::Approx(1.0).epsilon(1e-14));
  for (const auto& c : m.cells()) {
    CHECK(c.type == CellType::Tri);
    CHECK(c.measure == doctest::Approx(1.0 / 32.0).epsilon(1e-14));
    CHECK(std::abs(c.jacobian.determinant()) == doctest::Approx(2.0 * c.measure));
  }
}

TEST_CASE("diagonal face of the split unit square") {
  const auto m = build_tri_mesh(1, 1);
  REQUIRE(m.num_interior_faces() == 1);
  for (const auto& f : m.faces()) {
    if (f.is_boundary) continue;
    CHECK(f.length == doctest::Approx(std::sqrt(2.0)));
    CHECK(f.h_e == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-14));
  }
}

TEST_CASE("boundary faces use the one-sided width") {
  const auto m = build_quad_mesh(2, 2);
  for (const auto& f : m.faces()) {
    if (!f.is_boundary) continue;
    CHECK(f.plus_cell == kBoundary);
    CHECK(f.h_e == doctest::Approx(m.cell(f.minus_cell).measure / f.length));
  }
}

TEST_CASE("interior faces are unique and counted once per side") {
  for (const auto& m : {build_quad_mesh(5, 3), build_tri_mesh(4, 6)}) {
    std::vector<int> counts(m.num_cells(), 0);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& f : m.faces()) {
      if (f.is_boundary) continue;
      const auto key = std::minmax(f.vertices[0], f.vertices[1]);
      CHECK(seen.insert(key).second);
      ++counts[f.minus_cell];
      ++counts[f.plus_cell];
    }
    CHECK(counts == m.cell_face_counts());
  }
}

TEST_CASE("normals point from the minus to the plus cell") {
  for (const auto& m : {build_quad_mesh(4, 3), build_tri_mesh(3, 5)}) {
    for (const auto& f : m.faces()) {
      CHECK(f.unit_normal.norm() == doctest::Approx(1.0));
      const Vec2 a = m.cell(f.minus_cell).centroid(m.vertices());
      if (f.is_boundary) {
        // Outward: from the cell centroid towards the face midpoint.
        CHECK((f.point(m.vertices(), 0.5) - a).dot(f.unit_normal) > 0.0);
      } else {
        CHECK((m.cell(f.plus_cell).centroid(m.vertices()) - a).dot(f.unit_normal) > 0.0);
      }
    }
  }
}

TEST_CASE("reference map round trip and vertex ordering") {
  const auto m = build_tri_mesh(3, 3, {-1.0, 2.0, 0.5, 1.5});
  const Vec2 ref_vertices[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  for (const auto& c : m.cells()) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 x = c.map_to_physical(ref_vertices[i]);
      CHECK((x - m.vertices()[c.vertices[i]]).norm() < 1e-14);
    }
    const Vec2 p(0.3, 0.2);
    CHECK((c.map_to_reference(c.map_to_physical(p)) - p).norm() < 1e-13);
  }
}

TEST_CASE("neighbors are sorted and symmetric") {
  const auto m = build_tri_mesh(3, 2);
  for (std::size_t k = 0; k < m.num_cells(); ++k) {
    const auto& nb = m.neighbors(k);
    CHECK(std::is_sorted(nb.begin(), nb.end()));
    CHECK(nb.size() == static_cast<std::size_t>(m.cell_face_counts()[k]));
    for (auto j : nb) {
      const auto& back = m.neighbors(j);
      CHECK(std::find(back.begin(), back.end(), k) != back.end());
    }
  }
}

TEST_CASE("global mesh width") {
  const auto m2 = build_quad_mesh(2, 2);
  const double w = global_mesh_width(m2);
  for (const auto& f : m2.faces()) CHECK(f.h_e == doctest::Approx(w));
  CHECK(global_mesh_width(build_quad_mesh(4, 4)) == doctest::Approx(0.5 * w).epsilon(1e-12));
  const auto t = build_tri_mesh(3, 5);
  const double wt = global_mesh_width(t);
  for (const auto& f : t.faces()) CHECK(f.h_e <= wt);
}

TEST_CASE("refinement keeps the domain") {
  const Rectangle r{0.0, 2.0, -1.0, 1.0};
  const auto a = build_quad_mesh(3, 2, r);
  const auto b = build_quad_mesh(6, 4, r);
  CHECK(b.num_cells() == 4 * a.num_cells());
  CHECK(b.total_measure() == doctest::Approx(a.total_measure()).epsilon(1e-14));
}

TEST_CASE("invalid mesh arguments") {
  CHECK_THROWS_AS(build_quad_mesh(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_tri_mesh(2, -1), std::invalid_argument);
  CHECK_THROWS_AS(build_quad_mesh(2, 2, {1.0, 1.0, 0.0, 1.0}), std::invalid_argument);
}
