#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <vector>

namespace chdg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class CellType { Quad, Tri };

const char* to_string(CellType type);

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rectangle {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
};

/// One mesh cell. The affine map x = origin + jacobian * xi sends the
/// reference element (unit square or unit right triangle) onto the cell.
struct Cell {
  CellType type = CellType::Quad;
  std::vector<std::size_t> vertices;  // counter-clockwise
  double measure = 0.0;
  Vec2 origin = Vec2::Zero();
  Mat2 jacobian = Mat2::Identity();
  Mat2 inverse_jacobian = Mat2::Identity();

  Vec2 map_to_physical(const Vec2& ref) const { return origin + jacobian * ref; }
  Vec2 map_to_reference(const Vec2& x) const { return inverse_jacobian * (x - origin); }
  Vec2 centroid(const std::vector<Vec2>& coords) const;
};

inline constexpr std::size_t kBoundary = static_cast<std::size_t>(-1);

/// A mesh edge. For interior faces the normal points from the minus cell into
/// the plus cell and jumps are taken as minus-trace minus plus-trace.
struct Face {
  std::size_t minus_cell = 0;
  std::size_t plus_cell = kBoundary;
  std::array<std::size_t, 2> vertices{};
  double length = 0.0;
  Vec2 unit_normal = Vec2::Zero();
  double h_e = 0.0;
  bool is_boundary = true;

  /// Point on the face for the parameter t in [0, 1].
  Vec2 point(const std::vector<Vec2>& coords, double t) const {
    return (1.0 - t) * coords[vertices[0]] + t * coords[vertices[1]];
  }
};

class MeshTopology {
 public:
  MeshTopology(std::vector<Vec2> vertices, std::vector<Cell> cells, Rectangle domain);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Cell& cell(std::size_t k) const { return cells_.at(k); }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_faces() const { return faces_.size(); }
  std::size_t num_interior_faces() const { return num_interior_faces_; }
  std::size_t num_boundary_faces() const { return faces_.size() - num_interior_faces_; }

  /// m_K: number of interior faces adjacent to cell K.
  const std::vector<int>& cell_face_counts() const { return cell_face_counts_; }
  /// Indices into faces() touching cell K (interior and boundary).
  const std::vector<std::size_t>& cell_faces(std::size_t k) const { return cell_faces_.at(k); }
  /// Cells sharing an interior face with K, sorted ascending.
  const std::vector<std::size_t>& neighbors(std::size_t k) const { return neighbors_.at(k); }

  const Rectangle& domain() const { return domain_; }
  double total_measure() const;
  CellType cell_type() const { return cells_.front().type; }

 private:
  void build_faces();

  std::vector<Vec2> vertices_;
  std::vector<Cell> cells_;
  std::vector<Face> faces_;
  std::size_t num_interior_faces_ = 0;
  std::vector<int> cell_face_counts_;
  std::vector<std::vector<std::size_t>> cell_faces_;
  std::vector<std::vector<std::size_t>> neighbors_;
  Rectangle domain_;
};

/// nx * ny axis-aligned quadrilaterals.
MeshTopology build_quad_mesh(int nx, int ny, const Rectangle& domain = {});

/// nx * ny quads, each split along its lower-left to upper-right diagonal
/// into two right-angled isosceles triangles.
MeshTopology build_tri_mesh(int nx, int ny, const Rectangle& domain = {});

/// max over faces of h_e.
double global_mesh_width(const MeshTopology& mesh);

}  // namespace chdg
