#include "chdg/mesh.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace chdg {

const char* to_string(CellType type) {
  return type == CellType::Quad ? "quad" : "tri";
}

Vec2 Cell::centroid(const std::vector<Vec2>& coords) const {
  Vec2 c = Vec2::Zero();
  for (auto v : vertices) c += coords[v];
  return c / static_cast<double>(vertices.size());
}

MeshTopology::MeshTopology(std::vector<Vec2> vertices, std::vector<Cell> cells, Rectangle domain)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), domain_(domain) {
  if (cells_.empty()) throw std::invalid_argument("mesh: no cells");
  build_faces();
}

void MeshTopology::build_faces() {
  // Edge key (sorted vertex pair) -> index into faces_.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index;
  const std::size_t nc = cells_.size();
  cell_faces_.assign(nc, {});

  for (std::size_t k = 0; k < nc; ++k) {
    const auto& vs = cells_[k].vertices;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const std::size_t a = vs[i];
      const std::size_t b = vs[(i + 1) % vs.size()];
      const auto key = std::minmax(a, b);
      auto it = edge_index.find(key);
      if (it == edge_index.end()) {
        Face f;
        f.minus_cell = k;
        f.vertices = {a, b};
        const Vec2 d = vertices_[b] - vertices_[a];
        f.length = d.norm();
        // Counter-clockwise ordering: outward normal is the tangent rotated clockwise.
        f.unit_normal = Vec2(d.y(), -d.x()) / f.length;
        edge_index.emplace(key, faces_.size());
        cell_faces_[k].push_back(faces_.size());
        faces_.push_back(f);
      } else {
        Face& f = faces_[it->second];
        if (!f.is_boundary) {
          throw std::logic_error("mesh: edge shared by more than two cells");
        }
        f.plus_cell = k;
        f.is_boundary = false;
        cell_faces_[k].push_back(it->second);
      }
    }
  }

  cell_face_counts_.assign(nc, 0);
  neighbors_.assign(nc, {});
  num_interior_faces_ = 0;
  for (auto& f : faces_) {
    const double km = cells_[f.minus_cell].measure;
    if (f.is_boundary) {
      f.h_e = km / f.length;
      continue;
    }
    ++num_interior_faces_;
    const double kp = cells_[f.plus_cell].measure;
    f.h_e = 2.0 * kp * km / (f.length * (km + kp));
    ++cell_face_counts_[f.minus_cell];
    ++cell_face_counts_[f.plus_cell];
    neighbors_[f.minus_cell].push_back(f.plus_cell);
    neighbors_[f.plus_cell].push_back(f.minus_cell);
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
}

double MeshTopology::total_measure() const {
  double s = 0.0;
  for (const auto& c : cells_) s += c.measure;
  return s;
}

namespace {

void check_args(int nx, int ny, const Rectangle& domain) {
  if (nx < 1 || ny < 1) {
    throw std::invalid_argument("mesh: cell counts must be >= 1 (got " + std::to_string(nx) +
                                " x " + std::to_string(ny) + ")");
  }
  if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0)) {
    throw std::invalid_argument("mesh: degenerate domain");
  }
}

std::vector<Vec2> grid_vertices(int nx, int ny, const Rectangle& d) {
  std::vector<Vec2> v;
  v.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      // Interpolate so that the last vertex lands exactly on the boundary.
      const double x = d.x0 + (d.x1 - d.x0) * static_cast<double>(i) / nx;
      const double y = d.y0 + (d.y1 - d.y0) * static_cast<double>(j) / ny;
      v.emplace_back(x, y);
    }
  }
  return v;
}

Cell make_affine_cell(CellType type, std::vector<std::size_t> vs, const std::vector<Vec2>& coords,
                      std::size_t corner, std::size_t e1, std::size_t e2) {
  Cell c;
  c.type = type;
  c.vertices = std::move(vs);
  c.origin = coords[corner];
  c.jacobian.col(0) = coords[e1] - coords[corner];
  c.jacobian.col(1) = coords[e2] - coords[corner];
  c.inverse_jacobian = c.jacobian.inverse();
  const double det = c.jacobian.determinant();
  c.measure = type == CellType::Quad ? det : 0.5 * det;
  return c;
}

}  // namespace

MeshTopology build_quad_mesh(int nx, int ny, const Rectangle& domain) {
  check_args(nx, ny, domain);
  auto coords = grid_vertices(nx, ny, domain);
  auto vid = [nx](int i, int j) { return static_cast<std::size_t>(j * (nx + 1) + i); };
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      cells.push_back(make_affine_cell(CellType::Quad, {v00, v10, v11, v01}, coords, v00, v10, v01));
    }
  }
  return MeshTopology(std::move(coords), std::move(cells), domain);
}

MeshTopology build_tri_mesh(int nx, int ny, const Rectangle& domain) {
  check_args(nx, ny, domain);
  auto coords = grid_vertices(nx, ny, domain);
  auto vid = [nx](int i, int j) { return static_cast<std::size_t>(j * (nx + 1) + i); };
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      // Reference origin at the right-angle corner of each half.
      cells.push_back(make_affine_cell(CellType::Tri, {v10, v11, v00}, coords, v10, v11, v00));
      cells.push_back(make_affine_cell(CellType::Tri, {v01, v00, v11}, coords, v01, v00, v11));
    }
  }
  return MeshTopology(std::move(coords), std::move(cells), domain);
}

double global_mesh_width(const MeshTopology& mesh) {
  double h = 0.0;
  for (const auto& f : mesh.faces()) h = std::max(h, f.h_e);
  return h;
}

}  // namespace chdg
