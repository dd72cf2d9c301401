#pragma once

#include "chdg/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <vector>

namespace chdg {

/// Block-row sparse matrix with one dense block per (cell, cell) coupling.
/// The pattern is the cell diagonal plus all face-neighbor pairs.
class BlockSparseMatrix {
 public:
  using Block = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstBlock =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

  BlockSparseMatrix() = default;
  /// Pattern from mesh connectivity, all blocks zero.
  BlockSparseMatrix(const MeshTopology& mesh, std::size_t block_size);

  std::size_t block_size() const { return bs_; }
  std::size_t num_block_rows() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t rows() const { return num_block_rows() * bs_; }
  std::size_t num_blocks() const { return cols_.size(); }

  /// Block coupling test cell `row` to trial cell `col`; must be in the pattern.
  Block block(std::size_t row, std::size_t col);
  ConstBlock block(std::size_t row, std::size_t col) const;

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& block_cols() const { return cols_; }
  Block block_at(std::size_t entry);
  ConstBlock block_at(std::size_t entry) const;

  void set_zero();
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;

  Eigen::SparseMatrix<double> to_sparse() const;
  Eigen::MatrixXd to_dense() const;

 private:
  std::size_t find(std::size_t row, std::size_t col) const;

  std::size_t bs_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

}  // namespace chdg
