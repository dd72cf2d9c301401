#include "chdg/sparse.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace chdg {

BlockSparseMatrix::BlockSparseMatrix(const MeshTopology& mesh, std::size_t block_size) : bs_(block_size) {
  const std::size_t n = mesh.num_cells();
  row_ptr_.assign(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    auto cols = mesh.neighbors(k);
    cols.push_back(k);
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    cols_.insert(cols_.end(), cols.begin(), cols.end());
    row_ptr_[k + 1] = cols_.size();
  }
  values_.assign(cols_.size() * bs_ * bs_, 0.0);
}

std::size_t BlockSparseMatrix::find(std::size_t row, std::size_t col) const {
  for (std::size_t e = row_ptr_.at(row); e < row_ptr_[row + 1]; ++e) {
    if (cols_[e] == col) return e;
  }
  throw std::out_of_range("BlockSparseMatrix: block (" + std::to_string(row) + ", " +
                          std::to_string(col) + ") not in pattern");
}

BlockSparseMatrix::Block BlockSparseMatrix::block_at(std::size_t entry) {
  const auto b = static_cast<Eigen::Index>(bs_);
  return Block(values_.data() + entry * bs_ * bs_, b, b);
}

BlockSparseMatrix::ConstBlock BlockSparseMatrix::block_at(std::size_t entry) const {
  const auto b = static_cast<Eigen::Index>(bs_);
  return ConstBlock(values_.data() + entry * bs_ * bs_, b, b);
}

BlockSparseMatrix::Block BlockSparseMatrix::block(std::size_t row, std::size_t col) {
  return block_at(find(row, col));
}

BlockSparseMatrix::ConstBlock BlockSparseMatrix::block(std::size_t row, std::size_t col) const {
  return block_at(find(row, col));
}

void BlockSparseMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

Eigen::VectorXd BlockSparseMatrix::multiply(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != rows()) {
    throw std::invalid_argument("BlockSparseMatrix::multiply: size mismatch");
  }
  const auto b = static_cast<Eigen::Index>(bs_);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
  for (std::size_t r = 0; r + 1 < row_ptr_.size(); ++r) {
    auto yr = y.segment(static_cast<Eigen::Index>(r) * b, b);
    for (std::size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) {
      yr.noalias() += block_at(e) * x.segment(static_cast<Eigen::Index>(cols_[e]) * b, b);
    }
  }
  return y;
}

Eigen::SparseMatrix<double> BlockSparseMatrix::to_sparse() const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(values_.size());
  for (std::size_t r = 0; r + 1 < row_ptr_.size(); ++r) {
    for (std::size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) {
      const auto blk = block_at(e);
      for (std::size_t i = 0; i < bs_; ++i) {
        for (std::size_t j = 0; j < bs_; ++j) {
          // Explicit zeros keep the pattern fixed across re-assemblies.
          const double v = blk(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          trips.emplace_back(static_cast<int>(r * bs_ + i), static_cast<int>(cols_[e] * bs_ + j), v);
        }
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(rows());
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

Eigen::MatrixXd BlockSparseMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(rows());
  const auto b = static_cast<Eigen::Index>(bs_);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t r = 0; r + 1 < row_ptr_.size(); ++r) {
    for (std::size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) {
      m.block(static_cast<Eigen::Index>(r) * b, static_cast<Eigen::Index>(cols_[e]) * b, b, b) = block_at(e);
    }
  }
  return m;
}

}  // namespace chdg
