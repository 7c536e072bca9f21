#pragma once

#include <utility>
#include <vector>

#include "corners/rational.hpp"

namespace corners {

/** Dense matrix of exact rationals; rank via Gaussian elimination, which is
 * basis-independent because arithmetic is exact. */
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(rows, std::vector<Rational>(cols)) {}
  RatMatrix(std::vector<std::vector<Rational>> rows) : a_(std::move(rows)) {
    rows_ = (int)a_.size();
    cols_ = rows_ ? (int)a_[0].size() : 0;
    for (auto& r : a_)
      if ((int)r.size() != cols_) throw ShapeError("ragged matrix");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& at(int i, int j) { return a_[i][j]; }
  const Rational& at(int i, int j) const { return a_[i][j]; }

  int rank() const {
    auto m = a_;
    int r = 0;
    for (int col = 0; col < cols_ && r < rows_; ++col) {
      int pivot = -1;
      for (int i = r; i < rows_; ++i)
        if (!m[i][col].is_zero()) {
          pivot = i;
          break;
        }
      if (pivot < 0) continue;
      std::swap(m[r], m[pivot]);
      for (int i = r + 1; i < rows_; ++i) {
        if (m[i][col].is_zero()) continue;
        Rational f = m[i][col] / m[r][col];
        for (int j = col; j < cols_; ++j) m[i][j] -= f * m[r][j];
      }
      ++r;
    }
    return r;
  }

  /** min(dim ker, dim coker) of the linear map this matrix represents. */
  int corank() const {
    int rk = rank();
    return std::min(cols_ - rk, rows_ - rk);
  }

  RatMatrix transpose() const {
    RatMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t.at(j, i) = a_[i][j];
    return t;
  }

  static RatMatrix hcat(const RatMatrix& a, const RatMatrix& b) {
    if (a.rows() != b.rows()) throw ShapeError("hcat row mismatch");
    RatMatrix r(a.rows(), a.cols() + b.cols());
    for (int i = 0; i < a.rows(); ++i) {
      for (int j = 0; j < a.cols(); ++j) r.at(i, j) = a.at(i, j);
      for (int j = 0; j < b.cols(); ++j) r.at(i, a.cols() + j) = b.at(i, j);
    }
    return r;
  }

  static RatMatrix product(const RatMatrix& a, const RatMatrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("matrix product shape mismatch");
    RatMatrix r(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
      for (int k = 0; k < a.cols(); ++k) {
        if (a.at(i, k).is_zero()) continue;
        for (int j = 0; j < b.cols(); ++j) r.at(i, j) += a.at(i, k) * b.at(k, j);
      }
    return r;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<std::vector<Rational>> a_;
};

/** Numeric rank of a double matrix via elimination with partial pivoting and
 * a relative threshold. Used only on the floating-point evaluation path. */
inline int numeric_rank(std::vector<std::vector<double>> m, double rel_tol = 1e-9) {
  int rows = (int)m.size();
  int cols = rows ? (int)m[0].size() : 0;
  double scale = 0;
  for (auto& r : m)
    for (double v : r) scale = std::max(scale, std::abs(v));
  if (scale == 0) return 0;
  double tol = scale * rel_tol;
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = rank;
    for (int i = rank + 1; i < rows; ++i)
      if (std::abs(m[i][col]) > std::abs(m[pivot][col])) pivot = i;
    if (std::abs(m[pivot][col]) <= tol) continue;
    std::swap(m[rank], m[pivot]);
    for (int i = rank + 1; i < rows; ++i) {
      double f = m[i][col] / m[rank][col];
      for (int j = col; j < cols; ++j) m[i][j] -= f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

}  // namespace corners
