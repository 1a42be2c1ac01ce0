#pragma once

#include <cstdint>
#include <vector>

#include "dynamiqs/ring/integer_poly.hpp"

namespace dynamiqs::ring {

template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

// Row i holds the coefficients of x^i * h in R_q.
inline Matrix<std::uint64_t> anticirculant_matrix(const RingElement& h) {
  const auto n = h.size();
  const auto q = h.params().q;
  Matrix<std::uint64_t> m(n, n);
  std::vector<std::uint64_t> row(h.coeffs());
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) m(i, j) = row[j];
    // multiply by x: shift up, wrap the top coefficient with a sign flip
    const auto top = row[n - 1];
    for (std::uint32_t j = n - 1; j > 0; --j) row[j] = row[j - 1];
    row[0] = top ? q - top : 0;
  }
  return m;
}

// Signed version over Z[x]/(x^N + 1).
inline Matrix<std::int64_t> anticirculant_matrix(const std::vector<std::int64_t>& f) {
  const auto n = f.size();
  Matrix<std::int64_t> m(n, n);
  std::vector<std::int64_t> row(f);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = row[j];
    const auto top = row[n - 1];
    for (std::size_t j = n - 1; j > 0; --j) row[j] = row[j - 1];
    row[0] = -top;
  }
  return m;
}

// Row vector times matrix, mod q: vec(v) * A(h) == vec(v * h).
inline std::vector<std::uint64_t> row_times_matrix(const std::vector<std::uint64_t>& v, const Matrix<std::uint64_t>& m,
                                                   std::uint64_t q) {
  std::vector<std::uint64_t> out(m.cols(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] = (out[j] + mul_mod(v[i], m(i, j), q)) % q;
  return out;
}

}  // namespace dynamiqs::ring
