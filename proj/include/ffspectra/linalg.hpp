#pragma once

// Dense matrices over the prime field GF(p) and over a full GF(p^n).

#include <cstdint>
#include <optional>
#include <vector>

#include "ffspectra/field.hpp"

namespace ffspectra {

/// Row-major matrix with entries in GF(p), stored as integers in [0, p).
class PrimeMatrix {
 public:
  PrimeMatrix(std::size_t rows, std::size_t cols, std::uint32_t p)
      : rows_(rows), cols_(cols), p_(p), data_(rows * cols, 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::uint32_t p() const noexcept { return p_; }

  std::uint32_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::uint32_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  /// Matrix whose j-th column holds the digits of columns[j].
  static PrimeMatrix from_columns(const Field& f, const std::vector<Elem>& columns) {
    PrimeMatrix m(f.n(), columns.size(), f.p());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const auto d = f.digits(columns[j]);
      for (unsigned i = 0; i < f.n(); ++i) m(i, j) = d[i];
    }
    return m;
  }

 private:
  std::size_t rows_, cols_;
  std::uint32_t p_;
  std::vector<std::uint32_t> data_;
};

namespace detail {

inline std::uint32_t inv_mod_prime(std::uint32_t a, std::uint32_t p) {
  return static_cast<std::uint32_t>(powmod(a, p - 2, p));
}

}  // namespace detail

struct Echelon {
  PrimeMatrix reduced;
  std::vector<std::size_t> pivot_cols;
  std::size_t rank() const noexcept { return pivot_cols.size(); }
};

/// Reduced row echelon form by Gauss-Jordan elimination.
inline Echelon rref(PrimeMatrix m) {
  const std::uint32_t p = m.p();
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t piv = row;
    while (piv < m.rows() && m(piv, col) == 0) ++piv;
    if (piv == m.rows()) continue;
    if (piv != row)
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(piv, c), m(row, c));
    const std::uint64_t s = detail::inv_mod_prime(m(row, col), p);
    for (std::size_t c = 0; c < m.cols(); ++c) m(row, c) = static_cast<std::uint32_t>((m(row, c) * s) % p);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col) == 0) continue;
      const std::uint64_t factor = m(r, col);
      for (std::size_t c = 0; c < m.cols(); ++c) {
        const std::uint64_t sub = (factor * m(row, c)) % p;
        m(r, c) = static_cast<std::uint32_t>((m(r, c) + p - sub) % p);
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return {std::move(m), std::move(pivots)};
}

/// Basis of the right null space, one vector per free column.
inline std::vector<std::vector<std::uint32_t>> null_space(const PrimeMatrix& m) {
  const Echelon e = rref(m);
  const std::uint32_t p = m.p();
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : e.pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<std::uint32_t>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<std::uint32_t> v(m.cols(), 0);
    v[free] = 1;
    for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) {
      const std::uint32_t a = e.reduced(r, free);
      v[e.pivot_cols[r]] = a == 0 ? 0 : p - a;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

/// One solution of m * x = rhs, if any.
inline std::optional<std::vector<std::uint32_t>> solve(const PrimeMatrix& m, const std::vector<std::uint32_t>& rhs) {
  PrimeMatrix aug(m.rows(), m.cols() + 1, m.p());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) aug(r, c) = m(r, c);
    aug(r, m.cols()) = rhs[r];
  }
  const Echelon e = rref(std::move(aug));
  if (!e.pivot_cols.empty() && e.pivot_cols.back() == m.cols()) return std::nullopt;
  std::vector<std::uint32_t> x(m.cols(), 0);
  for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) x[e.pivot_cols[r]] = e.reduced(r, m.cols());
  return x;
}

// ---------------------------------------------------------------------------

/// Square or rectangular matrix with entries in a field GF(p^n).
class FieldMatrix {
 public:
  FieldMatrix(const Field& f, std::size_t rows, std::size_t cols)
      : field_(&f), rows_(rows), cols_(cols), data_(rows * cols, f.zero()) {}

  static FieldMatrix identity(const Field& f, std::size_t size) {
    FieldMatrix m(f, size, size);
    for (std::size_t i = 0; i < size; ++i) m(i, i) = f.one();
    return m;
  }

  const Field& field() const noexcept { return *field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Elem& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Elem operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  /// Entrywise x -> x^(p^i).
  FieldMatrix frobenius(std::uint64_t i) const {
    FieldMatrix out = *this;
    for (auto& e : out.data_) e = field_->frobenius(e, i);
    return out;
  }

  friend FieldMatrix operator*(const FieldMatrix& a, const FieldMatrix& b) {
    const Field& f = *a.field_;
    FieldMatrix out(f, a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Elem aik = a(i, k);
        if (aik.v == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) = f.add(out(i, j), f.mul(aik, b(k, j)));
      }
    return out;
  }

  friend FieldMatrix operator-(const FieldMatrix& a, const FieldMatrix& b) {
    FieldMatrix out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] = a.field_->sub(a.data_[i], b.data_[i]);
    return out;
  }

  bool is_zero() const noexcept {
    for (auto e : data_)
      if (e.v != 0) return false;
    return true;
  }

  std::size_t rank() const {
    const Field& f = *field_;
    FieldMatrix m = *this;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
      std::size_t piv = row;
      while (piv < rows_ && m(piv, col).v == 0) ++piv;
      if (piv == rows_) continue;
      if (piv != row)
        for (std::size_t c = 0; c < cols_; ++c) std::swap(m(piv, c), m(row, c));
      const Elem s = f.inv(m(row, col));
      for (std::size_t r = row + 1; r < rows_; ++r) {
        if (m(r, col).v == 0) continue;
        const Elem factor = f.mul(m(r, col), s);
        for (std::size_t c = col; c < cols_; ++c) m(r, c) = f.sub(m(r, c), f.mul(factor, m(row, c)));
      }
      ++row;
    }
    return row;
  }

 private:
  const Field* field_;
  std::size_t rows_, cols_;
  std::vector<Elem> data_;
};

}  // namespace ffspectra
