#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "strobo/error.hpp"
#include "strobo/scalar.hpp"

namespace strobo {

/// Dense square matrix over a backend scalar, stored row-major.
///
/// The backend is part of the type: a float matrix and an exact matrix can
/// never be combined, so mixing backends is rejected at compile time.
/// Matrices are values; every operation below returns a new matrix.
template <Scalar T>
class Matrix {
 public:
  using value_type = T;
  using traits = scalar_traits<T>;

  /// Zero matrix of order n (n >= 1).
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, T{}) {
    if (n == 0) throw dimension_error("matrix order must be positive");
  }

  /// From nested rows; every row must have exactly as many entries as there
  /// are rows.
  Matrix(std::initializer_list<std::initializer_list<T>> rows) : Matrix(rows.size()) {
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != n_)
        throw dimension_error("row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                              " entries, expected " + std::to_string(n_));
      std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * n_));
      ++i;
    }
  }

  static Matrix from_rows(const std::vector<std::vector<T>>& rows) {
    if (rows.empty()) throw dimension_error("matrix order must be positive");
    Matrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size())
        throw dimension_error("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                              " entries, expected " + std::to_string(rows.size()));
      for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Matrix diagonal(const std::vector<T>& d) {
    Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  /// Upper bidiagonal block J_p(lambda).
  static Matrix jordan_block(std::size_t p, const T& lambda) {
    Matrix m(p);
    for (std::size_t i = 0; i < p; ++i) {
      m(i, i) = lambda;
      if (i + 1 < p) m(i, i + 1) = T(1);
    }
    return m;
  }

  std::size_t order() const noexcept { return n_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  std::span<const T> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  std::span<const T> data() const noexcept { return data_; }

  friend bool operator==(const Matrix& a, const Matrix& b) { return a.n_ == b.n_ && a.data_ == b.data_; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& x) { return traits::is_zero(x); });
  }

  Matrix transpose() const {
    Matrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix conjugate() const {
    Matrix c(n_);
    for (std::size_t k = 0; k < data_.size(); ++k) c.data_[k] = traits::conj(data_[k]);
    return c;
  }

  Matrix adjoint() const { return conjugate().transpose(); }

  T trace() const {
    T t{};
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  /// Frobenius norm, evaluated in double precision on either backend.
  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& x : data_) s += std::norm(traits::to_complex(x));
    return std::sqrt(s);
  }

  /// Largest entry magnitude.
  double max_abs() const {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, traits::magnitude(x));
    return m;
  }

  Matrix& operator+=(const Matrix& o) {
    require_same_order(o, "add");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    require_same_order(o, "subtract");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const T& c) {
    for (auto& x : data_) x *= c;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) {
    for (auto& x : a.data_) x = -x;
    return a;
  }
  friend Matrix operator*(Matrix a, const T& c) { return a *= c; }
  friend Matrix operator*(const T& c, Matrix a) { return a *= c; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    a.require_same_order(b, "multiply");
    const std::size_t n = a.n_;
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
      T* ci = c.data_.data() + i * n;
      for (std::size_t k = 0; k < n; ++k) {
        const T& aik = a.data_[i * n + k];
        if (traits::is_zero(aik)) continue;
        const T* bk = b.data_.data() + k * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
      }
    }
    return c;
  }

  /// Matrix-vector product.
  std::vector<T> apply(std::span<const T> x) const {
    if (x.size() != n_)
      throw dimension_error("vector length " + std::to_string(x.size()) + " does not match order " +
                            std::to_string(n_));
    std::vector<T> y(n_, T{});
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

 private:
  void require_same_order(const Matrix& o, const char* op) const {
    if (o.n_ != n_)
      throw dimension_error(std::string("cannot ") + op + " matrices of order " + std::to_string(n_) +
                            " and " + std::to_string(o.n_));
  }

  std::size_t n_;
  std::vector<T> data_;
};

using FloatMatrix = Matrix<cplx>;
using ExactMatrix = Matrix<GaussianRational>;

template <Scalar T>
Matrix<T> add(const Matrix<T>& a, const Matrix<T>& b) {
  return a + b;
}

template <Scalar T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  return a * b;
}

/// A - lambda I.
template <Scalar T>
Matrix<T> shift(Matrix<T> a, const T& lambda) {
  for (std::size_t i = 0; i < a.order(); ++i) a(i, i) -= lambda;
  return a;
}

/// Kronecker product: C[i*p + k, j*p + l] = A[i, j] * B[k, l], p = order(B).
template <Scalar T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
  const std::size_t n = a.order(), p = b.order();
  Matrix<T> c(n * p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const T& aij = a(i, j);
      if (scalar_traits<T>::is_zero(aij)) continue;
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t l = 0; l < p; ++l) c(i * p + k, j * p + l) = aij * b(k, l);
    }
  return c;
}

/// Column-stacking vectorization: element k = j*N + i holds rho(i, j).
template <Scalar T>
std::vector<T> vectorize(const Matrix<T>& rho) {
  const std::size_t n = rho.order();
  std::vector<T> v(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) v[j * n + i] = rho(i, j);
  return v;
}

/// Inverse of vectorize; the length must be a perfect square.
template <Scalar T>
Matrix<T> unvectorize(std::span<const T> v) {
  auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n == 0 || n * n != v.size())
    throw dimension_error("vector length " + std::to_string(v.size()) + " is not a positive square");
  Matrix<T> rho(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) rho(i, j) = v[j * n + i];
  return rho;
}

/// Block-diagonal direct sum.
template <Scalar T>
Matrix<T> direct_sum(const std::vector<Matrix<T>>& blocks) {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.order();
  Matrix<T> m(n);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.order(); ++i)
      for (std::size_t j = 0; j < b.order(); ++j) m(off + i, off + j) = b(i, j);
    off += b.order();
  }
  return m;
}

/// Exact inverse by Gauss-Jordan elimination over Q(i).
inline ExactMatrix inverse(const ExactMatrix& a) {
  const std::size_t n = a.order();
  ExactMatrix w = a, inv = ExactMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && w(piv, col).is_zero()) ++piv;
    if (piv == n) throw dimension_error("matrix is singular");
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(w(piv, j), w(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const GaussianRational scale = GaussianRational(1) / w(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      w(col, j) *= scale;
      inv(col, j) *= scale;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || w(r, col).is_zero()) continue;
      const GaussianRational f = w(r, col);
      for (std::size_t j = 0; j < n; ++j) {
        w(r, j) -= f * w(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

/// Rounds an exact matrix to the float backend.
inline FloatMatrix to_float(const ExactMatrix& a) {
  FloatMatrix f(a.order());
  for (std::size_t i = 0; i < a.order(); ++i)
    for (std::size_t j = 0; j < a.order(); ++j) f(i, j) = a(i, j).to_complex();
  return f;
}

}  // namespace strobo
