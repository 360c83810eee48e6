#pragma once

// Generators and independent oracles shared by the test suites.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "strobo/strobo.hpp"

namespace strobo::testing {

using Rng = std::mt19937_64;

inline GaussianRational random_rational(Rng& rng, int span = 4, int max_den = 4) {
  std::uniform_int_distribution<int> num(-span, span), den(1, max_den);
  return GaussianRational(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng)));
}

inline ExactMatrix random_exact(Rng& rng, std::size_t n, int span = 4, int max_den = 4) {
  ExactMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = random_rational(rng, span, max_den);
  return m;
}

/// Random invertible Gaussian-rational matrix, rejection-sampled on the exact
/// rank.
inline ExactMatrix random_invertible_exact(Rng& rng, std::size_t n) {
  while (true) {
    ExactMatrix p = random_exact(rng, n, 3, 3);
    if (rank_of(p) == n) return p;
  }
}

inline cplx random_complex(Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  return {g(rng), g(rng)};
}

inline FloatMatrix random_float(Rng& rng, std::size_t n, double scale = 1.0) {
  FloatMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = random_complex(rng, scale);
  return m;
}

inline Eigen::MatrixXcd to_eigen(const FloatMatrix& a) { return detail::to_eigen(a); }

inline FloatMatrix from_eigen(const Eigen::MatrixXcd& m) {
  FloatMatrix a(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
  return a;
}

inline double condition_number(const FloatMatrix& p) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(p));
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

/// Random float similarity with cond(P) <= max_cond, by rejection.
inline FloatMatrix random_conditioned(Rng& rng, std::size_t n, double max_cond) {
  while (true) {
    FloatMatrix p = random_float(rng, n) + FloatMatrix::identity(n) * cplx(2.0);
    if (condition_number(p) <= max_cond) return p;
  }
}

inline FloatMatrix inverse(const FloatMatrix& p) { return from_eigen(to_eigen(p).inverse()); }

/// A Jordan block of a given size at a given eigenvalue.
template <Scalar T>
struct Block {
  std::size_t size;
  T eigenvalue;
};

template <Scalar T>
Matrix<T> jordan_matrix(const std::vector<Block<T>>& blocks) {
  std::vector<Matrix<T>> ms;
  for (const auto& b : blocks) ms.push_back(Matrix<T>::jordan_block(b.size, b.eigenvalue));
  return direct_sum(ms);
}

/// The block multiset at each eigenvalue: eigenvalue index -> (size -> count).
template <Scalar T>
std::map<std::size_t, std::size_t> expected_counts(const std::vector<Block<T>>& blocks, const T& lambda) {
  std::map<std::size_t, std::size_t> out;
  for (const auto& b : blocks)
    if (b.eigenvalue == lambda) ++out[b.size];
  return out;
}

/// All partitions of n as nonincreasing part lists.
inline std::vector<std::vector<std::size_t>> partitions(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t rest, std::size_t max_part) -> void {
    if (rest == 0) {
      out.push_back(cur);
      return;
    }
    for (std::size_t p = std::min(rest, max_part); p >= 1; --p) {
      cur.push_back(p);
      self(self, rest - p, p);
      cur.pop_back();
    }
  };
  rec(rec, n, n);
  return out;
}

/// Textbook triple-loop product, written independently of Matrix::operator*.
template <Scalar T>
Matrix<T> naive_product(const Matrix<T>& a, const Matrix<T>& b) {
  const std::size_t n = a.order();
  Matrix<T> c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      T s{};
      for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

/// Exact rank by ordinary Gaussian elimination over Q(i); an oracle for the
/// fraction-free implementation.
inline std::size_t rational_rank(ExactMatrix a) {
  const std::size_t n = a.order();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < n; ++col) {
    std::size_t piv = rank;
    while (piv < n && a(piv, col).is_zero()) ++piv;
    if (piv == n) continue;
    for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(rank, j));
    for (std::size_t i = rank + 1; i < n; ++i) {
      if (a(i, col).is_zero()) continue;
      const GaussianRational f = a(i, col) / a(rank, col);
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(rank, j);
    }
    ++rank;
  }
  return rank;
}

inline FloatMatrix random_hermitian(Rng& rng, std::size_t n) {
  FloatMatrix a = random_float(rng, n);
  FloatMatrix h = a + a.adjoint();
  for (std::size_t i = 0; i < n; ++i) h(i, i) = {h(i, i).real(), 0.0};
  return h;
}

inline GKLSModel<cplx> random_model(Rng& rng, std::size_t n, std::size_t jumps) {
  GKLSModel<cplx> m(random_hermitian(rng, n));
  std::uniform_real_distribution<double> rate(0.1, 2.0);
  for (std::size_t j = 0; j < jumps; ++j) m.jumps.push_back({random_float(rng, n), rate(rng)});
  return m;
}

inline ExactMatrix matrix_unit_exact(std::size_t n, std::size_t i, std::size_t j) {
  ExactMatrix e(n);
  e(i, j) = GaussianRational(1);
  return e;
}

inline FloatMatrix matrix_unit(std::size_t n, std::size_t i, std::size_t j) {
  FloatMatrix e(n);
  e(i, j) = 1.0;
  return e;
}

inline double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double max_abs(std::span<const cplx> a) {
  double m = 0.0;
  for (const auto& z : a) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace strobo::testing
