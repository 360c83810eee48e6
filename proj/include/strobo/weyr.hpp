#pragma once

// Rank sequences q_k = rank((L - lambda I)^k) and the Jordan block counts
// they determine.
//
// For an eigenvalue lambda of an n x n matrix the number of Jordan blocks of
// size m is the second difference
//
//     N(m) = q_{m-1} - 2 q_m + q_{m+1},     m >= 1,  q_0 = n,
//
// so the whole block structure at lambda follows from ranks alone. The
// sequence is nonincreasing and convex and stabilizes at the index s of the
// largest block; entries past s read as q_s.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "strobo/detail/eigen_bridge.hpp"
#include "strobo/error.hpp"
#include "strobo/matrix.hpp"

namespace strobo {

/// How the float backend evaluates q_k.
enum class WeyrMethod {
  /// Ranks of explicit powers M, M^2, ... formed by repeated multiplication.
  powers,
  /// Nested kernels: ker(M^k) = ker((I - P_{k-1}) M) with P_{k-1} the
  /// orthogonal projector onto ker(M^{k-1}). Every rank decision is taken on
  /// a matrix of the scale of M, so distant eigenvalues do not swamp the
  /// decision the way they do in high powers.
  deflation,
};

/// Default relative rank tolerance max(1e-10, n * machine epsilon).
inline double default_rank_tol(std::size_t n) {
  return std::max(1e-10, static_cast<double>(n) * std::numeric_limits<double>::epsilon());
}

struct RankPolicy {
  std::optional<double> rel_tol;  // default_rank_tol(n) when unset
  WeyrMethod method = WeyrMethod::deflation;
  // Lower bound on the scale the threshold is relative to. Ranking
  // L - lambda I uses ||L||_F when unset: a lambda that matches the whole
  // spectrum leaves only rounding noise in L - lambda I, and a threshold
  // relative to that noise would call it full rank.
  std::optional<double> scale_floor;

  double tolerance(std::size_t n) const { return rel_tol.value_or(default_rank_tol(n)); }

  /// Copy with the floor defaulted to ||L||_F.
  template <class M>
  RankPolicy for_shifts_of(const M& l) const {
    RankPolicy p = *this;
    if (!p.scale_floor) p.scale_floor = l.frobenius_norm();
    return p;
  }
};

/// One float rank decision and the singular-value gap it was taken across.
struct RankDecision {
  std::size_t rank = 0;
  double scale = 0.0;            // max(sigma_max, scale floor); the threshold is relative to it
  double threshold = 0.0;        // rel_tol * scale
  double smallest_kept = 0.0;    // sigma_rank (0 when rank == 0)
  double largest_dropped = 0.0;  // sigma_{rank+1} (0 when full rank)
  bool low_confidence = false;   // a singular value within 10x of the threshold
};

namespace detail {

inline RankDecision classify(const Eigen::VectorXd& sigma, double scale, double rel_tol) {
  RankDecision d;
  d.scale = scale;
  d.threshold = rel_tol * scale;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    const double s = sigma(k);
    if (scale > 0.0 && s > d.threshold) {
      ++d.rank;
      d.smallest_kept = s;
    } else {
      d.largest_dropped = std::max(d.largest_dropped, s);
    }
    if (scale > 0.0 && s > d.threshold / 10.0 && s < d.threshold * 10.0) d.low_confidence = true;
  }
  return d;
}

}  // namespace detail

namespace detail {

struct SingularValues {
  Eigen::VectorXd sigma;
  Eigen::MatrixXcd v;  // right singular vectors, only when requested
};

/// SVD via divide and conquer, falling back to one-sided Jacobi when it does
/// not converge or returns non-finite factors (both seen on nearly nilpotent
/// inputs of order >= 16).
inline SingularValues singular_values(const Eigen::MatrixXcd& a, bool with_v = false) {
  if (!a.allFinite()) throw spectral_error("matrix has non-finite entries");
  const unsigned options = with_v ? Eigen::ComputeFullV : 0;
  Eigen::BDCSVD<Eigen::MatrixXcd> bdc(a, options);
  if (bdc.info() == Eigen::Success && bdc.singularValues().allFinite() && (!with_v || bdc.matrixV().allFinite()))
    return {bdc.singularValues(), with_v ? Eigen::MatrixXcd(bdc.matrixV()) : Eigen::MatrixXcd()};
  Eigen::JacobiSVD<Eigen::MatrixXcd> jacobi(a, options);
  if (jacobi.info() != Eigen::Success) throw spectral_error("singular value decomposition failed");
  return {jacobi.singularValues(), with_v ? Eigen::MatrixXcd(jacobi.matrixV()) : Eigen::MatrixXcd()};
}

}  // namespace detail

/// Numerical rank with its gap diagnostics: singular values above
/// rel_tol * max(sigma_max, scale_floor) count; the zero matrix has rank 0.
inline RankDecision rank_decision(const FloatMatrix& a, const RankPolicy& policy = {}) {
  const Eigen::VectorXd sigma = detail::singular_values(detail::to_eigen(a)).sigma;
  const double smax = sigma.size() ? sigma(0) : 0.0;
  return detail::classify(sigma, std::max(smax, policy.scale_floor.value_or(0.0)), policy.tolerance(a.order()));
}

inline std::size_t rank_of(const FloatMatrix& a, const RankPolicy& policy = {}) {
  return rank_decision(a, policy).rank;
}

namespace detail {

/// Gaussian integer with exact division, used by the fraction-free
/// elimination below.
struct GaussianInteger {
  mpz_class re, im;

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }

  friend GaussianInteger operator*(const GaussianInteger& a, const GaussianInteger& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussianInteger operator-(const GaussianInteger& a, const GaussianInteger& b) {
    return {a.re - b.re, a.im - b.im};
  }

  /// a / b where b is known to divide a.
  static GaussianInteger divexact(const GaussianInteger& a, const GaussianInteger& b) {
    const mpz_class n = b.re * b.re + b.im * b.im;
    mpz_class re = a.re * b.re + a.im * b.im;
    mpz_class im = a.im * b.re - a.re * b.im;
    if (n == 1) return {re, im};
    mpz_divexact(re.get_mpz_t(), re.get_mpz_t(), n.get_mpz_t());
    mpz_divexact(im.get_mpz_t(), im.get_mpz_t(), n.get_mpz_t());
    return {re, im};
  }
};

}  // namespace detail

/// Exact rank by fraction-free (Bareiss) elimination over the Gaussian
/// integers. Each row is first scaled by the lcm of its denominators, which
/// leaves the rank unchanged. The policy is ignored.
inline std::size_t rank_of(const ExactMatrix& a, const RankPolicy& = {}) {
  using detail::GaussianInteger;
  const std::size_t n = a.order();
  std::vector<std::vector<GaussianInteger>> w(n, std::vector<GaussianInteger>(n));
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class l = 1;
    for (std::size_t j = 0; j < n; ++j) {
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a(i, j).real().get_den_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a(i, j).imag().get_den_mpz_t());
    }
    for (std::size_t j = 0; j < n; ++j) {
      w[i][j].re = l / a(i, j).real().get_den() * a(i, j).real().get_num();
      w[i][j].im = l / a(i, j).imag().get_den() * a(i, j).imag().get_num();
    }
  }

  std::size_t rank = 0;
  GaussianInteger prev{1, 0};
  for (std::size_t col = 0; col < n && rank < n; ++col) {
    std::size_t piv = rank;
    while (piv < n && w[piv][col].is_zero()) ++piv;
    if (piv == n) continue;
    std::swap(w[piv], w[rank]);
    const GaussianInteger& p = w[rank][col];
    for (std::size_t i = rank + 1; i < n; ++i) {
      for (std::size_t j = col + 1; j < n; ++j)
        w[i][j] = GaussianInteger::divexact(p * w[i][j] - w[i][col] * w[rank][j], prev);
      w[i][col] = {0, 0};
    }
    prev = p;
    ++rank;
  }
  return rank;
}

template <Scalar T>
struct WeyrProfile {
  T eigenvalue{};
  /// q_0 = n, q_1, ..., q_s, q_{s+1} = q_s (stored through the first repeat).
  std::vector<std::size_t> q;
  std::size_t stabilization_index = 0;
  /// Float backend only: the decision behind each q_k, k >= 1.
  std::vector<RankDecision> decisions;

  std::size_t order() const { return q.front(); }

  /// q_k with indices past the stored range reading as q_s.
  std::size_t at(std::size_t k) const { return q[std::min(k, q.size() - 1)]; }

  bool low_confidence() const {
    return std::any_of(decisions.begin(), decisions.end(), [](const RankDecision& d) { return d.low_confidence; });
  }
};

namespace detail {

template <Scalar T>
void finish_profile(WeyrProfile<T>& p) {
  p.stabilization_index = p.q.size() - 2;
}

inline WeyrProfile<cplx> weyr_by_deflation(const FloatMatrix& l, const cplx& lambda, double rel_tol,
                                           double scale_floor) {
  WeyrProfile<cplx> p;
  p.eigenvalue = lambda;
  const auto n = static_cast<Eigen::Index>(l.order());
  p.q.push_back(l.order());

  const Eigen::MatrixXcd m = to_eigen(shift(l, lambda));
  Eigen::MatrixXcd kernel(n, 0);
  double scale = -1.0;
  while (true) {
    Eigen::MatrixXcd a = m;
    if (kernel.cols() > 0) a.noalias() -= kernel * (kernel.adjoint() * m);
    const SingularValues svd = singular_values(a, true);
    const Eigen::VectorXd& sigma = svd.sigma;
    if (scale < 0.0) scale = std::max(sigma.size() ? sigma(0) : 0.0, scale_floor);

    RankDecision d = classify(sigma, scale, rel_tol);
    const auto r = static_cast<Eigen::Index>(d.rank);
    p.decisions.push_back(d);
    const std::size_t prev = p.q.back();
    p.q.push_back(d.rank);
    if (d.rank == prev) break;
    kernel = svd.v.rightCols(n - r);
  }
  finish_profile(p);
  return p;
}

template <Scalar T>
WeyrProfile<T> weyr_by_powers(const Matrix<T>& l, const T& lambda, const RankPolicy& policy) {
  WeyrProfile<T> p;
  p.eigenvalue = lambda;
  p.q.push_back(l.order());
  const Matrix<T> m = shift(l, lambda);
  Matrix<T> power = m;
  RankPolicy step = policy;
  while (true) {
    std::size_t r;
    if constexpr (scalar_traits<T>::exact) {
      r = rank_of(power);
    } else {
      RankDecision d = rank_decision(power, step);
      r = d.rank;
      p.decisions.push_back(d);
    }
    const std::size_t prev = p.q.back();
    p.q.push_back(r);
    if (r == prev) break;
    power = power * m;
    // The k-th power is measured against floor^k.
    if (step.scale_floor) step.scale_floor = *step.scale_floor * policy.scale_floor.value_or(0.0);
  }
  finish_profile(p);
  return p;
}

}  // namespace detail

/// Rank sequence of L - lambda I, computed until two consecutive ranks agree.
/// A lambda outside the spectrum yields q = [n, n].
template <Scalar T>
WeyrProfile<T> weyr_sequence(const Matrix<T>& l, const T& lambda, const RankPolicy& policy = {}) {
  if constexpr (scalar_traits<T>::exact) {
    return detail::weyr_by_powers(l, lambda, policy);
  } else {
    const RankPolicy p = policy.for_shifts_of(l);
    if (p.method == WeyrMethod::powers) return detail::weyr_by_powers(l, lambda, p);
    return detail::weyr_by_deflation(l, lambda, p.tolerance(l.order()), *p.scale_floor);
  }
}

template <Scalar T>
struct JordanStructure {
  T eigenvalue{};
  /// m -> N(m), only sizes with at least one block.
  std::map<std::size_t, std::size_t> block_counts;
  std::size_t geometric_multiplicity = 0;  // sum_m N(m)
  std::size_t algebraic_multiplicity = 0;  // sum_m m N(m)
};

inline std::string format_ranks(const std::vector<std::size_t>& q) {
  std::string s = "[";
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (k) s += ", ";
    s += std::to_string(q[k]);
  }
  return s + "]";
}

/// Block counts N(m) = q_{m-1} - 2 q_m + q_{m+1} for m = 1..s.
///
/// Throws convexity_error when the sequence increases or a count would be
/// negative; on the float backend this means the rank tolerance does not
/// separate the singular values cleanly. Nothing is clamped.
template <Scalar T>
JordanStructure<T> block_counts(const WeyrProfile<T>& profile) {
  const auto& q = profile.q;
  if (q.size() < 2) throw std::invalid_argument("rank sequence needs at least q_0 and q_1");
  for (std::size_t k = 1; k < q.size(); ++k)
    if (q[k] > q[k - 1])
      throw convexity_error("rank sequence increases at k = " + std::to_string(k) + ": q = " + format_ranks(q), k,
                            q);

  JordanStructure<T> js;
  js.eigenvalue = profile.eigenvalue;
  for (std::size_t m = 1; m < q.size(); ++m) {
    const auto prev = static_cast<long long>(profile.at(m - 1));
    const auto cur = static_cast<long long>(profile.at(m));
    const auto next = static_cast<long long>(profile.at(m + 1));
    const long long count = prev - 2 * cur + next;
    if (count < 0)
      throw convexity_error("negative block count N(" + std::to_string(m) + ") = " + std::to_string(count) +
                                " from q = " + format_ranks(q),
                            m, q);
    if (count > 0) {
      const auto c = static_cast<std::size_t>(count);
      js.block_counts[m] = c;
      js.geometric_multiplicity += c;
      js.algebraic_multiplicity += m * c;
    }
  }
  return js;
}

}  // namespace strobo
