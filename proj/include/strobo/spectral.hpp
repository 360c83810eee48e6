#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "strobo/detail/eigen_bridge.hpp"
#include "strobo/error.hpp"
#include "strobo/matrix.hpp"

namespace strobo {

/// Raw eigenvalues together with the worst residual ||A v - lambda v|| / ||v||
/// over all computed pairs. The residual bounds the smallest singular value of
/// A - lambda I from above.
struct EigenSolution {
  std::vector<cplx> values;
  double max_residual = 0.0;
  double residual_bound = 0.0;
};

/// Residual bound accepted for a computed eigenvalue: 1e-8 * ||A||_F.
inline double eigen_residual_bound(const FloatMatrix& a) { return 1e-8 * a.frobenius_norm(); }

inline EigenSolution solve_eigenvalues(const FloatMatrix& a) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(detail::to_eigen(a), /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) throw spectral_error("complex QR iteration did not converge");

  const Eigen::MatrixXcd m = detail::to_eigen(a);
  EigenSolution out;
  out.residual_bound = eigen_residual_bound(a);
  out.values.reserve(a.order());
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    const cplx lambda = solver.eigenvalues()(k);
    const Eigen::VectorXcd v = solver.eigenvectors().col(k);
    const double vn = v.norm();
    const double r = vn > 0.0 ? (m * v - lambda * v).norm() / vn : 0.0;
    out.max_residual = std::max(out.max_residual, r);
    out.values.push_back(lambda);
  }
  if (!(out.max_residual <= out.residual_bound))
    throw spectral_error("eigenvalue residual " + std::to_string(out.max_residual) + " exceeds bound " +
                             std::to_string(out.residual_bound),
                         out.max_residual);
  return out;
}

/// The n eigenvalues of A, with repetition, in solver order.
inline std::vector<cplx> eigenvalues(const FloatMatrix& a) { return solve_eigenvalues(a).values; }

struct EigenvalueCluster {
  cplx representative;        // mean of members
  std::vector<cplx> members;  // sorted by (re, im)
  std::size_t algebraic_multiplicity = 0;
  double radius = 0.0;        // max |member - representative|
};

struct Spectrum {
  std::vector<EigenvalueCluster> clusters;  // sorted by representative (re, im)
  std::size_t order = 0;
  double tolerance = 0.0;
};

/// Default clustering tolerance 1e-8 * max(1, ||A||_F).
inline double default_cluster_tol(const FloatMatrix& a) {
  return 1e-8 * std::max(1.0, a.frobenius_norm());
}

/// Builds a cluster from its members. Members are sorted before averaging so
/// the representative does not depend on input order.
inline EigenvalueCluster make_cluster(std::vector<cplx> members) {
  std::sort(members.begin(), members.end(), [](const cplx& a, const cplx& b) { return lex_less(a, b); });
  cplx sum{};
  for (const auto& z : members) sum += z;
  EigenvalueCluster c;
  c.representative = sum / static_cast<double>(members.size());
  for (const auto& z : members) c.radius = std::max(c.radius, std::abs(z - c.representative));
  c.algebraic_multiplicity = members.size();
  c.members = std::move(members);
  return c;
}

inline void sort_clusters(std::vector<EigenvalueCluster>& clusters) {
  std::sort(clusters.begin(), clusters.end(), [](const EigenvalueCluster& a, const EigenvalueCluster& b) {
    if (lex_less(a.representative, b.representative)) return true;
    if (lex_less(b.representative, a.representative)) return false;
    return std::lexicographical_compare(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                                        [](const cplx& x, const cplx& y) { return lex_less(x, y); });
  });
}

namespace detail {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
  std::vector<std::size_t> parent;
};

/// Groups indices by their set root, in order of first appearance.
inline std::vector<std::vector<std::size_t>> groups(DisjointSets& sets) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> slot(sets.parent.size(), sets.parent.size());
  for (std::size_t i = 0; i < sets.parent.size(); ++i) {
    const std::size_t r = sets.find(i);
    if (slot[r] == sets.parent.size()) {
      slot[r] = out.size();
      out.emplace_back();
    }
    out[slot[r]].push_back(i);
  }
  return out;
}

}  // namespace detail

/// Single-linkage clustering: two values share a cluster when a chain of
/// pairwise distances <= tol connects them.
inline Spectrum cluster(std::span<const cplx> values, double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("clustering tolerance must be nonnegative");
  detail::DisjointSets sets(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      if (std::abs(values[i] - values[j]) <= tol) sets.unite(i, j);

  Spectrum s;
  s.order = values.size();
  s.tolerance = tol;
  for (const auto& g : detail::groups(sets)) {
    std::vector<cplx> members;
    members.reserve(g.size());
    for (auto i : g) members.push_back(values[i]);
    s.clusters.push_back(make_cluster(std::move(members)));
  }
  sort_clusters(s.clusters);
  return s;
}

}  // namespace strobo
