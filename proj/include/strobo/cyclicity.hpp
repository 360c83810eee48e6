#pragma once

// Index of cyclicity of a generator L: the largest geometric multiplicity
// over its spectrum,
//
//     eta = max_lambda dim ker(L - lambda I) = max_lambda sum_m N(m, lambda),
//
// i.e. the minimal number of distinct observables for stroboscopic
// tomography. Both sides are computed independently and compared: the
// kernel-dimension route takes one rank per eigenvalue, the block-count
// route goes through the full rank sequence of each eigenvalue.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "strobo/error.hpp"
#include "strobo/lindblad.hpp"
#include "strobo/matrix.hpp"
#include "strobo/spectral.hpp"
#include "strobo/weyr.hpp"

namespace strobo {

enum class Backend { floating, exact };
enum class OutputFormat { text, structured };

struct AnalysisConfig {
  std::optional<double> rank_tol;     // relative; default_rank_tol(n)
  std::optional<double> cluster_tol;  // absolute; default_cluster_tol(L)
  /// Largest single-linkage height at which clusters are merged after a rank
  /// check instead of unconditionally; default_merge_radius(L).
  std::optional<double> merge_radius;
  WeyrMethod weyr_method = WeyrMethod::deflation;
  Backend backend = Backend::floating;
  /// Distinct eigenvalues for the exact backend.
  std::vector<GaussianRational> user_spectrum;
  /// Set when L is a superoperator on an N-dimensional system.
  std::optional<std::size_t> system_dimension;
  OutputFormat format = OutputFormat::text;

  RankPolicy rank_policy() const { return {rank_tol, weyr_method}; }
};

/// 0.05 * max(1, ||L||_F).
inline double default_merge_radius(const FloatMatrix& l) { return 0.05 * std::max(1.0, l.frobenius_norm()); }

/// dim ker(L - lambda I) = n - rank(L - lambda I).
template <Scalar T>
std::size_t kernel_dimension(const Matrix<T>& l, const T& lambda, const RankPolicy& policy = {}) {
  if constexpr (scalar_traits<T>::exact) {
    return l.order() - rank_of(shift(l, lambda));
  } else {
    return l.order() - rank_of(shift(l, lambda), policy.for_shifts_of(l));
  }
}

template <Scalar T>
struct EigenvalueAnalysis {
  T eigenvalue{};
  std::vector<T> members;  // raw computed eigenvalues (float); {eigenvalue} (exact)
  double cluster_radius = 0.0;
  WeyrProfile<T> profile;
  JordanStructure<T> structure;
  std::size_t kernel_dimension = 0;
};

struct Diagnostics {
  double rank_tol = 0.0;
  double cluster_tol = 0.0;
  double merge_radius = 0.0;
  double max_cluster_height = 0.0;  // largest single-linkage height inside an accepted cluster
  double eigen_residual = 0.0;
  double eigen_residual_bound = 0.0;
  std::size_t low_confidence_decisions = 0;
  std::optional<TraceCheck> trace;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
};

template <Scalar T>
struct CyclicityReport {
  std::string backend;
  std::size_t order = 0;
  std::vector<EigenvalueAnalysis<T>> eigenvalues;  // sorted by (re, im)
  std::size_t eta_from_blocks = 0;                 // max_lambda sum_m N(m, lambda)
  std::size_t eta_from_kernels = 0;                // max_lambda dim ker(L - lambda I)
  bool agreement = false;
  std::vector<T> argmax;
  std::optional<std::size_t> static_observable_count;  // N^2 - 1
  Diagnostics diagnostics;

  std::size_t eta() const { return eta_from_blocks; }
  bool ok() const { return agreement && diagnostics.errors.empty(); }
};

namespace detail {

struct DendrogramNode {
  std::vector<std::size_t> members;
  double height = 0.0;
  std::size_t left = 0, right = 0;  // children when members.size() > 1
};

/// Single-linkage dendrogram by Kruskal over all pairwise distances. Returns
/// the nodes and the roots (one root unless values is empty).
inline std::pair<std::vector<DendrogramNode>, std::vector<std::size_t>> dendrogram(std::span<const cplx> values) {
  struct Edge {
    double d;
    std::size_t i, j;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j) edges.push_back({std::abs(values[i] - values[j]), i, j});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  std::vector<DendrogramNode> nodes;
  std::vector<std::size_t> node_of(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    nodes.push_back({{i}, 0.0, 0, 0});
    node_of[i] = i;
  }
  DisjointSets sets(values.size());
  for (const auto& e : edges) {
    const std::size_t a = sets.find(e.i), b = sets.find(e.j);
    if (a == b) continue;
    DendrogramNode merged;
    merged.left = node_of[a];
    merged.right = node_of[b];
    merged.height = e.d;
    merged.members = nodes[merged.left].members;
    merged.members.insert(merged.members.end(), nodes[merged.right].members.begin(),
                          nodes[merged.right].members.end());
    nodes.push_back(std::move(merged));
    sets.unite(a, b);
    node_of[sets.find(a)] = nodes.size() - 1;
  }
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (sets.find(i) == i) roots.push_back(node_of[i]);
  return {std::move(nodes), std::move(roots)};
}

/// Clusters the computed eigenvalues. Everything joined by single linkage at
/// or below cluster_tol is one cluster. Above that, up to merge_radius, a
/// dendrogram node is kept whole only when the rank sequence at its mean
/// reports an algebraic multiplicity equal to its size; this collects the
/// eigenvalue rings a defective block scatters into, which sit far outside
/// cluster_tol. Rejected nodes are split into their children.
inline std::vector<EigenvalueCluster> rank_validated_clusters(const FloatMatrix& l, std::span<const cplx> values,
                                                              double cluster_tol, double merge_radius,
                                                              const RankPolicy& policy, double& max_height) {
  auto [nodes, roots] = dendrogram(values);
  std::vector<EigenvalueCluster> out;
  auto members_of = [&](const DendrogramNode& node) {
    std::vector<cplx> m;
    for (auto i : node.members) m.push_back(values[i]);
    return m;
  };
  auto valid = [&](const DendrogramNode& node) {
    const EigenvalueCluster c = make_cluster(members_of(node));
    try {
      const auto js = block_counts(weyr_sequence(l, c.representative, policy));
      return js.algebraic_multiplicity == node.members.size();
    } catch (const convexity_error&) {
      return false;
    }
  };

  std::vector<std::size_t> stack(roots.rbegin(), roots.rend());
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    const DendrogramNode& node = nodes[id];
    const bool leaf = node.members.size() == 1;
    if (leaf || node.height <= cluster_tol || (node.height <= merge_radius && valid(node))) {
      max_height = std::max(max_height, node.height);
      out.push_back(make_cluster(members_of(node)));
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
  sort_clusters(out);
  return out;
}

template <Scalar T>
void finish_report(CyclicityReport<T>& report, const Matrix<T>& l, const AnalysisConfig& config) {
  std::size_t algebraic_total = 0;
  for (const auto& e : report.eigenvalues) {
    report.eta_from_blocks = std::max(report.eta_from_blocks, e.structure.geometric_multiplicity);
    report.eta_from_kernels = std::max(report.eta_from_kernels, e.kernel_dimension);
    algebraic_total += e.structure.algebraic_multiplicity;
    report.diagnostics.low_confidence_decisions +=
        static_cast<std::size_t>(std::count_if(e.profile.decisions.begin(), e.profile.decisions.end(),
                                               [](const RankDecision& d) { return d.low_confidence; }));
  }
  for (const auto& e : report.eigenvalues)
    if (e.structure.geometric_multiplicity == report.eta_from_blocks) report.argmax.push_back(e.eigenvalue);
  report.agreement = report.eta_from_blocks == report.eta_from_kernels;

  if (report.eta_from_blocks == 0) report.diagnostics.errors.push_back("no eigenvalue with a nontrivial kernel");
  if (algebraic_total != report.order)
    report.diagnostics.errors.push_back("algebraic multiplicities sum to " + std::to_string(algebraic_total) +
                                        ", expected " + std::to_string(report.order));
  if (!report.agreement)
    report.diagnostics.errors.push_back("block-count route gives eta = " + std::to_string(report.eta_from_blocks) +
                                        " but kernel route gives eta = " + std::to_string(report.eta_from_kernels));
  if (report.diagnostics.low_confidence_decisions)
    report.diagnostics.warnings.push_back(std::to_string(report.diagnostics.low_confidence_decisions) +
                                          " rank decision(s) had a singular value within 10x of the threshold");

  if (config.system_dimension) {
    const std::size_t dim = *config.system_dimension;
    if (dim * dim == report.order) {
      report.static_observable_count = dim * dim - 1;
      report.diagnostics.trace = trace_check(Superoperator<T>{l, dim});
      if (!report.diagnostics.trace->passed)
        report.diagnostics.warnings.push_back("generator is not trace preserving");
    } else {
      report.diagnostics.warnings.push_back("system dimension " + std::to_string(dim) +
                                            " does not square to the matrix order; static count omitted");
    }
  }
}

}  // namespace detail

/// Float backend: eigenvalues are computed, clustered and each cluster is
/// analysed at its mean.
inline CyclicityReport<cplx> index_of_cyclicity(const FloatMatrix& l, const AnalysisConfig& config = {}) {
  CyclicityReport<cplx> report;
  report.backend = std::string(scalar_traits<cplx>::backend);
  report.order = l.order();
  const RankPolicy policy = config.rank_policy();
  auto& diag = report.diagnostics;
  diag.rank_tol = policy.tolerance(l.order());
  diag.cluster_tol = config.cluster_tol.value_or(default_cluster_tol(l));
  diag.merge_radius = std::max(diag.cluster_tol, config.merge_radius.value_or(default_merge_radius(l)));

  const EigenSolution sol = solve_eigenvalues(l);
  diag.eigen_residual = sol.max_residual;
  diag.eigen_residual_bound = sol.residual_bound;

  const auto clusters =
      detail::rank_validated_clusters(l, sol.values, diag.cluster_tol, diag.merge_radius, policy,
                                      diag.max_cluster_height);
  for (const auto& c : clusters) {
    EigenvalueAnalysis<cplx> e;
    e.eigenvalue = c.representative;
    e.members = c.members;
    e.cluster_radius = c.radius;
    e.profile = weyr_sequence(l, c.representative, policy);
    e.structure = block_counts(e.profile);
    e.kernel_dimension = kernel_dimension(l, c.representative, policy);
    if (e.structure.algebraic_multiplicity != c.algebraic_multiplicity)
      diag.warnings.push_back("cluster at (" + std::to_string(c.representative.real()) + ", " +
                              std::to_string(c.representative.imag()) + ") has " +
                              std::to_string(c.algebraic_multiplicity) + " computed eigenvalue(s) but rank sequence gives " +
                              std::to_string(e.structure.algebraic_multiplicity));
    report.eigenvalues.push_back(std::move(e));
  }
  detail::finish_report(report, l, config);
  return report;
}

/// Exact backend: the distinct eigenvalues come from config.user_spectrum.
/// Throws incomplete_spectrum_error when their algebraic multiplicities do
/// not add up to the order.
inline CyclicityReport<GaussianRational> index_of_cyclicity(const ExactMatrix& l, const AnalysisConfig& config) {
  CyclicityReport<GaussianRational> report;
  report.backend = std::string(scalar_traits<GaussianRational>::backend);
  report.order = l.order();
  const RankPolicy policy = config.rank_policy();

  std::vector<GaussianRational> spectrum = config.user_spectrum;
  std::sort(spectrum.begin(), spectrum.end(), [](const auto& a, const auto& b) { return lex_less(a, b); });
  spectrum.erase(std::unique(spectrum.begin(), spectrum.end()), spectrum.end());
  if (spectrum.empty())
    throw incomplete_spectrum_error("exact analysis needs user-supplied eigenvalues", 0, l.order());

  std::size_t algebraic_total = 0;
  for (const auto& lambda : spectrum) {
    EigenvalueAnalysis<GaussianRational> e;
    e.eigenvalue = lambda;
    e.members = {lambda};
    e.profile = weyr_sequence(l, lambda, policy);
    e.structure = block_counts(e.profile);
    if (e.structure.algebraic_multiplicity == 0) {
      report.diagnostics.warnings.push_back(lambda.to_string() + " is not an eigenvalue; ignored");
      continue;
    }
    e.kernel_dimension = kernel_dimension(l, lambda, policy);
    algebraic_total += e.structure.algebraic_multiplicity;
    report.eigenvalues.push_back(std::move(e));
  }
  if (algebraic_total != l.order())
    throw incomplete_spectrum_error("supplied eigenvalues account for algebraic multiplicity " +
                                        std::to_string(algebraic_total) + " of " + std::to_string(l.order()),
                                    algebraic_total, l.order());
  detail::finish_report(report, l, config);
  return report;
}

}  // namespace strobo
