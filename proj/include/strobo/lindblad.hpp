#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "strobo/error.hpp"
#include "strobo/matrix.hpp"

namespace strobo {

template <Scalar T>
struct Jump {
  Matrix<T> op;
  typename scalar_traits<T>::real_type rate;
};

/// Markovian generator data: Hamiltonian plus weighted jump operators, all
/// N x N. Rates are kept separate from the jump operators.
template <Scalar T>
struct GKLSModel {
  std::size_t system_dimension;
  Matrix<T> hamiltonian;
  std::vector<Jump<T>> jumps;

  explicit GKLSModel(std::size_t n) : system_dimension(n), hamiltonian(n) {}
  GKLSModel(Matrix<T> h, std::vector<Jump<T>> js = {})
      : system_dimension(h.order()), hamiltonian(std::move(h)), jumps(std::move(js)) {}
};

/// Matrix of rho -> L[rho] acting on column-stacked density matrices.
template <Scalar T>
struct Superoperator {
  Matrix<T> matrix;
  std::size_t source_dimension;
};

/// Rejects a non-Hermitian Hamiltonian (float: max |H - H^dagger| entry above
/// 1e-10 ||H||_F; exact: any deviation), nonpositive rates and operators of
/// the wrong order. Inputs are never symmetrized.
template <Scalar T>
void validate(const GKLSModel<T>& model) {
  const std::size_t n = model.system_dimension;
  if (model.hamiltonian.order() != n)
    throw dimension_error("Hamiltonian order " + std::to_string(model.hamiltonian.order()) +
                          " does not match system dimension " + std::to_string(n));
  const Matrix<T> dev = model.hamiltonian - model.hamiltonian.adjoint();
  if constexpr (scalar_traits<T>::exact) {
    if (!dev.is_zero()) throw model_error("Hamiltonian is not Hermitian");
  } else {
    const double tol = 1e-10 * model.hamiltonian.frobenius_norm();
    if (dev.max_abs() > tol)
      throw model_error("Hamiltonian is not Hermitian: deviation " + std::to_string(dev.max_abs()) +
                        " exceeds " + std::to_string(tol));
  }
  for (std::size_t j = 0; j < model.jumps.size(); ++j) {
    const auto& jump = model.jumps[j];
    if (jump.op.order() != n)
      throw dimension_error("jump operator " + std::to_string(j) + " has order " +
                            std::to_string(jump.op.order()) + ", expected " + std::to_string(n));
    if (!(jump.rate > 0)) throw model_error("jump operator " + std::to_string(j) + " has nonpositive rate");
  }
}

/// Builds the N^2 x N^2 generator matrix under column stacking:
///
///   -i (I (x) H - H^T (x) I)
///   + sum_j g_j ( conj(V_j) (x) V_j - 1/2 I (x) V_j^+ V_j - 1/2 (V_j^+ V_j)^T (x) I )
///
/// which follows from vec(A X B) = (B^T (x) A) vec(X).
template <Scalar T>
Superoperator<T> build_superoperator(const GKLSModel<T>& model) {
  using traits = scalar_traits<T>;
  validate(model);
  const std::size_t n = model.system_dimension;
  const auto id = Matrix<T>::identity(n);
  const T minus_i = -traits::imag_unit();
  const T half = T(1) / T(2);

  Matrix<T> l = minus_i * (kron(id, model.hamiltonian) - kron(model.hamiltonian.transpose(), id));
  for (const auto& jump : model.jumps) {
    const Matrix<T>& v = jump.op;
    const Matrix<T> vdv = v.adjoint() * v;
    Matrix<T> d = kron(v.conjugate(), v) - half * kron(id, vdv) - half * kron(vdv.transpose(), id);
    l += traits::from_real(jump.rate) * d;
  }
  return {std::move(l), n};
}

/// L[rho] = -i [H, rho] + sum_j g_j (V rho V^+ - 1/2 {V^+ V, rho}), evaluated
/// directly without the superoperator.
template <Scalar T>
Matrix<T> apply_generator(const GKLSModel<T>& model, const Matrix<T>& rho) {
  using traits = scalar_traits<T>;
  if (rho.order() != model.system_dimension)
    throw dimension_error("state has order " + std::to_string(rho.order()) + ", model acts on dimension " +
                          std::to_string(model.system_dimension));
  const Matrix<T>& h = model.hamiltonian;
  const T half = T(1) / T(2);
  Matrix<T> out = -traits::imag_unit() * (h * rho - rho * h);
  for (const auto& jump : model.jumps) {
    const Matrix<T>& v = jump.op;
    const Matrix<T> vd = v.adjoint();
    const Matrix<T> vdv = vd * v;
    out += traits::from_real(jump.rate) * (v * rho * vd - half * (vdv * rho + rho * vdv));
  }
  return out;
}

struct TraceCheck {
  double residual = 0.0;   // max |(vec(I)^+ S)_j|
  double tolerance = 0.0;  // 1e-10 ||S||_F on float, 0 on exact
  bool passed = false;
};

/// Trace preservation: vec(I_N)^+ S must vanish. Rows of S at the diagonal
/// positions k = a*N + a are summed column by column.
template <Scalar T>
TraceCheck trace_check(const Superoperator<T>& s) {
  const std::size_t dim = s.source_dimension;
  const std::size_t n = s.matrix.order();
  if (dim * dim != n)
    throw dimension_error("superoperator order " + std::to_string(n) + " is not the square of " +
                          std::to_string(dim));
  TraceCheck out;
  bool exact_zero = true;
  for (std::size_t col = 0; col < n; ++col) {
    T sum{};
    for (std::size_t a = 0; a < dim; ++a) sum += s.matrix(a * dim + a, col);
    exact_zero = exact_zero && scalar_traits<T>::is_zero(sum);
    out.residual = std::max(out.residual, scalar_traits<T>::magnitude(sum));
  }
  if constexpr (scalar_traits<T>::exact) {
    out.passed = exact_zero;
  } else {
    out.tolerance = 1e-10 * s.matrix.frobenius_norm();
    out.passed = out.residual <= out.tolerance;
  }
  return out;
}

}  // namespace strobo
