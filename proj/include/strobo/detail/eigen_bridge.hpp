#pragma once

#include <Eigen/Dense>

#include "strobo/matrix.hpp"

namespace strobo::detail {

inline Eigen::MatrixXcd to_eigen(const FloatMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.order());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return m;
}

}  // namespace strobo::detail
