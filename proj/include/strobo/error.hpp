#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace strobo {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand orders do not match, or an operand is not of the required shape.
class dimension_error : public error {
 public:
  using error::error;
};

/// Malformed input text. Line and column are 1-based; 0 means unknown.
class parse_error : public error {
 public:
  parse_error(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : error(line ? what + " (line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ")"
                   : what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A dynamics model violates its invariants (non-Hermitian H, bad rate).
class model_error : public error {
 public:
  using error::error;
};

/// Eigenvalue computation failed or a spectrum is unusable.
class spectral_error : public error {
 public:
  explicit spectral_error(const std::string& what, double residual = 0.0)
      : error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Algebraic multiplicities recovered from a user-supplied spectrum do not
/// add up to the matrix order.
class incomplete_spectrum_error : public spectral_error {
 public:
  incomplete_spectrum_error(const std::string& what, std::size_t recovered,
                            std::size_t order)
      : spectral_error(what), recovered_(recovered), order_(order) {}
  std::size_t recovered() const noexcept { return recovered_; }
  std::size_t order() const noexcept { return order_; }

 private:
  std::size_t recovered_;
  std::size_t order_;
};

/// A rank sequence whose second differences go negative. On the float
/// backend this means the rank tolerance is misconfigured.
class convexity_error : public error {
 public:
  convexity_error(const std::string& what, std::size_t block_size,
                  std::vector<std::size_t> ranks)
      : error(what), block_size_(block_size), ranks_(std::move(ranks)) {}
  std::size_t block_size() const noexcept { return block_size_; }
  const std::vector<std::size_t>& ranks() const noexcept { return ranks_; }

 private:
  std::size_t block_size_;
  std::vector<std::size_t> ranks_;
};

}  // namespace strobo
