#pragma once

#include <cctype>
#include <cmath>
#include <complex>
#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include <gmpxx.h>

#include "strobo/error.hpp"

namespace strobo {

using cplx = std::complex<double>;

/// Exact complex number with rational real and imaginary parts, i.e. an
/// element of Q(i). Both parts are kept canonical (reduced, positive
/// denominator) after every operation.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long re) : re_(re) {}  // NOLINT: implicit on purpose
  GaussianRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  /// Exact conversion of a binary double pair.
  static GaussianRational from_double(double re, double im = 0.0) {
    if (!std::isfinite(re) || !std::isfinite(im))
      throw parse_error("non-finite value cannot be represented exactly");
    return GaussianRational(mpq_class(re), mpq_class(im));
  }
  static GaussianRational from_complex(const cplx& z) { return from_double(z.real(), z.imag()); }

  static GaussianRational i() { return GaussianRational(mpq_class(0), mpq_class(1)); }

  const mpq_class& real() const noexcept { return re_; }
  const mpq_class& imag() const noexcept { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }

  GaussianRational conj() const { return GaussianRational(re_, -im_); }

  /// |z|^2, exact.
  mpq_class norm() const { return mpq_class(re_ * re_ + im_ * im_); }

  cplx to_complex() const { return {re_.get_d(), im_.get_d()}; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    mpq_class re = re_ * o.re_ - im_ * o.im_;
    mpq_class im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero");
    mpq_class d = o.norm();
    mpq_class re = (re_ * o.re_ + im_ * o.im_) / d;
    mpq_class im = (im_ * o.re_ - re_ * o.im_) / d;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend GaussianRational operator-(const GaussianRational& a) { return GaussianRational(-a.re_, -a.im_); }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  /// Lexicographic by (real, imaginary); used for deterministic ordering only.
  friend bool lex_less(const GaussianRational& a, const GaussianRational& b) {
    if (a.re_ != b.re_) return a.re_ < b.re_;
    return a.im_ < b.im_;
  }

  /// Canonical text, e.g. "0", "-5/6", "3i", "1/2-3/4i".
  std::string to_string() const {
    if (sgn(im_) == 0) return re_.get_str();
    std::string out;
    if (sgn(re_) != 0) {
      out = re_.get_str();
      out += sgn(im_) < 0 ? "-" : "+";
      out += mpq_class(abs(im_)).get_str();
    } else {
      out = im_.get_str();
    }
    out += 'i';
    return out;
  }

  /// Parses "p/q+r/si" style text. Either part may be omitted; decimals such
  /// as "0.25" are accepted and converted exactly.
  static GaussianRational parse(std::string_view text);

  friend std::ostream& operator<<(std::ostream& os, const GaussianRational& z) {
    return os << z.to_string();
  }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

namespace detail {

inline mpq_class parse_unsigned_rational(std::string_view s, std::string_view whole) {
  auto bad = [&] { return parse_error("malformed exact number \"" + std::string(whole) + "\""); };
  if (s.empty()) throw bad();
  auto slash = s.find('/');
  std::string_view num = s.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{} : s.substr(slash + 1);

  auto decimal = [&](std::string_view d) {
    auto dot = d.find('.');
    std::string digits(d.substr(0, dot));
    std::size_t frac = 0;
    if (dot != std::string_view::npos) {
      std::string_view tail = d.substr(dot + 1);
      digits += tail;
      frac = tail.size();
    }
    if (digits.empty()) throw bad();
    for (char c : digits)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw bad();
    mpz_class n(digits, 10);
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, frac);
    return mpq_class(n, p);
  };

  mpq_class value = decimal(num);
  if (slash != std::string_view::npos) {
    mpq_class d = decimal(den);
    if (sgn(d) == 0) throw parse_error("zero denominator in \"" + std::string(whole) + "\"");
    value /= d;
  }
  value.canonicalize();
  return value;
}

}  // namespace detail

inline GaussianRational GaussianRational::parse(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw parse_error("empty exact number");

  mpq_class re = 0, im = 0;
  bool have_re = false, have_im = false;
  std::size_t pos = 0;
  while (pos < s.size()) {
    int sign = 1;
    if (s[pos] == '+' || s[pos] == '-') {
      sign = s[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (pos != 0) {
      throw parse_error("malformed exact number \"" + s + "\"");
    }
    std::size_t end = s.find_first_of("+-", pos);
    std::string_view term = std::string_view(s).substr(pos, end == std::string::npos ? s.size() - pos : end - pos);
    pos = end == std::string::npos ? s.size() : end;
    if (term.empty()) throw parse_error("malformed exact number \"" + s + "\"");
    if (term.back() == 'i') {
      term.remove_suffix(1);
      if (have_im) throw parse_error("two imaginary parts in \"" + s + "\"");
      im = term.empty() ? mpq_class(1) : detail::parse_unsigned_rational(term, s);
      if (sign < 0) im = -im;
      have_im = true;
    } else {
      if (have_re) throw parse_error("two real parts in \"" + s + "\"");
      re = detail::parse_unsigned_rational(term, s);
      if (sign < 0) re = -re;
      have_re = true;
    }
  }
  return GaussianRational(re, im);
}

/// Per-backend scalar behaviour. The float backend is std::complex<double>,
/// the exact backend is GaussianRational.
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<cplx> {
  using real_type = double;
  static constexpr bool exact = false;
  static constexpr std::string_view backend = "float";
  static cplx from_exact(const GaussianRational& z) { return z.to_complex(); }
  static cplx from_real(double x) { return {x, 0.0}; }
  static cplx imag_unit() { return {0.0, 1.0}; }
  static cplx conj(const cplx& z) { return std::conj(z); }
  static double magnitude(const cplx& z) { return std::abs(z); }
  static bool is_zero(const cplx& z) { return z == cplx{}; }
  static cplx to_complex(const cplx& z) { return z; }
};

template <>
struct scalar_traits<GaussianRational> {
  using real_type = mpq_class;
  static constexpr bool exact = true;
  static constexpr std::string_view backend = "exact";
  static GaussianRational from_exact(const GaussianRational& z) { return z; }
  static GaussianRational from_real(const mpq_class& x) { return GaussianRational(x); }
  static GaussianRational imag_unit() { return GaussianRational::i(); }
  static GaussianRational conj(const GaussianRational& z) { return z.conj(); }
  static double magnitude(const GaussianRational& z) { return std::abs(z.to_complex()); }
  static bool is_zero(const GaussianRational& z) { return z.is_zero(); }
  static cplx to_complex(const GaussianRational& z) { return z.to_complex(); }
};

template <class T>
concept Scalar = requires { scalar_traits<T>::exact; };

template <class T>
concept FloatScalar = Scalar<T> && !scalar_traits<T>::exact;

template <class T>
concept ExactScalar = Scalar<T> && scalar_traits<T>::exact;

/// Deterministic ordering: real part, then imaginary part.
inline bool lex_less(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace strobo
