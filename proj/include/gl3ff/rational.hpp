#pragma once

#include <complex>
#include <ostream>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace gl3 {

using Rational = boost::multiprecision::cpp_rational;

// Gaussian rationals, used for exact evaluation of the algebraic identities.
class ComplexRational {
 public:
  ComplexRational() = default;
  ComplexRational(long long re) : re_(re) {}  // NOLINT(google-explicit-constructor)
  ComplexRational(Rational re, Rational im = 0) : re_(std::move(re)), im_(std::move(im)) {}

  const Rational& real() const { return re_; }
  const Rational& imag() const { return im_; }
  bool is_zero() const { return re_ == 0 && im_ == 0; }

  std::complex<double> to_complex() const {
    return {static_cast<double>(re_), static_cast<double>(im_)};
  }

  ComplexRational operator-() const { return {-re_, -im_}; }

  ComplexRational& operator+=(const ComplexRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  ComplexRational& operator-=(const ComplexRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  ComplexRational& operator*=(const ComplexRational& o) {
    Rational r = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    return *this;
  }
  ComplexRational& operator/=(const ComplexRational& o) {
    const Rational n = o.re_ * o.re_ + o.im_ * o.im_;
    if (n == 0) throw std::domain_error("ComplexRational: division by zero");
    Rational r = (re_ * o.re_ + im_ * o.im_) / n;
    im_ = (im_ * o.re_ - re_ * o.im_) / n;
    re_ = std::move(r);
    return *this;
  }

  friend ComplexRational operator+(ComplexRational a, const ComplexRational& b) { return a += b; }
  friend ComplexRational operator-(ComplexRational a, const ComplexRational& b) { return a -= b; }
  friend ComplexRational operator*(ComplexRational a, const ComplexRational& b) { return a *= b; }
  friend ComplexRational operator/(ComplexRational a, const ComplexRational& b) { return a /= b; }
  friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const ComplexRational& a, const ComplexRational& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const ComplexRational& z) {
    return os << "(" << z.re_ << "," << z.im_ << ")";
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

inline std::complex<double> to_complex(const std::complex<double>& z) { return z; }
inline std::complex<double> to_complex(const ComplexRational& z) { return z.to_complex(); }

}  // namespace gl3
