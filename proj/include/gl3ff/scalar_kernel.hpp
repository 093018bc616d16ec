#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "gl3ff/errors.hpp"
#include "gl3ff/rational.hpp"

namespace gl3 {

using Complex = std::complex<double>;

inline constexpr double kDefaultSeparation = 1e-10;

namespace detail {

inline bool near_zero(const Complex& d, const Complex& x, const Complex& y, double eps) {
  const double scale = std::max({1.0, std::abs(x), std::abs(y)});
  return std::abs(d) <= eps * scale;
}

inline bool near_zero(const ComplexRational& d, const ComplexRational&, const ComplexRational&, double) {
  return d.is_zero();
}

}  // namespace detail

enum class KernelId { G, F, H, T, FInv, HInv, GInv };

// Rational functions of a difference x - y built on the constant c.
template <class S>
struct Kernel {
  S c;
  double eps = kDefaultSeparation;

  S g(const S& x, const S& y) const {
    const S d = x - y;
    guard(d, "g", x, y);
    return c / d;
  }
  S f(const S& x, const S& y) const {
    const S d = x - y;
    guard(d, "f", x, y);
    return (d + c) / d;
  }
  S h(const S& x, const S& y) const { return (x - y + c) / c; }
  S t(const S& x, const S& y) const {
    const S d = x - y;
    guard(d, "t", x, y);
    const S e = d + c;
    guard(e, "t", x, y);
    return c * c / (d * e);
  }
  // 1/f, vanishing when x = y
  S finv(const S& x, const S& y) const {
    const S d = x - y;
    const S e = d + c;
    guard(e, "1/f", x, y);
    return d / e;
  }
  S hinv(const S& x, const S& y) const {
    const S e = x - y + c;
    guard(e, "1/h", x, y);
    return c / e;
  }
  S ginv(const S& x, const S& y) const { return (x - y) / c; }

  S eval(KernelId id, const S& x, const S& y) const {
    switch (id) {
      case KernelId::G: return g(x, y);
      case KernelId::F: return f(x, y);
      case KernelId::H: return h(x, y);
      case KernelId::T: return t(x, y);
      case KernelId::FInv: return finv(x, y);
      case KernelId::HInv: return hinv(x, y);
      case KernelId::GInv: return ginv(x, y);
    }
    return S(0);
  }

  // Product over A x B; empty sets give 1.
  S prod(KernelId id, std::span<const S> A, std::span<const S> B) const {
    S r(1);
    for (const S& x : A)
      for (const S& y : B) r *= eval(id, x, y);
    return r;
  }
  S prod(KernelId id, const S& x, std::span<const S> B) const {
    return prod(id, std::span<const S>(&x, 1), B);
  }
  S prod(KernelId id, std::span<const S> A, const S& y) const {
    return prod(id, A, std::span<const S>(&y, 1));
  }

  void guard(const S& d, const char* fn, const S& x, const S& y) const {
    if (detail::near_zero(d, x, y, eps)) throw PoleError(fn, to_complex(x), to_complex(y));
  }
};

struct KernelValues {
  Complex g, f, h, t;
};

inline KernelValues kernel_functions(Complex x, Complex y, Complex c) {
  const Kernel<Complex> k{c};
  return {k.g(x, y), k.f(x, y), k.h(x, y), k.t(x, y)};
}

// Ordered complex parameters; order fixes the sign of Vandermonde factors.
struct ParamSet {
  std::vector<Complex> values;

  ParamSet() = default;
  ParamSet(std::initializer_list<Complex> v) : values(v) {}
  explicit ParamSet(std::vector<Complex> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  const Complex& operator[](std::size_t i) const { return values[i]; }
  Complex& operator[](std::size_t i) { return values[i]; }
  std::span<const Complex> view() const { return values; }
  operator std::span<const Complex>() const { return values; }  // NOLINT(google-explicit-constructor)

  ParamSet without(std::size_t i) const {
    ParamSet r;
    for (std::size_t k = 0; k < values.size(); ++k)
      if (k != i) r.values.push_back(values[k]);
    return r;
  }
  ParamSet with(Complex w) const {
    ParamSet r = *this;
    r.values.push_back(w);
    return r;
  }
  ParamSet negated() const {
    ParamSet r = *this;
    for (auto& x : r.values) x = -x;
    return r;
  }
  bool distinct(double eps = kDefaultSeparation) const {
    for (std::size_t i = 0; i < values.size(); ++i)
      for (std::size_t j = i + 1; j < values.size(); ++j)
        if (detail::near_zero(values[i] - values[j], values[i], values[j], eps)) return false;
    return true;
  }
};

template <class S>
std::vector<S> concat(std::span<const S> a, std::span<const S> b) {
  std::vector<S> r(a.begin(), a.end());
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

// Delta'(x) = prod_{j<k} g(x_j, x_k), Delta(x) = prod_{j>k} g(x_j, x_k)
template <class S>
S delta_prime(const Kernel<S>& k, std::span<const S> x) {
  S r(1);
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t i = j + 1; i < x.size(); ++i) r *= k.g(x[j], x[i]);
  return r;
}

template <class S>
S delta(const Kernel<S>& k, std::span<const S> x) {
  S r(1);
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t i = j + 1; i < x.size(); ++i) r *= k.g(x[i], x[j]);
  return r;
}

template <class S>
std::pair<S, S> vandermonde(const Kernel<S>& k, std::span<const S> x) {
  return {delta_prime(k, x), delta(k, x)};
}

template <class S>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), a_(n * n, S(0)) {}

  std::size_t size() const { return n_; }
  S& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<S> a_;
};

// LU elimination. Partial pivoting by modulus for doubles, first nonzero pivot for exact scalars.
template <class S>
S determinant(SquareMatrix<S> m) {
  const std::size_t n = m.size();
  S det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    if constexpr (std::is_same_v<S, Complex>) {
      double best = std::abs(m(col, col));
      for (std::size_t r = col + 1; r < n; ++r)
        if (std::abs(m(r, col)) > best) {
          best = std::abs(m(r, col));
          piv = r;
        }
      if (best == 0.0) return S(0);
    } else {
      while (piv < n && m(piv, col) == S(0)) ++piv;
      if (piv == n) return S(0);
    }
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
      det = -det;
    }
    const S p = m(col, col);
    det *= p;
    for (std::size_t r = col + 1; r < n; ++r) {
      const S factor = m(r, col) / p;
      if (factor == S(0)) continue;
      for (std::size_t j = col + 1; j < n; ++j) m(r, j) -= factor * m(col, j);
    }
  }
  return det;
}

// Domain-wall partition function K_n(x | y).
template <class S>
S dwpf(const Kernel<S>& k, std::span<const S> x, std::span<const S> y) {
  if (x.size() != y.size()) throw SizeError("dwpf: |x| != |y|");
  const std::size_t n = x.size();
  if (n == 0) return S(1);
  SquareMatrix<S> m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = k.t(x[i], y[j]);
  return delta_prime(k, x) * delta(k, y) * k.prod(KernelId::H, x, y) * determinant(std::move(m));
}

inline Complex dwpf(const ParamSet& x, const ParamSet& y, Complex c) {
  return dwpf(Kernel<Complex>{c}, x.view(), y.view());
}

}  // namespace gl3
