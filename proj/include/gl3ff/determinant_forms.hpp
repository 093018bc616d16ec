#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gl3ff/scalar_kernel.hpp"

namespace gl3 {

// Ratio functions evaluated in the scalar type S.
template <class S>
struct RatioFunctions {
  std::function<S(const S&)> r1, r3;
};

// The four root sets of a form factor: C-side (uC, vC), B-side (uB, vB).
template <class S>
struct FormSets {
  std::vector<S> uC, vC, uB, vB;
};

template <class S>
S tau_eigenvalue(const Kernel<S>& k, const RatioFunctions<S>& r, const S& z, std::span<const S> u, std::span<const S> v) {
  return r.r1(z) * k.prod(KernelId::F, u, z) + k.prod(KernelId::F, z, u) * k.prod(KernelId::F, v, z) +
         r.r3(z) * k.prod(KernelId::F, z, v);
}

template <class S>
S parity(std::size_t n) {
  return n % 2 == 0 ? S(1) : S(-1);
}

// u-row entry: t(uC_j, x) (-1)^{#uB} r1(x) h(uC, x) / (f(vC, x) h(x, uB)) + t(x, uC_j) h(x, uC) / h(x, uB)
template <class S>
S u_row_entry(const Kernel<S>& k, const RatioFunctions<S>& r, const FormSets<S>& s, std::size_t j, const S& x) {
  const S hxuB = k.prod(KernelId::HInv, x, std::span<const S>(s.uB));
  S first(0);
  const S fv = k.prod(KernelId::FInv, std::span<const S>(s.vC), x);
  if (!(fv == S(0)))
    first = k.t(s.uC[j], x) * parity<S>(s.uB.size()) * r.r1(x) * k.prod(KernelId::H, std::span<const S>(s.uC), x) * fv * hxuB;
  return first + k.t(x, s.uC[j]) * k.prod(KernelId::H, x, std::span<const S>(s.uC)) * hxuB;
}

// v-row entry: t(x, vB_j) (-1)^{#vB-1} r3(x) h(x, vB) / (f(x, uB) h(vC, x)) + t(vB_j, x) h(vB, x) / h(vC, x)
template <class S>
S v_row_entry(const Kernel<S>& k, const RatioFunctions<S>& r, const FormSets<S>& s, std::size_t j, const S& x) {
  const S hvCx = k.prod(KernelId::HInv, std::span<const S>(s.vC), x);
  S first(0);
  const S fu = k.prod(KernelId::FInv, x, std::span<const S>(s.uB));
  if (!(fu == S(0)))
    first = k.t(x, s.vB[j]) * -parity<S>(s.vB.size()) * r.r3(x) * k.prod(KernelId::H, x, std::span<const S>(s.vB)) * fu * hvCx;
  return first + k.t(s.vB[j], x) * k.prod(KernelId::H, std::span<const S>(s.vB), x) * hvCx;
}

// The extra row of the limit form: (-1)^{#vB-1} r3(x) h(x, vB) / (f(x, uB) h(vC, x)) + h(vB, x) / h(vC, x)
template <class S>
S phi_entry(const Kernel<S>& k, const RatioFunctions<S>& r, const FormSets<S>& s, const S& x) {
  const S hvCx = k.prod(KernelId::HInv, std::span<const S>(s.vC), x);
  S first(0);
  const S fu = k.prod(KernelId::FInv, x, std::span<const S>(s.uB));
  if (!(fu == S(0)))
    first = -parity<S>(s.vB.size()) * r.r3(x) * k.prod(KernelId::H, x, std::span<const S>(s.vB)) * fu * hvCx;
  return first + k.prod(KernelId::H, std::span<const S>(s.vB), x) * hvCx;
}

// Rows: the #uC u-rows followed by the #vB v-rows; columns: the points x.
template <class S>
SquareMatrix<S> form_matrix(const Kernel<S>& k, const RatioFunctions<S>& r, const FormSets<S>& s, std::span<const S> x) {
  const std::size_t n = s.uC.size() + s.vB.size();
  if (x.size() != n) throw SizeError("form matrix is not square");
  SquareMatrix<S> m(n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t j = 0; j < s.uC.size(); ++j) m(j, col) = u_row_entry(k, r, s, j, x[col]);
    for (std::size_t j = 0; j < s.vB.size(); ++j) m(s.uC.size() + j, col) = v_row_entry(k, r, s, j, x[col]);
  }
  return m;
}

// h(x, uB) h(vC, x) / h(vC, uB) * Delta'(uC) Delta'(vB) Delta(x)
template <class S>
S form_prefactor(const Kernel<S>& k, const FormSets<S>& s, std::span<const S> x) {
  const std::span<const S> uB(s.uB), vC(s.vC);
  return k.prod(KernelId::H, x, uB) * k.prod(KernelId::H, vC, x) * k.prod(KernelId::HInv, vC, uB) *
         delta_prime(k, std::span<const S>(s.uC)) * delta_prime(k, std::span<const S>(s.vB)) * delta(k, x);
}

// Omega_j = g(uC_j, uC minus j) / g(uC_j, uB), Omega_{#uC+j} = -g(vB_j, vB minus j) / g(vB_j, vC)
template <class S>
std::vector<S> omega_vector(const Kernel<S>& k, const FormSets<S>& s) {
  std::vector<S> om;
  for (std::size_t j = 0; j < s.uC.size(); ++j) {
    std::vector<S> rest;
    for (std::size_t i = 0; i < s.uC.size(); ++i)
      if (i != j) rest.push_back(s.uC[i]);
    om.push_back(k.prod(KernelId::G, s.uC[j], std::span<const S>(rest)) *
                 k.prod(KernelId::GInv, s.uC[j], std::span<const S>(s.uB)));
  }
  for (std::size_t j = 0; j < s.vB.size(); ++j) {
    std::vector<S> rest;
    for (std::size_t i = 0; i < s.vB.size(); ++i)
      if (i != j) rest.push_back(s.vB[i]);
    om.push_back(-(k.prod(KernelId::G, s.vB[j], std::span<const S>(rest)) *
                   k.prod(KernelId::GInv, s.vB[j], std::span<const S>(s.vC))));
  }
  return om;
}

// Columns of the F13 matrix: uB then vC.
template <class S>
std::vector<S> columns13(const FormSets<S>& s) {
  return concat<S>(std::span<const S>(s.uB), std::span<const S>(s.vC));
}

// Columns of the F12 matrix: uB, vC, then z.
template <class S>
std::vector<S> columns12(const FormSets<S>& s, const S& z) {
  std::vector<S> x = columns13(s);
  x.push_back(z);
  return x;
}

// Limit form: F13 rows over columns (uB, vC, z) plus the Phi row.
template <class S>
SquareMatrix<S> limit_matrix(const Kernel<S>& k, const RatioFunctions<S>& r, const FormSets<S>& s, const S& z) {
  const std::vector<S> x = columns12(s, z);
  const std::size_t n = x.size();
  const std::size_t rows = s.uC.size() + s.vB.size();
  if (rows + 1 != n) throw SizeError("limit matrix needs #uC + #vB = #uB + #vC");
  SquareMatrix<S> m(n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t j = 0; j < s.uC.size(); ++j) m(j, col) = u_row_entry(k, r, s, j, x[col]);
    for (std::size_t j = 0; j < s.vB.size(); ++j) m(s.uC.size() + j, col) = v_row_entry(k, r, s, j, x[col]);
    m(rows, col) = phi_entry(k, r, s, x[col]);
  }
  return m;
}

}  // namespace gl3
