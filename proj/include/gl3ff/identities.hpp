#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "gl3ff/formfactor.hpp"

namespace gl3 {

struct IdentityReport {
  std::string id;
  std::string inputs;
  Complex lhs, rhs;
  double abs_defect = 0.0;
  double defect = 0.0;  // abs_defect / max(1, |lhs|, |rhs|)
};

IdentityReport make_report(std::string id, std::string inputs, Complex lhs, Complex rhs);

// Left and right sides of the four Omega summation identities for
// #uC = a+1, #uB = a, #vC = b+1, #vB = b:
//   sum t(uC_j, z) W_j, sum t(z, uC_j) W_j, sum t(vB_j, z) W_{a+1+j}, sum t(z, vB_j) W_{a+1+j}
template <class S>
std::array<std::pair<S, S>, 4> omega_sum_sides(const Kernel<S>& k, const FormSets<S>& s, const S& z) {
  if (s.uC.size() != s.uB.size() + 1 || s.vC.size() != s.vB.size() + 1)
    throw SizeError("omega sums need #uC = #uB + 1 and #vC = #vB + 1");
  const std::vector<S> om = omega_vector(k, s);
  const std::size_t a1 = s.uC.size();
  std::array<std::pair<S, S>, 4> out;
  S l0(0), l1(0), l2(0), l3(0);
  for (std::size_t j = 0; j < a1; ++j) {
    l0 += k.t(s.uC[j], z) * om[j];
    l1 += k.t(z, s.uC[j]) * om[j];
  }
  for (std::size_t j = 0; j < s.vB.size(); ++j) {
    l2 += k.t(s.vB[j], z) * om[a1 + j];
    l3 += k.t(z, s.vB[j]) * om[a1 + j];
  }
  const std::span<const S> uC(s.uC), uB(s.uB), vC(s.vC), vB(s.vB);
  const S one(1);
  const S r0 = k.prod(KernelId::H, uB, z) * k.prod(KernelId::HInv, uC, z) *
               (k.prod(KernelId::F, uC, z) * k.prod(KernelId::FInv, uB, z) - one);
  const S r1 = k.prod(KernelId::H, z, uB) * k.prod(KernelId::HInv, z, uC) *
               (k.prod(KernelId::F, z, uC) * k.prod(KernelId::FInv, z, uB) - one);
  const S r2 = k.prod(KernelId::H, vC, z) * k.prod(KernelId::HInv, vB, z) *
                   (one - k.prod(KernelId::F, vB, z) * k.prod(KernelId::FInv, vC, z)) -
               one;
  const S r3 = k.prod(KernelId::H, z, vC) * k.prod(KernelId::HInv, z, vB) *
                   (one - k.prod(KernelId::F, z, vB) * k.prod(KernelId::FInv, z, vC)) -
               one;
  out[0] = {l0, r0};
  out[1] = {l1, r1};
  out[2] = {l2, r2};
  out[3] = {l3, r3};
  return out;
}

// The third sum from the contour argument: the large circle gives -1, minus the poles at z and z - c.
template <class S>
S residue_sum(const Kernel<S>& k, const FormSets<S>& s, const S& z) {
  const S c = k.c;
  auto ratio = [&](const S& w) {
    S num(1), den(1);
    for (const S& v : s.vC) num *= w - v;
    for (const S& v : s.vB) den *= w - v;
    return num / den;
  };
  return S(-1) - ratio(z - c) / c + ratio(z) / c;
}

// Phi(x) + sum_j Omega_j N13_{j}(x) and (tau_C(x) - tau_B(x)) / (f(x, uB) f(vC, x)).
template <class S>
std::pair<S, S> row_reduction_sides(const Kernel<S>& k, const RatioFunctions<S>& r, const FormSets<S>& s, const S& x) {
  const std::vector<S> om = omega_vector(k, s);
  const std::size_t a1 = s.uC.size();
  S lhs = phi_entry(k, r, s, x);
  for (std::size_t j = 0; j < a1; ++j) lhs += om[j] * u_row_entry(k, r, s, j, x);
  for (std::size_t j = 0; j < s.vB.size(); ++j) lhs += om[a1 + j] * v_row_entry(k, r, s, j, x);
  const std::span<const S> uC(s.uC), uB(s.uB), vC(s.vC), vB(s.vB);
  const S rhs = (tau_eigenvalue(k, r, x, uC, vC) - tau_eigenvalue(k, r, x, uB, vB)) * k.prod(KernelId::FInv, x, uB) *
                k.prod(KernelId::FInv, vC, x);
  return {lhs, rhs};
}

std::vector<IdentityReport> omega_sums(const FormSets<Complex>& s, Complex z, Complex c);
// True when all four identities hold exactly.
bool omega_sums_exact(const FormSets<ComplexRational>& s, const ComplexRational& z, const ComplexRational& c);
// Third identity: residue form against the direct sum.
IdentityReport residue_oracle(const FormSets<Complex>& s, Complex z, Complex c);

IdentityReport row_reduction(const RatioModel& r, Complex c, const FormSets<Complex>& s, Complex x);
// At a column point x in uB or vC of on-shell sets the combination itself vanishes; rhs is reported as 0
// and the defect is measured against the largest term of the combination.
IdentityReport row_reduction_vanishing(const RatioModel& r, Complex c, const FormSets<Complex>& s, Complex x);

// Ratio functions replaced at the roots of on-shell states by the right-hand sides of their Bethe equations.
RatioModel on_shell_model(const RatioModel& base, Complex c, std::span<const BetheRoots> states);

struct LimitSweep {
  std::string id;
  std::vector<Complex> points;
  std::vector<Complex> values;
  std::vector<double> defects;
  Complex target{0.0};
  double slope = 0.0;  // least-squares slope of log defect against log |v|
};

struct LimitCheckReport {
  LimitSweep prefactor, corner, full;
  Complex ff12;                     // oracle value of the reduced form factor
  double substitution_defect = 0.0;  // corner entry via r3 against its Bethe-substituted form
};

double log_slope(std::span<const double> scales, std::span<const double> defects);

// Sends an extra C-side v root to infinity along dir in the limit form of F13 and compares with F12.
// Cp: on-shell (a+1, b) state, B: on-shell (a, b) state.
LimitCheckReport limit_check(const Chain& chain, Complex z, const BetheRoots& Cp, const BetheRoots& B,
                             std::span<const double> scales, Complex dir = Complex(0.8, 0.6));

}  // namespace gl3
