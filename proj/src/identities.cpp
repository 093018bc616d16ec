#include "gl3ff/identities.hpp"

#include <cmath>
#include <memory>

namespace gl3 {

namespace {

struct Override {
  Complex at, value;
};

std::function<Complex(Complex)> overridden(std::function<Complex(Complex)> base, std::vector<Override> pts) {
  auto shared = std::make_shared<const std::vector<Override>>(std::move(pts));
  return [base = std::move(base), shared](Complex x) {
    for (const Override& o : *shared)
      if (std::abs(x - o.at) <= 1e-13 * std::max(1.0, std::abs(x))) return o.value;
    return base(x);
  };
}

std::string describe_sizes(const FormSets<Complex>& s) {
  return "#uC=" + std::to_string(s.uC.size()) + " #uB=" + std::to_string(s.uB.size()) +
         " #vC=" + std::to_string(s.vC.size()) + " #vB=" + std::to_string(s.vB.size());
}

}  // namespace

IdentityReport make_report(std::string id, std::string inputs, Complex lhs, Complex rhs) {
  IdentityReport r{std::move(id), std::move(inputs), lhs, rhs, 0.0, 0.0};
  r.abs_defect = std::abs(lhs - rhs);
  r.defect = r.abs_defect / std::max({std::abs(lhs), std::abs(rhs), 1.0});
  return r;
}

std::vector<IdentityReport> omega_sums(const FormSets<Complex>& s, Complex z, Complex c) {
  const Kernel<Complex> k{c};
  const auto sides = omega_sum_sides(k, s, z);
  const char* names[] = {"t(uC,z) sum", "t(z,uC) sum", "t(vB,z) sum", "t(z,vB) sum"};
  std::vector<IdentityReport> out;
  for (std::size_t i = 0; i < 4; ++i) out.push_back(make_report(names[i], describe_sizes(s), sides[i].first, sides[i].second));
  return out;
}

bool omega_sums_exact(const FormSets<ComplexRational>& s, const ComplexRational& z, const ComplexRational& c) {
  const Kernel<ComplexRational> k{c};
  for (const auto& [l, r] : omega_sum_sides(k, s, z))
    if (l != r) return false;
  return true;
}

IdentityReport residue_oracle(const FormSets<Complex>& s, Complex z, Complex c) {
  const Kernel<Complex> k{c};
  return make_report("t(vB,z) sum by residues", describe_sizes(s), omega_sum_sides(k, s, z)[2].first, residue_sum(k, s, z));
}

IdentityReport row_reduction(const RatioModel& r, Complex c, const FormSets<Complex>& s, Complex x) {
  const Kernel<Complex> k{c};
  const auto [lhs, rhs] = row_reduction_sides(k, ratio_functions(r), s, x);
  return make_report("row reduction", describe_sizes(s), lhs, rhs);
}

IdentityReport row_reduction_vanishing(const RatioModel& r, Complex c, const FormSets<Complex>& s, Complex x) {
  const Kernel<Complex> k{c};
  const RatioFunctions<Complex> rf = ratio_functions(r);
  const std::vector<Complex> om = omega_vector(k, s);
  const std::size_t a1 = s.uC.size();
  Complex lhs = phi_entry(k, rf, s, x);
  double scale = std::abs(lhs);
  for (std::size_t j = 0; j < a1; ++j) {
    const Complex term = om[j] * u_row_entry(k, rf, s, j, x);
    scale = std::max(scale, std::abs(term));
    lhs += term;
  }
  for (std::size_t j = 0; j < s.vB.size(); ++j) {
    const Complex term = om[a1 + j] * v_row_entry(k, rf, s, j, x);
    scale = std::max(scale, std::abs(term));
    lhs += term;
  }
  IdentityReport rep = make_report("row reduction at a root", describe_sizes(s), lhs, 0.0);
  rep.defect = rep.abs_defect / std::max(scale, 1e-30);
  return rep;
}

RatioModel on_shell_model(const RatioModel& base, Complex c, std::span<const BetheRoots> states) {
  std::vector<Override> o1, o3;
  for (const BetheRoots& st : states) {
    for (std::size_t i = 0; i < st.a(); ++i) o1.push_back({st.u[i], bethe_rhs_r1(c, st.u, st.v, i)});
    for (std::size_t j = 0; j < st.b(); ++j) o3.push_back({st.v[j], bethe_rhs_r3(c, st.u, st.v, j)});
  }
  RatioModel m = base;
  m.r1 = overridden(base.r1, std::move(o1));
  m.r3 = overridden(base.r3, std::move(o3));
  return m;
}

double log_slope(std::span<const double> scales, std::span<const double> defects) {
  const std::size_t n = std::min(scales.size(), defects.size());
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log10(scales[i]), y = std::log10(std::max(defects[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

LimitCheckReport limit_check(const Chain& chain, Complex z, const BetheRoots& Cp, const BetheRoots& B,
                             std::span<const double> scales, Complex dir) {
  for (const BetheRoots* r : {&Cp, &B})
    if (max_residual(bethe_residual(chain.spec(), *r)) > 1e-8) throw OffShellError("limit check needs on-shell states");
  if (Cp.a() != B.a() + 1 || Cp.b() != B.b()) throw CardinalityError("limit check needs C' = (a+1, b) and B = (a, b)");
  const Complex c = chain.spec().c;
  const Kernel<Complex> k{c};
  const RatioModel base = chain.vacuum().model();
  const double b = static_cast<double>(B.b());

  LimitCheckReport rep;
  rep.prefactor.id = "prefactor";
  rep.corner.id = "corner entry";
  rep.full.id = "full determinant";
  rep.corner.target = -1.0;
  const FormFactorRequest q12{1, 2, z, Cp, B};
  rep.ff12 = direct_form_factor(chain, q12);
  const FormSets<Complex> s12 = form_sets(q12);
  const std::vector<Complex> x12 = columns12(s12, z);
  const Complex h12 = form_prefactor(k, s12, std::span<const Complex>(x12));
  rep.prefactor.target = h12;
  rep.full.target = rep.ff12;

  std::vector<double> mags;
  for (double sc : scales) {
    const Complex v = sc * dir;
    for (Complex p : chain.spec().poles())
      if (std::abs(v - p) < 1e-8) throw PoleError("limit sweep", v, p);
    BetheRoots C = Cp;
    C.v = Cp.v.with(v);
    const BetheRoots states[] = {C, B};
    const RatioModel m = on_shell_model(base, c, states);
    const RatioFunctions<Complex> rf = ratio_functions(m);
    const FormFactorRequest q13{1, 3, z, C, B};
    const FormSets<Complex> s = form_sets(q13);
    const std::vector<Complex> x13 = columns13(s);
    const Complex scale = v / c;

    const std::span<const Complex> uB(s.uB), uC(s.uC), vB(s.vB), vC(s.vC);
    const Complex pref = k.prod(KernelId::F, z, uB) * k.prod(KernelId::F, vC, z) * std::pow(scale, -b) *
                         form_prefactor(k, s, std::span<const Complex>(x13));
    const Complex corner = scale * phi_entry(k, rf, s, v);
    const Complex substituted =
        scale * (k.prod(KernelId::H, vB, v) * k.prod(KernelId::HInv, vC, v) -
                 k.prod(KernelId::F, v, uC) * k.prod(KernelId::H, v, vB) * k.prod(KernelId::FInv, v, uB) *
                     k.prod(KernelId::HInv, v, vC));
    const Complex full = scale * ff_limit13(m, c, q13).value;

    rep.substitution_defect = std::max(rep.substitution_defect, std::abs(corner - substituted) /
                                                                    std::max({std::abs(corner), std::abs(substituted), 1e-30}));
    auto push = [&](LimitSweep& sw, Complex value, Complex target) {
      sw.points.push_back(v);
      sw.values.push_back(value);
      sw.defects.push_back(std::abs(value - target) / std::max(std::abs(target), 1e-30));
    };
    push(rep.prefactor, pref, h12);
    push(rep.corner, corner, -1.0);
    push(rep.full, full, rep.ff12);
    mags.push_back(std::abs(v));
  }
  for (LimitSweep* sw : {&rep.prefactor, &rep.corner, &rep.full}) sw->slope = log_slope(mags, sw->defects);
  return rep;
}

}  // namespace gl3
