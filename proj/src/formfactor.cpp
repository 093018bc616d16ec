#include "gl3ff/formfactor.hpp"

#include <algorithm>
#include <numeric>

namespace gl3 {

namespace {

const Complex kRay(0.8, 0.6);
const double kRelationScales[] = {1e2, 1e3, 1e4};

double rel_defect(Complex lhs, Complex rhs) {
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30});
}

bool close(Complex x, Complex y, double eps) { return detail::near_zero(x - y, x, y, eps); }

std::string scale_label(double W) { return "w=" + std::to_string(static_cast<long long>(W)); }

void require_untwisted_on_shell(const Chain& chain, const BetheRoots& C, const BetheRoots& B) {
  if (!chain.spec().untwisted()) throw TwistError("zero-mode relations require an untwisted chain");
  for (const BetheRoots* r : {&C, &B})
    if (max_residual(bethe_residual(chain.spec(), *r)) > 1e-8) throw OffShellError("relation needs on-shell states");
}

void require_on_shell(const Chain& chain, const FormFactorRequest& req) {
  for (const BetheRoots* r : {&req.C, &req.B})
    if (max_residual(bethe_residual(chain.spec(), *r)) > 1e-8)
      throw OffShellError("determinant representation needs on-shell states");
}

Complex pair(const BraVector& C, const OperatorMatrix& T, const KetVector& B) { return (C * (T * B))(0); }

Eigen::MatrixXcd to_eigen(const SquareMatrix<Complex>& m) {
  Eigen::MatrixXcd e(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return e;
}

void require_family(const FormFactorRequest& req, int i, int j) {
  if (req.i != i || req.j != j)
    throw Error("representation is for T_" + std::to_string(i) + std::to_string(j) + ", requested T_" +
                std::to_string(req.i) + std::to_string(req.j));
}

BetheRoots negated_swap(const BetheRoots& r) {
  BetheRoots o = r;
  o.u = r.v.negated();
  o.v = r.u.negated();
  return o;
}

}  // namespace

std::pair<int, int> cardinality_shift(int i, int j) {
  if (i < 1 || i > 3 || j < 1 || j > 3) throw Error("operator index out of range");
  return {(i == 1) - (j == 1), (j == 3) - (i == 3)};
}

void check_cardinalities(const FormFactorRequest& req) {
  const auto [da, db] = cardinality_shift(req.i, req.j);
  const long a = static_cast<long>(req.B.a()), b = static_cast<long>(req.B.b());
  const long ap = static_cast<long>(req.C.a()), bp = static_cast<long>(req.C.b());
  if (ap != a + da || bp != b + db)
    throw CardinalityError("T_" + std::to_string(req.i) + std::to_string(req.j) + " maps (" + std::to_string(a) + "," +
                           std::to_string(b) + ") to (" + std::to_string(a + da) + "," + std::to_string(b + db) +
                           "), dual side has (" + std::to_string(ap) + "," + std::to_string(bp) + ")");
}

Complex raw_form_factor(const Chain& chain, const FormFactorRequest& req) {
  if (req.i < 1 || req.i > 3 || req.j < 1 || req.j > 3) throw Error("operator index out of range");
  const auto T = chain.at(req.z);
  return pair(dual_vector(chain, req.C), (*T)(req.i, req.j), bethe_vector(chain, req.B));
}

Complex direct_form_factor(const Chain& chain, const FormFactorRequest& req) {
  check_cardinalities(req);
  return raw_form_factor(chain, req);
}

RatioFunctions<Complex> ratio_functions(const RatioModel& m) {
  return {[f = m.r1](const Complex& x) { return f(x); }, [f = m.r3](const Complex& x) { return f(x); }};
}

FormSets<Complex> form_sets(const FormFactorRequest& req) {
  return {req.C.u.values, req.C.v.values, req.B.u.values, req.B.v.values};
}

void check_disjoint(const FormFactorRequest& req, double eps) {
  for (std::size_t i = 0; i < req.C.a(); ++i)
    for (std::size_t k = 0; k < req.B.a(); ++k)
      if (close(req.C.u[i], req.B.u[k], eps)) throw CoincidingRootsError("a u root is shared by both states");
  for (std::size_t i = 0; i < req.C.b(); ++i)
    for (std::size_t k = 0; k < req.B.b(); ++k)
      if (close(req.C.v[i], req.B.v[k], eps)) throw CoincidingRootsError("a v root is shared by both states");
}

DeterminantReport ff_det12(const RatioModel& r, Complex c, const FormFactorRequest& req) {
  require_family(req, 1, 2);
  check_cardinalities(req);
  check_disjoint(req);
  const Kernel<Complex> k{c};
  const RatioFunctions<Complex> rf = ratio_functions(r);
  const FormSets<Complex> s = form_sets(req);
  DeterminantReport rep;
  rep.columns = columns12(s, req.z);
  const SquareMatrix<Complex> m = form_matrix(k, rf, s, std::span<const Complex>(rep.columns));
  rep.matrix = to_eigen(m);
  rep.prefactor = form_prefactor(k, s, std::span<const Complex>(rep.columns));
  rep.det = determinant(m);
  rep.value = rep.prefactor * rep.det;
  return rep;
}

DeterminantReport ff_det12(const Chain& chain, const FormFactorRequest& req) {
  require_on_shell(chain, req);
  return ff_det12(chain.vacuum().model(), chain.spec().c, req);
}

DeterminantReport ff_det13(const RatioModel& r, Complex c, const FormFactorRequest& req) {
  require_family(req, 1, 3);
  check_cardinalities(req);
  check_disjoint(req);
  const Kernel<Complex> k{c};
  const RatioFunctions<Complex> rf = ratio_functions(r);
  const FormSets<Complex> s = form_sets(req);
  DeterminantReport rep;
  rep.columns = columns13(s);
  const SquareMatrix<Complex> m = form_matrix(k, rf, s, std::span<const Complex>(rep.columns));
  rep.matrix = to_eigen(m);
  rep.prefactor = form_prefactor(k, s, std::span<const Complex>(rep.columns));
  rep.det = determinant(m);
  rep.tau_diff = tau_eigenvalue(k, rf, req.z, std::span<const Complex>(s.uC), std::span<const Complex>(s.vC)) -
                 tau_eigenvalue(k, rf, req.z, std::span<const Complex>(s.uB), std::span<const Complex>(s.vB));
  rep.value = rep.tau_diff * rep.prefactor * rep.det;
  return rep;
}

DeterminantReport ff_det13(const Chain& chain, const FormFactorRequest& req) {
  require_on_shell(chain, req);
  return ff_det13(chain.vacuum().model(), chain.spec().c, req);
}

DeterminantReport ff_det31(const Chain& chain, const FormFactorRequest& req) {
  require_family(req, 3, 1);
  return ff_det13(chain, map_psi(req));
}

std::optional<RoutedDeterminant> determinant_path(const Chain& chain, const FormFactorRequest& req) {
  const int key = 10 * req.i + req.j;
  switch (key) {
    case 12:
      return RoutedDeterminant{"det12", ff_det12(chain, req)};
    case 13:
      return RoutedDeterminant{"det13", ff_det13(chain, req)};
    case 21:
      return RoutedDeterminant{"psi(det12)", ff_det12(chain, map_psi(req))};
    case 31:
      return RoutedDeterminant{"psi(det13)", ff_det13(chain, map_psi(req))};
    case 23:
    case 32: {
      const PhiImage img = map_phi(req, chain.spec());
      const Chain image(img.spec);
      if (key == 23) return RoutedDeterminant{"phi(det12)", ff_det12(image, img.req)};
      return RoutedDeterminant{"psi(phi(det12))", ff_det12(image, map_psi(img.req))};
    }
    default:
      return std::nullopt;
  }
}

DeterminantReport ff_limit13(const RatioModel& r, Complex c, const FormFactorRequest& req) {
  require_family(req, 1, 3);
  check_cardinalities(req);
  check_disjoint(req);
  const Kernel<Complex> k{c};
  const RatioFunctions<Complex> rf = ratio_functions(r);
  const FormSets<Complex> s = form_sets(req);
  DeterminantReport rep;
  rep.columns = columns12(s, req.z);
  const SquareMatrix<Complex> m = limit_matrix(k, rf, s, req.z);
  rep.matrix = to_eigen(m);
  const std::vector<Complex> x = columns13(s);
  rep.prefactor = k.prod(KernelId::F, req.z, std::span<const Complex>(s.uB)) *
                  k.prod(KernelId::F, std::span<const Complex>(s.vC), req.z) *
                  form_prefactor(k, s, std::span<const Complex>(x));
  rep.det = determinant(m);
  rep.value = rep.prefactor * rep.det;
  return rep;
}

FormFactorRequest map_psi(const FormFactorRequest& req) {
  FormFactorRequest o = req;
  std::swap(o.i, o.j);
  std::swap(o.C, o.B);
  return o;
}

PhiImage map_phi(const FormFactorRequest& req, const ChainSpec& spec) {
  PhiImage o;
  o.req.i = 4 - req.j;
  o.req.j = 4 - req.i;
  o.req.z = -req.z;
  o.req.C = negated_swap(req.C);
  o.req.B = negated_swap(req.B);
  o.spec = spec.phi_toggled();
  return o;
}

UniversalFF universal_ff(const Chain& chain, const FormFactorRequest& req, std::span<const Complex> zs, EvalPath path) {
  check_cardinalities(req);
  if (req.C.a() == req.B.a() && req.C.b() == req.B.b() && same_roots(req.C, req.B, 1e-8))
    throw CoincidingRootsError("universal form factor needs distinct states");
  check_disjoint(req);
  UniversalFF out;
  Complex sum = 0.0;
  for (Complex z : zs) {
    const Complex td = transfer_tau(chain.spec(), z, req.C) - transfer_tau(chain.spec(), z, req.B);
    if (std::abs(td) <= 1e-12 * std::max(1.0, std::abs(transfer_tau(chain.spec(), z, req.B)))) {
      out.skipped.push_back(z);
      continue;
    }
    FormFactorRequest q = req;
    q.z = z;
    Complex raw;
    if (path == EvalPath::Oracle) {
      raw = direct_form_factor(chain, q);
    } else if (q.i == 1 && q.j == 2) {
      raw = ff_det12(chain, q).value;
    } else if (q.i == 1 && q.j == 3) {
      raw = ff_det13(chain, q).value;
    } else if (q.i == 3 && q.j == 1) {
      raw = ff_det31(chain, q).value;
    } else {
      throw Error("no determinant path for this family");
    }
    out.samples.push_back({z, raw, td});
    sum += raw / td;
  }
  if (out.samples.empty()) throw Error("every z sample had a vanishing tau difference");
  out.value = sum / static_cast<double>(out.samples.size());
  // a family may vanish identically between two states; the norms then set the scale
  const Complex nC = (dual_vector(chain, req.C) * bethe_vector(chain, req.C))(0);
  const Complex nB = (dual_vector(chain, req.B) * bethe_vector(chain, req.B))(0);
  const double den = std::max({std::abs(out.value), std::sqrt(std::abs(nC * nB)), 1e-30});
  for (const auto& s : out.samples) out.spread = std::max(out.spread, std::abs(s.raw / s.tau_diff - out.value) / den);
  return out;
}

double RelationReport::max_exact_defect() const {
  double m = 0.0;
  for (const auto& e : entries)
    if (e.path == "exact") m = std::max(m, e.defect);
  return m;
}

double RelationReport::convergence_ratio(const std::string& relation) const {
  double d3 = -1.0, d4 = -1.0;
  for (const auto& e : entries) {
    if (e.relation != relation) continue;
    if (e.path == scale_label(1e3)) d3 = e.defect;
    if (e.path == scale_label(1e4)) d4 = e.defect;
  }
  if (d3 <= 0.0 || d4 < 0.0) throw Error("no finite-w entries for relation " + relation);
  return d4 / d3;
}

RelationReport relation_f13(const Chain& chain, Complex z, const BetheRoots& C, const BetheRoots& B) {
  require_untwisted_on_shell(chain, C, B);
  check_cardinalities({1, 3, z, C, B});
  const auto T = chain.at(z);
  const BraVector bra = dual_vector(chain, C);
  const KetVector ket = bethe_vector(chain, B);
  const Complex lhs = pair(bra, (*T)(1, 3), ket);
  RelationReport rep;
  const Complex exact = -pair(bra, (*T)(1, 2), chain.zero_modes()(2, 3) * ket);
  rep.entries.push_back({"f13 via raised v", "exact", lhs, exact, rel_defect(lhs, exact)});
  for (double W : kRelationScales) {
    const Complex rhs = -pair(bra, (*T)(1, 2), raised_ket(chain, 2, 3, B, W * kRay));
    rep.entries.push_back({"f13 via raised v", scale_label(W), exact, rhs, rel_defect(exact, rhs), W * kRay});
  }
  return rep;
}

RelationReport relation_f12(const Chain& chain, Complex z, const BetheRoots& C, const BetheRoots& B) {
  require_untwisted_on_shell(chain, C, B);
  check_cardinalities({1, 2, z, C, B});
  const auto T = chain.at(z);
  const BraVector bra = dual_vector(chain, C);
  const KetVector ket = bethe_vector(chain, B);
  const Complex lhs = pair(bra, (*T)(1, 2), ket);
  RelationReport rep;
  for (int eps : {1, 2}) {
    const std::string name = "f12 via raised u, eps=" + std::to_string(eps);
    const double sign = eps == 1 ? -1.0 : 1.0;
    const Complex exact = sign * pair(bra, (*T)(eps, eps), chain.zero_modes()(1, 2) * ket);
    rep.entries.push_back({name, "exact", lhs, exact, rel_defect(lhs, exact)});
    for (double W : kRelationScales) {
      const Complex rhs = sign * pair(bra, (*T)(eps, eps), raised_ket(chain, 1, 2, B, W * kRay));
      rep.entries.push_back({name, scale_label(W), exact, rhs, rel_defect(exact, rhs), W * kRay});
    }
  }
  return rep;
}

RelationReport relation_diagonal(const Chain& chain, Complex z, const BetheRoots& C, const BetheRoots& B) {
  require_untwisted_on_shell(chain, C, B);
  check_cardinalities({1, 1, z, C, B});
  const auto T = chain.at(z);
  const BraVector bra = dual_vector(chain, C);
  const KetVector ket = bethe_vector(chain, B);
  const Complex lhs = pair(bra, (*T)(1, 1) - (*T)(2, 2), ket);
  RelationReport rep;
  const Complex exact = pair(bra * chain.zero_modes()(2, 1), (*T)(1, 2), ket);
  rep.entries.push_back({"diagonal difference", "exact", lhs, exact, rel_defect(lhs, exact)});
  for (double W : kRelationScales) {
    const Complex rhs = pair(raised_bra(chain, 2, 1, C, W * kRay), (*T)(1, 2), ket);
    rep.entries.push_back({"diagonal difference", scale_label(W), exact, rhs, rel_defect(exact, rhs), W * kRay});
  }
  return rep;
}

Complex coinciding_entry(const RatioModel& r, Complex c, const ParamSet& uB, const ParamSet& vB, const ParamSet& vC,
                         Complex w) {
  if (vB.size() != vC.size()) throw SizeError("coinciding entry needs #vB = #vC once w is removed");
  const Kernel<Complex> k{c};
  Complex bracket = r.dlog_r3(w);
  for (std::size_t i = 0; i < vB.size(); ++i) {
    const Complex d = w - vB[i];
    bracket -= 2.0 * c / (d * d - c * c);
  }
  for (std::size_t j = 0; j < uB.size(); ++j) bracket += k.t(w, uB[j]) / c;
  return c * k.prod(KernelId::H, vB.view(), w) * k.prod(KernelId::HInv, vC.view(), w) * bracket;
}

Complex coinciding_entry_average(const RatioModel& r, Complex c, const ParamSet& uB, const ParamSet& vB,
                                 const ParamSet& vC, Complex w, double delta) {
  const Kernel<Complex> k{c};
  const RatioFunctions<Complex> rf = ratio_functions(r);
  Complex sum = 0.0;
  // four points w + delta * {1, -1, i, -i}: the second-order term cancels as well as the first
  for (Complex step : {Complex(1.0), Complex(-1.0), Complex(0.0, 1.0), Complex(0.0, -1.0)}) {
    const Complex x = w + delta * step;
    FormSets<Complex> s;
    s.uB = uB.values;
    s.vB = vB.with(w).values;
    s.vC = vC.with(x).values;
    sum += v_row_entry(k, rf, s, vB.size(), x);
  }
  return 0.25 * sum;
}

DeterminantReport coinciding_root_limit(const RatioModel& r, Complex c, const FormFactorRequest& req, std::size_t kC,
                                        std::size_t kB) {
  require_family(req, 1, 2);
  check_cardinalities(req);
  if (kC >= req.C.b() || kB >= req.B.b() || !close(req.C.v[kC], req.B.v[kB], kDefaultSeparation))
    throw CoincidingRootsError("designated pair does not coincide");
  FormFactorRequest rest = req;
  rest.C.v = req.C.v.without(kC);
  rest.B.v = req.B.v.without(kB);
  check_disjoint(rest);
  const Complex w = req.B.v[kB];

  const Kernel<Complex> k{c};
  const RatioFunctions<Complex> rf = ratio_functions(r);
  FormSets<Complex> s = form_sets(req);
  s.vC[kC] = w;
  DeterminantReport rep;
  rep.columns = columns12(s, req.z);
  const std::size_t n = rep.columns.size();
  const std::size_t a1 = s.uC.size();
  const std::size_t col_w = s.uB.size() + kC;
  SquareMatrix<Complex> m(n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t j = 0; j < a1; ++j) m(j, col) = u_row_entry(k, rf, s, j, rep.columns[col]);
    for (std::size_t j = 0; j < s.vB.size(); ++j)
      m(a1 + j, col) = j == kB && col == col_w ? coinciding_entry(r, c, rest.B.u, rest.B.v, rest.C.v, w)
                                               : v_row_entry(k, rf, s, j, rep.columns[col]);
  }
  rep.matrix = to_eigen(m);
  rep.prefactor = form_prefactor(k, s, std::span<const Complex>(rep.columns));
  rep.det = determinant(m);
  rep.value = rep.prefactor * rep.det;
  return rep;
}

std::vector<LimitSample> coinciding_entry_asymptotics(const Chain& chain, const ParamSet& uB, const ParamSet& vB,
                                                      const ParamSet& vC, std::span<const double> scales, Complex dir) {
  const Complex c = chain.spec().c;
  const Complex target =
      c * (static_cast<double>(uB.size()) - 2.0 * static_cast<double>(vB.size()) - chain.vacuum().r3_zero());
  const RatioModel m = chain.vacuum().model();
  std::vector<LimitSample> out;
  for (double s : scales) {
    const Complex w = s * dir;
    const Complex value = w * w / c * coinciding_entry(m, c, uB, vB, vC, w);
    out.push_back({w, value, rel_defect(value, target)});
  }
  return out;
}

RelationReport reduction_f13_f12(const Chain& chain, Complex z, const BetheRoots& Cp, const BetheRoots& B,
                                 std::span<const double> scales) {
  require_untwisted_on_shell(chain, Cp, B);
  check_cardinalities({1, 2, z, Cp, B});
  const Complex c = chain.spec().c;
  const auto T = chain.at(z);
  const BraVector bra = dual_vector(chain, Cp);
  const KetVector ket = bethe_vector(chain, B);
  const Complex rhs = c * pair(bra, (*T)(1, 2), ket);
  RelationReport rep;
  const Complex exact = c * pair(bra * chain.zero_modes()(3, 2), (*T)(1, 3), ket);
  rep.entries.push_back({"f13 reduction", "exact", exact, rhs, rel_defect(exact, rhs)});
  for (double W : scales) {
    const Complex lhs = c * pair(raised_bra(chain, 3, 2, Cp, W * kRay), (*T)(1, 3), ket);
    rep.entries.push_back({"f13 reduction", scale_label(W), lhs, rhs, rel_defect(lhs, rhs), W * kRay});
  }
  return rep;
}

}  // namespace gl3
