#include "gl3ff/bethe_vectors.hpp"

#include <algorithm>

#include "gl3ff/rng.hpp"

namespace gl3 {

namespace {

std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = i;
  if (k > n) return out;
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& s) {
  std::vector<std::size_t> r;
  for (std::size_t i = 0; i < n; ++i)
    if (std::find(s.begin(), s.end(), i) == s.end()) r.push_back(i);
  return r;
}

std::vector<Complex> pick(const ParamSet& p, const std::vector<std::size_t>& idx) {
  std::vector<Complex> r;
  for (auto i : idx) r.push_back(p[i]);
  return r;
}

void check_caps(const ParamSet& u, const ParamSet& v) {
  if (u.size() > kMaxRoots || v.size() > kMaxRoots) throw SizeError("Bethe vector construction is capped at a, b <= 4");
}

double defect_of(const Eigen::VectorXcd& lhs, const Eigen::VectorXcd& rhs, double ref) {
  const double den = std::max({lhs.norm(), rhs.norm(), ref, 1e-300});
  return (lhs - rhs).norm() / den;
}

ActionEntry entry(std::string name, Eigen::VectorXcd lhs, Eigen::VectorXcd rhs, double ref) {
  ActionEntry e{std::move(name), std::move(lhs), std::move(rhs), 0.0};
  e.defect = defect_of(e.lhs, e.rhs, ref);
  return e;
}

const Complex kRay(0.8, 0.6);
const double kLimitScales[] = {1e4, 1e5};
const double kCoincidingShift = 1e-4;

}  // namespace

std::vector<PartitionTerm> partition_terms(Complex c, const ParamSet& u, const ParamSet& v) {
  check_caps(u, v);
  const Kernel<Complex> k{c};
  const Complex shared = k.prod(KernelId::FInv, v.view(), u.view());
  std::vector<PartitionTerm> terms;
  for (std::size_t n = 0; n <= std::min(u.size(), v.size()); ++n)
    for (const auto& uI : combinations(u.size(), n))
      for (const auto& vI : combinations(v.size(), n)) {
        PartitionTerm t;
        t.k = n;
        t.uI = uI;
        t.vI = vI;
        t.uII = complement(u.size(), uI);
        t.vII = complement(v.size(), vI);
        const auto xuI = pick(u, t.uI), xuII = pick(u, t.uII), xvI = pick(v, t.vI), xvII = pick(v, t.vII);
        t.coefficient = dwpf<Complex>(k, xvI, xuI) * shared * k.prod(KernelId::F, xvII, xvI) * k.prod(KernelId::F, xuI, xuII);
        terms.push_back(std::move(t));
      }
  return terms;
}

KetVector bethe_vector(const Chain& chain, const ParamSet& u, const ParamSet& v) {
  KetVector sum = KetVector::Zero(static_cast<Eigen::Index>(chain.dim()));
  const KetVector vac = ket_vacuum(chain.spec());
  for (const PartitionTerm& t : partition_terms(chain.spec().c, u, v)) {
    if (t.coefficient == Complex(0.0)) continue;
    KetVector psi = vac;
    for (auto i : t.vII) psi = (*chain.at(v[i]))(2, 3) * psi;
    for (auto i : t.uII) psi = (*chain.at(u[i]))(1, 2) * psi;
    for (auto i : t.uI) psi = (*chain.at(u[i]))(1, 3) * psi;
    sum += t.coefficient * psi;
  }
  return sum;
}

BraVector dual_vector(const Chain& chain, const ParamSet& u, const ParamSet& v) {
  BraVector sum = BraVector::Zero(static_cast<Eigen::Index>(chain.dim()));
  const BraVector vac = bra_vacuum(chain.spec());
  for (const PartitionTerm& t : partition_terms(chain.spec().c, u, v)) {
    if (t.coefficient == Complex(0.0)) continue;
    BraVector psi = vac;
    for (auto i : t.vII) psi = psi * (*chain.at(v[i]))(3, 2);
    for (auto i : t.uII) psi = psi * (*chain.at(u[i]))(2, 1);
    for (auto i : t.uI) psi = psi * (*chain.at(u[i]))(3, 1);
    sum += t.coefficient * psi;
  }
  return sum;
}

namespace {

std::vector<Complex> probe_points(const Chain& chain, const BetheRoots& r, std::uint64_t seed) {
  CounterRng rng(seed, 0x7a);
  std::vector<Complex> avoid = chain.spec().poles();
  avoid.insert(avoid.end(), r.u.values.begin(), r.u.values.end());
  avoid.insert(avoid.end(), r.v.values.begin(), r.v.values.end());
  std::vector<Complex> pts;
  while (pts.size() < 5) {
    const Complex w = Complex(0.3, 0.7) + rng.complex_box(2.5);
    bool ok = true;
    for (auto x : avoid)
      if (std::abs(w - x) < 0.15) ok = false;
    if (ok) pts.push_back(w);
  }
  return pts;
}

}  // namespace

double on_shell_residual(const Chain& chain, const BetheRoots& r, std::uint64_t seed) {
  const KetVector B = bethe_vector(chain, r);
  const double nb = B.norm();
  if (nb == 0.0) return INFINITY;
  const RatioModel model = chain.vacuum().model();
  double worst = 0.0;
  for (Complex w : probe_points(chain, r, seed)) {
    const auto T = chain.at(w);
    const Complex tau = transfer_tau(model, chain.spec().c, w, r.u, r.v);
    worst = std::max(worst, (T->trace() * B - tau * B).norm() / nb);
  }
  return worst;
}

double dual_on_shell_residual(const Chain& chain, const BetheRoots& r, std::uint64_t seed) {
  const BraVector C = dual_vector(chain, r);
  const double nc = C.norm();
  if (nc == 0.0) return INFINITY;
  const RatioModel model = chain.vacuum().model();
  double worst = 0.0;
  for (Complex w : probe_points(chain, r, seed)) {
    const auto T = chain.at(w);
    const Complex tau = transfer_tau(model, chain.spec().c, w, r.u, r.v);
    worst = std::max(worst, (C * T->trace() - tau * C).norm() / nc);
  }
  return worst;
}

double family_commutator(const Chain& chain, int i, int j, Complex u1, Complex u2) {
  const auto a = chain.at(u1), b = chain.at(u2);
  return commutator((*a)(i, j), (*b)(i, j)).norm();
}

double ZeroModeReport::max_defect() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.defect);
  return m;
}

KetVector raised_ket(const Chain& chain, int i, int j, const BetheRoots& r, Complex w) {
  const Complex s = w / chain.spec().c;
  if (i == 1 && j == 2) return s * bethe_vector(chain, r.u.with(w), r.v);
  if (i == 2 && j == 3) return s * bethe_vector(chain, r.u, r.v.with(w));
  if (i == 1 && j == 3) {
    // the coincidence of w in both sets is removable; average symmetric offsets
    const KetVector p = bethe_vector(chain, r.u.with(w), r.v.with(w + kCoincidingShift));
    const KetVector m = bethe_vector(chain, r.u.with(w), r.v.with(w - kCoincidingShift));
    return s * 0.5 * (p + m);
  }
  throw ContextError("raising construction exists for (1,2), (2,3), (1,3) only");
}

BraVector raised_bra(const Chain& chain, int i, int j, const BetheRoots& r, Complex w) {
  const Complex s = w / chain.spec().c;
  if (i == 2 && j == 1) return s * dual_vector(chain, r.u.with(w), r.v);
  if (i == 3 && j == 2) return s * dual_vector(chain, r.u, r.v.with(w));
  if (i == 3 && j == 1) {
    const BraVector p = dual_vector(chain, r.u.with(w), r.v.with(w + kCoincidingShift));
    const BraVector m = dual_vector(chain, r.u.with(w), r.v.with(w - kCoincidingShift));
    return s * 0.5 * (p + m);
  }
  throw ContextError("dual raising construction exists for (2,1), (3,2), (3,1) only");
}

ZeroModeReport zero_mode_action(const Chain& chain, int i, int j, const BetheRoots& r, Side side, InfiniteRoot context) {
  const ChainSpec& spec = chain.spec();
  if (!spec.untwisted()) throw TwistError("zero-mode actions require an untwisted chain");
  if (i < 1 || i > 3 || j < 1 || j > 3) throw Error("zero-mode index out of range");
  const Monodromy& Z = chain.zero_modes();
  const VacuumData& vd = chain.vacuum();
  const Kernel<Complex> k{spec.c};
  const Complex c = spec.c;
  const double a = static_cast<double>(r.a()), b = static_cast<double>(r.b());
  const Complex r1z = vd.r1_zero(), r3z = vd.r3_zero();

  ZeroModeReport rep;
  rep.i = i;
  rep.j = j;
  rep.side = side;
  rep.context = context;

  const auto bracket_u = [&](std::size_t n) {
    const ParamSet un = r.u.without(n);
    return vd.r1(r.u[n]) * k.prod(KernelId::F, un.view(), r.u[n]) / k.prod(KernelId::F, r.v.view(), r.u[n]) -
           k.prod(KernelId::F, r.u[n], un.view());
  };
  const auto bracket_v = [&](std::size_t n) {
    const ParamSet vn = r.v.without(n);
    return vd.r3(r.v[n]) * k.prod(KernelId::F, r.v[n], vn.view()) / k.prod(KernelId::F, r.v[n], r.u.view()) -
           k.prod(KernelId::F, vn.view(), r.v[n]);
  };

  if (side == Side::Ket) {
    const KetVector B = bethe_vector(chain, r);
    const double ref = B.norm();
    if (context != InfiniteRoot::None) {
      if (!((i == 2 && j == 1) || (i == 3 && j == 2)))
        throw ContextError("infinite-root context on kets applies to T_21[0] and T_32[0]");
      const KetVector S = context == InfiniteRoot::U ? KetVector(c * Z(1, 2) * B) : KetVector(c * Z(2, 3) * B);
      Complex eig = 0.0;
      if (i == 2 && j == 1 && context == InfiniteRoot::U) eig = c * (r1z + b - 2.0 * a);
      if (i == 3 && j == 2 && context == InfiniteRoot::V) eig = c * (a - 2.0 * b - r3z);
      rep.entries.push_back(entry("infinite root", Z(i, j) * S, eig * B, std::max(S.norm(), ref)));
      return rep;
    }
    if (i == j) {
      const Complex eig = i == 1 ? r1z - a : (i == 2 ? Complex(a - b) : r3z + b);
      rep.entries.push_back(entry("diagonal", Z(i, i) * B, eig * B, ref));
    } else if (i < j) {
      const KetVector exact = Z(i, j) * B;
      for (double W : kLimitScales)
        rep.entries.push_back(entry("limit w=" + std::to_string(static_cast<long long>(W)), raised_ket(chain, i, j, r, W * kRay),
                                    exact, ref));
    } else if (i == 2 && j == 1) {
      KetVector rhs = KetVector::Zero(B.size());
      for (std::size_t n = 0; n < r.a(); ++n) rhs += bracket_u(n) * bethe_vector(chain, r.u.without(n), r.v);
      rep.entries.push_back(entry("lowering", Z(2, 1) * B, rhs, ref));
    } else if (i == 3 && j == 2) {
      KetVector rhs = KetVector::Zero(B.size());
      for (std::size_t n = 0; n < r.b(); ++n) rhs -= bracket_v(n) * bethe_vector(chain, r.u, r.v.without(n));
      rep.entries.push_back(entry("lowering", Z(3, 2) * B, rhs, ref));
    } else {
      rep.entries.push_back(entry("commutator", Z(3, 1) * B, commutator(Z(2, 1), Z(3, 2)) * B, ref));
    }
    if (i > j && r.on_shell)
      rep.entries.push_back(entry("singular", Z(i, j) * B, KetVector::Zero(B.size()), ref));
    return rep;
  }

  const BraVector C = dual_vector(chain, r);
  const double ref = C.norm();
  if (context != InfiniteRoot::None) {
    if (!((i == 1 && j == 2) || (i == 2 && j == 3)))
      throw ContextError("infinite-root context on bras applies to T_12[0] and T_23[0]");
    const BraVector S = context == InfiniteRoot::U ? BraVector(c * C * Z(2, 1)) : BraVector(c * C * Z(3, 2));
    Complex eig = 0.0;
    if (i == 1 && j == 2 && context == InfiniteRoot::U) eig = c * (r1z - 2.0 * a + b);
    if (i == 2 && j == 3 && context == InfiniteRoot::V) eig = c * (a - 2.0 * b - r3z);
    rep.entries.push_back(entry("infinite root", (S * Z(i, j)).transpose(), (eig * C).transpose(), std::max(S.norm(), ref)));
    return rep;
  }
  if (i == j) {
    const Complex eig = i == 1 ? r1z - a : (i == 2 ? Complex(a - b) : r3z + b);
    rep.entries.push_back(entry("diagonal", (C * Z(i, i)).transpose(), (eig * C).transpose(), ref));
  } else if (i > j) {
    const BraVector exact = C * Z(i, j);
    for (double W : kLimitScales)
      rep.entries.push_back(entry("limit w=" + std::to_string(static_cast<long long>(W)),
                                  raised_bra(chain, i, j, r, W * kRay).transpose(), exact.transpose(), ref));
  } else if (i == 1 && j == 2) {
    BraVector rhs = BraVector::Zero(C.size());
    for (std::size_t n = 0; n < r.a(); ++n) rhs += bracket_u(n) * dual_vector(chain, r.u.without(n), r.v);
    rep.entries.push_back(entry("raising", (C * Z(1, 2)).transpose(), rhs.transpose(), ref));
  } else if (i == 2 && j == 3) {
    BraVector rhs = BraVector::Zero(C.size());
    for (std::size_t n = 0; n < r.b(); ++n) rhs -= bracket_v(n) * dual_vector(chain, r.u, r.v.without(n));
    rep.entries.push_back(entry("raising", (C * Z(2, 3)).transpose(), rhs.transpose(), ref));
  } else {
    rep.entries.push_back(entry("commutator", (C * Z(1, 3)).transpose(), (C * commutator(Z(2, 3), Z(1, 2))).transpose(), ref));
  }
  if (i < j && r.on_shell)
    rep.entries.push_back(entry("singular", (C * Z(i, j)).transpose(), Eigen::VectorXcd::Zero(C.size()), ref));
  return rep;
}

}  // namespace gl3
