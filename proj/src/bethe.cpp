#include "gl3ff/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gl3ff/rng.hpp"

namespace gl3 {

namespace {

// log f(x, y) with branch guard on the zero of f
Complex log_f(const Kernel<Complex>& k, Complex x, Complex y) {
  const Complex d = x - y;
  if (detail::near_zero(d + k.c, x, y, k.eps)) throw BranchError("log f: factor vanishes");
  return std::log(k.f(x, y));
}

// derivative of log f(x, y) with respect to x, as a function of d = x - y
Complex dlog_f(Complex c, Complex d) { return -c / (d * (d + c)); }

Complex principal(Complex z) {
  const double two_pi = 2.0 * std::numbers::pi;
  return {z.real(), z.imag() - two_pi * std::round(z.imag() / two_pi)};
}

Complex log_ratio(const std::function<Complex(Complex)>& r, Complex x) {
  const Complex v = r(x);
  if (std::abs(v) <= kDefaultSeparation || !std::isfinite(std::abs(v))) throw BranchError("log r: ratio is zero or infinite");
  return std::log(v);
}

Eigen::VectorXcd residual_vector(const RatioModel& r, Complex c, const BetheRoots& x) {
  const Kernel<Complex> k{c};
  const std::size_t a = x.a(), b = x.b();
  Eigen::VectorXcd F(static_cast<Eigen::Index>(a + b));
  for (std::size_t i = 0; i < a; ++i) {
    Complex s = log_ratio(r.r1, x.u[i]);
    for (std::size_t j = 0; j < a; ++j)
      if (j != i) s += log_f(k, x.u[j], x.u[i]) - log_f(k, x.u[i], x.u[j]);
    for (std::size_t m = 0; m < b; ++m) s -= log_f(k, x.v[m], x.u[i]);
    F(static_cast<Eigen::Index>(i)) = principal(s);
  }
  for (std::size_t j = 0; j < b; ++j) {
    Complex s = log_ratio(r.r3, x.v[j]);
    for (std::size_t m = 0; m < b; ++m)
      if (m != j) s += log_f(k, x.v[j], x.v[m]) - log_f(k, x.v[m], x.v[j]);
    for (std::size_t i = 0; i < a; ++i) s -= log_f(k, x.v[j], x.u[i]);
    F(static_cast<Eigen::Index>(a + j)) = principal(s);
  }
  return F;
}

double inf_norm(const Eigen::VectorXcd& F) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < F.size(); ++i) m = std::max(m, std::abs(F(i)));
  return m;
}

BetheRoots from_vector(const Eigen::VectorXcd& x, std::size_t a, std::size_t b) {
  BetheRoots r;
  for (std::size_t i = 0; i < a; ++i) r.u.values.push_back(x(static_cast<Eigen::Index>(i)));
  for (std::size_t j = 0; j < b; ++j) r.v.values.push_back(x(static_cast<Eigen::Index>(a + j)));
  return r;
}

Eigen::VectorXcd to_vector(const BetheRoots& r) {
  Eigen::VectorXcd x(static_cast<Eigen::Index>(r.a() + r.b()));
  for (std::size_t i = 0; i < r.a(); ++i) x(static_cast<Eigen::Index>(i)) = r.u[i];
  for (std::size_t j = 0; j < r.b(); ++j) x(static_cast<Eigen::Index>(r.a() + j)) = r.v[j];
  return x;
}

bool less_complex(Complex x, Complex y) {
  if (std::abs(x.real() - y.real()) > 1e-9 * std::max(1.0, std::abs(x.real()))) return x.real() < y.real();
  return x.imag() < y.imag();
}

}  // namespace

std::vector<double> bethe_residual(const RatioModel& r, Complex c, const BetheRoots& roots) {
  const Eigen::VectorXcd F = residual_vector(r, c, roots);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < F.size(); ++i) out.push_back(std::abs(F(i)));
  return out;
}

std::vector<double> bethe_residual(const ChainSpec& spec, const BetheRoots& roots) {
  return bethe_residual(VacuumData(spec).model(), spec.c, roots);
}

double max_residual(const std::vector<double>& res) {
  double m = 0.0;
  for (double x : res) m = std::max(m, x);
  return m;
}

BetheSystem bethe_system(const RatioModel& r, Complex c, const BetheRoots& x) {
  const std::size_t a = x.a(), b = x.b();
  const auto n = static_cast<Eigen::Index>(a + b);
  BetheSystem s{residual_vector(r, c, x), Eigen::MatrixXcd::Zero(n, n)};
  const auto U = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
  const auto V = [a](std::size_t j) { return static_cast<Eigen::Index>(a + j); };
  for (std::size_t i = 0; i < a; ++i) {
    Complex diag = r.dlog_r1(x.u[i]);
    for (std::size_t j = 0; j < a; ++j) {
      if (j == i) continue;
      const Complex e = dlog_f(c, x.u[j] - x.u[i]) + dlog_f(c, x.u[i] - x.u[j]);
      diag -= e;
      s.J(U(i), U(j)) = e;
    }
    for (std::size_t m = 0; m < b; ++m) {
      const Complex e = dlog_f(c, x.v[m] - x.u[i]);
      diag += e;
      s.J(U(i), V(m)) = -e;
    }
    s.J(U(i), U(i)) = diag;
  }
  for (std::size_t j = 0; j < b; ++j) {
    Complex diag = r.dlog_r3(x.v[j]);
    for (std::size_t m = 0; m < b; ++m) {
      if (m == j) continue;
      const Complex e = dlog_f(c, x.v[m] - x.v[j]) + dlog_f(c, x.v[j] - x.v[m]);
      diag += e;
      s.J(V(j), V(m)) = -e;
    }
    for (std::size_t i = 0; i < a; ++i) {
      const Complex e = dlog_f(c, x.v[j] - x.u[i]);
      diag -= e;
      s.J(V(j), U(i)) = e;
    }
    s.J(V(j), V(j)) = diag;
  }
  return s;
}

NewtonResult newton_solve(const RatioModel& r, Complex c, BetheRoots start, const SolveConfig& cfg) {
  NewtonResult out;
  const std::size_t a = start.a(), b = start.b();
  Eigen::VectorXcd x = to_vector(start);
  out.roots = start;
  if (a + b == 0) {
    out.converged = true;
    out.roots.on_shell = true;
    return out;
  }
  double res;
  try {
    res = inf_norm(residual_vector(r, c, start));
  } catch (const Error&) {
    return out;
  }
  out.history.push_back(res);
  for (int it = 0; it < cfg.max_iter; ++it) {
    BetheSystem sys;
    try {
      sys = bethe_system(r, c, from_vector(x, a, b));
    } catch (const Error&) {
      break;
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.J);
    out.rcond = lu.rcond();
    if (res <= cfg.tol) break;
    if (!(out.rcond > 1e-15)) return out;
    const Eigen::VectorXcd dx = lu.solve(-sys.F);
    double alpha = cfg.damping;
    bool accepted = false;
    for (int k = 0; k < 12; ++k, alpha *= 0.5) {
      const Eigen::VectorXcd trial = x + alpha * dx;
      try {
        const double tr = inf_norm(residual_vector(r, c, from_vector(trial, a, b)));
        if (std::isfinite(tr) && tr < res) {
          x = trial;
          res = tr;
          accepted = true;
          break;
        }
      } catch (const Error&) {
      }
    }
    if (!accepted) break;
    out.history.push_back(res);
    if (x.cwiseAbs().maxCoeff() > cfg.max_root) break;
  }
  // one polishing step, kept only if it helps
  if (res <= cfg.tol) {
    try {
      const BetheSystem sys = bethe_system(r, c, from_vector(x, a, b));
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.J);
      out.rcond = lu.rcond();
      const Eigen::VectorXcd trial = x + lu.solve(-sys.F);
      const double tr = inf_norm(residual_vector(r, c, from_vector(trial, a, b)));
      if (tr < res) {
        x = trial;
        res = tr;
      }
    } catch (const Error&) {
    }
  }
  out.roots = from_vector(x, a, b);
  out.roots.residual = res;
  out.roots.on_shell = res <= cfg.tol;
  out.converged = out.roots.on_shell;
  return out;
}

BetheRoots canonical(BetheRoots r) {
  std::sort(r.u.values.begin(), r.u.values.end(), less_complex);
  std::sort(r.v.values.begin(), r.v.values.end(), less_complex);
  return r;
}

bool same_roots(const BetheRoots& x, const BetheRoots& y, double tol) {
  if (x.a() != y.a() || x.b() != y.b()) return false;
  const BetheRoots p = canonical(x), q = canonical(y);
  for (std::size_t i = 0; i < p.a(); ++i)
    if (std::abs(p.u[i] - q.u[i]) > tol * std::max(1.0, std::abs(q.u[i]))) return false;
  for (std::size_t j = 0; j < p.b(); ++j)
    if (std::abs(p.v[j] - q.v[j]) > tol * std::max(1.0, std::abs(q.v[j]))) return false;
  return true;
}

namespace {

bool admissible(const BetheRoots& r, const std::vector<Complex>& poles, const SolveConfig& cfg) {
  if (!r.u.distinct(cfg.sep) || !r.v.distinct(cfg.sep)) return false;
  for (const ParamSet* s : {&r.u, &r.v})
    for (auto x : s->values) {
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag()) || std::abs(x) > cfg.max_root) return false;
      for (auto p : poles)
        if (std::abs(x - p) <= 1e-8 * std::max(1.0, std::abs(p))) return false;
    }
  return true;
}

std::vector<BetheRoots> make_seeds(const ChainSpec& spec, std::size_t a, std::size_t b, const SolveConfig& cfg) {
  std::vector<BetheRoots> seeds;
  CounterRng rng(cfg.seed, 0x5eed);
  if (cfg.seeds == SeedStrategy::UserSupplied) return cfg.known;
  if (cfg.seeds == SeedStrategy::PerturbedKnown) {
    for (const auto& k : cfg.known)
      for (int n = 0; n < std::max(1, cfg.n_seeds / std::max<int>(1, static_cast<int>(cfg.known.size()))); ++n) {
        BetheRoots s = k;
        for (auto& x : s.u.values) x += cfg.perturbation * rng.complex_box(1.0);
        for (auto& x : s.v.values) x += cfg.perturbation * rng.complex_box(1.0);
        seeds.push_back(s);
      }
    return seeds;
  }
  if (spec.orientation == Orientation::PhiImage) {
    // the image system maps onto the direct one under (u, v) -> (-v, -u)
    std::vector<BetheRoots> mirrored = make_seeds(spec.phi_toggled(), b, a, cfg);
    for (auto& m : mirrored) {
      std::swap(m.u, m.v);
      m.u = m.u.negated();
      m.v = m.v.negated();
    }
    return mirrored;
  }
  const auto poles = spec.poles();
  Complex center = 0.0;
  for (auto p : poles) center += p;
  center /= static_cast<double>(poles.size());
  double spread = 0.0;
  for (auto p : poles) spread = std::max(spread, std::abs(p - center));
  const double R = std::max(1.0, spread) + std::abs(spec.c);
  const double scales[] = {0.15, 0.5, 1.0, 2.0, 4.0};
  for (int n = 0; n < cfg.n_seeds; ++n) {
    const double s = R * scales[n % 5];
    const double shift = (n / 2) % 2 == 0 ? -0.5 : 0.5;
    BetheRoots seed;
    if (n % 2 == 1) {
      // near-string seeds: u close to xi - c/2, v close to u -+ c/2
      const auto pick = [&] { return poles[static_cast<std::size_t>(rng.next() % poles.size())]; };
      const double w = 0.3 * std::abs(spec.c);
      for (std::size_t i = 0; i < a; ++i) seed.u.values.push_back(pick() - 0.5 * spec.c + w * rng.complex_box(1.0));
      for (std::size_t j = 0; j < b; ++j) {
        const Complex base = a > 0 ? seed.u[static_cast<std::size_t>(rng.next() % a)] : pick();
        seed.v.values.push_back(base + shift * spec.c + w * rng.complex_box(1.0));
      }
    } else {
      for (std::size_t i = 0; i < a; ++i) seed.u.values.push_back(center + s * rng.complex_box(1.0));
      for (std::size_t j = 0; j < b; ++j) seed.v.values.push_back(center + shift * spec.c + s * rng.complex_box(1.0));
    }
    seeds.push_back(seed);
  }
  return seeds;
}

ChainSpec twisted_copy(const ChainSpec& spec, double s) {
  ChainSpec t = spec;
  const Complex k2 = spec.kappa[1];
  t.kappa = {spec.kappa[0] + s * k2 * Complex(0.35, 0.2), k2, spec.kappa[2] + s * k2 * Complex(-0.3, 0.15)};
  return t;
}

// Follow solutions of a twisted deformation back to the given chain. Roots escaping to
// infinity as the twist is removed belong to descendants and are dropped.
std::vector<BetheRoots> continue_from_twist(const ChainSpec& spec, std::size_t a, std::size_t b, const SolveConfig& cfg,
                                            std::vector<BetheRoots> (*solver)(const ChainSpec&, std::size_t, std::size_t,
                                                                              const SolveConfig&)) {
  std::vector<BetheRoots> start;
  try {
    start = solver(twisted_copy(spec, 1.0), a, b, cfg);
  } catch (const Error&) {
    return {};
  }
  const auto poles = spec.poles();
  double bound = 1.0;
  for (auto p : poles) bound = std::max(bound, std::abs(p));
  bound = 1e3 * (bound + std::abs(spec.c));
  std::vector<BetheRoots> out;
  for (BetheRoots cur : start) {
    double s = 1.0, step = 1.0 / 16.0;
    bool lost = false;
    while (s > 0.0 && !lost) {
      const double next = std::max(0.0, s - step);
      const ChainSpec sp = next == 0.0 ? spec : twisted_copy(spec, next);
      const NewtonResult nr = newton_solve(VacuumData(sp).model(), spec.c, cur, cfg);
      bool ok = nr.converged && admissible(nr.roots, poles, cfg);
      for (const ParamSet* set : {&nr.roots.u, &nr.roots.v})
        for (auto x : set->values) ok = ok && std::abs(x) < bound;
      if (ok) {
        cur = nr.roots;
        s = next;
        step = std::min(0.25, step * 1.5);
        if (s == 0.0 && !(nr.rcond > 1e-12)) lost = true;
      } else {
        step *= 0.5;
        if (step < 1e-4) lost = true;
      }
    }
    if (!lost) out.push_back(cur);
  }
  return out;
}

}  // namespace

std::vector<BetheRoots> solve_bethe(const ChainSpec& spec, std::size_t a, std::size_t b, const SolveConfig& cfg) {
  spec.validate();
  if (!(cfg.tol > 0.0)) throw Error("solver tolerance must be positive");
  if (a == 0 && b == 0) {
    BetheRoots vac;
    vac.on_shell = true;
    return {vac};
  }
  const RatioModel model = VacuumData(spec).model();
  const auto poles = spec.poles();
  std::vector<BetheRoots> found;
  double best = INFINITY, worst_rcond = 1.0;
  int degenerate = 0;
  for (const BetheRoots& seed : make_seeds(spec, a, b, cfg)) {
    if (seed.a() != a || seed.b() != b) throw CardinalityError("seed cardinalities do not match (a, b)");
    NewtonResult nr = newton_solve(model, spec.c, seed, cfg);
    if (!nr.history.empty()) best = std::min(best, nr.history.back());
    if (nr.converged && !(nr.rcond > 1e-12)) {
      ++degenerate;
      worst_rcond = std::min(worst_rcond, nr.rcond);
      continue;
    }
    if (!nr.converged || !admissible(nr.roots, poles, cfg)) continue;
    BetheRoots r = canonical(nr.roots);
    bool dup = false;
    for (const auto& f : found)
      if (same_roots(f, r, cfg.dedup_tol)) dup = true;
    if (!dup) found.push_back(r);
  }
  if (spec.untwisted() && cfg.seeds == SeedStrategy::RandomCloud) {
    for (const BetheRoots& cand : continue_from_twist(spec, a, b, cfg, &solve_bethe)) {
      BetheRoots r = canonical(cand);
      bool dup = false;
      for (const auto& f : found)
        if (same_roots(f, r, cfg.dedup_tol)) dup = true;
      if (!dup) found.push_back(r);
    }
  }
  if (found.empty()) {
    if (degenerate > 0)
      throw DegenerateJacobianError("Bethe system has a degenerate Jacobian for every seed reaching a solution", worst_rcond);
    throw NoConvergenceError("no seed converged to an admissible Bethe solution", best);
  }
  std::sort(found.begin(), found.end(), [](const BetheRoots& x, const BetheRoots& y) {
    for (std::size_t i = 0; i < x.a(); ++i)
      if (std::abs(x.u[i] - y.u[i]) > 1e-8) return less_complex(x.u[i], y.u[i]);
    for (std::size_t j = 0; j < x.b(); ++j)
      if (std::abs(x.v[j] - y.v[j]) > 1e-8) return less_complex(x.v[j], y.v[j]);
    return false;
  });
  return found;
}

Complex transfer_tau(const RatioModel& r, Complex c, Complex z, const ParamSet& u, const ParamSet& v) {
  const Kernel<Complex> k{c};
  return r.r1(z) * k.prod(KernelId::F, u.view(), z) + k.prod(KernelId::F, z, u.view()) * k.prod(KernelId::F, v.view(), z) +
         r.r3(z) * k.prod(KernelId::F, z, v.view());
}

Complex transfer_tau(const ChainSpec& spec, Complex z, const BetheRoots& roots) {
  return transfer_tau(VacuumData(spec).model(), spec.c, z, roots.u, roots.v);
}

Complex bethe_rhs_r1(Complex c, const ParamSet& u, const ParamSet& v, std::size_t i) {
  const Kernel<Complex> k{c};
  const ParamSet ui = u.without(i);
  return k.prod(KernelId::F, u[i], ui.view()) / k.prod(KernelId::F, ui.view(), u[i]) * k.prod(KernelId::F, v.view(), u[i]);
}

Complex bethe_rhs_r3(Complex c, const ParamSet& u, const ParamSet& v, std::size_t j) {
  const Kernel<Complex> k{c};
  const ParamSet vj = v.without(j);
  return k.prod(KernelId::F, vj.view(), v[j]) / k.prod(KernelId::F, v[j], vj.view()) * k.prod(KernelId::F, v[j], u.view());
}

}  // namespace gl3
