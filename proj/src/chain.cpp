#include "gl3ff/chain.hpp"

#include <cmath>
#include <numbers>

#include "gl3ff/rng.hpp"

namespace gl3 {

std::size_t ChainSpec::dim() const {
  std::size_t d = 1;
  for (std::size_t i = 0; i < sites(); ++i) d *= 3;
  return d;
}

bool ChainSpec::untwisted() const {
  const auto same = [](Complex a, Complex b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(b)); };
  return same(kappa[0], kappa[1]) && same(kappa[2], kappa[1]);
}

void ChainSpec::validate() const {
  if (sites() < 1 || sites() > kMaxSites)
    throw SizeError("chain length must be in [1, " + std::to_string(kMaxSites) + "], got " + std::to_string(sites()));
  if (c == Complex(0.0)) throw Error("coupling c must be nonzero");
  for (auto k : kappa)
    if (k == Complex(0.0)) throw Error("twist parameters must be nonzero");
  for (auto x : xi)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) throw Error("inhomogeneity is not finite");
}

std::vector<Complex> ChainSpec::poles() const {
  std::vector<Complex> p = xi;
  if (orientation == Orientation::PhiImage)
    for (auto& x : p) x = -x;
  return p;
}

ChainSpec ChainSpec::phi_toggled() const {
  ChainSpec s = *this;
  s.orientation = orientation == Orientation::Direct ? Orientation::PhiImage : Orientation::Direct;
  return s;
}

Monodromy::Monodromy(std::size_t dim) {
  for (auto& m : e_) m = OperatorMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

Eigen::MatrixXcd r_matrix(Complex u, Complex v, Complex c) {
  const Complex g = Kernel<Complex>{c}.g(u, v);
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(3 * j + i, 3 * i + j) += g;
  return r;
}

double yang_baxter_residual(Complex u, Complex v, Complex w, Complex c) {
  const Eigen::MatrixXcd id3 = Eigen::MatrixXcd::Identity(3, 3);
  const auto kron = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
  };
  const Eigen::MatrixXcd r12 = kron(r_matrix(u, v, c), id3);
  const Eigen::MatrixXcd r23 = kron(id3, r_matrix(v, w, c));
  Eigen::MatrixXcd r13 = Eigen::MatrixXcd::Identity(27, 27);
  const Complex g = Kernel<Complex>{c}.g(u, w);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r13(9 * k + 3 * j + i, 9 * i + 3 * j + k) += g;
  const Eigen::MatrixXcd lhs = r12 * r13 * r23;
  const Eigen::MatrixXcd rhs = r23 * r13 * r12;
  return (lhs - rhs).norm() / std::max(1.0, lhs.norm());
}

namespace {

Monodromy direct_monodromy(const ChainSpec& s, Complex w) {
  const Kernel<Complex> k{s.c};
  Monodromy cur(1);
  for (int a = 1; a <= 3; ++a) cur(a, a)(0, 0) = 1.0;
  for (std::size_t m = 0; m < s.sites(); ++m) {
    const Complex g = k.g(w, s.xi[m]);
    const Eigen::Index d = static_cast<Eigen::Index>(cur.dim());
    Monodromy next(static_cast<std::size_t>(3 * d));
    for (int a = 1; a <= 3; ++a)
      for (int b = 1; b <= 3; ++b) {
        OperatorMatrix& n = next(a, b);
        for (int blk = 0; blk < 3; ++blk) n.block(blk * d, blk * d, d, d) = cur(a, b);
        for (int kk = 1; kk <= 3; ++kk) n.block((kk - 1) * d, (a - 1) * d, d, d) += g * cur(kk, b);
      }
    cur = std::move(next);
  }
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) cur(a, b) *= s.kappa[static_cast<std::size_t>(a - 1)] / s.kappa[1];
  return cur;
}

}  // namespace

Monodromy monodromy(const ChainSpec& spec, Complex w) {
  spec.validate();
  if (spec.orientation == Orientation::Direct) return direct_monodromy(spec, w);
  ChainSpec d = spec;
  d.orientation = Orientation::Direct;
  Monodromy base = direct_monodromy(d, -w);
  Monodromy r(base.dim());
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) r(i, j) = base(4 - j, 4 - i);
  return r;
}

KetVector ket_vacuum(const ChainSpec& spec) {
  KetVector v = KetVector::Zero(static_cast<Eigen::Index>(spec.dim()));
  v(0) = 1.0;
  return v;
}

BraVector bra_vacuum(const ChainSpec& spec) { return ket_vacuum(spec).transpose(); }

Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return a * b - b * a; }

double rtt_residual(const MonodromyFn& T, Complex c, Complex u, Complex v, const RttOptions& opt) {
  const Monodromy tu = T(u);
  const Monodromy tv = T(v);
  const Complex g = Kernel<Complex>{c}.g(u, v);
  double nu = 0.0, nv = 0.0;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      nu = std::max(nu, tu(i, j).norm());
      nv = std::max(nv, tv(i, j).norm());
    }
  const double scale = std::max(1.0, nu * nv);
  const auto idx = [](int i, int j) { return static_cast<std::size_t>(3 * (i - 1) + (j - 1)); };

  double worst = 0.0;
  const auto check = [&](const auto& P, const auto& Q) {
    // P[ab][cd] = T_ab(u) T_cd(v), Q[cd][ab] = T_cd(v) T_ab(u)
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j)
        for (int k = 1; k <= 3; ++k)
          for (int l = 1; l <= 3; ++l) {
            const auto lhs = P[idx(i, j)][idx(k, l)] - Q[idx(k, l)][idx(i, j)];
            const auto f1 = g * (Q[idx(k, j)][idx(i, l)] - P[idx(k, j)][idx(i, l)]);
            const auto f2 = g * (P[idx(i, l)][idx(k, j)] - Q[idx(i, l)][idx(k, j)]);
            worst = std::max({worst, (lhs - f1).norm() / scale, (lhs - f2).norm() / scale});
          }
  };

  if (opt.probes <= 0) {
    std::vector<std::vector<Eigen::MatrixXcd>> P(9, std::vector<Eigen::MatrixXcd>(9)), Q = P;
    for (int a = 1; a <= 3; ++a)
      for (int b = 1; b <= 3; ++b)
        for (int cc = 1; cc <= 3; ++cc)
          for (int d = 1; d <= 3; ++d) {
            P[idx(a, b)][idx(cc, d)] = tu(a, b) * tv(cc, d);
            Q[idx(cc, d)][idx(a, b)] = tv(cc, d) * tu(a, b);
          }
    check(P, Q);
    return worst;
  }

  CounterRng rng(opt.seed);
  const Eigen::Index n = static_cast<Eigen::Index>(tu.dim());
  for (int p = 0; p < opt.probes; ++p) {
    Eigen::VectorXcd psi(n);
    for (Eigen::Index i = 0; i < n; ++i) psi(i) = rng.complex_box(1.0);
    psi /= psi.norm();
    std::vector<Eigen::VectorXcd> yu(9), yv(9);
    for (int a = 1; a <= 3; ++a)
      for (int b = 1; b <= 3; ++b) {
        yu[idx(a, b)] = tu(a, b) * psi;
        yv[idx(a, b)] = tv(a, b) * psi;
      }
    std::vector<std::vector<Eigen::VectorXcd>> P(9, std::vector<Eigen::VectorXcd>(9)), Q = P;
    for (int a = 1; a <= 3; ++a)
      for (int b = 1; b <= 3; ++b)
        for (int cc = 1; cc <= 3; ++cc)
          for (int d = 1; d <= 3; ++d) {
            P[idx(a, b)][idx(cc, d)] = tu(a, b) * yv[idx(cc, d)];
            Q[idx(cc, d)][idx(a, b)] = tv(cc, d) * yu[idx(a, b)];
          }
    check(P, Q);
  }
  return worst;
}

double rtt_residual(const ChainSpec& spec, Complex u, Complex v, const RttOptions& opt) {
  return rtt_residual([&spec](Complex w) { return monodromy(spec, w); }, spec.c, u, v, opt);
}

MonodromyPolynomial::MonodromyPolynomial(const ChainSpec& spec) : c_(spec.c), poles_(spec.poles()) {
  spec.validate();
  const std::size_t L = spec.sites();
  const std::size_t N = L + 1;
  double rmax = 0.0;
  for (auto p : poles_) rmax = std::max(rmax, std::abs(p));
  const double rho = 2.0 * (1.0 + rmax) + std::abs(spec.c);
  const std::size_t d = spec.dim();

  coeff_.assign(N, Monodromy(d));
  for (std::size_t m = 0; m < N; ++m) {
    const double theta = 2.0 * std::numbers::pi * (static_cast<double>(m) + 0.5) / static_cast<double>(N);
    const Complex u = std::polar(rho, theta);
    Complex D = 1.0;
    for (auto p : poles_) D *= (u - p);
    const Monodromy t = monodromy(spec, u);
    for (std::size_t n = 0; n < N; ++n) {
      const Complex w = D * std::pow(u, -static_cast<double>(n)) / static_cast<double>(N);
      for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) coeff_[n](i, j) += w * t(i, j);
    }
  }
}

Monodromy MonodromyPolynomial::evaluate(Complex w) const {
  Complex D = 1.0;
  for (auto p : poles_) D *= (w - p);
  Monodromy r(coeff_[0].dim());
  for (std::size_t n = coeff_.size(); n-- > 0;)
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) r(i, j) = r(i, j) * w + coeff_[n](i, j);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) r(i, j) /= D;
  return r;
}

Monodromy MonodromyPolynomial::zero_modes() const {
  const std::size_t L = degree();
  Complex e1 = 0.0;
  for (auto p : poles_) e1 += p;
  Monodromy r(coeff_[0].dim());
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      const OperatorMatrix& top = coeff_[L](i, j);
      const OperatorMatrix& sub = L >= 1 ? coeff_[L - 1](i, j) : OperatorMatrix::Zero(top.rows(), top.cols()).eval();
      r(i, j) = (sub + e1 * top) / c_;
    }
  return r;
}

double MonodromyPolynomial::leading_defect() const {
  const Monodromy& top = coeff_.back();
  double worst = 0.0;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      if (i == j) {
        const Complex lead = top(i, i)(0, 0);
        worst = std::max(worst, (top(i, i) - lead * OperatorMatrix::Identity(top(i, i).rows(), top(i, i).cols())).norm());
      } else {
        worst = std::max(worst, top(i, j).norm());
      }
    }
  return worst;
}

Monodromy zero_modes(const ChainSpec& spec) {
  if (!spec.untwisted()) throw TwistError("zero modes are defined for the untwisted chain only");
  return MonodromyPolynomial(spec).zero_modes();
}

VacuumData::VacuumData(const ChainSpec& spec) : spec_(spec) { spec_.validate(); }

Complex VacuumData::prod_f(Complex w) const {
  const Kernel<Complex> k{spec_.c};
  Complex r = 1.0;
  for (auto x : spec_.xi) r *= spec_.orientation == Orientation::Direct ? k.f(w, x) : k.f(-w, x);
  return r;
}

Complex VacuumData::dlog_prod_f(Complex w) const {
  const Kernel<Complex> k{spec_.c};
  Complex r = 0.0;
  for (auto x : spec_.xi) r += spec_.orientation == Orientation::Direct ? -k.t(w, x) / spec_.c : k.t(-w, x) / spec_.c;
  return r;
}

Complex VacuumData::lambda(int i, Complex w) const {
  if (i == 2) return 1.0;
  if (i == 1) return r1(w);
  if (i == 3) return r3(w);
  throw Error("lambda index must be 1, 2 or 3");
}

Complex VacuumData::r1(Complex w) const {
  if (spec_.orientation == Orientation::Direct) return spec_.kappa[0] / spec_.kappa[1] * prod_f(w);
  return spec_.kappa[2] / spec_.kappa[1];
}

Complex VacuumData::r3(Complex w) const {
  if (spec_.orientation == Orientation::Direct) return spec_.kappa[2] / spec_.kappa[1];
  return spec_.kappa[0] / spec_.kappa[1] * prod_f(w);
}

Complex VacuumData::dlog_r1(Complex w) const {
  return spec_.orientation == Orientation::Direct ? dlog_prod_f(w) : Complex(0.0);
}

Complex VacuumData::dlog_r3(Complex w) const {
  return spec_.orientation == Orientation::Direct ? Complex(0.0) : dlog_prod_f(w);
}

Complex VacuumData::r1_zero() const {
  if (!spec_.untwisted()) throw TwistError("r1[0] requires an untwisted chain");
  return spec_.orientation == Orientation::Direct ? static_cast<double>(spec_.sites()) : 0.0;
}

Complex VacuumData::r3_zero() const {
  if (!spec_.untwisted()) throw TwistError("r3[0] requires an untwisted chain");
  return spec_.orientation == Orientation::Direct ? 0.0 : -static_cast<double>(spec_.sites());
}

RatioModel VacuumData::model() const {
  auto self = std::make_shared<VacuumData>(*this);
  return {[self](Complex w) { return self->r1(w); }, [self](Complex w) { return self->r3(w); },
          [self](Complex w) { return self->dlog_r1(w); }, [self](Complex w) { return self->dlog_r3(w); }};
}

Chain::Chain(ChainSpec spec) : spec_(std::move(spec)), vacuum_(spec_) {}

std::shared_ptr<const Monodromy> Chain::at(Complex w) const {
  const std::pair<double, double> key{w.real(), w.imag()};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto m = std::make_shared<const Monodromy>(monodromy(spec_, w));
  std::lock_guard<std::mutex> lock(mu_);
  if (cache_.size() >= 48) cache_.clear();
  return cache_.emplace(key, m).first->second;
}

const Monodromy& Chain::zero_modes() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!zero_) zero_ = gl3::zero_modes(spec_);
  return *zero_;
}

}  // namespace gl3
