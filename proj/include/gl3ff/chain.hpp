#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gl3ff/scalar_kernel.hpp"

namespace gl3 {

inline constexpr std::size_t kMaxSites = 6;

// Direct: product of fundamental L-operators. PhiImage: T~_ij(u) = T_{4-j,4-i}(-u) of the direct chain.
enum class Orientation { Direct, PhiImage };

struct ChainSpec {
  std::vector<Complex> xi;
  Complex c{1.0, 0.0};
  std::array<Complex, 3> kappa{Complex{1.0}, Complex{1.0}, Complex{1.0}};
  Orientation orientation = Orientation::Direct;

  std::size_t sites() const { return xi.size(); }
  std::size_t dim() const;
  bool untwisted() const;
  void validate() const;
  // points where entries of T(w) have poles
  std::vector<Complex> poles() const;
  ChainSpec phi_toggled() const;
};

using OperatorMatrix = Eigen::MatrixXcd;
using KetVector = Eigen::VectorXcd;
using BraVector = Eigen::RowVectorXcd;

// The nine operator entries T_ij, indexed from 1 as in the algebra.
class Monodromy {
 public:
  Monodromy() = default;
  explicit Monodromy(std::size_t dim);

  OperatorMatrix& operator()(int i, int j) { return e_[static_cast<std::size_t>(3 * (i - 1) + (j - 1))]; }
  const OperatorMatrix& operator()(int i, int j) const {
    return e_[static_cast<std::size_t>(3 * (i - 1) + (j - 1))];
  }
  std::size_t dim() const { return static_cast<std::size_t>(e_[0].rows()); }
  OperatorMatrix trace() const { return (*this)(1, 1) + (*this)(2, 2) + (*this)(3, 3); }

 private:
  std::array<OperatorMatrix, 9> e_;
};

using MonodromyFn = std::function<Monodromy(Complex)>;

Eigen::MatrixXcd r_matrix(Complex u, Complex v, Complex c);
double yang_baxter_residual(Complex u, Complex v, Complex w, Complex c);

Monodromy monodromy(const ChainSpec& spec, Complex w);
KetVector ket_vacuum(const ChainSpec& spec);
BraVector bra_vacuum(const ChainSpec& spec);

struct RttOptions {
  // 0: full operator residual; n > 0: residual probed on n random vectors
  int probes = 0;
  std::uint64_t seed = 7;
};

// max over (i,j,k,l) of the Frobenius norm of both RTT forms, scaled by max(1, max|T(u)| max|T(v)|)
double rtt_residual(const MonodromyFn& T, Complex c, Complex u, Complex v, const RttOptions& opt = {});
double rtt_residual(const ChainSpec& spec, Complex u, Complex v, const RttOptions& opt = {});

// D(w) T(w) as a matrix polynomial, D(w) = prod (w - p_k) over the pole set.
class MonodromyPolynomial {
 public:
  explicit MonodromyPolynomial(const ChainSpec& spec);

  const Monodromy& coefficient(std::size_t n) const { return coeff_.at(n); }
  std::size_t degree() const { return coeff_.size() - 1; }
  Monodromy evaluate(Complex w) const;
  // T_ij[0]: coefficient of c/w in T_ij(w)
  Monodromy zero_modes() const;
  // deviation of the leading coefficient from the identity pattern
  double leading_defect() const;

 private:
  Complex c_;
  std::vector<Complex> poles_;
  std::vector<Monodromy> coeff_;
};

Monodromy zero_modes(const ChainSpec& spec);
Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Pair r1 = lambda1/lambda2, r3 = lambda3/lambda2 with logarithmic derivatives.
struct RatioModel {
  std::function<Complex(Complex)> r1, r3;
  std::function<Complex(Complex)> dlog_r1, dlog_r3;
};

class VacuumData {
 public:
  explicit VacuumData(const ChainSpec& spec);

  // lambda_i(w); lambda_2 is normalized to 1
  Complex lambda(int i, Complex w) const;
  Complex r1(Complex w) const;
  Complex r3(Complex w) const;
  Complex dlog_r1(Complex w) const;
  Complex dlog_r3(Complex w) const;
  Complex r1_prime(Complex w) const { return r1(w) * dlog_r1(w); }
  Complex r3_prime(Complex w) const { return r3(w) * dlog_r3(w); }
  // coefficients of c/w in the expansions of r1, r3; throw TwistError for twisted chains
  Complex r1_zero() const;
  Complex r3_zero() const;

  RatioModel model() const;
  const ChainSpec& spec() const { return spec_; }

 private:
  Complex prod_f(Complex w) const;
  Complex dlog_prod_f(Complex w) const;
  ChainSpec spec_;
};

// Chain with memoized monodromy evaluations. Cache entries are immutable once stored.
class Chain {
 public:
  explicit Chain(ChainSpec spec);

  const ChainSpec& spec() const { return spec_; }
  const VacuumData& vacuum() const { return vacuum_; }
  Kernel<Complex> kernel() const { return Kernel<Complex>{spec_.c}; }
  std::size_t dim() const { return spec_.dim(); }

  std::shared_ptr<const Monodromy> at(Complex w) const;
  // throws TwistError when twisted
  const Monodromy& zero_modes() const;

 private:
  ChainSpec spec_;
  VacuumData vacuum_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<double, double>, std::shared_ptr<const Monodromy>> cache_;
  mutable std::optional<Monodromy> zero_;
};

}  // namespace gl3
