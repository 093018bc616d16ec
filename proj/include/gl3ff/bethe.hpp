#pragma once

#include <cstdint>
#include <vector>

#include "gl3ff/chain.hpp"

namespace gl3 {

struct BetheRoots {
  ParamSet u;
  ParamSet v;
  double residual = 0.0;
  bool on_shell = false;

  std::size_t a() const { return u.size(); }
  std::size_t b() const { return v.size(); }
};

enum class SeedStrategy { RandomCloud, PerturbedKnown, UserSupplied };

struct SolveConfig {
  double tol = 1e-12;
  int max_iter = 200;
  double damping = 1.0;
  SeedStrategy seeds = SeedStrategy::RandomCloud;
  int n_seeds = 160;
  std::uint64_t seed = 1;
  std::vector<BetheRoots> known;  // for PerturbedKnown and UserSupplied
  double perturbation = 0.05;
  double dedup_tol = 1e-8;
  double sep = kDefaultSeparation;
  double max_root = 1e6;
};

// Log-form Bethe residual components |F_i|, first the a u-equations then the b v-equations.
std::vector<double> bethe_residual(const RatioModel& r, Complex c, const BetheRoots& roots);
std::vector<double> bethe_residual(const ChainSpec& spec, const BetheRoots& roots);
double max_residual(const std::vector<double>& res);

// Complex log-form system F and its analytic Jacobian.
struct BetheSystem {
  Eigen::VectorXcd F;
  Eigen::MatrixXcd J;
};
BetheSystem bethe_system(const RatioModel& r, Complex c, const BetheRoots& roots);

struct NewtonResult {
  BetheRoots roots;
  std::vector<double> history;  // max |F| per iterate
  bool converged = false;
  double rcond = 1.0;
};

NewtonResult newton_solve(const RatioModel& r, Complex c, BetheRoots start, const SolveConfig& cfg);

std::vector<BetheRoots> solve_bethe(const ChainSpec& spec, std::size_t a, std::size_t b, const SolveConfig& cfg = {});

// order-independent canonical form: each set sorted by (re, im)
BetheRoots canonical(BetheRoots r);
bool same_roots(const BetheRoots& x, const BetheRoots& y, double tol);

Complex transfer_tau(const RatioModel& r, Complex c, Complex z, const ParamSet& u, const ParamSet& v);
Complex transfer_tau(const ChainSpec& spec, Complex z, const BetheRoots& roots);

// Right-hand sides of the Bethe equations: the values r1(u_i) and r3(v_j) would take on shell.
Complex bethe_rhs_r1(Complex c, const ParamSet& u, const ParamSet& v, std::size_t i);
Complex bethe_rhs_r3(Complex c, const ParamSet& u, const ParamSet& v, std::size_t j);

}  // namespace gl3
