#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gl3ff/bethe.hpp"
#include "gl3ff/chain.hpp"

namespace gl3 {

inline constexpr std::size_t kMaxRoots = 4;

struct PartitionTerm {
  std::size_t k = 0;
  std::vector<std::size_t> uI, uII, vI, vII;
  Complex coefficient;
};

// Partition sum terms in enumeration order: increasing k, lexicographic subsets of u then of v.
std::vector<PartitionTerm> partition_terms(Complex c, const ParamSet& u, const ParamSet& v);

KetVector bethe_vector(const Chain& chain, const ParamSet& u, const ParamSet& v);
inline KetVector bethe_vector(const Chain& chain, const BetheRoots& r) { return bethe_vector(chain, r.u, r.v); }

BraVector dual_vector(const Chain& chain, const ParamSet& u, const ParamSet& v);
inline BraVector dual_vector(const Chain& chain, const BetheRoots& r) { return dual_vector(chain, r.u, r.v); }

// max over 5 seeded w of |tr T(w) B - tau(w) B| / |B|
double on_shell_residual(const Chain& chain, const BetheRoots& r, std::uint64_t seed = 1);
double dual_on_shell_residual(const Chain& chain, const BetheRoots& r, std::uint64_t seed = 1);

// |[T_ij(u1), T_ij(u2)]| for the creation families
double family_commutator(const Chain& chain, int i, int j, Complex u1, Complex u2);

enum class Side { Ket, Bra };
enum class InfiniteRoot { None, U, V };

struct ActionEntry {
  std::string formula;
  Eigen::VectorXcd lhs, rhs;
  double defect = 0.0;  // |lhs - rhs| / max(|lhs|, |rhs|, state norm)
};

struct ZeroModeReport {
  int i = 0, j = 0;
  Side side = Side::Ket;
  InfiniteRoot context = InfiniteRoot::None;
  std::vector<ActionEntry> entries;
  double max_defect() const;
};

// Verifies the action of T_ij[0] on B(u;v) (ket) or C(u;v) (bra).
// With an infinite-root context the acted state is c T_12[0] B (U) or c T_23[0] B (V) for kets,
// and c C T_21[0] (U) or c C T_32[0] (V) for bras; (u, v) are then the finite roots.
ZeroModeReport zero_mode_action(const Chain& chain, int i, int j, const BetheRoots& r, Side side,
                                InfiniteRoot context = InfiniteRoot::None);

// w -> infinity construction of the raising actions, realized at finite w.
KetVector raised_ket(const Chain& chain, int i, int j, const BetheRoots& r, Complex w);
BraVector raised_bra(const Chain& chain, int i, int j, const BetheRoots& r, Complex w);

}  // namespace gl3
