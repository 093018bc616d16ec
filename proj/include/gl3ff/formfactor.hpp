#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gl3ff/bethe_vectors.hpp"
#include "gl3ff/determinant_forms.hpp"

namespace gl3 {

struct FormFactorRequest {
  int i = 1, j = 2;
  Complex z{0.0};
  BetheRoots C;  // dual side, cardinalities (a', b')
  BetheRoots B;  // ket side, cardinalities (a, b)
};

// (a' - a, b' - b) forced by T_ij.
std::pair<int, int> cardinality_shift(int i, int j);
// Throws CardinalityError on a shape that T_ij cannot connect.
void check_cardinalities(const FormFactorRequest& req);

// <C(rootsC)| T_ij(z) |B(rootsB)> by dense algebra.
Complex direct_form_factor(const Chain& chain, const FormFactorRequest& req);
// Same inner product without the cardinality check.
Complex raw_form_factor(const Chain& chain, const FormFactorRequest& req);

struct DeterminantReport {
  Complex prefactor{1.0};
  Eigen::MatrixXcd matrix;
  Complex det{1.0};
  Complex tau_diff{1.0};  // 1 when the representation has no tau factor
  Complex value{0.0};
  std::vector<Complex> columns;
};

RatioFunctions<Complex> ratio_functions(const RatioModel& m);
FormSets<Complex> form_sets(const FormFactorRequest& req);

// Throws CoincidingRootsError when a C root equals a B root of the same kind.
void check_disjoint(const FormFactorRequest& req, double eps = kDefaultSeparation);

DeterminantReport ff_det12(const RatioModel& r, Complex c, const FormFactorRequest& req);
DeterminantReport ff_det12(const Chain& chain, const FormFactorRequest& req);
DeterminantReport ff_det13(const RatioModel& r, Complex c, const FormFactorRequest& req);
DeterminantReport ff_det13(const Chain& chain, const FormFactorRequest& req);
// F31 through the psi image of the F13 representation.
DeterminantReport ff_det31(const Chain& chain, const FormFactorRequest& req);

// Limit form of F13: f(z, uB) f(vC, z) H13 det M, with M carrying the Phi row.
DeterminantReport ff_limit13(const RatioModel& r, Complex c, const FormFactorRequest& req);

FormFactorRequest map_psi(const FormFactorRequest& req);

struct PhiImage {
  FormFactorRequest req;
  ChainSpec spec;
};
PhiImage map_phi(const FormFactorRequest& req, const ChainSpec& spec);

struct RoutedDeterminant {
  std::string route;  // "det12", "psi(det13)", "phi(det12)", ...
  DeterminantReport report;
};

// Determinant evaluation for the six off-diagonal families, reached from F12 and F13 through psi and phi.
// Empty for the diagonal families.
std::optional<RoutedDeterminant> determinant_path(const Chain& chain, const FormFactorRequest& req);

struct ZSample {
  Complex z, raw, tau_diff;
};

struct UniversalFF {
  Complex value{0.0};
  double spread = 0.0;  // max deviation over samples / max(|value|, sqrt|<C|C><B|B>|)
  std::vector<ZSample> samples;
  std::vector<Complex> skipped;  // z with vanishing tau difference
};

enum class EvalPath { Oracle, Determinant };

// F(z) / (tau_C(z) - tau_B(z)) over the z list; req.z is ignored.
UniversalFF universal_ff(const Chain& chain, const FormFactorRequest& req, std::span<const Complex> zs,
                         EvalPath path = EvalPath::Oracle);

struct RelationEntry {
  std::string relation;  // "f13 via raised v", "f12 via raised u, eps=1", ...
  std::string path;      // "exact" or "w=100" etc.
  Complex lhs, rhs;
  double defect = 0.0;
  Complex w{0.0};  // sweep point; 0 on the exact path
};

struct RelationReport {
  std::vector<RelationEntry> entries;
  double max_exact_defect() const;
  // defect(w=1e4) / defect(w=1e3) for the named relation
  double convergence_ratio(const std::string& relation) const;
};

// Relations between form factors obtained from zero modes; C and B must be on-shell on an untwisted chain.
//   F13: C (a+1, b+1), B (a, b)       against -lim (w/c) F12 with w added to vB
//   F12: C (a+1, b),   B (a, b)       against (-1)^eps lim (w/c) F_eps,eps with w added to uB
//   F11 - F22: C (a, b), B (a, b)     against lim (w/c) F12 with w added to uC
RelationReport relation_f13(const Chain& chain, Complex z, const BetheRoots& C, const BetheRoots& B);
RelationReport relation_f12(const Chain& chain, Complex z, const BetheRoots& C, const BetheRoots& B);
RelationReport relation_diagonal(const Chain& chain, Complex z, const BetheRoots& C, const BetheRoots& B);

// Finite value of the v-row entry at the column x = w when w sits in both vC and the B-side v set.
// vB and vC exclude w.
Complex coinciding_entry(const RatioModel& r, Complex c, const ParamSet& uB, const ParamSet& vB,
                         const ParamSet& vC, Complex w);
// Symmetric average of the raw entry at x = w +- delta and w +- i delta, x taking the place of w in vC.
Complex coinciding_entry_average(const RatioModel& r, Complex c, const ParamSet& uB, const ParamSet& vB,
                                 const ParamSet& vC, Complex w, double delta = 1e-5);

// F12 determinant with vC[kC] == vB[kB]; the singular entry is replaced by its limit.
// Throws CoincidingRootsError unless that is the only coincidence.
DeterminantReport coinciding_root_limit(const RatioModel& r, Complex c, const FormFactorRequest& req,
                                        std::size_t kC, std::size_t kB);

struct LimitSample {
  Complex w, value;
  double defect = 0.0;
};

// (w^2/c) times the coinciding entry along w = scale * dir, against c(a - 2b - r3[0]).
std::vector<LimitSample> coinciding_entry_asymptotics(const Chain& chain, const ParamSet& uB, const ParamSet& vB,
                                                      const ParamSet& vC, std::span<const double> scales,
                                                      Complex dir = Complex(1.0, 0.3));

// lim v F13(z | uC, {vC, v}; B) = c F12(z | uC, vC; B) with C' = (uC, vC) and B on-shell.
// Entries: exact zero-mode form, then finite-v values.
RelationReport reduction_f13_f12(const Chain& chain, Complex z, const BetheRoots& Cp, const BetheRoots& B,
                                 std::span<const double> scales);

}  // namespace gl3
