#include <algorithm>

#include "doctest.h"
#include "gl3ff/formfactor.hpp"
#include "gl3ff/identities.hpp"
#include "gl3ff/rng.hpp"

using namespace gl3;

namespace {

using Shape = std::pair<std::size_t, std::size_t>;

ChainSpec generic(std::size_t L, bool twisted = false, Orientation o = Orientation::Direct) {
  ChainSpec s;
  const Complex xs[] = {Complex(0.1, 0.05), Complex(-0.45, 0.2), Complex(0.6, -0.15), Complex(-0.2, -0.3)};
  for (std::size_t k = 0; k < L; ++k) s.xi.push_back(xs[k]);
  if (twisted) s.kappa = {Complex(1.3, 0.4), 1.0, Complex(0.7, -0.5)};
  s.orientation = o;
  return s;
}

ChainSpec random_spec(CounterRng& rng, std::size_t L, Orientation o) {
  ChainSpec s;
  for (std::size_t k = 0; k < L; ++k) s.xi.push_back(rng.complex_box(0.6));
  s.kappa = {1.0 + rng.complex_box(0.4), 1.0, 1.0 + rng.complex_box(0.4)};
  s.orientation = o;
  return s;
}

double rel(Complex x, Complex y) { return std::abs(x - y) / std::max(std::abs(y), 1e-30); }

std::vector<BetheRoots> states(const ChainSpec& s, std::size_t a, std::size_t b) {
  try {
    return solve_bethe(s, a, b);
  } catch (const Error&) {
    return {};
  }
}

const Complex kZ(0.37, -0.81);
const Complex kZs[] = {Complex(0.37, -0.81), Complex(1.3, 0.4), Complex(-0.9, 1.1), Complex(2.2, -1.7), Complex(-1.6, -0.6)};

}  // namespace

TEST_CASE("vacuum form factors") {
  const Chain ch(generic(3));
  const BetheRoots vac;
  CHECK(std::abs(raw_form_factor(ch, {1, 2, kZ, vac, vac})) == 0.0);
  CHECK_THROWS_AS(direct_form_factor(ch, {1, 2, kZ, vac, vac}), CardinalityError);
  CHECK(std::abs(direct_form_factor(ch, {2, 2, kZ, vac, vac}) - 1.0) < 1e-15);
}

TEST_CASE("cardinality shifts") {
  CHECK(cardinality_shift(1, 2) == std::pair{1, 0});
  CHECK(cardinality_shift(1, 3) == std::pair{1, 1});
  CHECK(cardinality_shift(2, 3) == std::pair{0, 1});
  CHECK(cardinality_shift(3, 1) == std::pair{-1, -1});
  CHECK(cardinality_shift(2, 2) == std::pair{0, 0});
}

TEST_CASE("golden F12 between the vacuum and a one-root state") {
  const Chain ch(generic(3));
  std::vector<BetheRoots> C = solve_bethe(ch.spec(), 1, 0);
  REQUIRE(C.size() == 2);
  std::sort(C.begin(), C.end(), [](const BetheRoots& x, const BetheRoots& y) { return x.u[0].real() < y.u[0].real(); });
  const Complex f = direct_form_factor(ch, {1, 2, kZ, C[0], BetheRoots{}});
  // recorded from the dense inner product
  CHECK(std::abs(C[0].u[0] - Complex(-0.589100954864515, 0.210534491379677)) < 1e-10);
  CHECK(rel(f, Complex(3.30190215000987, 0.311487292912033)) < 1e-10);
}

TEST_CASE("determinant representations agree with the oracle on random chains") {
  CounterRng rng(2024, 0);
  int checked12 = 0, checked13 = 0;
  const Shape shapes[] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  for (int n = 0; n < 6; ++n)
    for (Orientation o : {Orientation::Direct, Orientation::PhiImage}) {
      const std::size_t L = 2 + static_cast<std::size_t>(n % 3);
      const Chain ch(random_spec(rng, L, o));
      for (auto [a, b] : shapes) {
        const auto B = states(ch.spec(), a, b);
        if (B.empty()) continue;
        for (auto [i, j] : {std::pair{1, 2}, {1, 3}}) {
          const auto [da, db] = cardinality_shift(i, j);
          const auto C = states(ch.spec(), a + da, b + db);
          if (C.empty()) continue;
          const FormFactorRequest q{i, j, rng.complex_box(1.5), C.front(), B.back()};
          const Complex oracle = direct_form_factor(ch, q);
          const DeterminantReport rep = j == 2 ? ff_det12(ch, q) : ff_det13(ch, q);
          CAPTURE(L);
          CAPTURE(a);
          CAPTURE(b);
          CAPTURE(j);
          CHECK(rel(rep.value, oracle) <= 1e-8);
          CHECK(rep.value == rep.tau_diff * rep.prefactor * rep.det);
          (j == 2 ? checked12 : checked13)++;
        }
      }
    }
  CHECK(checked12 + checked13 >= 20);
  CHECK(checked12 >= 8);
  CHECK(checked13 >= 8);
}

TEST_CASE("smallest cases on three sites") {
  const Chain ch(generic(3, true));
  const BetheRoots vac;
  const auto C10 = solve_bethe(ch.spec(), 1, 0);
  const auto C11 = solve_bethe(ch.spec(), 1, 1);
  REQUIRE(!C10.empty());
  REQUIRE(!C11.empty());
  const FormFactorRequest q12{1, 2, kZ, C10[0], vac}, q13{1, 3, kZ, C11[0], vac};
  CHECK(rel(ff_det12(ch, q12).value, direct_form_factor(ch, q12)) <= 1e-8);
  const DeterminantReport r13 = ff_det13(ch, q13);
  CHECK(rel(r13.value, direct_form_factor(ch, q13)) <= 1e-8);
  const FormSets<Complex> s = form_sets(q13);
  const std::vector<Complex> x = columns13(s);
  CHECK(r13.prefactor == form_prefactor(Kernel<Complex>{ch.spec().c}, s, std::span<const Complex>(x)));
}

TEST_CASE("values do not depend on the order within root sets") {
  const Chain ch(generic(3, true, Orientation::PhiImage));
  const auto B = solve_bethe(ch.spec(), 0, 2);
  const auto C12 = solve_bethe(ch.spec(), 1, 2);
  const auto C13 = solve_bethe(ch.spec(), 1, 3);
  REQUIRE(!B.empty());
  REQUIRE(!C12.empty());
  FormFactorRequest q{1, 2, kZ, C12[0], B[0]};
  const Complex v0 = ff_det12(ch, q).value;
  // the last element of vB plays the role of the extra root; which one is designated does not matter
  std::reverse(q.B.v.values.begin(), q.B.v.values.end());
  CHECK(rel(ff_det12(ch, q).value, v0) <= 1e-10);
  std::reverse(q.C.v.values.begin(), q.C.v.values.end());
  CHECK(rel(ff_det12(ch, q).value, v0) <= 1e-10);

  if (!C13.empty()) {
    FormFactorRequest p{1, 3, kZ, C13[0], B[0]};
    const Complex w0 = ff_det13(ch, p).value;
    std::rotate(p.C.v.values.begin(), p.C.v.values.begin() + 1, p.C.v.values.end());
    std::reverse(p.B.v.values.begin(), p.B.v.values.end());
    CHECK(rel(ff_det13(ch, p).value, w0) <= 1e-10);
  }
}

TEST_CASE("the limit form with the extra row reproduces F13") {
  const Chain ch(generic(4, true));
  const auto B = solve_bethe(ch.spec(), 1, 0);
  const auto C = solve_bethe(ch.spec(), 2, 1);
  REQUIRE(!B.empty());
  REQUIRE(!C.empty());
  const FormFactorRequest q{1, 3, kZ, C[0], B[0]};
  CHECK(rel(ff_limit13(ch.vacuum().model(), ch.spec().c, q).value, direct_form_factor(ch, q)) <= 1e-8);
  // adding the Omega combination of the other rows turns the last row into a multiple of the tau difference
  for (Complex x : {kZ, Complex(-1.2, 0.5)}) CHECK(row_reduction(ch.vacuum().model(), ch.spec().c, form_sets(q), x).defect <= 1e-11);
}

TEST_CASE("shared roots and bad shapes are rejected") {
  const Chain ch(generic(3, true));
  const auto B = solve_bethe(ch.spec(), 1, 0);
  REQUIRE(!B.empty());
  BetheRoots C = B[0];
  C.u = C.u.with(Complex(0.9, 0.4));
  CHECK_THROWS_AS(ff_det12(ch.vacuum().model(), 1.0, {1, 2, kZ, C, B[0]}), CoincidingRootsError);
  CHECK_THROWS_AS(ff_det13(ch.vacuum().model(), 1.0, {1, 3, kZ, C, B[0]}), CardinalityError);
  CHECK_THROWS_AS(ff_det12(ch, {1, 2, kZ, C, B[0]}), OffShellError);
}

TEST_CASE("psi mapping") {
  const Chain ch(generic(3, true));
  const auto B = solve_bethe(ch.spec(), 1, 0);
  const auto C = solve_bethe(ch.spec(), 2, 1);
  REQUIRE(!C.empty());
  const FormFactorRequest q{1, 3, kZ, C[0], B[0]};
  const FormFactorRequest p = map_psi(q);
  CHECK(p.i == 3);
  CHECK(p.j == 1);
  const FormFactorRequest pp = map_psi(p);
  CHECK(pp.i == q.i);
  CHECK(pp.j == q.j);
  CHECK(same_roots(pp.C, q.C, 0.0));
  CHECK(same_roots(pp.B, q.B, 0.0));

  // <C(x)|T_ij|B(y)> = <C(y)|T_ji|B(x)> for parameters of any kind
  CounterRng rng(3, 0);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      BetheRoots x, y;
      const auto [da, db] = cardinality_shift(i, j);
      y.u = ParamSet({rng.complex_box(1.0), rng.complex_box(1.0)});
      y.v = ParamSet({rng.complex_box(1.0)});
      for (int n = 0; n < 2 + da; ++n) x.u.values.push_back(rng.complex_box(1.0));
      for (int n = 0; n < 1 + db; ++n) x.v.values.push_back(rng.complex_box(1.0));
      const FormFactorRequest r{i, j, rng.complex_box(1.0), x, y};
      CHECK(rel(direct_form_factor(ch, map_psi(r)), direct_form_factor(ch, r)) <= 1e-10);
    }
  CHECK(rel(ff_det31(ch, p).value, direct_form_factor(ch, p)) <= 1e-8);
}

TEST_CASE("phi mapping") {
  const ChainSpec spec = generic(3, true);
  const Chain ch(spec);
  FormFactorRequest q{1, 2, kZ, {}, {}};
  CHECK(map_phi(q, spec).req.i == 2);
  CHECK(map_phi(q, spec).req.j == 3);
  CHECK(map_phi(q, spec).spec.orientation == Orientation::PhiImage);

  const PhiImage img0 = map_phi(q, spec);
  const Chain image(img0.spec);
  const VacuumData& d = ch.vacuum();
  const VacuumData& e = image.vacuum();
  for (Complex w : {Complex(0.3, 0.7), Complex(-1.1, 0.2)}) {
    CHECK(std::abs(e.r1(w) - d.r3(-w)) < 1e-14);
    CHECK(std::abs(e.r3(w) - d.r1(-w)) < 1e-14);
  }
  CounterRng rng(4, 0);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      BetheRoots x, y;
      const auto [da, db] = cardinality_shift(i, j);
      y.u = ParamSet({rng.complex_box(1.0)});
      y.v = ParamSet({rng.complex_box(1.0), rng.complex_box(1.0)});
      for (int n = 0; n < 1 + da; ++n) x.u.values.push_back(rng.complex_box(1.0));
      for (int n = 0; n < 2 + db; ++n) x.v.values.push_back(rng.complex_box(1.0));
      const FormFactorRequest r{i, j, rng.complex_box(1.0), x, y};
      const PhiImage img = map_phi(r, spec);
      CHECK(rel(direct_form_factor(image, img.req), direct_form_factor(ch, r)) <= 1e-10);
    }
}

TEST_CASE("selection rules") {
  const Chain ch(generic(3, true));
  const auto s10 = solve_bethe(ch.spec(), 1, 0);
  const auto s11 = solve_bethe(ch.spec(), 1, 1);
  const auto s21 = solve_bethe(ch.spec(), 2, 1);
  REQUIRE(!s10.empty());
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      for (const BetheRoots* C : {&s10[0], &s11[0], &s21[0]})
        for (const BetheRoots* B : {&s10[1], &s11[0], &s21[0]}) {
          const FormFactorRequest q{i, j, kZ, *C, *B};
          bool ok = true;
          try {
            check_cardinalities(q);
          } catch (const CardinalityError&) {
            ok = false;
          }
          if (ok) continue;
          const double scale = dual_vector(ch, *C).norm() * (*ch.at(kZ))(i, j).norm() * bethe_vector(ch, *B).norm();
          CHECK(std::abs(raw_form_factor(ch, q)) <= 1e-12 * scale);
          CHECK_THROWS_AS(direct_form_factor(ch, q), CardinalityError);
        }
}

TEST_CASE("z-factorization") {
  const Chain ch(generic(3, true));
  const auto s11 = solve_bethe(ch.spec(), 1, 1);
  const auto s10 = solve_bethe(ch.spec(), 1, 0);
  const auto s21 = solve_bethe(ch.spec(), 2, 1);
  const auto s22 = solve_bethe(ch.spec(), 2, 2);
  const auto s00 = solve_bethe(ch.spec(), 0, 0);
  REQUIRE(s11.size() >= 2);

  const UniversalFF u22 = universal_ff(ch, {2, 2, kZ, s11[0], s11[1]}, kZs);
  CHECK(u22.samples.size() == 5);
  CHECK(u22.spread <= 1e-8);
  CHECK_THROWS_AS(universal_ff(ch, {2, 2, kZ, s11[0], s11[0]}, kZs), CoincidingRootsError);

  // every family, distinct states with disjoint root sets
  const std::vector<const std::vector<BetheRoots>*> pool = {&s00, &s10, &s11, &s21, &s22};
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      const auto [da, db] = cardinality_shift(i, j);
      bool done = false;
      for (const auto* Bs : pool)
        for (const auto* Cs : pool) {
          if (done || Bs->empty() || Cs->empty() || (Cs == Bs && Cs->size() < 2)) continue;
          if ((*Cs)[0].a() != (*Bs)[0].a() + da || (*Cs)[0].b() != (*Bs)[0].b() + db) continue;
          const BetheRoots& B = (*Bs)[0];
          const BetheRoots& C = Cs == Bs ? (*Cs)[1] : (*Cs)[0];
          FormFactorRequest q{i, j, kZ, C, B};
          try {
            check_disjoint(q);
          } catch (const CoincidingRootsError&) {
            continue;
          }
          CAPTURE(i);
          CAPTURE(j);
          const UniversalFF u = universal_ff(ch, q, kZs);
          CHECK(u.spread <= 1e-8);
          done = true;
        }
      CHECK(done);
    }

  for (auto [i, j, C, B] : {std::tuple{1, 2, &s21[0], &s11[0]}, {1, 3, &s21[0], &s10[0]}, {3, 1, &s10[0], &s21[0]}}) {
    const UniversalFF o = universal_ff(ch, {i, j, kZ, *C, *B}, kZs, EvalPath::Oracle);
    const UniversalFF d = universal_ff(ch, {i, j, kZ, *C, *B}, kZs, EvalPath::Determinant);
    CHECK(rel(d.value, o.value) <= 1e-8);
  }
}

TEST_CASE("form factor relations through zero modes") {
  const Chain ch(generic(3));
  const auto s21 = solve_bethe(ch.spec(), 2, 1);
  const auto s10 = solve_bethe(ch.spec(), 1, 0);
  const BetheRoots vac;
  REQUIRE(s21.size() == 1);
  REQUIRE(s10.size() == 2);

  const RelationReport f13 = relation_f13(ch, kZ, s21[0], s10[0]);
  CHECK(f13.max_exact_defect() <= 1e-10);
  CHECK(f13.convergence_ratio("f13 via raised v") == doctest::Approx(0.1).epsilon(0.3));

  const RelationReport f12 = relation_f12(ch, kZ, s10[0], vac);
  CHECK(f12.max_exact_defect() <= 1e-10);
  CHECK(f12.convergence_ratio("f12 via raised u, eps=1") == doctest::Approx(0.1).epsilon(0.3));
  CHECK(f12.convergence_ratio("f12 via raised u, eps=2") == doctest::Approx(0.1).epsilon(0.3));

  for (auto [C, B] : {std::pair{&vac, &vac}, {&s10[0], &s10[1]}, {&s10[1], &s10[1]}}) {
    const RelationReport d = relation_diagonal(ch, kZ, *C, *B);
    CHECK(d.max_exact_defect() <= 1e-10);
    CHECK(d.convergence_ratio("diagonal difference") == doctest::Approx(0.1).epsilon(0.3));
  }

  const Chain four(generic(4));
  const auto t20 = solve_bethe(four.spec(), 2, 0);
  const auto t10 = solve_bethe(four.spec(), 1, 0);
  REQUIRE(!t20.empty());
  CHECK(relation_f12(four, kZ, t20[0], t10[0]).max_exact_defect() <= 1e-10);
  CHECK(relation_f12(four, kZ, t20[1], t10[2]).max_exact_defect() <= 1e-10);

  const Chain twisted(generic(3, true));
  CHECK_THROWS_AS(relation_f12(twisted, kZ, solve_bethe(twisted.spec(), 1, 0)[0], vac), TwistError);
  BetheRoots off = s10[0];
  off.u[0] += 0.01;
  CHECK_THROWS_AS(relation_f12(ch, kZ, off, vac), OffShellError);
}

TEST_CASE("coinciding-root entry") {
  // vB together with w is an on-shell v set, so the entry has a removable singularity at x = w
  struct Case {
    ChainSpec spec;
    std::size_t a, b;
  };
  const Case cases[] = {{generic(3), 2, 1}, {generic(3, false, Orientation::PhiImage), 1, 2},
                        {generic(3, true, Orientation::PhiImage), 1, 1}, {generic(4, true, Orientation::PhiImage), 0, 2}};
  for (const Case& cs : cases) {
    const Chain ch(cs.spec);
    const auto sols = solve_bethe(ch.spec(), cs.a, cs.b);
    REQUIRE(!sols.empty());
    const BetheRoots& B = sols[0];
    const std::size_t kb = B.b() - 1;
    const Complex w = B.v[kb];
    ParamSet vC;
    for (std::size_t i = 0; i < kb; ++i) vC.values.push_back(Complex(1.7, -0.4) + static_cast<double>(i) * Complex(0.3, 0.9));
    const RatioModel m = ch.vacuum().model();
    const Complex e = coinciding_entry(m, ch.spec().c, B.u, B.v.without(kb), vC, w);
    const Complex avg = coinciding_entry_average(m, ch.spec().c, B.u, B.v.without(kb), vC, w);
    CAPTURE(cs.a);
    CAPTURE(cs.b);
    CHECK(rel(e, avg) <= 1e-9);

    // the determinant with that entry is the limit of the determinants with vC slightly off w
    BetheRoots C;
    C.u = ParamSet({Complex(-1.3, 0.8)});
    for (std::size_t i = 0; i < B.a(); ++i) C.u.values.push_back(Complex(0.9, 1.4) + static_cast<double>(i) * Complex(-0.5, 0.2));
    C.v = vC.with(w);
    const FormFactorRequest q{1, 2, kZ, C, B};
    const Complex lim = coinciding_root_limit(m, ch.spec().c, q, kb, kb).value;
    Complex near = 0.0;
    for (Complex s : {Complex(1.0), Complex(-1.0), Complex(0.0, 1.0), Complex(0.0, -1.0)}) {
      FormFactorRequest p = q;
      p.C.v[kb] = w + s * 1e-5;
      near += 0.25 * ff_det12(m, ch.spec().c, p).value;
    }
    CHECK(rel(lim, near) <= 1e-9);
    CHECK_THROWS_AS(ff_det12(m, ch.spec().c, q), CoincidingRootsError);
    if (kb > 0) CHECK_THROWS_AS(coinciding_root_limit(m, ch.spec().c, q, 0, kb), CoincidingRootsError);
  }
}

TEST_CASE("coinciding-root entry at large w") {
  const double scales[] = {1e2, 1e3, 1e4};
  // a = 1, b = 0 on an untwisted chain: the limit is c
  const Chain ch(generic(3));
  const auto s = coinciding_entry_asymptotics(ch, ParamSet({Complex(0.3, 0.2)}), {}, {}, scales);
  CHECK(std::abs(s[2].value - ch.spec().c) < 1e-3);
  CHECK(s[2].defect / s[1].defect == doctest::Approx(0.1).epsilon(0.3));

  // nonzero r3[0] on the image orientation
  const Chain img(generic(3, false, Orientation::PhiImage));
  CHECK(std::abs(img.vacuum().r3_zero() + 3.0) < 1e-12);
  const auto t = coinciding_entry_asymptotics(img, ParamSet({Complex(0.3, 0.2)}), ParamSet({Complex(-0.5, 0.4)}),
                                              ParamSet({Complex(0.9, -0.3)}), scales);
  CHECK(std::abs(t[2].value - 2.0) < 1e-3);
  CHECK(t[1].defect / t[0].defect == doctest::Approx(0.1).epsilon(0.3));
  CHECK(t[2].defect / t[1].defect == doctest::Approx(0.1).epsilon(0.3));
}

TEST_CASE("F13 with a large C-side root reduces to F12") {
  const double scales[] = {1e2, 1e3, 1e4};
  const Chain ch(generic(3));
  const RelationReport r = reduction_f13_f12(ch, kZ, solve_bethe(ch.spec(), 1, 0)[0], BetheRoots{}, scales);
  CHECK(r.max_exact_defect() <= 1e-9);
  CHECK(r.convergence_ratio("f13 reduction") == doctest::Approx(0.1).epsilon(0.3));

  const Chain four(generic(4));
  const auto C = solve_bethe(four.spec(), 2, 0);
  const auto B = solve_bethe(four.spec(), 1, 0);
  CHECK(reduction_f13_f12(four, kZ, C[0], B[0], scales).max_exact_defect() <= 1e-9);
}

TEST_CASE("determinant routes for the off-diagonal families") {
  const Chain ch(generic(3, true));
  const auto s10 = solve_bethe(ch.spec(), 1, 0);
  const auto s11 = solve_bethe(ch.spec(), 1, 1);
  const auto s21 = solve_bethe(ch.spec(), 2, 1);
  struct Case {
    int i, j;
    const BetheRoots *C, *B;
    const char* route;
  };
  const Case cases[] = {{1, 2, &s21[0], &s11[0], "det12"},        {1, 3, &s21[0], &s10[0], "det13"},
                        {2, 1, &s11[0], &s21[0], "psi(det12)"},   {3, 1, &s10[0], &s21[0], "psi(det13)"},
                        {2, 3, &s11[0], &s10[0], "phi(det12)"},   {3, 2, &s10[0], &s11[0], "psi(phi(det12))"}};
  for (const Case& cs : cases) {
    const FormFactorRequest q{cs.i, cs.j, kZ, *cs.C, *cs.B};
    const auto r = determinant_path(ch, q);
    REQUIRE(r.has_value());
    CAPTURE(cs.route);
    CHECK(r->route == cs.route);
    CHECK(rel(r->report.value, direct_form_factor(ch, q)) <= 1e-8);
  }
  CHECK(!determinant_path(ch, {2, 2, kZ, s11[0], s11[1]}).has_value());
}
