// gl3ff: solve, ff, verify, sweep.
// Exit codes: 0 ok, 1 check failed, 2 malformed input, 3 no convergence, 4 cardinality, 5 coinciding roots.
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "gl3ff/identities.hpp"
#include "gl3ff/io.hpp"
#include "gl3ff/verify.hpp"

namespace fs = std::filesystem;
using namespace gl3;

namespace {

struct Options {
  std::string spec, request, out, manifest = "default", kind = "relation";
  std::optional<double> tol;
  std::uint64_t seed = 1;
  int workers = 1, corrupt = 0;
  std::size_t a = 0, b = 0;
};

fs::path out_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("GL3FF_OUT_DIR"); env && *env) return env;
  return "gl3ff_out";
}

std::string join(const ParamSet& p) {
  std::string s;
  for (std::size_t k = 0; k < p.size(); ++k) s += (k ? ";" : "") + format_complex(p[k]);
  return s;
}

std::string slug(std::string s) {
  for (char& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
  return s;
}

ChainSpec load_spec(const Options& o) {
  if (o.spec.empty()) throw ParseError("--spec", "required");
  return parse_chain_spec(read_json_file(o.spec));
}

FormFactorJob load_request(const Options& o) {
  if (o.request.empty()) throw ParseError("--request", "required");
  return parse_request(read_json_file(o.request));
}

int run_solve(const Options& o) {
  const ChainSpec spec = load_spec(o);
  const Chain chain(spec);
  SolveConfig cfg;
  cfg.seed = o.seed;
  if (o.tol) cfg.tol = *o.tol;
  Json doc;
  doc["spec"] = chain_spec_json(spec);
  doc["a"] = o.a;
  doc["b"] = o.b;
  CsvTable table("solve", 1, {"a", "b", "index", "u", "v", "residual", "eigenvector_residual"});
  std::vector<BetheRoots> sols;
  int code = 0;
  try {
    sols = solve_bethe(spec, o.a, o.b, cfg);
  } catch (const NoConvergenceError& e) {
    doc["best_residual"] = e.best_residual;
    std::cerr << "gl3ff solve: " << e.what() << " (best residual " << format_double(e.best_residual) << ")\n";
    code = 3;
  } catch (const DegenerateJacobianError& e) {
    doc["condition"] = e.condition;
    std::cerr << "gl3ff solve: " << e.what() << "\n";
    code = 3;
  }
  Json list = Json::array();
  for (std::size_t k = 0; k < sols.size(); ++k) {
    const double eig = on_shell_residual(chain, sols[k]);
    Json r = roots_json(sols[k]);
    r["eigenvector_residual"] = eig;
    list.push_back(r);
    table.add_row({std::to_string(o.a), std::to_string(o.b), std::to_string(k), join(sols[k].u), join(sols[k].v),
                   format_double(sols[k].residual), format_double(eig)});
  }
  doc["solutions"] = list;
  const fs::path dir = out_dir(o);
  write_text_file(dir / "solutions.json", doc.dump(2) + "\n");
  write_text_file(dir / "solve_summary.csv", table.str());
  std::cout << table.str();
  return code;
}

int run_ff(const Options& o) {
  const ChainSpec spec = load_spec(o);
  const FormFactorJob job = load_request(o);
  const Chain chain(spec);
  const FormFactorRequest& q = job.req;
  check_cardinalities(q);
  const double tol = o.tol.value_or(1e-8);

  Json doc;
  doc["i"] = q.i;
  doc["j"] = q.j;
  doc["z"] = complex_json(q.z);
  std::optional<Complex> oracle, det;
  if (job.path != RequestPath::Oracle) {
    std::optional<RoutedDeterminant> routed;
    try {
      check_disjoint(q);
      routed = determinant_path(chain, q);
    } catch (const CoincidingRootsError&) {
      if (!job.limit || q.i != 1 || q.j != 2) throw;
      for (const BetheRoots* r : {&q.C, &q.B})
        if (max_residual(bethe_residual(spec, *r)) > 1e-8) throw OffShellError("determinant needs on-shell states");
      // one shared v pair in F12: the singular entry is replaced by its limit
      for (std::size_t kC = 0; kC < q.C.b() && !routed; ++kC)
        for (std::size_t kB = 0; kB < q.B.b() && !routed; ++kB)
          if (std::abs(q.C.v[kC] - q.B.v[kB]) <= kDefaultSeparation)
            routed = RoutedDeterminant{"det12 coinciding limit",
                                       coinciding_root_limit(chain.vacuum().model(), spec.c, q, kC, kB)};
      if (!routed) throw;
    }
    if (routed) {
      det = routed->report.value;
      doc["route"] = routed->route;
      doc["determinant"] = complex_json(routed->report.value);
      doc["prefactor"] = complex_json(routed->report.prefactor);
      doc["det"] = complex_json(routed->report.det);
      doc["tau_diff"] = complex_json(routed->report.tau_diff);
      Json cols = Json::array();
      for (Complex x : routed->report.columns) cols.push_back(complex_json(x));
      doc["columns"] = cols;
    } else {
      doc["route"] = "none";
    }
  }
  if (job.path != RequestPath::Det) {
    oracle = direct_form_factor(chain, q);
    doc["oracle"] = complex_json(*oracle);
  }
  int code = 0;
  if (oracle && det) {
    const double d = std::abs(*det - *oracle) / std::max(std::abs(*oracle), 1e-30);
    doc["defect"] = d;
    doc["tol"] = tol;
    if (!(d <= tol)) code = 1;
  }
  write_text_file(out_dir(o) / "ff_result.json", doc.dump(2) + "\n");
  std::cout << doc.dump(2) << "\n";
  return code;
}

int run_verify_cmd(const Options& o) {
  VerifyConfig cfg;
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  cfg.manifest = o.manifest;
  cfg.corrupt = o.corrupt;
  manifest_criteria(cfg.manifest);  // reject a bad manifest before running anything
  const VerifyOutcome out = run_verify(cfg);
  const std::string table = verify_table(out).str();
  write_text_file(out_dir(o) / "verify.csv", table);
  std::cout << table;
  if (out.passed()) return 0;
  std::cerr << "failed criteria:";
  for (int id : out.failed()) std::cerr << " " << id << " (" << criterion_name(id) << ")";
  std::cerr << "\n";
  return 1;
}

int run_sweep(const Options& o) {
  const ChainSpec spec = load_spec(o);
  const FormFactorJob job = load_request(o);
  const Chain chain(spec);
  const FormFactorRequest& q = job.req;
  const fs::path dir = out_dir(o);
  if (o.kind == "limit") {
    const double scales[] = {1e2, 1e3, 1e4};
    const LimitCheckReport r = limit_check(chain, q.z, q.C, q.B, scales);
    for (const LimitSweep* sw : {&r.prefactor, &r.corner, &r.full}) {
      CsvTable t("sweep", 1, {"w", "lhs", "rhs", "defect"});
      for (std::size_t k = 0; k < sw->points.size(); ++k)
        t.add_row({format_complex(sw->points[k]), format_complex(sw->values[k]), format_complex(sw->target),
                   format_double(sw->defects[k])});
      write_text_file(dir / ("sweep_" + slug(sw->id) + ".csv"), t.str());
      std::cout << sw->id << ": slope " << format_double(sw->slope) << "\n";
    }
    return 0;
  }
  if (o.kind != "relation") throw ParseError("--kind", "expected relation or limit");
  RelationReport rep;
  if (q.i == 1 && q.j == 3)
    rep = relation_f13(chain, q.z, q.C, q.B);
  else if (q.i == 1 && q.j == 2)
    rep = relation_f12(chain, q.z, q.C, q.B);
  else if (q.i == q.j && q.i != 3)
    rep = relation_diagonal(chain, q.z, q.C, q.B);
  else
    throw ParseError("request.i", "relation sweeps exist for (1,3), (1,2), (1,1) and (2,2)");
  std::map<std::string, CsvTable> tables;
  for (const RelationEntry& e : rep.entries) {
    auto it = tables.try_emplace(e.relation, "sweep", 1, std::vector<std::string>{"w", "lhs", "rhs", "defect"}).first;
    it->second.add_row({e.path == "exact" ? "inf" : format_complex(e.w), format_complex(e.lhs), format_complex(e.rhs),
                        format_double(e.defect)});
  }
  for (const auto& [name, t] : tables) {
    write_text_file(dir / ("sweep_" + slug(name) + ".csv"), t.str());
    std::cout << name << "\n" << t.str();
  }
  return 0;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return 2;
  if (dynamic_cast<const NoConvergenceError*>(&e) || dynamic_cast<const DegenerateJacobianError*>(&e)) return 3;
  if (dynamic_cast<const CardinalityError*>(&e)) return 4;
  if (dynamic_cast<const CoincidingRootsError*>(&e)) return 5;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GL(3) form-factor verification lab"};
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve", "solve the Bethe equations for (a, b)");
  solve->add_option("--spec", o.spec, "chain spec file")->required();
  solve->add_option("--a", o.a, "number of u roots");
  solve->add_option("--b", o.b, "number of v roots");

  auto* ff = app.add_subcommand("ff", "evaluate a form factor by oracle and determinant");
  ff->add_option("--spec", o.spec, "chain spec file")->required();
  ff->add_option("--request", o.request, "request file")->required();

  auto* verify = app.add_subcommand("verify", "run the acceptance manifest");
  verify->add_option("--manifest", o.manifest, "default, identities, or a list of criterion ids");
  verify->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--corrupt", o.corrupt, "perturb the formula checked by this criterion")->check(CLI::Range(0, kCriteria));

  auto* sweep = app.add_subcommand("sweep", "finite-w sweeps of limit relations");
  sweep->add_option("--spec", o.spec, "chain spec file")->required();
  sweep->add_option("--request", o.request, "request file")->required();
  sweep->add_option("--kind", o.kind, "relation or limit");

  for (CLI::App* sc : {solve, ff, verify, sweep}) {
    sc->add_option("--out", o.out, "output directory (default $GL3FF_OUT_DIR or gl3ff_out)");
    sc->add_option("--seed", o.seed, "random seed");
  }
  solve->add_option("--tol", o.tol, "Bethe residual tolerance");
  ff->add_option("--tol", o.tol, "oracle/determinant agreement tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) return run_solve(o);
    if (*ff) return run_ff(o);
    if (*verify) return run_verify_cmd(o);
    return run_sweep(o);
  } catch (const std::exception& e) {
    std::cerr << "gl3ff: " << e.what() << "\n";
    return exit_code(e);
  }
}
