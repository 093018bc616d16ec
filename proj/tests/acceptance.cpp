// Acceptance run: every criterion of the default manifest, one line each.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "gl3ff/verify.hpp"

int main(int argc, char** argv) {
  gl3::VerifyConfig cfg;
  if (argc > 1) cfg.manifest = argv[1];
  if (const char* w = std::getenv("GL3FF_WORKERS")) cfg.workers = std::max(1, std::atoi(w));
  try {
    gl3::manifest_criteria(cfg.manifest);
  } catch (const gl3::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  const gl3::VerifyOutcome out = gl3::run_verify(cfg);
  for (const gl3::CriterionResult& r : out.results) {
    std::printf("criterion %2d %-40s %s  max_defect=%-12s tol=%-8s n=%zu  %.1fs  %s\n", r.id, r.name.c_str(),
                r.passed ? "PASS" : "FAIL", gl3::format_double(r.max_defect).c_str(),
                gl3::format_double(r.tolerance).c_str(), r.instances, r.seconds, r.detail.c_str());
  }
  std::printf("total %.1fs: %s\n", out.seconds, out.passed() ? "all criteria pass" : "some criteria fail");
  return out.passed() ? 0 : 1;
}
