#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gl3ff/io.hpp"

namespace gl3 {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double max_defect = 0.0;
  double tolerance = 0.0;
  std::size_t instances = 0;
  std::size_t skipped = 0;
  std::string detail;
  double seconds = 0.0;  // wall time; not part of the result table
};

struct VerifyConfig {
  std::uint64_t seed = 1;
  int workers = 1;
  std::string manifest = "default";
  int corrupt = 0;  // criterion whose checked formula is perturbed; 0 for none
};

struct VerifyOutcome {
  std::vector<CriterionResult> results;  // sorted by id
  double seconds = 0.0;
  bool passed() const;
  std::vector<int> failed() const;
};

inline constexpr int kCriteria = 12;

// "default" (1..12), "identities" (9, 10) or a comma separated list of ids.
std::vector<int> manifest_criteria(const std::string& manifest);

std::string criterion_name(int id);
// Runs one criterion; 12 reruns the rest of the manifest and therefore needs the full config.
CriterionResult run_criterion(int id, const VerifyConfig& cfg);

VerifyOutcome run_verify(const VerifyConfig& cfg);

// Deterministic table: no timings.
CsvTable verify_table(const VerifyOutcome& out);

}  // namespace gl3
