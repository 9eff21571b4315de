#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gpfewshot::validate {

inline constexpr std::uint64_t kDefaultMasterSeed = 20250810;

struct ValidateOptions {
  bool quick = false;       // reduced episode counts, same checks
  int threads = 0;          // 0 = hardware concurrency
  std::uint64_t master_seed = kDefaultMasterSeed;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Summary {
  std::vector<CriterionResult> results;
  bool all_passed = false;
};

/// Runs the full acceptance matrix; one pass/fail line per criterion goes to
/// `progress` as criteria finish (pass nullptr for silence).
Summary run_acceptance(const ValidateOptions& options, std::ostream* progress);

}  // namespace gpfewshot::validate
