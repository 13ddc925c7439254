#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace momentlab::acceptance {

struct Options {
  bool quick = false;  ///< fewer samples, same tolerances
  std::uint64_t seed = 42;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  nlohmann::json detail;
  double seconds = 0.0;
};

constexpr int kCriterionCount = 10;

/// Runs criterion `id` (1-based). Exceptions inside a criterion count as failure.
CriterionResult run_criterion(int id, const Options& options = {});
std::vector<CriterionResult> run_all(const Options& options = {});

/// "PASS  3 kernel-dimension  (0.41 s)" style summary line.
std::string summary_line(const CriterionResult& r);

}  // namespace momentlab::acceptance
