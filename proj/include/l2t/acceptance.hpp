#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Acceptance suites, shared by tests/acceptance and `l2torsion selftest`.
namespace l2t::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double worst = 0.0;      // largest residual seen
  double tolerance = 0.0;
  double seconds = 0.0;
  double budget = 0.0;     // runtime limit, 0 when none
  int cases = 0;
  std::string detail;      // first failure or a summary
};

inline constexpr std::uint64_t kDefaultSeed = 20240611;

std::vector<int> criterion_ids();
CriterionResult run_criterion(int id, std::uint64_t seed = kDefaultSeed);

// "[PASS] 3 sum formula: worst 5.6e-15 < 1e-08 over 101 cases (0.21 s)"
std::string format_line(const CriterionResult& r);

}  // namespace l2t::acceptance
