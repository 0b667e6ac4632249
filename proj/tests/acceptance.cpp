// Runs every acceptance criterion and prints one line per criterion.
#include <cstdlib>
#include <iostream>

#include "l2t/acceptance.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = l2t::acceptance::kDefaultSeed;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);
  int failed = 0;
  for (int id : l2t::acceptance::criterion_ids()) {
    const l2t::acceptance::CriterionResult r = l2t::acceptance::run_criterion(id, seed);
    std::cout << l2t::acceptance::format_line(r) << std::endl;
    if (!r.passed) ++failed;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failed ? 1 : 0;
}
