// Acceptance suite: runs the numbered criteria given on the command line (all
// of them without arguments) and prints one PASS/FAIL line per criterion.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "fuzzy/app/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace fuzzy::app;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (const auto& c : acceptance_criteria()) ids.push_back(c.id);

  int failed = 0;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id);
    std::cout << format_result(r) << std::flush;
    if (!r.passed) ++failed;
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
