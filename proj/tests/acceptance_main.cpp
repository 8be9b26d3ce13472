// Runs acceptance criteria 1-11 (or those given on the command line) and
// prints one PASS/FAIL line per criterion followed by its measurements.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <vector>

#include "maflow/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) {
    for (int i = 1; i <= 11; ++i) ids.push_back(i);
  }
  maflow::AcceptanceSuite suite(&std::cerr);
  int failed = 0;
  for (int id : ids) {
    const maflow::CriterionResult r = suite.run(id);
    std::printf("%s\n", maflow::format_result(r).c_str());
    std::fflush(stdout);
    failed += r.pass ? 0 : 1;
  }
  std::printf("%zu criteria, %d failed\n", ids.size(), failed);
  return failed == 0 ? 0 : 1;
}
