#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace opre {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the acceptance criteria (all of them, or the listed subset), printing
// one pass/fail line per criterion to `log`.
std::vector<CriterionResult> run_acceptance(int workers, std::ostream& log,
                                            const std::vector<int>& only = {});

}  // namespace opre
