#ifndef POLEBASIS_VERIFY_HPP
#define POLEBASIS_VERIFY_HPP

#include <functional>
#include <string>
#include <vector>

#include "polebasis/errors.hpp"

namespace polebasis {

struct CriterionResult {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double runtime_limit = 0.0;
  std::string detail;
};

struct VerifyOptions {
  bool quiet = false;
  Tolerances tol = Tolerances::defaults();
};

// Names of all acceptance criteria, in execution order.
std::vector<std::string> verify_criteria();

// Run every criterion (or the named subset) and stream one line per
// criterion to stdout unless quiet.
std::vector<CriterionResult> run_verify(const VerifyOptions& opt,
                                        const std::vector<std::string>& only = {});

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace polebasis

#endif
