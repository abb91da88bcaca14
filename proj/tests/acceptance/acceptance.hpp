// Copyright 2026 The RandONet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance gate: benchmark accuracy targets, the convergence trend in M,
// and the property suite, each reported as one pass/fail line.

#ifndef RANDONET_TESTS_ACCEPTANCE_HPP_
#define RANDONET_TESTS_ACCEPTANCE_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace randonet::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kNumCriteria = 8;

/// Runs one criterion (1..kNumCriteria). Exceptions are reported as failures.
CriterionResult run_criterion(int id);

/// Runs the listed criteria (all when empty), writing each line to `out` as
/// soon as it is known.
std::vector<CriterionResult> run_criteria(const std::vector<int>& ids,
                                          std::ostream& out);

std::string format_line(const CriterionResult& r);

}  // namespace randonet::acceptance

#endif  // RANDONET_TESTS_ACCEPTANCE_HPP_
