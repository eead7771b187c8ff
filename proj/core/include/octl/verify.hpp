// core/include/octl/verify.hpp

// Copyright 2026  The octl authors

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

#ifndef OCTL_VERIFY_HPP_
#define OCTL_VERIFY_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace octl {

// Self-contained verification suites runnable from the CLI and reused as
// the formula half of the acceptance harness.  Every check is exact or
// carries a frozen tolerance; all randomness flows from the given seed.

struct CheckResult {
  std::string name;
  bool passed = false;
  std::size_t checked = 0;  // instances examined
  double worst = 0.0;       // worst error observed, 0 for exact checks
  std::string detail;       // diagnostic on failure, empty otherwise
};

// Loss vs exhaustive path enumeration on 200 random instances
// (N <= 4, T <= 8, U <= 3), |loss - oracle| <= 1e-9 * (1 + |loss|), plus
// per-frame occupancy conservation within 1e-9 relative and the
// reachability-mask equivalence, plus the frozen worked examples.
std::vector<CheckResult> OracleSuite(std::uint64_t seed);

// Analytic vs central finite-difference gradients on 50 random instances
// (N <= 5, T <= 6, U <= 3), max relative error <= 1e-5, plus the
// rescaling identities: mu = 1 reproduces the plain loss and gradient
// within 1e-12, marking every node multiplies the gradient by exactly mu,
// and a single marked node changes only its own unit's rows.
std::vector<CheckResult> GradcheckSuite(std::uint64_t seed);

// Penalty gradients vs finite differences within 1e-8 relative, the
// F = 1 reduction of EWC to L2 within 1e-12, and the analytic Fisher of
// a quadratic loss within 1e-12.
std::vector<CheckResult> RegcheckSuite(std::uint64_t seed);

// Frozen edit-distance and OOV-count examples reproduced exactly, and
// TP + FN = reference OOV occurrences on 100 random evaluation pairs.
std::vector<CheckResult> MetricsSuite(std::uint64_t seed);

bool AllPassed(const std::vector<CheckResult>& checks);

// One line per check: "ok <name> (n=..)" or "FAIL <name> ...".
std::string FormatChecks(const std::vector<CheckResult>& checks);

}  // namespace octl

#endif  // OCTL_VERIFY_HPP_
