// Copyright 2026 The A2L Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance run: one PASS/FAIL line per criterion, followed by the checks
// behind it. Runtime limits are part of the criterion where one is set.
//
// Exit status is 0 once every criterion has been evaluated and reported;
// pass --strict to exit 1 when any criterion fails.

#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "a2l/verify.h"

namespace {

struct Criterion {
  int id;
  const char* title;
  double time_limit;  // seconds; 0 = none
  std::function<a2l::SuiteReport(const a2l::VerifyOptions&)> suite;
};

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int k = 1; k < argc; ++k) strict |= std::strcmp(argv[k], "--strict") == 0;

  const a2l::VerifyOptions options;  // 20 seeds
  const std::vector<Criterion> criteria = {
      {1, "A2L play equals the running average of a reference run", 10.0,
       a2l::VerifyA2LEquivalence},
      {2, "TGap of the average equals summed regret over t", 0.0,
       a2l::VerifyAverageGapIdentity},
      {3, "A2L-OMWU last-iterate gap bound and O(1/T) slope", 120.0,
       a2l::VerifyLastIterateBound},
      {4, "A2L-OMWU dynamic regret bound", 0.0, a2l::VerifyDynamicRegret},
      {5, "RVU slack and utility-variation inequality", 0.0, a2l::VerifyRvu},
      {6, "bare MWU cycles, A2L-MWU converges", 0.0, a2l::VerifyMwuContrast},
      {7, "bandit audits, unbiasedness, concentration, trend", 600.0,
       a2l::VerifyBandit},
      {8, "bandit regret monitor", 0.0, a2l::VerifyBanditMonitor},
      {9, "A2L-PRD prices, conservation, 2x2 equilibrium", 0.0, a2l::VerifyFisher},
      {10, "byte-identical reruns", 0.0, a2l::VerifyDeterminism},
  };

  int passed = 0;
  for (const Criterion& c : criteria) {
    const a2l::SuiteReport r = c.suite(options);
    const bool in_time = c.time_limit <= 0.0 || r.seconds <= c.time_limit;
    const bool ok = r.pass && in_time;
    passed += ok;
    std::printf("[%s] criterion %2d: %s (%.2fs", ok ? "PASS" : "FAIL", c.id, c.title,
                r.seconds);
    if (c.time_limit > 0.0) std::printf(", limit %.0fs", c.time_limit);
    std::printf(")\n");
    for (const a2l::CheckResult& check : r.checks) {
      std::printf("         %s %s.%s = %.6g  [%s]\n", check.pass ? "ok  " : "FAIL",
                  r.name.c_str(), check.name.c_str(), check.value, check.detail.c_str());
    }
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%zu criteria passed\n", passed, criteria.size());
  return strict && passed != static_cast<int>(criteria.size()) ? 1 : 0;
}
