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

#ifndef A2L_VERIFY_H_
#define A2L_VERIFY_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "a2l/game.h"
#include "a2l/harness.h"

namespace a2l {

struct VerifyOptions {
  std::size_t seeds = 20;
  std::size_t threads = 0;
};

struct SuiteReport {
  std::string name;
  bool pass = true;
  double seconds = 0.0;
  std::vector<CheckResult> checks;

  void Add(CheckResult c) {
    pass = pass && c.pass;
    checks.push_back(std::move(c));
  }
  std::string ToJson() const;
};

// Registered suite names, in execution order.
std::vector<std::string> AvailableSuites();

// Runs one suite. Unknown names throw std::invalid_argument listing the
// registered suites.
SuiteReport verify(const std::string& suite, const VerifyOptions& options = {});

// The suites, callable directly.
SuiteReport VerifyA2LEquivalence(const VerifyOptions& options);
SuiteReport VerifyAverageGapIdentity(const VerifyOptions& options);
SuiteReport VerifyLastIterateBound(const VerifyOptions& options);
SuiteReport VerifyDynamicRegret(const VerifyOptions& options);
SuiteReport VerifyRvu(const VerifyOptions& options);
SuiteReport VerifyMwuContrast(const VerifyOptions& options);
SuiteReport VerifyBandit(const VerifyOptions& options);
SuiteReport VerifyBanditMonitor(const VerifyOptions& options);
SuiteReport VerifyFisher(const VerifyOptions& options);
SuiteReport VerifyDeterminism(const VerifyOptions& options);

// -- Suite fixtures, shared with tests ------------------------------------------

// Matching pennies, rock-paper-scissors and a 3-player zero-sum polymatrix
// game with 5 actions on the complete graph (seeded).
std::vector<PolymatrixGame> EquivalenceGames(std::uint64_t seed);
// Zero-sum games with n <= 4, d <= 10.
std::vector<PolymatrixGame> LastIterateGames(std::uint64_t seed);
// Player 1's payoff in the bandit adversary game: action 0 pays 1 against
// the opponent's action 0, everything else pays -1.
PolymatrixGame BanditAdversaryGame();
// 2 agents, 2 goods, unit budgets, a_1 = (1, 0), a_2 = (0, 1).
FisherMarket TwoByTwoMarket();
// Random linear market with 2..5 agents and goods.
FisherMarket SuiteMarket(std::uint64_t seed);

struct EquivalenceStats {
  double max_average_diff = 0.0;  // |x-bar^t - weighted mean of reference|
  double max_utility_diff = 0.0;  // |recovered u^t - reference u^t|
};

// Runs every player under A2L(R) and, in lockstep, bare R, for T rounds.
EquivalenceStats CompareWithReference(const PolymatrixGame& game,
                                      const std::string& inner, WeightRule rule,
                                      double eta, std::size_t T);

}  // namespace a2l

#endif  // A2L_VERIFY_H_
