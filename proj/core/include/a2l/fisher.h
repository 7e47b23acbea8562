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

#ifndef A2L_FISHER_H_
#define A2L_FISHER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "a2l/game.h"

namespace a2l {

// Degenerate prices, stalled agents, malformed markets.
class MarketError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Gradient of agent i's utility at bundle x_i.
using GradientOracle =
    std::function<std::vector<double>(int agent, std::span<const double> bundle)>;

// Unit supply of every good.
class FisherMarket {
 public:
  // Linear utilities u_i(x) = <a_i, x>; valuations is agents x goods.
  FisherMarket(std::vector<double> budgets, Matrix valuations);
  FisherMarket(std::vector<double> budgets, std::size_t num_goods,
               GradientOracle gradient);

  std::size_t num_agents() const { return budgets_.size(); }
  std::size_t num_goods() const { return num_goods_; }
  const std::vector<double>& budgets() const { return budgets_; }
  double total_budget() const;
  bool linear() const { return !oracle_; }
  // Empty for oracle markets.
  const Matrix& valuations() const { return valuations_; }

  std::vector<double> Gradient(int agent, std::span<const double> bundle) const;

  // Same market with every budget multiplied by s.
  FisherMarket ScaledBudgets(double s) const;

  static FisherMarket Random(std::size_t agents, std::size_t goods,
                             std::uint64_t seed);

 private:
  std::vector<double> budgets_;
  std::size_t num_goods_;
  Matrix valuations_;
  GradientOracle oracle_;
};

FisherMarket MarketFromJson(const std::string& text);
FisherMarket LoadMarket(const std::string& path);
std::string MarketToJson(const FisherMarket& market);

// b_ij >= 0, rows sum to budgets.
struct SpendingProfile {
  Matrix b;

  // b_ij = B_i / n_goods.
  static SpendingProfile Interior(const FisherMarket& market);
  // Throws MarketError on negative entries or row sums off by > 1e-9.
  void Validate(const FisherMarket& market) const;
};

// p_j = sum_i b_ij.
std::vector<double> Prices(const SpendingProfile& spend);
// x_ij = b_ij / p_j; throws MarketError when some p_j <= 0.
Matrix Allocations(const SpendingProfile& spend, std::span<const double> prices);

// b'_ij = B_i x_ij g_ij / sum_j' x_ij' g_ij', g = gradient at x_i.
SpendingProfile prd_step(const FisherMarket& market, const SpendingProfile& spend);

// One agent of A2L-PRD. Submits its running-average spend; from the
// allocation that spend receives it infers the average prices, recovers the
// prices its internal PRD iterate faced, and applies the PRD update.
class A2LPrdAgent {
 public:
  A2LPrdAgent(const FisherMarket& market, int agent);

  // b-bar^t_i.
  const std::vector<double>& spend() const { return avg_; }
  // b^t_i of the internal PRD run.
  const std::vector<double>& internal_spend() const { return b_; }
  // Recovered p^t for goods with positive average spend; NaN elsewhere.
  const std::vector<double>& last_recovered_prices() const { return recovered_; }
  std::size_t round() const { return t_; }

  // x-bar^t_i for the current average spend; advances to round t + 1.
  void Observe(std::span<const double> allocation);

 private:
  const FisherMarket* market_;
  int agent_;
  std::size_t t_ = 1;
  std::vector<double> b_;
  std::vector<double> avg_;
  std::vector<double> cum_prices_;  // sum_{k<t} p^k, known goods only
  std::vector<double> recovered_;
};

// Clears the market at the agents' averaged spends, feeds each agent its
// allocation, and returns the next averaged spending profile.
SpendingProfile a2l_prd_step(const FisherMarket& market,
                             std::vector<A2LPrdAgent>& agents);

std::vector<A2LPrdAgent> MakeA2LPrdAgents(const FisherMarket& market);

struct ConditionReport {
  bool checked = true;
  bool pass = true;
  double worst = 0.0;
};

struct CeReport {
  ConditionReport budget_feasible;
  ConditionReport utility_maximizing;
  ConditionReport market_clears;
  bool pass() const {
    return budget_feasible.pass && utility_maximizing.pass && market_clears.pass;
  }
};

// Relative utility shortfall max_i (1 - u_i(x_i) / (B_i max_j a_ij / p_j)),
// clamped at 0. Linear markets only.
double MaxBangPerBuckViolation(const FisherMarket& market,
                               std::span<const double> prices,
                               const Matrix& allocations);

// Checks the three competitive-equilibrium conditions. Utility maximization
// uses MaxBangPerBuckViolation and is skipped (checked = false) for oracle
// markets. Throws MarketError when no price is positive or some is negative.
CeReport verify_ce(const FisherMarket& market, std::span<const double> prices,
                   const Matrix& allocations, double tol);

struct FisherRow {
  std::size_t t = 0;
  std::vector<double> prices;
  double max_bpb_violation = 0.0;  // NaN for oracle markets
};

// Plain PRD from the interior start: rows hold (p^t, x^t).
std::vector<FisherRow> run_prd(const FisherMarket& market, std::size_t T);
// Plain PRD, rows hold the running-average prices (1/t) sum p^k.
std::vector<FisherRow> run_prd_average(const FisherMarket& market, std::size_t T);
// A2L-PRD: rows hold the market prices of the averaged spends.
std::vector<FisherRow> run_a2l_prd(const FisherMarket& market, std::size_t T);

// Columns: t, p_1..p_n, max_bpb_violation.
void WritePriceCsv(const std::vector<FisherRow>& rows, std::ostream& out);

}  // namespace a2l

#endif  // A2L_FISHER_H_
