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

#include "a2l/fisher.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

#include "format.h"
#include "json.hpp"

namespace a2l {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void CheckBudgets(const std::vector<double>& budgets) {
  if (budgets.empty()) throw MarketError("market needs at least one agent");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (!(budgets[i] > 0.0) || !std::isfinite(budgets[i])) {
      throw MarketError("budget of agent " + std::to_string(i) + " must be positive");
    }
  }
}

double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

// -- Market -------------------------------------------------------------------

FisherMarket::FisherMarket(std::vector<double> budgets, Matrix valuations)
    : budgets_(std::move(budgets)),
      num_goods_(valuations.cols),
      valuations_(std::move(valuations)) {
  CheckBudgets(budgets_);
  if (valuations_.rows != budgets_.size()) {
    throw DimensionError("valuation rows", -1, budgets_.size(), valuations_.rows);
  }
  if (num_goods_ == 0) throw MarketError("market needs at least one good");
  for (std::size_t i = 0; i < valuations_.rows; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < num_goods_; ++j) {
      const double a = valuations_(i, j);
      if (!(a >= 0.0) || !std::isfinite(a)) {
        throw MarketError("valuations must be finite and non-negative");
      }
      any = any || a > 0.0;
    }
    if (!any) {
      throw MarketError("agent " + std::to_string(i) + " values no good");
    }
  }
}

FisherMarket::FisherMarket(std::vector<double> budgets, std::size_t num_goods,
                           GradientOracle gradient)
    : budgets_(std::move(budgets)),
      num_goods_(num_goods),
      oracle_(std::move(gradient)) {
  CheckBudgets(budgets_);
  if (num_goods_ == 0) throw MarketError("market needs at least one good");
  if (!oracle_) throw MarketError("missing gradient oracle");
}

double FisherMarket::total_budget() const {
  return std::accumulate(budgets_.begin(), budgets_.end(), 0.0);
}

std::vector<double> FisherMarket::Gradient(int agent,
                                           std::span<const double> bundle) const {
  if (oracle_) {
    std::vector<double> g = oracle_(agent, bundle);
    if (g.size() != num_goods_) {
      throw DimensionError("gradient oracle output", agent, num_goods_, g.size());
    }
    return g;
  }
  std::vector<double> g(num_goods_);
  for (std::size_t j = 0; j < num_goods_; ++j) g[j] = valuations_(agent, j);
  return g;
}

FisherMarket FisherMarket::ScaledBudgets(double s) const {
  std::vector<double> b = budgets_;
  for (double& v : b) v *= s;
  if (oracle_) return FisherMarket(std::move(b), num_goods_, oracle_);
  return FisherMarket(std::move(b), valuations_);
}

FisherMarket FisherMarket::Random(std::size_t agents, std::size_t goods,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> budgets(agents);
  for (double& b : budgets) b = 0.5 + 1.5 * Uniform01(rng);
  Matrix a(agents, goods);
  for (std::size_t i = 0; i < agents; ++i) {
    double row = 0.0;
    do {
      row = 0.0;
      for (std::size_t j = 0; j < goods; ++j) {
        a(i, j) = Uniform01(rng);
        row += a(i, j);
      }
    } while (row == 0.0);
  }
  return FisherMarket(std::move(budgets), std::move(a));
}

FisherMarket MarketFromJson(const std::string& text) {
  using nlohmann::json;
  try {
    const json j = json::parse(text);
    auto budgets = j.at("budgets").get<std::vector<double>>();
    auto vals = j.at("valuations").get<std::vector<std::vector<double>>>();
    return FisherMarket(std::move(budgets), Matrix::FromRows(vals));
  } catch (const json::exception& e) {
    throw MarketError(std::string("malformed market file: ") + e.what());
  }
}

FisherMarket LoadMarket(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MarketError("cannot open market file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return MarketFromJson(buffer.str());
}

std::string MarketToJson(const FisherMarket& market) {
  using nlohmann::json;
  if (!market.linear()) throw MarketError("only linear markets serialize");
  json vals = json::array();
  const Matrix& a = market.valuations();
  for (std::size_t i = 0; i < a.rows; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < a.cols; ++j) row.push_back(a(i, j));
    vals.push_back(std::move(row));
  }
  json j = {{"budgets", market.budgets()}, {"valuations", std::move(vals)}};
  return j.dump(2);
}

// -- Spending and PRD ---------------------------------------------------------

SpendingProfile SpendingProfile::Interior(const FisherMarket& market) {
  SpendingProfile s{Matrix(market.num_agents(), market.num_goods())};
  for (std::size_t i = 0; i < market.num_agents(); ++i) {
    for (std::size_t j = 0; j < market.num_goods(); ++j) {
      s.b(i, j) = market.budgets()[i] / static_cast<double>(market.num_goods());
    }
  }
  return s;
}

void SpendingProfile::Validate(const FisherMarket& market) const {
  if (b.rows != market.num_agents()) {
    throw DimensionError("spending rows", -1, market.num_agents(), b.rows);
  }
  if (b.cols != market.num_goods()) {
    throw DimensionError("spending columns", -1, market.num_goods(), b.cols);
  }
  for (std::size_t i = 0; i < b.rows; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < b.cols; ++j) {
      if (!(b(i, j) >= 0.0)) throw MarketError("negative spending");
      row += b(i, j);
    }
    if (std::abs(row - market.budgets()[i]) > 1e-9) {
      throw MarketError("spending of agent " + std::to_string(i) +
                        " does not match its budget");
    }
  }
}

std::vector<double> Prices(const SpendingProfile& spend) {
  std::vector<double> p(spend.b.cols, 0.0);
  for (std::size_t i = 0; i < spend.b.rows; ++i) {
    for (std::size_t j = 0; j < spend.b.cols; ++j) p[j] += spend.b(i, j);
  }
  return p;
}

Matrix Allocations(const SpendingProfile& spend, std::span<const double> prices) {
  Matrix x(spend.b.rows, spend.b.cols);
  for (std::size_t j = 0; j < spend.b.cols; ++j) {
    if (!(prices[j] > 0.0)) {
      throw MarketError("good " + std::to_string(j) +
                        " has zero price (degenerate market)");
    }
  }
  for (std::size_t i = 0; i < spend.b.rows; ++i) {
    for (std::size_t j = 0; j < spend.b.cols; ++j) x(i, j) = spend.b(i, j) / prices[j];
  }
  return x;
}

namespace {

// PRD response of one agent to its bundle.
std::vector<double> Respond(const FisherMarket& market, int agent,
                            std::span<const double> bundle) {
  const std::vector<double> g = market.Gradient(agent, bundle);
  double denom = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) denom += bundle[j] * g[j];
  if (!(denom > 0.0)) {
    throw MarketError("agent " + std::to_string(agent) +
                      " derives zero marginal utility from its bundle (stall)");
  }
  std::vector<double> b(g.size());
  const double B = market.budgets()[agent];
  for (std::size_t j = 0; j < g.size(); ++j) b[j] = B * bundle[j] * g[j] / denom;
  return b;
}

}  // namespace

SpendingProfile prd_step(const FisherMarket& market, const SpendingProfile& spend) {
  const std::vector<double> p = Prices(spend);
  const Matrix x = Allocations(spend, p);
  SpendingProfile next{Matrix(spend.b.rows, spend.b.cols)};
  std::vector<double> bundle(spend.b.cols);
  for (std::size_t i = 0; i < spend.b.rows; ++i) {
    for (std::size_t j = 0; j < spend.b.cols; ++j) bundle[j] = x(i, j);
    const std::vector<double> row = Respond(market, static_cast<int>(i), bundle);
    for (std::size_t j = 0; j < spend.b.cols; ++j) next.b(i, j) = row[j];
  }
  return next;
}

// -- A2L-PRD ------------------------------------------------------------------

A2LPrdAgent::A2LPrdAgent(const FisherMarket& market, int agent)
    : market_(&market),
      agent_(agent),
      b_(market.num_goods(),
         market.budgets()[agent] / static_cast<double>(market.num_goods())),
      avg_(b_),
      cum_prices_(market.num_goods(), 0.0),
      recovered_(market.num_goods(), kNaN) {}

void A2LPrdAgent::Observe(std::span<const double> allocation) {
  const std::size_t n = b_.size();
  if (allocation.size() != n) {
    throw DimensionError("allocation", agent_, n, allocation.size());
  }
  const double t = static_cast<double>(t_);
  std::vector<double> bundle(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    recovered_[j] = kNaN;
    if (avg_[j] <= 0.0) continue;  // never spent on j, so b^t_ij = 0 too
    if (!(allocation[j] > 0.0)) {
      throw MarketError("agent " + std::to_string(agent_) +
                        " received nothing for positive spend on good " +
                        std::to_string(j));
    }
    const double avg_price = avg_[j] / allocation[j];
    recovered_[j] = t * avg_price - cum_prices_[j];
    if (b_[j] > 0.0) bundle[j] = b_[j] / recovered_[j];
  }
  std::vector<double> next = Respond(*market_, agent_, bundle);
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isnan(recovered_[j])) cum_prices_[j] += recovered_[j];
  }
  ++t_;
  const double w = 1.0 / static_cast<double>(t_);
  for (std::size_t j = 0; j < n; ++j) {
    avg_[j] = std::max(0.0, avg_[j] + w * (next[j] - avg_[j]));
  }
  b_ = std::move(next);
}

std::vector<A2LPrdAgent> MakeA2LPrdAgents(const FisherMarket& market) {
  std::vector<A2LPrdAgent> agents;
  for (std::size_t i = 0; i < market.num_agents(); ++i) {
    agents.emplace_back(market, static_cast<int>(i));
  }
  return agents;
}

namespace {

SpendingProfile AverageSpends(const FisherMarket& market,
                              const std::vector<A2LPrdAgent>& agents) {
  SpendingProfile s{Matrix(market.num_agents(), market.num_goods())};
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = 0; j < market.num_goods(); ++j) {
      s.b(i, j) = agents[i].spend()[j];
    }
  }
  return s;
}

}  // namespace

SpendingProfile a2l_prd_step(const FisherMarket& market,
                             std::vector<A2LPrdAgent>& agents) {
  if (agents.size() != market.num_agents()) {
    throw DimensionError("agent count", -1, market.num_agents(), agents.size());
  }
  const SpendingProfile avg = AverageSpends(market, agents);
  const std::vector<double> p = Prices(avg);
  const Matrix x = Allocations(avg, p);
  std::vector<double> row(market.num_goods());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = x(i, j);
    agents[i].Observe(row);
  }
  return AverageSpends(market, agents);
}

// -- Equilibrium checks -------------------------------------------------------

double MaxBangPerBuckViolation(const FisherMarket& market,
                               std::span<const double> prices,
                               const Matrix& allocations) {
  if (!market.linear()) return kNaN;
  const Matrix& a = market.valuations();
  double worst = 0.0;
  for (std::size_t i = 0; i < market.num_agents(); ++i) {
    double best = 0.0;
    double value = 0.0;
    for (std::size_t j = 0; j < market.num_goods(); ++j) {
      best = std::max(best, a(i, j) / prices[j]);
      value += a(i, j) * allocations(i, j);
    }
    const double optimum = market.budgets()[i] * best;
    worst = std::max(worst, 1.0 - value / optimum);
  }
  return worst;
}

CeReport verify_ce(const FisherMarket& market, std::span<const double> prices,
                   const Matrix& allocations, double tol) {
  if (prices.size() != market.num_goods()) {
    throw DimensionError("price vector", -1, market.num_goods(), prices.size());
  }
  if (allocations.rows != market.num_agents() ||
      allocations.cols != market.num_goods()) {
    throw DimensionError("allocation matrix", -1,
                         market.num_agents() * market.num_goods(),
                         allocations.rows * allocations.cols);
  }
  bool any_positive = false;
  for (double p : prices) {
    if (p < 0.0 || !std::isfinite(p)) throw MarketError("prices must be finite and >= 0");
    any_positive = any_positive || p > 0.0;
  }
  if (!any_positive) throw MarketError("all prices are zero (degenerate input)");

  CeReport r;
  for (std::size_t i = 0; i < market.num_agents(); ++i) {
    double cost = 0.0;
    for (std::size_t j = 0; j < market.num_goods(); ++j) {
      cost += prices[j] * allocations(i, j);
    }
    r.budget_feasible.worst =
        std::max(r.budget_feasible.worst, cost - market.budgets()[i]);
  }
  r.budget_feasible.pass = r.budget_feasible.worst <= tol;

  if (market.linear()) {
    bool priced = true;
    for (double p : prices) priced = priced && p > 0.0;
    if (priced) {
      r.utility_maximizing.worst = MaxBangPerBuckViolation(market, prices, allocations);
    } else {
      // A free good valued by someone makes demand unbounded.
      double worst = 0.0;
      for (std::size_t j = 0; j < market.num_goods(); ++j) {
        if (prices[j] > 0.0) continue;
        for (std::size_t i = 0; i < market.num_agents(); ++i) {
          if (market.valuations()(i, j) > 0.0) worst = std::numeric_limits<double>::infinity();
        }
      }
      r.utility_maximizing.worst = worst;
    }
    r.utility_maximizing.pass = r.utility_maximizing.worst <= tol;
  } else {
    r.utility_maximizing.checked = false;
  }

  for (std::size_t j = 0; j < market.num_goods(); ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < market.num_agents(); ++i) total += allocations(i, j);
    const double excess = prices[j] > 0.0 ? std::abs(total - 1.0)
                                          : std::max(0.0, total - 1.0);
    r.market_clears.worst = std::max(r.market_clears.worst, excess);
  }
  r.market_clears.pass = r.market_clears.worst <= tol;
  return r;
}

// -- Runs ---------------------------------------------------------------------

namespace {

FisherRow MakeRow(const FisherMarket& market, std::size_t t,
                  const SpendingProfile& spend) {
  FisherRow row;
  row.t = t;
  row.prices = Prices(spend);
  row.max_bpb_violation =
      MaxBangPerBuckViolation(market, row.prices, Allocations(spend, row.prices));
  return row;
}

}  // namespace

std::vector<FisherRow> run_prd(const FisherMarket& market, std::size_t T) {
  std::vector<FisherRow> rows;
  SpendingProfile b = SpendingProfile::Interior(market);
  for (std::size_t t = 1; t <= T; ++t) {
    rows.push_back(MakeRow(market, t, b));
    if (t < T) b = prd_step(market, b);
  }
  return rows;
}

std::vector<FisherRow> run_prd_average(const FisherMarket& market, std::size_t T) {
  std::vector<FisherRow> rows;
  SpendingProfile b = SpendingProfile::Interior(market);
  Matrix sum(b.b.rows, b.b.cols);
  for (std::size_t t = 1; t <= T; ++t) {
    for (std::size_t k = 0; k < sum.data.size(); ++k) sum.data[k] += b.b.data[k];
    SpendingProfile avg{sum};
    for (double& v : avg.b.data) v /= static_cast<double>(t);
    rows.push_back(MakeRow(market, t, avg));
    if (t < T) b = prd_step(market, b);
  }
  return rows;
}

std::vector<FisherRow> run_a2l_prd(const FisherMarket& market, std::size_t T) {
  std::vector<FisherRow> rows;
  std::vector<A2LPrdAgent> agents = MakeA2LPrdAgents(market);
  SpendingProfile avg = SpendingProfile::Interior(market);
  for (std::size_t t = 1; t <= T; ++t) {
    rows.push_back(MakeRow(market, t, avg));
    if (t < T) avg = a2l_prd_step(market, agents);
  }
  return rows;
}

void WritePriceCsv(const std::vector<FisherRow>& rows, std::ostream& out) {
  using internal::FormatDouble;
  const std::size_t n = rows.empty() ? 0 : rows.front().prices.size();
  out << "t";
  for (std::size_t j = 1; j <= n; ++j) out << ",p_" << j;
  out << ",max_bpb_violation\n";
  for (const FisherRow& r : rows) {
    out << r.t;
    for (double p : r.prices) out << ',' << FormatDouble(p);
    out << ',' << FormatDouble(r.max_bpb_violation) << '\n';
  }
}

}  // namespace a2l
