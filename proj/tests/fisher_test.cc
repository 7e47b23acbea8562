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

#include <cmath>
#include <numeric>
#include <vector>

#include "a2l/verify.h"
#include "gtest/gtest.h"

namespace a2l {
namespace {

double Sum(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

// PRD on a linear market written out directly:
// b'_ij = B_i a_ij x_ij / sum_k a_ik x_ik, x_ij = b_ij / p_j.
std::vector<std::vector<double>> ScratchPrdPrices(const FisherMarket& m, std::size_t T) {
  const std::size_t na = m.num_agents();
  const std::size_t ng = m.num_goods();
  std::vector<std::vector<double>> b(na, std::vector<double>(ng));
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < ng; ++j) b[i][j] = m.budgets()[i] / ng;
  }
  std::vector<std::vector<double>> prices;
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> p(ng, 0.0);
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < ng; ++j) p[j] += b[i][j];
    }
    prices.push_back(p);
    for (std::size_t i = 0; i < na; ++i) {
      std::vector<double> w(ng);
      for (std::size_t j = 0; j < ng; ++j) {
        w[j] = m.valuations()(i, j) * b[i][j] / p[j];
      }
      const double z = Sum(w);
      for (std::size_t j = 0; j < ng; ++j) b[i][j] = m.budgets()[i] * w[j] / z;
    }
  }
  return prices;
}

TEST(PrdStepTest, SingleGoodIsFixedPoint) {
  const FisherMarket m({1.0, 2.0, 0.5}, Matrix::FromRows({{1.0}, {0.3}, {2.0}}));
  SpendingProfile b = SpendingProfile::Interior(m);
  for (int t = 0; t < 5; ++t) {
    b = prd_step(m, b);
    EXPECT_DOUBLE_EQ(b.b(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(b.b(1, 0), 2.0);
    EXPECT_DOUBLE_EQ(b.b(2, 0), 0.5);
  }
}

TEST(PrdStepTest, TwoByTwoReachesIdentityInOneStep) {
  const FisherMarket m = TwoByTwoMarket();
  SpendingProfile b{Matrix::FromRows({{0.3, 0.7}, {0.6, 0.4}})};
  b = prd_step(m, b);
  EXPECT_EQ(b.b, Matrix::FromRows({{1.0, 0.0}, {0.0, 1.0}}));
  for (int t = 0; t < 3; ++t) {
    b = prd_step(m, b);
    EXPECT_EQ(Prices(b), (std::vector<double>{1.0, 1.0}));
  }
}

TEST(PrdStepTest, MatchesScratchImplementation) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const FisherMarket m = FisherMarket::Random(3, 4, seed);
    const std::vector<FisherRow> rows = run_prd(m, 200);
    const auto want = ScratchPrdPrices(m, 200);
    for (std::size_t t = 0; t < rows.size(); ++t) {
      for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(rows[t].prices[j], want[t][j], 1e-12);
    }
  }
}

TEST(PrdStepTest, PriceConservation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const FisherMarket m = SuiteMarket(seed);
    for (const FisherRow& r : run_prd(m, 300)) {
      EXPECT_NEAR(Sum(r.prices), m.total_budget(), 1e-9);
    }
    for (const FisherRow& r : run_a2l_prd(m, 300)) {
      EXPECT_NEAR(Sum(r.prices), m.total_budget(), 1e-9);
    }
  }
}

TEST(PrdStepTest, StalledAgentRejected) {
  const FisherMarket m(
      {1.0, 1.0}, 2,
      [](int, std::span<const double> x) { return std::vector<double>(x.size(), 0.0); });
  EXPECT_THROW(prd_step(m, SpendingProfile::Interior(m)), MarketError);
}

TEST(A2LPrdTest, FirstRoundMatchesInternalSpend) {
  const FisherMarket m = FisherMarket::Random(3, 4, 1);
  std::vector<A2LPrdAgent> agents = MakeA2LPrdAgents(m);
  const std::vector<double> internal = agents[0].internal_spend();
  EXPECT_EQ(agents[0].spend(), internal);
  const SpendingProfile b = SpendingProfile::Interior(m);
  a2l_prd_step(m, agents);
  const std::vector<double> p = Prices(b);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(agents[0].last_recovered_prices()[j], p[j], 1e-15);
  }
}

TEST(A2LPrdTest, PricesEqualReferenceAverages) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FisherMarket m = FisherMarket::Random(3, 4, seed);
    const std::vector<FisherRow> a2l = run_a2l_prd(m, 500);
    const auto ref = ScratchPrdPrices(m, 500);
    std::vector<double> sum(4, 0.0);
    for (std::size_t t = 0; t < 500; ++t) {
      for (std::size_t j = 0; j < 4; ++j) {
        sum[j] += ref[t][j];
        ASSERT_NEAR(a2l[t].prices[j], sum[j] / static_cast<double>(t + 1), 1e-10)
            << "seed " << seed << " t " << t + 1;
      }
    }
  }
}

TEST(A2LPrdTest, BudgetScalingScalesPrices) {
  const FisherMarket m = FisherMarket::Random(3, 4, 2);
  const FisherMarket scaled = m.ScaledBudgets(10.0);
  const std::vector<FisherRow> a = run_a2l_prd(m, 100);
  const std::vector<FisherRow> b = run_a2l_prd(scaled, 100);
  const std::vector<FisherRow> c = run_prd(m, 100);
  const std::vector<FisherRow> d = run_prd(scaled, 100);
  for (std::size_t t = 0; t < 100; ++t) {
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_NEAR(b[t].prices[j], 10.0 * a[t].prices[j], 1e-12 * b[t].prices[j] + 1e-13);
      EXPECT_NEAR(d[t].prices[j], 10.0 * c[t].prices[j], 1e-12 * d[t].prices[j] + 1e-13);
    }
    EXPECT_NEAR(b[t].max_bpb_violation, a[t].max_bpb_violation, 1e-12);
  }
}

// -- Equilibrium checks ------------------------------------------------------------

TEST(VerifyCeTest, HandSolvedEquilibrium) {
  const FisherMarket m = TwoByTwoMarket();
  const CeReport r = verify_ce(m, std::vector<double>{1.0, 1.0},
                               Matrix::FromRows({{1, 0}, {0, 1}}), 1e-9);
  EXPECT_TRUE(r.pass());
  EXPECT_TRUE(r.utility_maximizing.checked);
}

TEST(VerifyCeTest, OversupplyFailsMarketClearing) {
  const FisherMarket m = TwoByTwoMarket();
  const CeReport r = verify_ce(m, std::vector<double>{1.0, 1.0},
                               Matrix::FromRows({{1, 0}, {0.5, 1}}), 1e-9);
  EXPECT_FALSE(r.market_clears.pass);
  EXPECT_NEAR(r.market_clears.worst, 0.5, 1e-15);
}

TEST(VerifyCeTest, ZeroPricesRejected) {
  EXPECT_THROW(verify_ce(TwoByTwoMarket(), std::vector<double>{0.0, 0.0},
                         Matrix::FromRows({{1, 0}, {0, 1}}), 1e-9),
               MarketError);
}

TEST(VerifyCeTest, WrongGoodViolatesBangPerBuck) {
  const FisherMarket m = TwoByTwoMarket();
  const CeReport r = verify_ce(m, std::vector<double>{1.0, 1.0},
                               Matrix::FromRows({{0, 1}, {1, 0}}), 1e-9);
  EXPECT_FALSE(r.utility_maximizing.pass);
}

// Empirical desk-scale invariant: the average-price violation falls below
// 1e-3 by t = 2000 and trends down.
TEST(PrdAverageTest, BangPerBuckViolationDecays) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FisherMarket m = SuiteMarket(seed);
    const std::vector<FisherRow> rows = run_prd_average(m, 2000);
    EXPECT_LT(rows.back().max_bpb_violation, 1e-3) << "seed " << seed;
    EXPECT_LT(rows[1999].max_bpb_violation, rows[499].max_bpb_violation);
    EXPECT_LT(rows[499].max_bpb_violation, rows[99].max_bpb_violation);
  }
}

TEST(MarketIoTest, JsonRoundTrip) {
  const FisherMarket m = FisherMarket::Random(2, 3, 5);
  EXPECT_EQ(MarketToJson(MarketFromJson(MarketToJson(m))), MarketToJson(m));
}

}  // namespace
}  // namespace a2l
