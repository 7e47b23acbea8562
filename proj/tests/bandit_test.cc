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

#include "a2l/bandit.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "a2l/game.h"
#include "a2l/learners.h"
#include "gtest/gtest.h"

namespace a2l {
namespace {

PolymatrixGame SmallGame(std::uint64_t seed) {
  return generate_game(GameKind::kRandomZeroSum, 2, 3, GraphSpec(), seed);
}

BanditConfig Config(std::size_t epochs) {
  BanditConfig c;
  c.epochs = epochs;
  c.eta = 1.0 / 12.0;
  return c;
}

// -- Schedules and mixing ------------------------------------------------------------

TEST(EpochScheduleTest, Lengths) {
  EXPECT_EQ(EpochSchedule::Theory().B(3), 81u);
  EXPECT_EQ(EpochSchedule::TheoryD(3).B(2), 48u);
  EXPECT_EQ(EpochSchedule::Custom(300.0, 2.0).B(3), 2700u);
  EXPECT_EQ(EpochSchedule::Parse("custom:2.5:1", 3).B(3), 8u);  // round(7.5)
  EXPECT_DOUBLE_EQ(EpochSchedule::Theory().eps(4), 0.25);
  EXPECT_TRUE(EpochSchedule::Parse("theory_d", 3).certified());
  EXPECT_FALSE(EpochSchedule::Parse("custom:1:2", 3).certified());
  EXPECT_THROW(EpochSchedule::Parse("fast", 3), std::invalid_argument);
}

TEST(EpochScheduleTest, DeskBudget) {
  std::uint64_t total = 0;
  for (std::size_t t = 1; t <= 12; ++t) total += EpochSchedule::Theory().B(t);
  EXPECT_EQ(total, 60710u);
}

TEST(MixUniformTest, Endpoints) {
  const MixedStrategy avg{0.9, 0.1, 0.0};
  EXPECT_EQ(mix_uniform(avg, 1.0), MixedStrategy::Uniform(3));
  EXPECT_EQ(mix_uniform(avg, 0.0), avg);
}

TEST(MixUniformTest, HalfMix) {
  const MixedStrategy x = mix_uniform(MixedStrategy::Pure(2, 0), 0.5);
  EXPECT_DOUBLE_EQ(x[0], 0.75);
  EXPECT_DOUBLE_EQ(x[1], 0.25);
}

// -- Estimation --------------------------------------------------------------------

TEST(EstimateEpochTest, ConstantRewards) {
  const std::vector<std::size_t> actions(5, 1);
  const std::vector<double> rewards(5, 0.7);
  const EpochEstimate e = estimate_epoch(actions, rewards, 2);
  EXPECT_NEAR(e.estimate[1], 0.7, 1e-15);
}

TEST(EstimateEpochTest, ArithmeticMean) {
  const EpochEstimate e = estimate_epoch(std::vector<std::size_t>{0, 0, 0, 0},
                                         std::vector<double>{1, 0, 1, 1}, 1);
  EXPECT_DOUBLE_EQ(e.estimate[0], 0.75);
  EXPECT_TRUE(e.unsampled.empty());
}

TEST(EstimateEpochTest, UnsampledActionIsZeroAndFlagged) {
  const EpochEstimate e = estimate_epoch(std::vector<std::size_t>{0, 2},
                                         std::vector<double>{0.4, 0.6}, 3);
  EXPECT_EQ(e.estimate[1], 0.0);
  EXPECT_EQ(e.unsampled, std::vector<std::size_t>{1});
  EXPECT_EQ(e.counts, (std::vector<std::uint64_t>{1, 0, 1}));
}

TEST(EstimateEpochTest, MalformedInputRejected) {
  EXPECT_THROW(estimate_epoch(std::vector<std::size_t>{0, 1},
                              std::vector<double>{0.5}, 2),
               DataError);
  EXPECT_THROW(estimate_epoch(std::vector<std::size_t>{3}, std::vector<double>{0.5}, 2),
               DataError);
}

EpochEstimate WithEstimate(UtilityVector u) {
  EpochEstimate e = EpochEstimate::Zero(u.size());
  e.estimate = std::move(u);
  return e;
}

TEST(RecoverEstimatedTest, FirstEpoch) {
  const EpochEstimate cur = WithEstimate({0.3, 0.9});
  EXPECT_EQ(recover_estimated(1, cur, EpochEstimate::Zero(2)), cur.estimate);
}

TEST(RecoverEstimatedTest, ThirdEpoch) {
  const UtilityVector u =
      recover_estimated(3, WithEstimate({0.5, 0.5}), WithEstimate({0.4, 0.6}));
  EXPECT_NEAR(u[0], 0.7, 1e-15);
  EXPECT_NEAR(u[1], 0.3, 1e-15);
}

TEST(RenormalizeTest, MapsPayoffRangeToUnitInterval) {
  EXPECT_DOUBLE_EQ(RenormalizeReward(-1.0, 2), 0.0);
  EXPECT_DOUBLE_EQ(RenormalizeReward(1.0, 2), 1.0);
  EXPECT_DOUBLE_EQ(RenormalizeReward(0.0, 3), 0.5);
  EXPECT_DOUBLE_EQ(RenormalizeReward(-2.0, 3), 0.0);
}

TEST(SampleActionTest, FrequenciesFollowStrategy) {
  Rng rng = PlayerStream(1, 0, 0);
  const MixedStrategy x{0.2, 0.5, 0.3};
  std::vector<int> counts(3, 0);
  const int N = 100000;
  for (int k = 0; k < N; ++k) ++counts[SampleAction(x, rng)];
  for (std::size_t a = 0; a < 3; ++a) {
    const double se = std::sqrt(x[a] * (1 - x[a]) / N);
    EXPECT_NEAR(counts[a] / static_cast<double>(N), x[a], 4 * se);
  }
  EXPECT_EQ(SampleAction(MixedStrategy::Pure(3, 2), rng), 2u);
}

TEST(PlayerStreamTest, StreamsAreDistinctAndReproducible) {
  Rng a = PlayerStream(5, 0, 1);
  Rng b = PlayerStream(5, 0, 1);
  Rng c = PlayerStream(5, 1, 1);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
}

// -- Runs and audits -----------------------------------------------------------------

TEST(RunBanditTest, FirstEpochIsUniform) {
  const BanditTrajectory traj = run_bandit(SmallGame(0), Config(2), 0);
  for (const PlayerEpochRecord& p : traj.epochs[0].players) {
    EXPECT_EQ(p.mixed, MixedStrategy::Uniform(3));
  }
  EXPECT_EQ(traj.epochs[0].B, 1u);
  EXPECT_EQ(traj.epochs[1].rounds_end, 17u);
}

TEST(RunBanditTest, ReproducibleFromSeed) {
  std::ostringstream a;
  std::ostringstream b;
  std::ostringstream c;
  WriteBanditCsv(run_bandit(SmallGame(1), Config(8), 7), a);
  WriteBanditCsv(run_bandit(SmallGame(1), Config(8), 7), b);
  WriteBanditCsv(run_bandit(SmallGame(1), Config(8), 8), c);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), c.str());
}

// The inner iterates are exactly OMWU run on the recovered estimates.
TEST(RunBanditTest, InnerIteratesAreOmwuOnRecoveredEstimates) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const BanditConfig config = Config(10);
    const BanditTrajectory traj = run_bandit(SmallGame(seed), config, seed);
    for (int i = 0; i < 2; ++i) {
      std::vector<double> cum(3, 0.0);
      std::vector<double> last(3, 0.0);
      for (const BanditEpochRecord& e : traj.epochs) {
        const PlayerEpochRecord& p = e.players[i];
        std::vector<double> w(3);
        double m = -INFINITY;
        for (std::size_t a = 0; a < 3; ++a) m = std::max(m, cum[a] + last[a]);
        double z = 0.0;
        for (std::size_t a = 0; a < 3; ++a) {
          z += (w[a] = std::exp(config.eta * (cum[a] + last[a] - m)));
        }
        ASSERT_TRUE(p.inner.has_value());
        for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR((*p.inner)[a], w[a] / z, 1e-12);
        ASSERT_TRUE(p.recovered.has_value());
        for (std::size_t a = 0; a < 3; ++a) {
          cum[a] += (*p.recovered)[a];
          last[a] = (*p.recovered)[a];
        }
      }
    }
  }
}

TEST(RunBanditTest, AuditInequalitiesHold) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const BanditTrajectory traj = run_bandit(SmallGame(seed), Config(10), seed + 100);
    for (const BanditEpochRecord& e : traj.epochs) {
      for (const PlayerEpochRecord& p : e.players) {
        ASSERT_TRUE(p.audit.has_value());
        EXPECT_GE(p.audit->d1_slack, -1e-6);
        EXPECT_GE(p.audit->d1_sq_slack, -1e-6);
        EXPECT_GE(p.audit->d2_slack, -1e-6);
        EXPECT_NEAR(p.audit->d1_slack, p.audit->d1_bound - p.audit->err_recovered, 1e-12);
      }
    }
  }
}

TEST(RunBanditTest, ConcentrationBoundFormula) {
  const BanditTrajectory traj = run_bandit(SmallGame(2), Config(6), 3);
  for (const BanditEpochRecord& e : traj.epochs) {
    const double B = static_cast<double>(e.B);
    const double t = static_cast<double>(e.t);
    const double want = 2.0 * std::sqrt(3.0 * std::log(B * t * t / 0.05) / (B * e.eps));
    for (const PlayerEpochRecord& p : e.players) {
      EXPECT_NEAR(p.audit->d3_bound, want, 1e-12 * want);
      EXPECT_EQ(p.audit->d3_violated, p.audit->err_avg > p.audit->d3_bound);
    }
  }
}

TEST(RunBanditTest, ZeroVarianceGameHasNoEstimationError) {
  const Matrix c = Matrix::FromRows({{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}});
  const PolymatrixGame g({3, 3}, {{0, 1, c}, {1, 0, c}}, false, "flat");
  const BanditTrajectory traj = run_bandit(g, Config(5), 1);
  for (const BanditEpochRecord& e : traj.epochs) {
    for (const PlayerEpochRecord& p : e.players) {
      for (std::size_t a = 0; a < 3; ++a) {
        if (p.estimate->counts[a] > 0) {
          EXPECT_DOUBLE_EQ(p.estimate->estimate[a], RenormalizeReward(0.5, 2));
        }
      }
    }
  }
}

TEST(RunBanditTest, SingleActionPlayersEstimateExactly) {
  const Matrix a = Matrix::FromRows({{0.3}});
  const PolymatrixGame g({1, 1}, {{0, 1, a}, {1, 0, a.Negated()}}, true, "trivial");
  const BanditTrajectory traj = run_bandit(g, Config(4), 2);
  for (const BanditEpochRecord& e : traj.epochs) {
    EXPECT_NEAR(e.players[0].audit->err_avg, 0.0, 1e-12);
  }
}

TEST(BanditConditionsTest, FlagsUncertifiedSetups) {
  BanditConfig c = Config(4);
  EXPECT_TRUE(CheckBanditConditions(SmallGame(0), c).empty());
  c.schedule = EpochSchedule::Custom(10.0, 2.0);
  c.eta = 0.5;
  EXPECT_EQ(CheckBanditConditions(SmallGame(0), c).size(), 2u);
  const BanditTrajectory traj = run_bandit(SmallGame(0), c, 0);
  EXPECT_FALSE(traj.certified);
  EXPECT_FALSE(traj.warnings.empty());
}

// -- Importance-weighted monitor ------------------------------------------------------

TEST(ImportanceWeightedTest, Formula) {
  const UtilityVector u = ImportanceWeightedEstimate(
      std::vector<std::size_t>{0, 1, 0}, std::vector<double>{1.0, 0.5, 0.2},
      MixedStrategy{0.5, 0.5});
  EXPECT_DOUBLE_EQ(u[0], 2.4);
  EXPECT_DOUBLE_EQ(u[1], 1.0);
}

TEST(IwRegretMonitorTest, RegretEstimateIsMaxMinusRealized) {
  IwRegretMonitor m(2, 0.05, 4.0);
  const MixedStrategy x{0.5, 0.5};
  m.AddSample(0, 1.0, x);
  m.AddSample(1, 0.25, x);
  const IwMonitorStatus s = m.EndEpoch(2);
  // cum = (2, 0.5), realized 1.25.
  EXPECT_DOUBLE_EQ(s.reg_estimate, 0.75);
  EXPECT_DOUBLE_EQ(s.threshold, 4.0 * std::pow(2.0, 0.8));
  EXPECT_FALSE(s.switch_now);
  EXPECT_GT(s.confidence_radius, 0.0);
}

TEST(IwRegretMonitorTest, HonestSelfPlayDoesNotSwitch) {
  BanditConfig c = Config(10);
  c.monitor = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const BanditTrajectory traj = run_bandit(SmallGame(seed), c, seed);
    for (const BanditEpochRecord& e : traj.epochs) {
      for (const PlayerEpochRecord& p : e.players) EXPECT_FALSE(p.switched);
    }
  }
}

TEST(Exp3Test, StaysOnSimplex) {
  Exp3 learner(3);
  Rng rng = PlayerStream(0, 0, 9);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t a = learner.Act(rng);
    learner.Reward(a == 2 ? 1.0 : 0.0);
    double sum = 0.0;
    for (double p : learner.strategy().probs()) sum += p;
    ASSERT_NEAR(sum, 1.0, 1e-12);
  }
  EXPECT_GT(learner.strategy()[2], 0.5);
}

}  // namespace
}  // namespace a2l
