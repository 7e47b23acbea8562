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

#include "a2l/verify.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "a2l/bandit.h"
#include "a2l/dynamics.h"
#include "a2l/fisher.h"
#include "a2l/learners.h"
#include "a2l/reduction.h"
#include "format.h"
#include "json.hpp"

namespace a2l {

using internal::FormatDouble;

std::string SuiteReport::ToJson() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const CheckResult& c : checks) {
    nlohmann::json j = {{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}};
    j["value"] = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr);
    checks_json.push_back(std::move(j));
  }
  nlohmann::json j = {{"suite", name},
                      {"pass", pass},
                      {"seconds", seconds},
                      {"checks", std::move(checks_json)}};
  return j.dump(2);
}

// -- Fixtures -----------------------------------------------------------------

std::vector<PolymatrixGame> EquivalenceGames(std::uint64_t seed) {
  const GraphSpec complete;
  std::vector<PolymatrixGame> games;
  games.push_back(generate_game(GameKind::kMatchingPennies, 2, 2, complete, seed));
  games.push_back(generate_game(GameKind::kRockPaperScissors, 2, 3, complete, seed));
  games.push_back(generate_game(GameKind::kRandomZeroSum, 3, 5, complete, seed));
  return games;
}

std::vector<PolymatrixGame> LastIterateGames(std::uint64_t seed) {
  const GraphSpec complete;
  const GraphSpec cycle = GraphSpec::Parse("cycle");
  std::vector<PolymatrixGame> games;
  games.push_back(generate_game(GameKind::kMatchingPennies, 2, 2, complete, seed));
  games.push_back(generate_game(GameKind::kRockPaperScissors, 2, 3, complete, seed));
  games.push_back(generate_game(GameKind::kRandomZeroSum, 2, 10, complete, seed));
  games.push_back(generate_game(GameKind::kRandomZeroSum, 3, 5, complete, seed));
  games.push_back(generate_game(GameKind::kRandomZeroSum, 4, 10, complete, seed));
  games.push_back(generate_game(GameKind::kRandomZeroSum, 4, 6, cycle, seed));
  return games;
}

PolymatrixGame BanditAdversaryGame() {
  const Matrix a = Matrix::FromRows({{1, -1, -1}, {-1, -1, -1}, {-1, -1, -1}});
  std::vector<Edge> edges{{0, 1, a}, {1, 0, a.Transposed().Negated()}};
  return PolymatrixGame({3, 3}, std::move(edges), true, "bandit_adversary");
}

FisherMarket TwoByTwoMarket() {
  return FisherMarket({1.0, 1.0}, Matrix::FromRows({{1, 0}, {0, 1}}));
}

FisherMarket SuiteMarket(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x6d61726b6574ULL);
  const std::size_t agents = 2 + rng() % 4;
  const std::size_t goods = 2 + rng() % 4;
  return FisherMarket::Random(agents, goods, seed);
}

EquivalenceStats CompareWithReference(const PolymatrixGame& game,
                                      const std::string& inner, WeightRule rule,
                                      double eta, std::size_t T) {
  const int n = game.num_players();
  LearnerSpec spec;
  spec.algorithm = inner;
  spec.eta = eta;
  std::vector<std::unique_ptr<A2L>> wrapped;
  std::vector<std::unique_ptr<Learner>> reference;
  std::vector<std::vector<double>> ref_sum(n);
  for (int i = 0; i < n; ++i) {
    wrapped.push_back(std::make_unique<A2L>(MakeLearner(spec, game.num_actions(i)), rule));
    reference.push_back(MakeLearner(spec, game.num_actions(i)));
    ref_sum[i].assign(game.num_actions(i), 0.0);
  }
  EquivalenceStats stats;
  double W = 0.0;
  for (std::size_t t = 1; t <= T; ++t) {
    StrategyProfile played;
    StrategyProfile ref;
    for (int i = 0; i < n; ++i) played.push_back(wrapped[i]->Next());
    for (int i = 0; i < n; ++i) ref.push_back(reference[i]->Next());
    const double alpha = AveragingWeight(rule, t);
    W += alpha;
    for (int i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < ref_sum[i].size(); ++a) {
        ref_sum[i][a] += alpha * ref[i][a];
        stats.max_average_diff =
            std::max(stats.max_average_diff, std::abs(played[i][a] - ref_sum[i][a] / W));
      }
    }
    std::vector<UtilityVector> u_played;
    std::vector<UtilityVector> u_ref;
    for (int i = 0; i < n; ++i) {
      u_played.push_back(utility_vector(game, i, played));
      u_ref.push_back(utility_vector(game, i, ref));
    }
    for (int i = 0; i < n; ++i) {
      wrapped[i]->Observe(u_played[i]);
      reference[i]->Observe(u_ref[i]);
      stats.max_utility_diff = std::max(
          stats.max_utility_diff, (wrapped[i]->last_recovered() - u_ref[i]).MaxAbs());
    }
  }
  return stats;
}

namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::uint64_t> SeedList(const VerifyOptions& o) {
  std::vector<std::uint64_t> s(o.seeds);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

std::vector<LearnerSpec> Uniform(int n, const LearnerSpec& spec) {
  return std::vector<LearnerSpec>(n, spec);
}

CheckResult Max(const std::string& name, double value, double limit,
                const std::string& detail) {
  return {name, value <= limit, value, detail + " <= " + FormatDouble(limit)};
}

CheckResult Min(const std::string& name, double value, double limit,
                const std::string& detail) {
  return {name, value >= limit, value, detail + " >= " + FormatDouble(limit)};
}

// Runs of A2L-OMWU at eta = 1/(2(n-1)) on LastIterateGames; shared by the
// last-iterate and dynamic-regret suites.
struct BoundStats {
  double min_last_slack = INFINITY;
  double min_dreg_slack = INFINITY;
  std::vector<std::vector<std::pair<double, double>>> series;
};

BoundStats LastIterateRuns(const VerifyOptions& o, std::size_t T) {
  const std::vector<std::uint64_t> seeds = SeedList(o);
  std::vector<BoundStats> per_seed(seeds.size());
  ParallelFor(seeds.size(), o.threads, [&](std::size_t k) {
    BoundStats& st = per_seed[k];
    for (const PolymatrixGame& g : LastIterateGames(seeds[k])) {
      LearnerSpec spec;
      spec.algorithm = "a2l-omwu";
      spec.eta = DefaultGradientEta(g.num_players());
      const Trajectory traj =
          run_full_feedback(g, Uniform(g.num_players(), spec), T, seeds[k]);
      const double S = LastIterateScale(g, spec.eta);
      const RegretSeries rs = regret_series(traj);
      std::vector<std::pair<double, double>> pts;
      for (std::size_t r = 0; r < traj.rounds.size(); ++r) {
        const double t = static_cast<double>(r + 1);
        const double gap = traj.rounds[r].tgap_played;
        st.min_last_slack = std::min(st.min_last_slack, S / t + 1e-9 - gap);
        for (const auto& d : rs.dreg) {
          st.min_dreg_slack = std::min(st.min_dreg_slack, S * (1.0 + std::log(t)) - d[r]);
        }
        pts.emplace_back(t, gap);
      }
      st.series.push_back(std::move(pts));
    }
  });
  BoundStats all;
  for (BoundStats& s : per_seed) {
    all.min_last_slack = std::min(all.min_last_slack, s.min_last_slack);
    all.min_dreg_slack = std::min(all.min_dreg_slack, s.min_dreg_slack);
    for (auto& v : s.series) all.series.push_back(std::move(v));
  }
  return all;
}

MixedStrategy RandomInterior(std::size_t d, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(d);
  for (double& v : w) v = e(rng);
  return MixedStrategy::FromWeights(std::move(w));
}

}  // namespace

// -- Suites -------------------------------------------------------------------

SuiteReport VerifyA2LEquivalence(const VerifyOptions& o) {
  const auto start = Clock::now();
  SuiteReport r;
  r.name = "a2l_equivalence";
  const std::vector<std::uint64_t> seeds = SeedList(o);
  std::vector<EquivalenceStats> worst(seeds.size());
  ParallelFor(seeds.size(), o.threads, [&](std::size_t k) {
    for (const PolymatrixGame& g : EquivalenceGames(seeds[k])) {
      for (const char* inner : {"mwu", "omwu"}) {
        for (WeightRule w : {WeightRule::kUniform, WeightRule::kLinear}) {
          const EquivalenceStats s = CompareWithReference(
              g, inner, w, DefaultGradientEta(g.num_players()), 1000);
          worst[k].max_average_diff = std::max(worst[k].max_average_diff, s.max_average_diff);
          worst[k].max_utility_diff = std::max(worst[k].max_utility_diff, s.max_utility_diff);
        }
      }
    }
  });
  EquivalenceStats all;
  for (const auto& s : worst) {
    all.max_average_diff = std::max(all.max_average_diff, s.max_average_diff);
    all.max_utility_diff = std::max(all.max_utility_diff, s.max_utility_diff);
  }
  r.Add(Max("played_equals_reference_average", all.max_average_diff, 1e-12,
            "max |x-bar^t - mean of reference iterates|"));
  r.Add(Max("recovered_equals_reference_utility", all.max_utility_diff, 1e-10,
            "max |recovered u^t - reference u^t|"));
  r.seconds = Since(start);
  return r;
}

SuiteReport VerifyAverageGapIdentity(const VerifyOptions& o) {
  const auto start = Clock::now();
  SuiteReport r;
  r.name = "average_gap_identity";
  const std::vector<std::uint64_t> seeds = SeedList(o);
  std::vector<double> worst(seeds.size(), 0.0);
  ParallelFor(seeds.size(), o.threads, [&](std::size_t k) {
    for (const PolymatrixGame& g : EquivalenceGames(seeds[k])) {
      for (const char* alg : {"a2l-mwu", "a2l-omwu"}) {
        LearnerSpec spec;
        spec.algorithm = alg;
        spec.eta = DefaultGradientEta(g.num_players());
        const Trajectory traj =
            run_full_feedback(g, Uniform(g.num_players(), spec), 1000, seeds[k]);
        const RegretSeries rs = regret_series(traj);
        for (std::size_t t = 0; t < traj.rounds.size(); ++t) {
          double sum = 0.0;
          for (const auto& reg : rs.reg_inner) sum += reg[t];
          worst[k] = std::max(worst[k], std::abs(traj.rounds[t].tgap_played -
                                                 sum / static_cast<double>(t + 1)));
        }
      }
    }
  });
  r.Add(Max("gap_equals_average_regret", *std::max_element(worst.begin(), worst.end()),
            1e-10, "max over t of |TGap(x-bar^t) - sum_i Reg_i(t) / t|"));
  r.seconds = Since(start);
  return r;
}

SuiteReport VerifyLastIterateBound(const VerifyOptions& o) {
  const auto start = Clock::now();
  SuiteReport r;
  r.name = "last_iterate_bound";
  const BoundStats st = LastIterateRuns(o, 10000);
  r.Add(Min("anytime_gap_bound", st.min_last_slack, 0.0,
            "min over t <= 1e4 of sum log d_i/(eta t) + 1e-9 - TGap(x-bar^t)"));
  try {
    const RateFit fit = fit_rate(st.series, 100.0, 10000.0);
    r.Add(Max("fitted_slope", fit.slope, -0.9,
              "log-log slope of TGap over t in [1e2, 1e4] (" +
                  std::to_string(fit.points) + " points, " +
                  std::to_string(fit.excluded) + " zero gaps excluded)"));
  } catch (const std::invalid_argument& e) {
    r.Add({"fitted_slope", false, NAN, e.what()});
  }
  r.seconds = Since(start);
  return r;
}

SuiteReport VerifyDynamicRegret(const VerifyOptions& o) {
  const auto start = Clock::now();
  SuiteReport r;
  r.name = "dynamic_regret";
  const BoundStats st = LastIterateRuns(o, 10000);
  r.Add(Min("dynamic_regret_bound", st.min_dreg_slack, 0.0,
            "min over players and t of (sum log d_i/eta)(1 + ln t) - DReg_i(t)"));
  r.seconds = Since(start);
  return r;
}

SuiteReport VerifyRvu(const VerifyOptions& o) {
  const auto start = Clock::now();
  SuiteReport r;
  r.name = "rvu";
  const std::vector<std::uint64_t> seeds = SeedList(o);
  std::vector<double> rvu(seeds.size(), INFINITY);
  std::vector<double> variation(seeds.size(), INFINITY);
  ParallelFor(seeds.size(), o.threads, [&](std::size_t k) {
    std::vector<PolymatrixGame> games = EquivalenceGames(seeds[k]);
    for (PolymatrixGame& g : LastIterateGames(seeds[k])) games.push_back(std::move(g));
    std::mt19937_64 rng(seeds[k] * 7919 + 17);
    for (const PolymatrixGame& g : games) {
      const int n = g.num_players();
      LearnerSpec spec;
      spec.algorithm = "a2l-omwu";
      spec.eta = DefaultGradientEta(n);
      const Trajectory traj = run_full_feedback(g, Uniform(n, spec), 1000, seeds[k]);
      for (int i = 0; i < n; ++i) {
        std::vector<MixedStrategy> xs;
        std::vector<UtilityVector> us;
        for (const RoundRecord& rec : traj.rounds) {
          xs.push_back(rec.inner[i]);
          us.push_back(rec.inner_utilities[i]);
        }
        rvu[k] = std::min(rvu[k], rvu_diagnostic(xs, us, spec.eta).slack);
      }
      for (int pair = 0; pair < 1000; ++pair) {
        StrategyProfile x;
        StrategyProfile y;
        for (int i = 0; i < n; ++i) {
          x.push_back(RandomInterior(g.num_actions(i), rng));
          y.push_back(RandomInterior(g.num_actions(i), rng));
        }
        double lhs = 0.0;
        double rhs = 0.0;
        for (int i = 0; i < n; ++i) {
          const double du = (utility_vector(g, i, x) - utility_vector(g, i, y)).MaxAbs();
          const double dx = L1Distance(x[i].probs(), y[i].probs());
          lhs += du * du;
          rhs += dx * dx;
        }
        rhs *= static_cast<double>((n - 1) * (n - 1));
        variation[k] = std::min(variation[k], rhs - lhs);
      }
    }
  });
  r.Add(Min("rvu_slack", *std::min_element(rvu.begin(), rvu.end()), -1e-9,
            "min RVU slack over OMWU self-play trajectories"));
  r.Add(Min("utility_variation_slack", *std::min_element(variation.begin(), variation.end()),
            -1e-12,
            "min of (n-1)^2 sum ||x_i - x'_i||_1^2 - sum ||u_i - u'_i||_inf^2"));
  r.seconds = Since(start);
  return r;
}

SuiteReport VerifyMwuContrast(const VerifyOptions&) {
  const auto start = Clock::now();
  SuiteReport r;
  r.name = "mwu_contrast";
  const PolymatrixGame g =
      generate_game(GameKind::kMatchingPennies, 2, 2, GraphSpec(), 0);
  LearnerSpec first;
  first.eta = 0.1;
  first.prior = MixedStrategy{0.55, 0.45};
  LearnerSpec second;
  second.eta = 0.1;
  double mwu_min = INFINITY;
  double a2l_max = 0.0;
  for (const char* alg : {"mwu", "a2l-mwu"}) {
    first.algorithm = alg;
    second.algorithm = alg;
    const Trajectory traj = run_full_feedback(g, {first, second}, 1000, 0);
    for (std::size_t t = 900; t <= 1000; ++t) {
      const double gap = traj.rounds[t - 1].tgap_played;
      if (std::string(alg) == "mwu") {
        mwu_min = std::min(mwu_min, gap);
      } else {
        a2l_max = std::max(a2l_max, gap);
      }
    }
  }
  r.Add({"mwu_keeps_cycling", mwu_min > 0.05, mwu_min,
         "min TGap of bare MWU over rounds 900-1000 > 0.05"});
  r.Add({"a2l_mwu_converges", a2l_max < 0.01, a2l_max,
         "max TGap of A2L-MWU over rounds 900-1000 < 0.01"});
  r.seconds = Since(start);
  return r;
}

SuiteReport VerifyBandit(const VerifyOptions& o) {
  const auto start = Clock::now();
  SuiteReport r;
  r.name = "bandit";
  const std::vector<std::uint64_t> seeds = SeedList(o);

  // (a) audits and (d) trend on 12 theory epochs.
  BanditConfig bc;
  bc.epochs = 12;
  bc.eta = 1.0 / 12.0;
  std::vector<double> d1(seeds.size(), INFINITY);
  std::vector<double> d2(seeds.size(), INFINITY);
  std::vector<std::vector<double>> gaps(seeds.size());
  ParallelFor(seeds.size(), o.threads, [&](std::size_t k) {
    const PolymatrixGame g =
        generate_game(GameKind::kRandomZeroSum, 2, 3, GraphSpec(), seeds[k]);
    const BanditTrajectory traj = run_bandit(g, bc, seeds[k] + 1000);
    for (const BanditEpochRecord& e : traj.epochs) {
      gaps[k].push_back(e.tgap_mixed);
      for (const PlayerEpochRecord& p : e.players) {
        d1[k] = std::min({d1[k], p.audit->d1_slack, p.audit->d1_sq_slack});
        d2[k] = std::min(d2[k], p.audit->d2_slack);
      }
    }
  });
  r.Add(Min("error_propagation_slack", *std::min_element(d1.begin(), d1.end()), -1e-6,
            "min slack of ||delta^t|| <= ||t Delta^t|| + ||(t-1) Delta^{t-1}|| + 2 eps_t "
            "and its squared form"));
  r.Add(Min("regret_with_error_slack", *std::min_element(d2.begin(), d2.end()), -1e-6,
            "min slack of the regret bound with estimation error"));
  auto median_at = [&](std::size_t epoch) {
    std::vector<double> v;
    for (const auto& g : gaps) v.push_back(g[epoch - 1]);
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  };
  const double m3 = median_at(3);
  const double m12 = median_at(12);
  r.Add({"median_gap_trend", m12 <= m3, m12 - m3,
         "median TGap at epoch 12 (" + FormatDouble(m12) + ") <= epoch 3 (" +
             FormatDouble(m3) + ")"});

  // (b) unbiasedness of the per-action mean estimator.
  {
    const PolymatrixGame g = generate_game(GameKind::kRandomZeroSum, 2, 3, GraphSpec(), 5);
    std::mt19937_64 prng(99);
    StrategyProfile profile;
    for (int i = 0; i < 2; ++i) profile.push_back(mix_uniform(RandomInterior(3, prng), 0.3));
    std::vector<Rng> rngs{PlayerStream(77, 0, 2), PlayerStream(77, 1, 2)};
    const std::size_t R = 10000;
    const std::uint64_t B = 200;
    std::vector<std::vector<double>> sum(2, std::vector<double>(3, 0.0));
    std::vector<std::vector<double>> sum2 = sum;
    for (std::size_t rep = 0; rep < R; ++rep) {
      const EpochSample s = SampleEpoch(g, profile, B, rngs);
      for (int i = 0; i < 2; ++i) {
        const EpochEstimate e = estimate_epoch(s.actions[i], s.rewards[i], 3);
        for (std::size_t a = 0; a < 3; ++a) {
          sum[i][a] += e.estimate[a];
          sum2[i][a] += e.estimate[a] * e.estimate[a];
        }
      }
    }
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
      const UtilityVector truth = RenormalizeUtility(utility_vector(g, i, profile), 2);
      for (std::size_t a = 0; a < 3; ++a) {
        const double mean = sum[i][a] / R;
        const double var = sum2[i][a] / R - mean * mean;
        const double se = std::sqrt(std::max(var, 1e-300) / R);
        worst = std::max(worst, std::abs(mean - truth[a]) / se);
      }
    }
    r.Add(Max("estimator_unbiased", worst, 3.0,
              "max standardized error of the mean estimate over 1e4 resamples"));
  }

  // (c) concentration bound violation frequency, B_t eps_t / d >= 100.
  {
    const PolymatrixGame g = generate_game(GameKind::kRandomZeroSum, 2, 3, GraphSpec(), 11);
    BanditConfig cc;
    cc.schedule = EpochSchedule::Custom(300.0, 2.0);
    cc.epochs = 4;
    cc.delta = 0.05;
    cc.eta = 1.0 / 12.0;
    const std::size_t reps = 200;
    std::vector<std::vector<int>> hits(reps);
    ParallelFor(reps, o.threads, [&](std::size_t k) {
      const BanditTrajectory traj = run_bandit(g, cc, 5000 + k);
      for (const EstimationAuditRow& row : estimation_error_audit(traj)) {
        hits[k].push_back(row.violated ? 1 : 0);
      }
    });
    std::vector<int> cell(hits.front().size(), 0);
    for (const auto& h : hits) {
      for (std::size_t c = 0; c < h.size(); ++c) cell[c] += h[c];
    }
    const double worst = static_cast<double>(*std::max_element(cell.begin(), cell.end())) /
                         static_cast<double>(reps);
    r.Add(Max("concentration_violation_rate", worst, 4.0 * cc.delta,
              "max violation frequency per epoch-player cell over 200 repetitions"));
  }
  r.seconds = Since(start);
  return r;
}

SuiteReport VerifyBanditMonitor(const VerifyOptions& o) {
  const auto start = Clock::now();
  SuiteReport r;
  r.name = "bandit_monitor";
  const std::vector<std::uint64_t> seeds = SeedList(o);
  BanditConfig bc;
  bc.epochs = 12;
  bc.eta = 1.0 / 12.0;
  bc.monitor = true;
  bc.monitor_c = 4.0;
  std::vector<int> switches(seeds.size(), 0);
  std::vector<double> ratio(seeds.size(), 0.0);
  ParallelFor(seeds.size(), o.threads, [&](std::size_t k) {
    const PolymatrixGame g =
        generate_game(GameKind::kRandomZeroSum, 2, 3, GraphSpec(), seeds[k]);
    const BanditTrajectory traj = run_bandit(g, bc, seeds[k] + 1000);
    for (const BanditEpochRecord& e : traj.epochs) {
      for (const PlayerEpochRecord& p : e.players) {
        if (p.switched) ++switches[k];
        if (p.monitor) {
          ratio[k] = std::max(ratio[k], p.monitor->reg_estimate / p.monitor->threshold);
        }
      }
    }
  });
  const int total = std::accumulate(switches.begin(), switches.end(), 0);
  r.Add({"honest_never_switches", total == 0, static_cast<double>(total),
         "switches under honest self-play (max estimate/threshold " +
             FormatDouble(*std::max_element(ratio.begin(), ratio.end())) + ")"});

  // Opponent alternates pure columns 0 and 1 by epoch.
  {
    const PolymatrixGame g = BanditAdversaryGame();
    BanditConfig ac = bc;
    ac.epochs = 24;
    std::vector<std::unique_ptr<BanditAgent>> agents;
    agents.push_back(std::make_unique<A2LOmwuBandit>(3, ac.eta, ac.schedule, true,
                                                     ac.delta, ac.monitor_c));
    agents.push_back(std::make_unique<ScriptedBanditAgent>(std::vector<MixedStrategy>{
        MixedStrategy::Pure(3, 0), MixedStrategy::Pure(3, 1)}));
    const BanditTrajectory traj = run_bandit(g, agents, ac, 3);
    std::size_t fired = 0;
    for (const BanditEpochRecord& e : traj.epochs) {
      if (e.players[0].switched) {
        fired = e.t;
        break;
      }
    }
    r.Add({"adversary_triggers_switch", fired > 0, static_cast<double>(fired),
           "epoch at which the monitor fired against the alternating adversary"});
  }

  // Unbiasedness of the importance-weighted estimate.
  {
    const PolymatrixGame g = generate_game(GameKind::kRandomZeroSum, 2, 3, GraphSpec(), 5);
    std::mt19937_64 prng(123);
    StrategyProfile profile;
    for (int i = 0; i < 2; ++i) profile.push_back(mix_uniform(RandomInterior(3, prng), 0.3));
    std::vector<Rng> rngs{PlayerStream(78, 0, 3), PlayerStream(78, 1, 3)};
    const std::size_t R = 10000;
    const std::uint64_t B = 50;
    std::vector<std::vector<double>> sum(2, std::vector<double>(4, 0.0));
    std::vector<std::vector<double>> sum2 = sum;
    for (std::size_t rep = 0; rep < R; ++rep) {
      const EpochSample s = SampleEpoch(g, profile, B, rngs);
      for (int i = 0; i < 2; ++i) {
        const UtilityVector u = ImportanceWeightedEstimate(s.actions[i], s.rewards[i], profile[i]);
        for (std::size_t a = 0; a < 3; ++a) {
          sum[i][a] += u[a];
          sum2[i][a] += u[a] * u[a];
        }
        const double inner = u.Dot(profile[i]);
        sum[i][3] += inner;
        sum2[i][3] += inner * inner;
      }
    }
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
      const UtilityVector truth = RenormalizeUtility(utility_vector(g, i, profile), 2);
      std::vector<double> expect(4);
      for (std::size_t a = 0; a < 3; ++a) expect[a] = static_cast<double>(B) * truth[a];
      expect[3] = static_cast<double>(B) * truth.Dot(profile[i]);
      for (std::size_t a = 0; a < 4; ++a) {
        const double mean = sum[i][a] / R;
        const double var = sum2[i][a] / R - mean * mean;
        const double se = std::sqrt(std::max(var, 1e-300) / R);
        worst = std::max(worst, std::abs(mean - expect[a]) / se);
      }
    }
    r.Add(Max("iw_estimate_unbiased", worst, 3.0,
              "max standardized error of the importance-weighted epoch estimate"));
  }
  r.seconds = Since(start);
  return r;
}

SuiteReport VerifyFisher(const VerifyOptions& o) {
  const auto start = Clock::now();
  SuiteReport r;
  r.name = "fisher";
  const std::vector<std::uint64_t> seeds = SeedList(o);
  std::vector<double> eq(seeds.size(), 0.0);
  std::vector<double> cons(seeds.size(), 0.0);
  ParallelFor(seeds.size(), o.threads, [&](std::size_t k) {
    const FisherMarket m = SuiteMarket(seeds[k]);
    const std::vector<FisherRow> a2l = run_a2l_prd(m, 500);
    const std::vector<FisherRow> ref = run_prd(m, 500);
    std::vector<double> sum(m.num_goods(), 0.0);
    const double total = m.total_budget();
    for (std::size_t t = 0; t < ref.size(); ++t) {
      double s_ref = 0.0;
      double s_a2l = 0.0;
      for (std::size_t j = 0; j < sum.size(); ++j) {
        sum[j] += ref[t].prices[j];
        eq[k] = std::max(eq[k], std::abs(a2l[t].prices[j] - sum[j] / static_cast<double>(t + 1)));
        s_ref += ref[t].prices[j];
        s_a2l += a2l[t].prices[j];
      }
      cons[k] = std::max({cons[k], std::abs(s_ref - total), std::abs(s_a2l - total)});
    }
  });
  r.Add(Max("a2l_prd_matches_average_prices", *std::max_element(eq.begin(), eq.end()),
            1e-10, "max |p-bar^t (A2L-PRD) - mean of reference PRD prices|, t <= 500"));
  r.Add(Max("price_conservation", *std::max_element(cons.begin(), cons.end()), 1e-9,
            "max |sum_j p_j - sum_i B_i|"));

  const FisherMarket m = TwoByTwoMarket();
  SpendingProfile b = SpendingProfile::Interior(m);
  std::size_t reached = 0;
  for (std::size_t t = 1; t <= 50 && reached == 0; ++t) {
    const std::vector<double> p = Prices(b);
    if (verify_ce(m, p, Allocations(b, p), 1e-6).pass()) reached = t;
    b = prd_step(m, b);
  }
  r.Add({"two_by_two_reaches_equilibrium", reached > 0, static_cast<double>(reached),
         "first PRD step (<= 50) where every equilibrium condition holds at 1e-6"});
  r.seconds = Since(start);
  return r;
}

SuiteReport VerifyDeterminism(const VerifyOptions& o) {
  const auto start = Clock::now();
  SuiteReport r;
  r.name = "determinism";
  std::vector<ExperimentConfig> configs(3);
  configs[0].mode = FeedbackMode::kGradient;
  configs[0].game.kind = "random_zs";
  configs[0].game.n = 3;
  configs[0].game.d = 4;
  configs[0].T = 500;
  configs[1].mode = FeedbackMode::kBandit;
  configs[1].game.kind = "random_zs";
  configs[1].game.n = 2;
  configs[1].game.d = 3;
  configs[1].algorithms = {"a2l-omwu-bandit"};
  configs[1].epochs = 8;
  configs[2].mode = FeedbackMode::kFisher;
  configs[2].algorithms = {"a2l-prd"};
  configs[2].T = 300;
  const std::size_t seeds = std::max<std::size_t>(1, std::min<std::size_t>(o.seeds, 4));
  for (ExperimentConfig& c : configs) {
    c.seeds.resize(seeds);
    std::iota(c.seeds.begin(), c.seeds.end(), 0);
    c.threads = 1;
    const RunResult first = run_in_memory(c);
    c.threads = o.threads == 1 ? 2 : o.threads;
    const RunResult second = run_in_memory(c);
    bool same = first.summary_json == second.summary_json;
    for (std::size_t k = 0; k < first.seeds.size(); ++k) {
      same = same && first.seeds[k].csv == second.seeds[k].csv;
    }
    r.Add({FeedbackModeName(c.mode) + "_byte_identical", same, same ? 0.0 : 1.0,
           "re-run with identical config yields identical CSVs and summary"});
  }
  r.seconds = Since(start);
  return r;
}

// -- Registry -----------------------------------------------------------------

namespace {

const std::vector<std::pair<std::string, std::function<SuiteReport(const VerifyOptions&)>>>&
Registry() {
  static const std::vector<
      std::pair<std::string, std::function<SuiteReport(const VerifyOptions&)>>>
      registry = {
          {"a2l_equivalence", VerifyA2LEquivalence},
          {"average_gap_identity", VerifyAverageGapIdentity},
          {"last_iterate_bound", VerifyLastIterateBound},
          {"dynamic_regret", VerifyDynamicRegret},
          {"rvu", VerifyRvu},
          {"mwu_contrast", VerifyMwuContrast},
          {"bandit", VerifyBandit},
          {"bandit_monitor", VerifyBanditMonitor},
          {"fisher", VerifyFisher},
          {"determinism", VerifyDeterminism},
      };
  return registry;
}

}  // namespace

std::vector<std::string> AvailableSuites() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : Registry()) names.push_back(name);
  return names;
}

SuiteReport verify(const std::string& suite, const VerifyOptions& options) {
  for (const auto& [name, fn] : Registry()) {
    if (name == suite) return fn(options);
  }
  std::string msg = "unknown suite '" + suite + "'; available:";
  for (const std::string& name : AvailableSuites()) msg += " " + name;
  throw std::invalid_argument(msg);
}

}  // namespace a2l
