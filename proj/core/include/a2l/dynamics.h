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

#ifndef A2L_DYNAMICS_H_
#define A2L_DYNAMICS_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "a2l/game.h"
#include "a2l/learners.h"
#include "a2l/reduction.h"

namespace a2l {

// Error raised inside the simulation loop, tagged with the round it hit.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(std::size_t round, const std::string& what)
      : std::runtime_error("round " + std::to_string(round) + ": " + what),
        round_(round) {}
  std::size_t round() const { return round_; }

 private:
  std::size_t round_;
};

// -- Learner construction -----------------------------------------------------

// Declarative description of one player's learner.
//   algorithm: mwu | omwu | a2l-mwu | a2l-omwu | anytime-mwu | scripted
struct LearnerSpec {
  std::string algorithm = "a2l-omwu";
  double eta = 0.5;
  WeightRule weights = WeightRule::kUniform;
  std::optional<MixedStrategy> prior;

  // Wraps the learner with the gradient-feedback regret monitor.
  bool robust = false;
  double monitor_c = 2.0;
  // S = sum_i log d_i / eta; 0 means "derive from the game".
  double monitor_scale = 0.0;

  // For `scripted`.
  std::vector<MixedStrategy> script;
  std::size_t hold = 1;
};

std::unique_ptr<Learner> MakeLearner(const LearnerSpec& spec, std::size_t d);

// The spec with the A2L wrapper (and robustness wrapper) removed, e.g.
// a2l-omwu -> omwu. Used to build reference runs.
LearnerSpec BareSpec(const LearnerSpec& spec);

// Largest step size the last-iterate bound allows: 1/(2(n-1)).
double DefaultGradientEta(int num_players);

// sum_i log d_i / eta.
double LastIterateScale(const PolymatrixGame& game, double eta);

// -- Robustness monitor -------------------------------------------------------

enum class MonitorDecision { kContinue, kSwitch };

// c * S * max(1, ln t).
double GradientMonitorThreshold(double scale, double c, std::size_t t);

// Player-local decision from the played strategies and the utility vectors
// the player observed: switch once the anytime external regret exceeds
// GradientMonitorThreshold at the prefix length.
MonitorDecision robust_gradient_monitor(std::span<const MixedStrategy> xs,
                                        std::span<const UtilityVector> us,
                                        double scale, double c);

// Incremental form of the monitor, O(d) per round.
class GradientRegretMonitor {
 public:
  GradientRegretMonitor(std::size_t d, double scale, double c);

  MonitorDecision Update(const MixedStrategy& x, const UtilityVector& u);
  double regret() const;
  double threshold() const;
  std::size_t rounds() const { return t_; }

 private:
  std::vector<double> cum_;
  double realized_ = 0.0;
  double scale_;
  double c_;
  std::size_t t_ = 0;
};

// Runs `primary` until the monitor fires, then hands over to AnytimeMwu for
// the rest of the game.
class RobustLearner : public Learner {
 public:
  RobustLearner(std::unique_ptr<Learner> primary, double scale, double c);
  RobustLearner(const RobustLearner& other);

  std::size_t num_actions() const override { return d_; }
  MixedStrategy Next() override;
  void Observe(const UtilityVector& u) override;
  std::unique_ptr<Learner> Clone() const override;
  std::string name() const override;
  std::optional<MixedStrategy> InnerIterate() const override;

  // Round (1-based) after which the fallback took over.
  std::optional<std::size_t> switched_at() const { return switched_at_; }
  const GradientRegretMonitor& monitor() const { return monitor_; }

 private:
  std::size_t d_;
  std::unique_ptr<Learner> primary_;
  std::unique_ptr<Learner> fallback_;
  GradientRegretMonitor monitor_;
  std::optional<MixedStrategy> last_played_;
  std::optional<std::size_t> switched_at_;
};

// -- Trajectory ---------------------------------------------------------------

struct RoundRecord {
  std::size_t t = 0;
  StrategyProfile played;
  // u_i(., played_{-i}): what each player observed.
  std::vector<UtilityVector> utilities;
  // Inner iterates when every player runs a wrapper; empty otherwise.
  StrategyProfile inner;
  // u_i(., inner_{-i}); empty when `inner` is.
  std::vector<UtilityVector> inner_utilities;
  double tgap_played = 0.0;
  // TGap of the uniform running average of the inner iterates (the played
  // iterates for learners without a wrapper).
  double tgap_inner_avg = 0.0;
  // max_a u[a] - <u, x> per player.
  std::vector<double> instant_regret;
};

struct TrajectoryMeta {
  std::string game;
  std::vector<std::string> algorithms;
  std::vector<double> etas;
  std::uint64_t seed = 0;
  std::string weight_rule;
  std::vector<std::optional<std::size_t>> switched_at;
};

struct Trajectory {
  TrajectoryMeta meta;
  std::vector<RoundRecord> rounds;

  int num_players() const {
    return rounds.empty() ? 0 : static_cast<int>(rounds.front().played.size());
  }
  bool has_inner() const {
    return !rounds.empty() && !rounds.front().inner.empty();
  }
};

// Simultaneous-move loop with full gradient feedback. The seed is recorded
// for provenance; the gradient dynamics themselves are deterministic.
Trajectory run_full_feedback(const PolymatrixGame& game,
                             const std::vector<LearnerSpec>& specs,
                             std::size_t T, std::uint64_t seed = 0);

// Same loop over caller-owned learners.
Trajectory run_full_feedback(const PolymatrixGame& game,
                             std::vector<std::unique_ptr<Learner>>& learners,
                             std::size_t T, std::uint64_t seed = 0);

// -- Regret -------------------------------------------------------------------

// Running regret series, one entry per round, per player.
struct RegretSeries {
  // External regret of the played sequence against observed utilities.
  std::vector<std::vector<double>> reg;
  // Dynamic regret: cumulative instant regret.
  std::vector<std::vector<double>> dreg;
  // External regret of the inner iterates against inner utilities; empty
  // when the trajectory has no inner iterates.
  std::vector<std::vector<double>> reg_inner;
};

RegretSeries regret_series(const Trajectory& traj);

struct RegretReport {
  std::vector<double> reg;
  std::vector<double> dreg;
  std::vector<double> reg_inner;
};

// Final-round values of regret_series.
RegretReport regret_report(const Trajectory& traj);

// Columns: t, tgap_last, tgap_avg, reg_1..reg_n, dreg_1..dreg_n.
void WriteTrajectoryCsv(const Trajectory& traj, std::ostream& out);

}  // namespace a2l

#endif  // A2L_DYNAMICS_H_
