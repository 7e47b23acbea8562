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

#ifndef A2L_BANDIT_H_
#define A2L_BANDIT_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "a2l/game.h"
#include "a2l/learners.h"

namespace a2l {

// Rewards outside [0, 1] after renormalization, or malformed sample logs.
class DataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Rng = std::mt19937_64;

// Independent per-player stream derived from a run seed.
Rng PlayerStream(std::uint64_t seed, int player, std::uint32_t tag);
// Inverse-CDF draw from x; stable across platforms for a given Rng state.
std::size_t SampleAction(const MixedStrategy& x, Rng& rng);

// -- Schedule -----------------------------------------------------------------

struct EpochSchedule {
  enum class Mode { kTheory, kTheoryD, kCustom };
  Mode mode = Mode::kTheory;
  std::size_t d = 1;     // kTheoryD: B_t = d t^4
  double scale = 1.0;    // kCustom: B_t = max(1, round(scale * t^power))
  double power = 4.0;

  static EpochSchedule Theory() { return {}; }
  static EpochSchedule TheoryD(std::size_t d);
  static EpochSchedule Custom(double scale, double power);
  // "theory", "theory_d", "custom:<scale>:<power>"; `d` is used by theory_d.
  static EpochSchedule Parse(const std::string& text, std::size_t d);
  std::string ToString() const;

  std::uint64_t B(std::size_t t) const;
  double eps(std::size_t t) const { return 1.0 / static_cast<double>(t); }
  bool certified() const { return mode != Mode::kCustom; }
};

// -- Estimation ---------------------------------------------------------------

// (1 - eps) avg + eps uniform.
MixedStrategy mix_uniform(const MixedStrategy& avg, double eps);

struct EpochEstimate {
  std::vector<double> sums;
  std::vector<std::uint64_t> counts;
  UtilityVector estimate;
  std::vector<std::size_t> unsampled;

  static EpochEstimate Zero(std::size_t d);
};

// Per-action empirical means; unsampled actions get 0 and are flagged.
// Throws DataError on a reward outside [0, 1] or mismatched lengths.
EpochEstimate estimate_epoch(std::span<const std::size_t> actions,
                             std::span<const double> rewards, std::size_t d);

// t * current - (t - 1) * previous.
UtilityVector recover_estimated(std::size_t t, const EpochEstimate& current,
                                const EpochEstimate& previous);

// r -> (r + (n - 1)) / (2 (n - 1)); maps [-(n-1), n-1] onto [0, 1].
double RenormalizeReward(double r, int num_players);
UtilityVector RenormalizeUtility(const UtilityVector& u, int num_players);

// -- Importance-weighted regret monitor ---------------------------------------

// U~[b] = sum_j r_j 1[b = a_j] / x[b].
UtilityVector ImportanceWeightedEstimate(std::span<const std::size_t> actions,
                                         std::span<const double> rewards,
                                         const MixedStrategy& x);

// 4 d sqrt(sum_{k<=t} k^2 B_k) log(pi^2 d t^2 / (3 delta)).
double IwConfidenceRadius(std::size_t d, std::span<const std::uint64_t> B,
                          double delta);

struct IwMonitorStatus {
  double reg_estimate = 0.0;
  double confidence_radius = 0.0;
  double threshold = 0.0;  // c * T_t^{4/5}
  bool switch_now = false;
};

// Player-local estimated regret over epochs. Decides "switch" when the
// estimate exceeds c * T_t^{4/5}; the confidence radius is reported only.
class IwRegretMonitor {
 public:
  IwRegretMonitor(std::size_t d, double delta, double c);

  void AddSample(std::size_t action, double reward, const MixedStrategy& x);
  IwMonitorStatus EndEpoch(std::uint64_t B);

  std::uint64_t total_rounds() const { return total_rounds_; }
  const std::vector<double>& cum_estimate() const { return cum_; }

 private:
  std::size_t d_;
  double delta_;
  double c_;
  std::vector<double> cum_;
  double realized_ = 0.0;
  std::vector<std::uint64_t> epoch_lengths_;
  std::uint64_t total_rounds_ = 0;
};

// -- Agents -------------------------------------------------------------------

struct AgentEpochReport {
  // Honest agents fill these.
  std::optional<EpochEstimate> estimate;
  std::optional<UtilityVector> recovered;
  std::optional<IwMonitorStatus> monitor;
  bool switched = false;  // fallback active from the next epoch on
};

// Bandit-feedback player. Per epoch: BeginEpoch, then Act/Reward for each
// round, then EndEpoch.
class BanditAgent {
 public:
  virtual ~BanditAgent() = default;

  virtual std::size_t num_actions() const = 0;
  virtual std::string name() const = 0;
  virtual void BeginEpoch(std::size_t t, std::uint64_t B) = 0;
  // Strategy the next action is drawn from.
  virtual const MixedStrategy& strategy() const = 0;
  virtual std::size_t Act(Rng& rng) = 0;
  virtual void Reward(double r) = 0;
  virtual AgentEpochReport EndEpoch() = 0;
  // x^t of the inner OMWU this epoch, for honest agents still running it.
  virtual std::optional<MixedStrategy> InnerIterate() const {
    return std::nullopt;
  }
  // x-bar^t before mixing.
  virtual std::optional<MixedStrategy> Average() const { return std::nullopt; }
};

// Loss-based importance-weighted MWU with eta_k = sqrt(log d / (d k)), k the
// round count since it took over.
class Exp3 {
 public:
  explicit Exp3(std::size_t d);

  const MixedStrategy& strategy() const { return x_; }
  std::size_t Act(Rng& rng);
  void Reward(double r);

 private:
  void Refresh();

  std::size_t d_;
  std::vector<double> cum_loss_;
  MixedStrategy x_;
  std::size_t last_action_ = 0;
  std::uint64_t k_ = 0;
};

// A2L-OMWU with epoch-wise estimation and optional IW-monitored fallback.
class A2LOmwuBandit : public BanditAgent {
 public:
  A2LOmwuBandit(std::size_t d, double eta, EpochSchedule schedule,
                bool monitor = false, double delta = 0.05, double monitor_c = 4.0);

  std::size_t num_actions() const override { return d_; }
  std::string name() const override;
  void BeginEpoch(std::size_t t, std::uint64_t B) override;
  const MixedStrategy& strategy() const override;
  std::size_t Act(Rng& rng) override;
  void Reward(double r) override;
  AgentEpochReport EndEpoch() override;
  std::optional<MixedStrategy> InnerIterate() const override;
  std::optional<MixedStrategy> Average() const override;

  bool switched() const { return fallback_ != nullptr; }
  const LearnerState& inner_state() const { return state_; }

 private:
  std::size_t d_;
  EpochSchedule schedule_;
  LearnerState state_;
  std::size_t t_ = 0;
  std::vector<double> inner_sum_;
  std::optional<MixedStrategy> inner_;
  std::optional<MixedStrategy> avg_;
  std::optional<MixedStrategy> mixed_;
  EpochEstimate previous_;
  std::vector<std::size_t> actions_;
  std::vector<double> rewards_;
  std::optional<IwRegretMonitor> monitor_;
  std::unique_ptr<Exp3> fallback_;
  bool pending_switch_ = false;
};

// Replays one fixed mixed strategy per epoch, cyclically.
class ScriptedBanditAgent : public BanditAgent {
 public:
  explicit ScriptedBanditAgent(std::vector<MixedStrategy> script);

  std::size_t num_actions() const override { return script_.front().size(); }
  std::string name() const override { return "scripted"; }
  void BeginEpoch(std::size_t t, std::uint64_t B) override;
  const MixedStrategy& strategy() const override { return script_[current_]; }
  std::size_t Act(Rng& rng) override;
  void Reward(double) override {}
  AgentEpochReport EndEpoch() override { return {}; }

 private:
  std::vector<MixedStrategy> script_;
  std::size_t current_ = 0;
};

// Draws B rounds of independent actions from a fixed profile. Rewards are
// renormalized into [0, 1]. Used for Monte-Carlo checks of the estimators.
struct EpochSample {
  std::vector<std::vector<std::size_t>> actions;  // [player][round]
  std::vector<std::vector<double>> rewards;       // [player][round]
};
EpochSample SampleEpoch(const PolymatrixGame& game,
                        const StrategyProfile& profile, std::uint64_t B,
                        std::vector<Rng>& rngs);

// -- Runs ---------------------------------------------------------------------

struct BanditConfig {
  EpochSchedule schedule;
  double eta = 1.0 / 12.0;
  std::size_t epochs = 12;
  double delta = 0.05;
  bool monitor = false;
  double monitor_c = 4.0;
  // Record the sampled actions of every round (large).
  bool log_actions = false;
};

// Offline-truth diagnostics, in renormalized units.
struct EpochAudit {
  double err_avg = 0.0;       // ||Delta^t||_inf = ||U^t - ubar^t_eps||_inf
  double err_recovered = 0.0; // ||delta^t||_inf = ||u-hat^t - u^t||_inf
  double d1_bound = 0.0;      // ||t Delta^t|| + ||(t-1) Delta^{t-1}|| + 2 eps_t
  double d1_sq_bound = 0.0;   // 3||.||^2 + 3||.||^2 + 12 eps_t^2
  double d1_slack = 0.0;
  double d1_sq_slack = 0.0;
  double d3_bound = 0.0;      // 2 sqrt(d log(B t^2 / delta) / (B eps))
  bool d3_violated = false;
  double regret = 0.0;        // inner iterates vs true utilities, prefix
  double d2_rhs = 0.0;
  double d2_slack = 0.0;
};

struct PlayerEpochRecord {
  MixedStrategy mixed;                   // played this epoch (at its start)
  std::optional<MixedStrategy> inner;
  std::optional<MixedStrategy> average;
  std::optional<EpochEstimate> estimate;
  std::optional<UtilityVector> recovered;
  std::optional<IwMonitorStatus> monitor;
  std::optional<EpochAudit> audit;
  bool switched = false;
};

struct BanditEpochRecord {
  std::size_t t = 0;
  std::uint64_t B = 0;
  double eps = 0.0;
  std::uint64_t rounds_end = 0;  // T_t
  double tgap_mixed = 0.0;       // TGap of the played profile, original units
  std::vector<PlayerEpochRecord> players;
  std::vector<std::vector<std::size_t>> actions;  // only with log_actions
};

struct BanditTrajectory {
  std::string game;
  std::uint64_t seed = 0;
  std::string schedule;
  double eta = 0.0;
  double delta = 0.0;
  bool certified = true;
  std::vector<std::string> warnings;
  std::vector<std::string> agents;
  std::vector<BanditEpochRecord> epochs;
};

// Every player runs A2LOmwuBandit. Audits are filled when every agent still
// runs its inner OMWU at that epoch.
BanditTrajectory run_bandit(const PolymatrixGame& game,
                            const BanditConfig& config, std::uint64_t seed);

BanditTrajectory run_bandit(const PolymatrixGame& game,
                            std::vector<std::unique_ptr<BanditAgent>>& agents,
                            const BanditConfig& config, std::uint64_t seed);

// Theory-mode conditions that hold (empty) or fail (messages).
std::vector<std::string> CheckBanditConditions(const PolymatrixGame& game,
                                               const BanditConfig& config);

struct EstimationAuditRow {
  std::size_t t = 0;
  int player = 0;
  double err = 0.0;
  double bound = 0.0;
  bool violated = false;
};

std::vector<EstimationAuditRow> estimation_error_audit(
    const BanditTrajectory& traj);

// Columns: t, B_t, eps_t, T_t, tgap_mixed_avg, then per player
// err_i, bound_i, unsampled_i, violated_i, switched_i.
void WriteBanditCsv(const BanditTrajectory& traj, std::ostream& out);

}  // namespace a2l

#endif  // A2L_BANDIT_H_
