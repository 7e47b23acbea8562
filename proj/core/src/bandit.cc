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
#include <numbers>
#include <sstream>
#include <utility>

#include "format.h"

namespace a2l {

Rng PlayerStream(std::uint64_t seed, int player, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(player), tag};
  return Rng(seq);
}

std::size_t SampleAction(const MixedStrategy& x, Rng& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (x[a] <= 0.0) continue;
    acc += x[a];
    last = a;
    if (u < acc) return a;
  }
  return last;
}

// -- Schedule -----------------------------------------------------------------

EpochSchedule EpochSchedule::TheoryD(std::size_t d) {
  EpochSchedule s;
  s.mode = Mode::kTheoryD;
  s.d = d;
  return s;
}

EpochSchedule EpochSchedule::Custom(double scale, double power) {
  if (!(scale > 0.0) || !std::isfinite(power)) {
    throw std::invalid_argument("custom schedule needs scale > 0");
  }
  EpochSchedule s;
  s.mode = Mode::kCustom;
  s.scale = scale;
  s.power = power;
  return s;
}

EpochSchedule EpochSchedule::Parse(const std::string& text, std::size_t d) {
  if (text == "theory") return Theory();
  if (text == "theory_d") return TheoryD(d);
  if (text.rfind("custom:", 0) == 0) {
    const std::string rest = text.substr(7);
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
      try {
        return Custom(std::stod(rest.substr(0, colon)),
                      std::stod(rest.substr(colon + 1)));
      } catch (const std::logic_error&) {
      }
    }
  }
  throw std::invalid_argument("invalid schedule '" + text +
                              "' (expected theory, theory_d, custom:<scale>:<power>)");
}

std::string EpochSchedule::ToString() const {
  switch (mode) {
    case Mode::kTheory:
      return "theory";
    case Mode::kTheoryD:
      return "theory_d";
    case Mode::kCustom:
      return "custom:" + internal::FormatDouble(scale) + ":" +
             internal::FormatDouble(power);
  }
  return "";
}

std::uint64_t EpochSchedule::B(std::size_t t) const {
  const auto t4 = static_cast<std::uint64_t>(t) * t * t * t;
  switch (mode) {
    case Mode::kTheory:
      return t4;
    case Mode::kTheoryD:
      return static_cast<std::uint64_t>(d) * t4;
    case Mode::kCustom: {
      const double b = std::round(scale * std::pow(static_cast<double>(t), power));
      return b < 1.0 ? 1 : static_cast<std::uint64_t>(b);
    }
  }
  return 1;
}

// -- Estimation ---------------------------------------------------------------

MixedStrategy mix_uniform(const MixedStrategy& avg, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("mixing weight must lie in [0, 1]");
  }
  const std::size_t d = avg.size();
  std::vector<double> out(d);
  for (std::size_t a = 0; a < d; ++a) {
    out[a] = (1.0 - eps) * avg[a] + eps / static_cast<double>(d);
  }
  return MixedStrategy(std::move(out));
}

EpochEstimate EpochEstimate::Zero(std::size_t d) {
  EpochEstimate e;
  e.sums.assign(d, 0.0);
  e.counts.assign(d, 0);
  e.estimate = UtilityVector::Zeros(d);
  return e;
}

EpochEstimate estimate_epoch(std::span<const std::size_t> actions,
                             std::span<const double> rewards, std::size_t d) {
  if (actions.size() != rewards.size()) {
    throw DataError("sample log has " + std::to_string(actions.size()) +
                    " actions but " + std::to_string(rewards.size()) + " rewards");
  }
  EpochEstimate e = EpochEstimate::Zero(d);
  for (std::size_t k = 0; k < actions.size(); ++k) {
    const double r = rewards[k];
    if (!(r >= 0.0 && r <= 1.0)) {
      throw DataError("reward " + internal::FormatDouble(r) + " at sample " +
                      std::to_string(k) + " lies outside [0, 1]");
    }
    if (actions[k] >= d) {
      throw DataError("action " + std::to_string(actions[k]) + " out of range");
    }
    e.sums[actions[k]] += r;
    ++e.counts[actions[k]];
  }
  std::vector<double> est(d, 0.0);
  for (std::size_t a = 0; a < d; ++a) {
    if (e.counts[a] > 0) {
      est[a] = e.sums[a] / static_cast<double>(e.counts[a]);
    } else {
      e.unsampled.push_back(a);
    }
  }
  e.estimate = UtilityVector(std::move(est));
  return e;
}

UtilityVector recover_estimated(std::size_t t, const EpochEstimate& current,
                                const EpochEstimate& previous) {
  if (t < 1) throw std::invalid_argument("epochs are numbered from 1");
  const std::size_t d = current.estimate.size();
  if (previous.estimate.size() != d) {
    throw DimensionError("previous estimate", -1, d, previous.estimate.size());
  }
  const double tt = static_cast<double>(t);
  std::vector<double> u(d);
  for (std::size_t a = 0; a < d; ++a) {
    u[a] = tt * current.estimate[a] - (tt - 1.0) * previous.estimate[a];
  }
  return UtilityVector(std::move(u));
}

double RenormalizeReward(double r, int num_players) {
  const double span = std::max(1, num_players - 1);
  return (r + span) / (2.0 * span);
}

UtilityVector RenormalizeUtility(const UtilityVector& u, int num_players) {
  std::vector<double> v(u.size());
  for (std::size_t a = 0; a < u.size(); ++a) v[a] = RenormalizeReward(u[a], num_players);
  return UtilityVector(std::move(v));
}

// -- Importance-weighted regret monitor ---------------------------------------

UtilityVector ImportanceWeightedEstimate(std::span<const std::size_t> actions,
                                         std::span<const double> rewards,
                                         const MixedStrategy& x) {
  if (actions.size() != rewards.size()) {
    throw DataError("sample log lengths differ");
  }
  std::vector<double> u(x.size(), 0.0);
  for (std::size_t k = 0; k < actions.size(); ++k) {
    u[actions[k]] += rewards[k] / x[actions[k]];
  }
  return UtilityVector(std::move(u));
}

double IwConfidenceRadius(std::size_t d, std::span<const std::uint64_t> B,
                          double delta) {
  double s = 0.0;
  for (std::size_t k = 0; k < B.size(); ++k) {
    const double kk = static_cast<double>(k + 1);
    s += kk * kk * static_cast<double>(B[k]);
  }
  const double t = static_cast<double>(B.size());
  const double dd = static_cast<double>(d);
  return 4.0 * dd * std::sqrt(s) *
         std::log(std::numbers::pi * std::numbers::pi * dd * t * t / (3.0 * delta));
}

IwRegretMonitor::IwRegretMonitor(std::size_t d, double delta, double c)
    : d_(d), delta_(delta), c_(c), cum_(d, 0.0) {}

void IwRegretMonitor::AddSample(std::size_t action, double reward,
                                const MixedStrategy& x) {
  cum_[action] += reward / x[action];
  // <U~, x> collapses to the realized reward.
  realized_ += reward;
}

IwMonitorStatus IwRegretMonitor::EndEpoch(std::uint64_t B) {
  epoch_lengths_.push_back(B);
  total_rounds_ += B;
  IwMonitorStatus s;
  s.reg_estimate = *std::max_element(cum_.begin(), cum_.end()) - realized_;
  s.confidence_radius = IwConfidenceRadius(d_, epoch_lengths_, delta_);
  s.threshold = c_ * std::pow(static_cast<double>(total_rounds_), 0.8);
  s.switch_now = s.reg_estimate > s.threshold;
  return s;
}

// -- Agents -------------------------------------------------------------------

Exp3::Exp3(std::size_t d)
    : d_(d), cum_loss_(d, 0.0), x_(MixedStrategy::Uniform(d)) {}

std::size_t Exp3::Act(Rng& rng) {
  last_action_ = SampleAction(x_, rng);
  return last_action_;
}

void Exp3::Reward(double r) {
  cum_loss_[last_action_] += (1.0 - r) / x_[last_action_];
  ++k_;
  Refresh();
}

void Exp3::Refresh() {
  const double eta = std::sqrt(std::log(static_cast<double>(d_)) /
                               (static_cast<double>(d_) * static_cast<double>(k_ + 1)));
  x_ = Softmax(cum_loss_, -eta);
}

A2LOmwuBandit::A2LOmwuBandit(std::size_t d, double eta, EpochSchedule schedule,
                             bool monitor, double delta, double monitor_c)
    : d_(d),
      schedule_(schedule),
      state_(LearnerState::Initial(d, eta)),
      inner_sum_(d, 0.0),
      previous_(EpochEstimate::Zero(d)) {
  if (monitor) monitor_.emplace(d, delta, monitor_c);
}

std::string A2LOmwuBandit::name() const {
  return monitor_ ? "a2l-omwu-bandit+monitor" : "a2l-omwu-bandit";
}

void A2LOmwuBandit::BeginEpoch(std::size_t t, std::uint64_t B) {
  if (t != t_ + 1) {
    throw ProtocolError("epoch " + std::to_string(t) + " follows epoch " +
                        std::to_string(t_));
  }
  t_ = t;
  actions_.clear();
  rewards_.clear();
  if (pending_switch_) {
    fallback_ = std::make_unique<Exp3>(d_);
    pending_switch_ = false;
  }
  if (fallback_) {
    inner_.reset();
    avg_.reset();
    mixed_.reset();
    return;
  }
  actions_.reserve(B);
  rewards_.reserve(B);
  MixedStrategy x = omwu_next(state_);
  std::vector<double> avg(d_);
  for (std::size_t a = 0; a < d_; ++a) {
    inner_sum_[a] += x[a];
    avg[a] = inner_sum_[a] / static_cast<double>(t);
  }
  inner_ = std::move(x);
  avg_ = MixedStrategy::FromWeights(std::move(avg));
  mixed_ = mix_uniform(*avg_, schedule_.eps(t));
}

const MixedStrategy& A2LOmwuBandit::strategy() const {
  if (fallback_) return fallback_->strategy();
  if (!mixed_) throw ProtocolError("strategy() before BeginEpoch()");
  return *mixed_;
}

std::size_t A2LOmwuBandit::Act(Rng& rng) {
  if (fallback_) return fallback_->Act(rng);
  if (!mixed_) throw ProtocolError("Act() before BeginEpoch()");
  if (actions_.size() != rewards_.size()) {
    throw ProtocolError("Act() called twice without Reward()");
  }
  actions_.push_back(SampleAction(*mixed_, rng));
  return actions_.back();
}

void A2LOmwuBandit::Reward(double r) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw DataError("reward " + internal::FormatDouble(r) + " lies outside [0, 1]");
  }
  if (fallback_) {
    fallback_->Reward(r);
    return;
  }
  if (rewards_.size() + 1 != actions_.size()) {
    throw ProtocolError("Reward() without a preceding Act()");
  }
  rewards_.push_back(r);
  if (monitor_) monitor_->AddSample(actions_.back(), r, *mixed_);
}

AgentEpochReport A2LOmwuBandit::EndEpoch() {
  AgentEpochReport report;
  if (fallback_) {
    report.switched = true;
    return report;
  }
  EpochEstimate est = estimate_epoch(actions_, rewards_, d_);
  UtilityVector u_hat = recover_estimated(t_, est, previous_);
  observe(state_, u_hat);
  previous_ = est;
  if (monitor_) {
    IwMonitorStatus s = monitor_->EndEpoch(actions_.size());
    if (s.switch_now) {
      pending_switch_ = true;
      report.switched = true;
    }
    report.monitor = s;
  }
  report.estimate = std::move(est);
  report.recovered = std::move(u_hat);
  return report;
}

std::optional<MixedStrategy> A2LOmwuBandit::InnerIterate() const {
  return inner_;
}

std::optional<MixedStrategy> A2LOmwuBandit::Average() const { return avg_; }

ScriptedBanditAgent::ScriptedBanditAgent(std::vector<MixedStrategy> script)
    : script_(std::move(script)) {
  if (script_.empty()) throw std::invalid_argument("empty script");
}

void ScriptedBanditAgent::BeginEpoch(std::size_t t, std::uint64_t) {
  current_ = (t - 1) % script_.size();
}

std::size_t ScriptedBanditAgent::Act(Rng& rng) {
  return SampleAction(script_[current_], rng);
}

EpochSample SampleEpoch(const PolymatrixGame& game,
                        const StrategyProfile& profile, std::uint64_t B,
                        std::vector<Rng>& rngs) {
  game.ValidateProfile(profile);
  const int n = game.num_players();
  EpochSample s;
  s.actions.assign(n, {});
  s.rewards.assign(n, {});
  std::vector<std::size_t> a(n);
  for (std::uint64_t k = 0; k < B; ++k) {
    for (int i = 0; i < n; ++i) a[i] = SampleAction(profile[i], rngs[i]);
    for (int i = 0; i < n; ++i) {
      s.actions[i].push_back(a[i]);
      s.rewards[i].push_back(RenormalizeReward(game.PurePayoff(i, a), n));
    }
  }
  return s;
}

// -- Runs ---------------------------------------------------------------------

std::vector<std::string> CheckBanditConditions(const PolymatrixGame& game,
                                               const BanditConfig& config) {
  std::vector<std::string> out;
  if (!config.schedule.certified()) {
    out.push_back("custom schedule " + config.schedule.ToString() +
                  " does not guarantee B_t >= t^4");
  }
  const double limit = 1.0 / (6.0 * game.num_players());
  if (config.eta > limit) {
    out.push_back("step size " + internal::FormatDouble(config.eta) +
                  " exceeds 1/(6n) = " + internal::FormatDouble(limit));
  }
  if (!game.zero_sum()) out.push_back("game is not zero-sum");
  return out;
}

namespace {

// Running sums for the regret-with-error audit of one player.
struct AuditAccumulator {
  std::vector<double> cum_true;
  double realized = 0.0;
  std::vector<double> prev_u;
  std::optional<MixedStrategy> prev_x;
  double sum_du2 = 0.0;
  double sum_dx2 = 0.0;
  double sum_scaled_err2 = 0.0;  // sum over earlier epochs of ||t Delta^t||^2
  double sum_eps = 0.0;
  double prev_scaled_err = 0.0;  // (t-1) ||Delta^{t-1}||
};

}  // namespace

BanditTrajectory run_bandit(const PolymatrixGame& game,
                            std::vector<std::unique_ptr<BanditAgent>>& agents,
                            const BanditConfig& config, std::uint64_t seed) {
  const int n = game.num_players();
  if (static_cast<int>(agents.size()) != n) {
    throw DimensionError("bandit agent count", -1, static_cast<std::size_t>(n),
                         agents.size());
  }
  for (int i = 0; i < n; ++i) {
    if (agents[i]->num_actions() != game.num_actions(i)) {
      throw DimensionError("bandit agent action count", i, game.num_actions(i),
                           agents[i]->num_actions());
    }
  }
  if (config.epochs < 1) throw std::invalid_argument("need at least one epoch");
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }

  BanditTrajectory traj;
  traj.game = game.name();
  traj.seed = seed;
  traj.schedule = config.schedule.ToString();
  traj.eta = config.eta;
  traj.delta = config.delta;
  traj.warnings = CheckBanditConditions(game, config);
  traj.certified = traj.warnings.empty();
  for (const auto& a : agents) traj.agents.push_back(a->name());

  std::vector<Rng> rngs;
  for (int i = 0; i < n; ++i) rngs.push_back(PlayerStream(seed, i, 1));

  const double eta = config.eta;
  const double dmax = static_cast<double>(game.dimension());
  std::vector<AuditAccumulator> acc(n);
  for (int i = 0; i < n; ++i) acc[i].cum_true.assign(game.num_actions(i), 0.0);
  bool auditing = true;
  std::uint64_t rounds = 0;
  std::vector<std::size_t> actions(n);

  for (std::size_t t = 1; t <= config.epochs; ++t) {
    BanditEpochRecord rec;
    rec.t = t;
    rec.B = config.schedule.B(t);
    rec.eps = config.schedule.eps(t);
    for (auto& a : agents) a->BeginEpoch(t, rec.B);

    StrategyProfile mixed;
    StrategyProfile inner;
    bool all_inner = true;
    for (int i = 0; i < n; ++i) {
      mixed.push_back(agents[i]->strategy());
      auto x = agents[i]->InnerIterate();
      if (x) {
        inner.push_back(*x);
      } else {
        all_inner = false;
      }
      PlayerEpochRecord p{agents[i]->strategy(), x, agents[i]->Average(),
                          std::nullopt, std::nullopt, std::nullopt,
                          std::nullopt, false};
      rec.players.push_back(std::move(p));
    }
    rec.tgap_mixed = total_gap(game, mixed);
    if (config.log_actions) rec.actions.assign(n, {});

    for (std::uint64_t k = 0; k < rec.B; ++k) {
      for (int i = 0; i < n; ++i) actions[i] = agents[i]->Act(rngs[i]);
      for (int i = 0; i < n; ++i) {
        agents[i]->Reward(RenormalizeReward(game.PurePayoff(i, actions), n));
        if (config.log_actions) rec.actions[i].push_back(actions[i]);
      }
    }
    rounds += rec.B;
    rec.rounds_end = rounds;

    std::vector<AgentEpochReport> reports;
    for (auto& a : agents) reports.push_back(a->EndEpoch());
    for (int i = 0; i < n; ++i) {
      rec.players[i].estimate = reports[i].estimate;
      rec.players[i].recovered = reports[i].recovered;
      rec.players[i].monitor = reports[i].monitor;
      rec.players[i].switched = reports[i].switched;
    }

    auditing = auditing && all_inner;
    for (int i = 0; i < n && auditing; ++i) {
      if (!reports[i].estimate || !reports[i].recovered) auditing = false;
    }
    if (auditing) {
      const double tt = static_cast<double>(t);
      for (int i = 0; i < n; ++i) {
        AuditAccumulator& ac = acc[i];
        const std::size_t d = game.num_actions(i);
        const UtilityVector u_eps = RenormalizeUtility(utility_vector(game, i, mixed), n);
        const UtilityVector u_true = RenormalizeUtility(utility_vector(game, i, inner), n);
        const UtilityVector& est = reports[i].estimate->estimate;
        const UtilityVector& u_hat = *reports[i].recovered;
        EpochAudit au;
        au.err_avg = (est - u_eps).MaxAbs();
        au.err_recovered = (u_hat - u_true).MaxAbs();

        const double scaled = tt * au.err_avg;
        au.d1_bound = scaled + ac.prev_scaled_err + 2.0 * rec.eps;
        au.d1_sq_bound = 3.0 * scaled * scaled +
                         3.0 * ac.prev_scaled_err * ac.prev_scaled_err +
                         12.0 * rec.eps * rec.eps;
        au.d1_slack = au.d1_bound - au.err_recovered;
        au.d1_sq_slack = au.d1_sq_bound - au.err_recovered * au.err_recovered;

        const double B = static_cast<double>(rec.B);
        au.d3_bound = 2.0 * std::sqrt(dmax * std::log(B * tt * tt / config.delta) /
                                      (B * rec.eps));
        au.d3_violated = au.err_avg > au.d3_bound;

        const MixedStrategy& x = inner[i];
        for (std::size_t a = 0; a < d; ++a) ac.cum_true[a] += u_true[a];
        ac.realized += u_true.Dot(x);
        au.regret = *std::max_element(ac.cum_true.begin(), ac.cum_true.end()) -
                    ac.realized;
        if (ac.prev_u.empty()) ac.prev_u.assign(d, 0.0);
        const double du = LInfDistance(u_true.values(), ac.prev_u);
        ac.sum_du2 += du * du;
        ac.prev_u = u_true.vec();
        if (ac.prev_x) {
          const double dx = L1Distance(x.probs(), ac.prev_x->probs());
          ac.sum_dx2 += dx * dx;
        }
        ac.prev_x = x;
        ac.sum_eps += rec.eps;
        au.d2_rhs = std::log(static_cast<double>(d)) / eta + 4.0 * eta * ac.sum_du2 -
                    ac.sum_dx2 / (8.0 * eta) + 2.0 * scaled +
                    26.0 * eta * ac.sum_scaled_err2 + 4.0 * ac.sum_eps +
                    16.0 * std::numbers::pi * std::numbers::pi * eta;
        au.d2_slack = au.d2_rhs - au.regret;
        ac.sum_scaled_err2 += scaled * scaled;
        ac.prev_scaled_err = scaled;
        rec.players[i].audit = au;
      }
    }
    traj.epochs.push_back(std::move(rec));
  }
  return traj;
}

BanditTrajectory run_bandit(const PolymatrixGame& game,
                            const BanditConfig& config, std::uint64_t seed) {
  std::vector<std::unique_ptr<BanditAgent>> agents;
  for (int i = 0; i < game.num_players(); ++i) {
    agents.push_back(std::make_unique<A2LOmwuBandit>(
        game.num_actions(i), config.eta, config.schedule, config.monitor,
        config.delta, config.monitor_c));
  }
  return run_bandit(game, agents, config, seed);
}

std::vector<EstimationAuditRow> estimation_error_audit(
    const BanditTrajectory& traj) {
  std::vector<EstimationAuditRow> rows;
  for (const BanditEpochRecord& e : traj.epochs) {
    for (std::size_t i = 0; i < e.players.size(); ++i) {
      const auto& au = e.players[i].audit;
      if (!au) continue;
      rows.push_back({e.t, static_cast<int>(i), au->err_avg, au->d3_bound,
                      au->d3_violated});
    }
  }
  return rows;
}

void WriteBanditCsv(const BanditTrajectory& traj, std::ostream& out) {
  using internal::FormatDouble;
  const std::size_t n = traj.epochs.empty() ? 0 : traj.epochs.front().players.size();
  out << "t,B_t,eps_t,T_t,tgap_mixed_avg";
  for (std::size_t i = 1; i <= n; ++i) {
    out << ",err_" << i << ",bound_" << i << ",unsampled_" << i << ",violated_" << i
        << ",switched_" << i;
  }
  out << '\n';
  for (const BanditEpochRecord& e : traj.epochs) {
    out << e.t << ',' << e.B << ',' << FormatDouble(e.eps) << ',' << e.rounds_end
        << ',' << FormatDouble(e.tgap_mixed);
    for (const PlayerEpochRecord& p : e.players) {
      if (p.audit) {
        out << ',' << FormatDouble(p.audit->err_avg) << ','
            << FormatDouble(p.audit->d3_bound);
      } else {
        out << ",,";
      }
      out << ',' << (p.estimate ? p.estimate->unsampled.size() : 0) << ','
          << (p.audit && p.audit->d3_violated ? 1 : 0) << ','
          << (p.switched ? 1 : 0);
    }
    out << '\n';
  }
}

}  // namespace a2l
