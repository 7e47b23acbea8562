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

#include "a2l/dynamics.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "format.h"

namespace a2l {

// -- Learner construction -----------------------------------------------------

namespace {

LearnerState InitialState(const LearnerSpec& spec, std::size_t d) {
  return spec.prior ? LearnerState::Initial(d, spec.eta, *spec.prior)
                    : LearnerState::Initial(d, spec.eta);
}

}  // namespace

std::unique_ptr<Learner> MakeLearner(const LearnerSpec& spec, std::size_t d) {
  std::unique_ptr<Learner> learner;
  const std::string& a = spec.algorithm;
  if (a == "mwu") {
    learner = std::make_unique<Mwu>(InitialState(spec, d));
  } else if (a == "omwu") {
    learner = std::make_unique<Omwu>(InitialState(spec, d));
  } else if (a == "a2l-mwu") {
    learner = std::make_unique<A2L>(std::make_unique<Mwu>(InitialState(spec, d)),
                                    spec.weights);
  } else if (a == "a2l-omwu") {
    learner = std::make_unique<A2L>(
        std::make_unique<Omwu>(InitialState(spec, d)), spec.weights);
  } else if (a == "anytime-mwu") {
    learner = std::make_unique<AnytimeMwu>(d);
  } else if (a == "scripted") {
    learner = std::make_unique<ScriptedLearner>(spec.script, spec.hold);
    if (learner->num_actions() != d) {
      throw DimensionError("scripted learner", -1, d, learner->num_actions());
    }
  } else {
    throw std::invalid_argument(
        "unknown algorithm '" + a +
        "' (expected mwu, omwu, a2l-mwu, a2l-omwu, anytime-mwu, scripted)");
  }
  if (spec.robust) {
    if (!(spec.monitor_scale > 0.0)) {
      throw std::invalid_argument("robust learner needs a positive monitor scale");
    }
    learner = std::make_unique<RobustLearner>(std::move(learner),
                                              spec.monitor_scale, spec.monitor_c);
  }
  return learner;
}

LearnerSpec BareSpec(const LearnerSpec& spec) {
  LearnerSpec bare = spec;
  bare.robust = false;
  if (bare.algorithm == "a2l-mwu") bare.algorithm = "mwu";
  if (bare.algorithm == "a2l-omwu") bare.algorithm = "omwu";
  return bare;
}

double DefaultGradientEta(int num_players) {
  if (num_players < 2) return 0.5;
  return 1.0 / (2.0 * (num_players - 1));
}

double LastIterateScale(const PolymatrixGame& game, double eta) {
  double s = 0.0;
  for (std::size_t d : game.action_counts()) s += std::log(static_cast<double>(d));
  return s / eta;
}

// -- Robustness monitor -------------------------------------------------------

double GradientMonitorThreshold(double scale, double c, std::size_t t) {
  const double lt = t == 0 ? 0.0 : std::log(static_cast<double>(t));
  return c * scale * std::max(1.0, lt);
}

GradientRegretMonitor::GradientRegretMonitor(std::size_t d, double scale,
                                             double c)
    : cum_(d, 0.0), scale_(scale), c_(c) {}

MonitorDecision GradientRegretMonitor::Update(const MixedStrategy& x,
                                              const UtilityVector& u) {
  for (std::size_t a = 0; a < cum_.size(); ++a) cum_[a] += u[a];
  realized_ += u.Dot(x);
  ++t_;
  return regret() > threshold() ? MonitorDecision::kSwitch
                                : MonitorDecision::kContinue;
}

double GradientRegretMonitor::regret() const {
  return *std::max_element(cum_.begin(), cum_.end()) - realized_;
}

double GradientRegretMonitor::threshold() const {
  return GradientMonitorThreshold(scale_, c_, t_);
}

MonitorDecision robust_gradient_monitor(std::span<const MixedStrategy> xs,
                                        std::span<const UtilityVector> us,
                                        double scale, double c) {
  if (xs.size() != us.size()) {
    throw std::invalid_argument("monitor needs matching sequences");
  }
  if (xs.empty()) return MonitorDecision::kContinue;
  GradientRegretMonitor m(us.front().size(), scale, c);
  MonitorDecision decision = MonitorDecision::kContinue;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    if (m.Update(xs[t], us[t]) == MonitorDecision::kSwitch) {
      decision = MonitorDecision::kSwitch;
    }
  }
  return decision;
}

RobustLearner::RobustLearner(std::unique_ptr<Learner> primary, double scale,
                             double c)
    : d_(primary->num_actions()),
      primary_(std::move(primary)),
      monitor_(d_, scale, c) {}

RobustLearner::RobustLearner(const RobustLearner& other)
    : d_(other.d_),
      primary_(other.primary_->Clone()),
      fallback_(other.fallback_ ? other.fallback_->Clone() : nullptr),
      monitor_(other.monitor_),
      last_played_(other.last_played_),
      switched_at_(other.switched_at_) {}

MixedStrategy RobustLearner::Next() {
  if (last_played_) throw ProtocolError("Next() called twice without Observe()");
  last_played_ = fallback_ ? fallback_->Next() : primary_->Next();
  return *last_played_;
}

void RobustLearner::Observe(const UtilityVector& u) {
  if (!last_played_) throw ProtocolError("Observe() called before Next()");
  if (fallback_) {
    fallback_->Observe(u);
  } else {
    primary_->Observe(u);
    if (monitor_.Update(*last_played_, u) == MonitorDecision::kSwitch) {
      switched_at_ = monitor_.rounds();
      fallback_ = std::make_unique<AnytimeMwu>(d_);
    }
  }
  last_played_.reset();
}

std::unique_ptr<Learner> RobustLearner::Clone() const {
  return std::make_unique<RobustLearner>(*this);
}

std::string RobustLearner::name() const {
  return "robust-" + primary_->name();
}

std::optional<MixedStrategy> RobustLearner::InnerIterate() const {
  return fallback_ ? last_played_ : primary_->InnerIterate();
}

// -- Simulation loop ----------------------------------------------------------

namespace {

MixedStrategy MeanOf(const std::vector<double>& sum, std::size_t t) {
  std::vector<double> m(sum.size());
  for (std::size_t a = 0; a < sum.size(); ++a) m[a] = sum[a] / static_cast<double>(t);
  return MixedStrategy::FromWeights(std::move(m));
}

}  // namespace

Trajectory run_full_feedback(const PolymatrixGame& game,
                             std::vector<std::unique_ptr<Learner>>& learners,
                             std::size_t T, std::uint64_t seed) {
  const int n = game.num_players();
  if (static_cast<int>(learners.size()) != n) {
    throw DimensionError("learner count", -1, static_cast<std::size_t>(n),
                         learners.size());
  }
  if (T < 1) throw std::invalid_argument("T must be at least 1");
  for (int i = 0; i < n; ++i) {
    if (learners[i]->num_actions() != game.num_actions(i)) {
      throw DimensionError("learner action count", i, game.num_actions(i),
                           learners[i]->num_actions());
    }
  }

  Trajectory traj;
  traj.meta.game = game.name();
  traj.meta.seed = seed;
  for (const auto& l : learners) traj.meta.algorithms.push_back(l->name());
  traj.rounds.reserve(T);

  std::vector<std::vector<double>> avg_sum(n);
  for (int i = 0; i < n; ++i) avg_sum[i].assign(game.num_actions(i), 0.0);

  for (std::size_t t = 1; t <= T; ++t) {
    try {
      RoundRecord rec;
      rec.t = t;
      // Collect every strategy before any feedback is computed.
      rec.played.reserve(n);
      for (int i = 0; i < n; ++i) rec.played.push_back(learners[i]->Next());
      bool all_inner = true;
      for (int i = 0; i < n; ++i) {
        auto inner = learners[i]->InnerIterate();
        if (!inner) {
          all_inner = false;
          break;
        }
        rec.inner.push_back(std::move(*inner));
      }
      if (!all_inner) rec.inner.clear();

      rec.utilities.reserve(n);
      for (int i = 0; i < n; ++i) {
        rec.utilities.push_back(utility_vector(game, i, rec.played));
      }
      if (!rec.inner.empty()) {
        for (int i = 0; i < n; ++i) {
          rec.inner_utilities.push_back(utility_vector(game, i, rec.inner));
        }
      }

      double tgap = 0.0;
      rec.instant_regret.resize(n);
      for (int i = 0; i < n; ++i) {
        const double r = rec.utilities[i].Max() - rec.utilities[i].Dot(rec.played[i]);
        rec.instant_regret[i] = r;
        tgap += r;
      }
      rec.tgap_played = std::max(0.0, tgap);

      const StrategyProfile& base = rec.inner.empty() ? rec.played : rec.inner;
      StrategyProfile mean;
      mean.reserve(n);
      for (int i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < avg_sum[i].size(); ++a) avg_sum[i][a] += base[i][a];
        mean.push_back(MeanOf(avg_sum[i], t));
      }
      rec.tgap_inner_avg = total_gap(game, mean);

      for (int i = 0; i < n; ++i) learners[i]->Observe(rec.utilities[i]);
      traj.rounds.push_back(std::move(rec));
    } catch (const SimulationError&) {
      throw;
    } catch (const std::exception& e) {
      throw SimulationError(t, e.what());
    }
  }

  for (const auto& l : learners) {
    const auto* robust = dynamic_cast<const RobustLearner*>(l.get());
    traj.meta.switched_at.push_back(robust ? robust->switched_at() : std::nullopt);
  }
  return traj;
}

Trajectory run_full_feedback(const PolymatrixGame& game,
                             const std::vector<LearnerSpec>& specs,
                             std::size_t T, std::uint64_t seed) {
  const int n = game.num_players();
  if (static_cast<int>(specs.size()) != n) {
    throw DimensionError("learner spec count", -1, static_cast<std::size_t>(n),
                         specs.size());
  }
  std::vector<std::unique_ptr<Learner>> learners;
  for (int i = 0; i < n; ++i) {
    LearnerSpec spec = specs[i];
    if (spec.robust && spec.monitor_scale == 0.0) {
      spec.monitor_scale = LastIterateScale(game, spec.eta);
    }
    learners.push_back(MakeLearner(spec, game.num_actions(i)));
  }
  Trajectory traj = run_full_feedback(game, learners, T, seed);
  for (const LearnerSpec& s : specs) traj.meta.etas.push_back(s.eta);
  traj.meta.weight_rule = WeightRuleName(specs.front().weights);
  return traj;
}

// -- Regret -------------------------------------------------------------------

namespace {

std::vector<double> RunningRegret(const std::vector<RoundRecord>& rounds, int i,
                                  bool inner) {
  const std::size_t d = rounds.front().played[i].size();
  std::vector<double> cum(d, 0.0);
  double realized = 0.0;
  std::vector<double> out;
  out.reserve(rounds.size());
  for (const RoundRecord& r : rounds) {
    const UtilityVector& u = inner ? r.inner_utilities[i] : r.utilities[i];
    const MixedStrategy& x = inner ? r.inner[i] : r.played[i];
    for (std::size_t a = 0; a < d; ++a) cum[a] += u[a];
    realized += u.Dot(x);
    out.push_back(*std::max_element(cum.begin(), cum.end()) - realized);
  }
  return out;
}

}  // namespace

RegretSeries regret_series(const Trajectory& traj) {
  RegretSeries s;
  const int n = traj.num_players();
  for (int i = 0; i < n; ++i) {
    s.reg.push_back(RunningRegret(traj.rounds, i, false));
    std::vector<double> dreg;
    dreg.reserve(traj.rounds.size());
    double acc = 0.0;
    for (const RoundRecord& r : traj.rounds) {
      acc += r.instant_regret[i];
      dreg.push_back(acc);
    }
    s.dreg.push_back(std::move(dreg));
    if (traj.has_inner()) s.reg_inner.push_back(RunningRegret(traj.rounds, i, true));
  }
  return s;
}

RegretReport regret_report(const Trajectory& traj) {
  RegretReport r;
  if (traj.rounds.empty()) return r;
  const RegretSeries s = regret_series(traj);
  for (const auto& v : s.reg) r.reg.push_back(v.back());
  for (const auto& v : s.dreg) r.dreg.push_back(v.back());
  for (const auto& v : s.reg_inner) r.reg_inner.push_back(v.back());
  return r;
}

void WriteTrajectoryCsv(const Trajectory& traj, std::ostream& out) {
  using internal::FormatDouble;
  const int n = traj.num_players();
  out << "t,tgap_last,tgap_avg";
  for (int i = 1; i <= n; ++i) out << ",reg_" << i;
  for (int i = 1; i <= n; ++i) out << ",dreg_" << i;
  out << '\n';
  if (traj.rounds.empty()) return;
  const RegretSeries s = regret_series(traj);
  for (std::size_t k = 0; k < traj.rounds.size(); ++k) {
    const RoundRecord& r = traj.rounds[k];
    out << r.t << ',' << FormatDouble(r.tgap_played) << ','
        << FormatDouble(r.tgap_inner_avg);
    for (int i = 0; i < n; ++i) out << ',' << FormatDouble(s.reg[i][k]);
    for (int i = 0; i < n; ++i) out << ',' << FormatDouble(s.dreg[i][k]);
    out << '\n';
  }
}

}  // namespace a2l
