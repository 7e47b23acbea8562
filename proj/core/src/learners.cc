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

#include "a2l/learners.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace a2l {

// -- LearnerState -------------------------------------------------------------

LearnerState LearnerState::Initial(std::size_t d, double eta) {
  if (d < 1) throw std::invalid_argument("learner needs at least one action");
  if (!(eta > 0.0)) throw std::invalid_argument("step size must be positive");
  LearnerState s;
  s.d = d;
  s.eta = eta;
  s.cum_utils = UtilityVector::Zeros(d);
  s.last_util = UtilityVector::Zeros(d);
  return s;
}

LearnerState LearnerState::Initial(std::size_t d, double eta,
                                   const MixedStrategy& prior) {
  if (prior.size() != d) {
    throw DimensionError("learner prior", -1, d, prior.size());
  }
  LearnerState s = Initial(d, eta);
  s.log_prior.resize(d);
  for (std::size_t a = 0; a < d; ++a) {
    if (!(prior[a] > 0.0)) {
      throw std::invalid_argument("learner prior must be interior");
    }
    s.log_prior[a] = std::log(prior[a]);
  }
  return s;
}

MixedStrategy Softmax(std::span<const double> scores, double scale,
                      std::span<const double> log_prior) {
  const std::size_t d = scores.size();
  std::vector<double> z(d);
  double zmax = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < d; ++a) {
    z[a] = scale * scores[a] + (log_prior.empty() ? 0.0 : log_prior[a]);
    zmax = std::max(zmax, z[a]);
  }
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    total += v;
  }
  for (double& v : z) v /= total;
  return MixedStrategy(std::move(z));
}

MixedStrategy omwu_next(const LearnerState& state) {
  std::vector<double> scores(state.d);
  for (std::size_t a = 0; a < state.d; ++a) {
    scores[a] = state.cum_utils[a] + state.last_util[a];
  }
  return Softmax(scores, state.eta, state.log_prior);
}

MixedStrategy mwu_next(const LearnerState& state) {
  return Softmax(state.cum_utils.values(), state.eta, state.log_prior);
}

void observe(LearnerState& state, const UtilityVector& u) {
  if (u.size() != state.d) {
    throw DimensionError("learner feedback", -1, state.d, u.size());
  }
  state.cum_utils = state.cum_utils + u;
  state.last_util = u;
  ++state.t;
}

// -- Learner implementations --------------------------------------------------

void AlternatingLearner::BeginNext() {
  if (awaiting_feedback_) {
    throw ProtocolError("Next() called twice without Observe()");
  }
  awaiting_feedback_ = true;
}

void AlternatingLearner::BeginObserve(std::size_t dim) {
  if (!awaiting_feedback_) {
    throw ProtocolError("Observe() called before Next()");
  }
  if (dim != dim_) throw DimensionError("learner feedback", -1, dim_, dim);
  awaiting_feedback_ = false;
}

Mwu::Mwu(LearnerState state) : state_(std::move(state)) { dim_ = state_.d; }

MixedStrategy Mwu::Next() {
  BeginNext();
  return mwu_next(state_);
}

void Mwu::Observe(const UtilityVector& u) {
  BeginObserve(u.size());
  observe(state_, u);
}

std::unique_ptr<Learner> Mwu::Clone() const {
  return std::make_unique<Mwu>(*this);
}

Omwu::Omwu(LearnerState state) : state_(std::move(state)) { dim_ = state_.d; }

MixedStrategy Omwu::Next() {
  BeginNext();
  return omwu_next(state_);
}

void Omwu::Observe(const UtilityVector& u) {
  BeginObserve(u.size());
  observe(state_, u);
}

std::unique_ptr<Learner> Omwu::Clone() const {
  return std::make_unique<Omwu>(*this);
}

AnytimeMwu::AnytimeMwu(std::size_t d) : cum_(d, 0.0) {
  if (d < 1) throw std::invalid_argument("learner needs at least one action");
  dim_ = d;
}

MixedStrategy AnytimeMwu::Next() {
  BeginNext();
  const double round = static_cast<double>(t_ + 1);
  const double eta = std::sqrt(std::log(static_cast<double>(dim_)) / round);
  return Softmax(cum_, eta);
}

void AnytimeMwu::Observe(const UtilityVector& u) {
  BeginObserve(u.size());
  for (std::size_t a = 0; a < dim_; ++a) cum_[a] += u[a];
  ++t_;
}

std::unique_ptr<Learner> AnytimeMwu::Clone() const {
  return std::make_unique<AnytimeMwu>(*this);
}

ScriptedLearner::ScriptedLearner(std::vector<MixedStrategy> script,
                                 std::size_t hold)
    : script_(std::move(script)), hold_(hold) {
  if (script_.empty()) throw std::invalid_argument("empty script");
  if (hold_ == 0) throw std::invalid_argument("hold must be positive");
  dim_ = script_.front().size();
  for (const MixedStrategy& x : script_) {
    if (x.size() != dim_) throw DimensionError("script entry", -1, dim_, x.size());
  }
}

MixedStrategy ScriptedLearner::Next() {
  BeginNext();
  return script_[(t_ / hold_) % script_.size()];
}

void ScriptedLearner::Observe(const UtilityVector& u) {
  BeginObserve(u.size());
  ++t_;
}

std::unique_ptr<Learner> ScriptedLearner::Clone() const {
  return std::make_unique<ScriptedLearner>(*this);
}

// -- Diagnostics --------------------------------------------------------------

double LInfDistance(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double L1Distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s;
}

double external_regret(std::span<const MixedStrategy> xs,
                       std::span<const UtilityVector> us) {
  if (xs.empty() || xs.size() != us.size()) {
    throw std::invalid_argument("regret needs matching non-empty sequences");
  }
  std::vector<double> cum(us.front().size(), 0.0);
  double realized = 0.0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    for (std::size_t a = 0; a < cum.size(); ++a) cum[a] += us[t][a];
    realized += us[t].Dot(xs[t]);
  }
  return *std::max_element(cum.begin(), cum.end()) - realized;
}

RvuRecord rvu_diagnostic(std::span<const MixedStrategy> xs,
                         std::span<const UtilityVector> us, double eta) {
  if (xs.empty()) throw std::invalid_argument("empty trajectory");
  const std::size_t d = xs.front().size();
  double utility_variation = 0.0;
  double strategy_variation = 0.0;
  std::vector<double> prev_u(d, 0.0);
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const double du = LInfDistance(us[t].values(), prev_u);
    utility_variation += du * du;
    prev_u = us[t].vec();
    if (t > 0) {
      const double dx = L1Distance(xs[t].probs(), xs[t - 1].probs());
      strategy_variation += dx * dx;
    }
  }
  RvuRecord r;
  r.regret = external_regret(xs, us);
  r.bound_rhs = std::log(static_cast<double>(d)) / eta +
                eta * utility_variation - strategy_variation / (4.0 * eta);
  r.slack = r.bound_rhs - r.regret;
  return r;
}

}  // namespace a2l
