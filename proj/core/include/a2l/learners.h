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

#ifndef A2L_LEARNERS_H_
#define A2L_LEARNERS_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "a2l/game.h"

namespace a2l {

// next/observe called out of order.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// State shared by the entropy-regularized learners. Cumulative utilities are
// stored (not log-weights); strategies are recomputed with a max-shift.
struct LearnerState {
  std::size_t d = 0;
  double eta = 0.0;
  UtilityVector cum_utils;  // sum_{k<=t} u^k
  UtilityVector last_util;  // u^t, zero before any feedback
  std::size_t t = 0;        // rounds observed
  // Log of the initial strategy; empty means uniform.
  std::vector<double> log_prior;

  static LearnerState Initial(std::size_t d, double eta);
  static LearnerState Initial(std::size_t d, double eta,
                              const MixedStrategy& prior);
};

// softmax(eta * (cum + last)): the most recent utility counted twice.
MixedStrategy omwu_next(const LearnerState& state);
// softmax(eta * cum).
MixedStrategy mwu_next(const LearnerState& state);
// Records u^{t+1} and advances the round counter.
void observe(LearnerState& state, const UtilityVector& u);

// Max-shifted softmax of `scale * scores + log_prior`.
MixedStrategy Softmax(std::span<const double> scores, double scale,
                      std::span<const double> log_prior = {});

// Pull-strategy / push-utility contract. Next() and Observe() strictly
// alternate, starting with Next().
class Learner {
 public:
  virtual ~Learner() = default;

  virtual std::size_t num_actions() const = 0;
  virtual MixedStrategy Next() = 0;
  virtual void Observe(const UtilityVector& u) = 0;
  virtual std::unique_ptr<Learner> Clone() const = 0;
  virtual std::string name() const = 0;

  // The strategy an inner learner produced this round when the played
  // strategy is derived from it (A2L); nullopt for learners that play their
  // own iterate.
  virtual std::optional<MixedStrategy> InnerIterate() const {
    return std::nullopt;
  }
};

// Shared alternation bookkeeping.
class AlternatingLearner : public Learner {
 protected:
  void BeginNext();
  void BeginObserve(std::size_t dim);

  std::size_t dim_ = 0;

 private:
  bool awaiting_feedback_ = false;
};

class Mwu : public AlternatingLearner {
 public:
  explicit Mwu(LearnerState state);
  Mwu(std::size_t d, double eta) : Mwu(LearnerState::Initial(d, eta)) {}

  std::size_t num_actions() const override { return state_.d; }
  MixedStrategy Next() override;
  void Observe(const UtilityVector& u) override;
  std::unique_ptr<Learner> Clone() const override;
  std::string name() const override { return "mwu"; }
  const LearnerState& state() const { return state_; }

 private:
  LearnerState state_;
};

class Omwu : public AlternatingLearner {
 public:
  explicit Omwu(LearnerState state);
  Omwu(std::size_t d, double eta) : Omwu(LearnerState::Initial(d, eta)) {}

  std::size_t num_actions() const override { return state_.d; }
  MixedStrategy Next() override;
  void Observe(const UtilityVector& u) override;
  std::unique_ptr<Learner> Clone() const override;
  std::string name() const override { return "omwu"; }
  const LearnerState& state() const { return state_; }

 private:
  LearnerState state_;
};

// MWU with eta_t = sqrt(log d / t); O(sqrt T) regret against any sequence.
// Used as the fallback after a robustness switch.
class AnytimeMwu : public AlternatingLearner {
 public:
  explicit AnytimeMwu(std::size_t d);

  std::size_t num_actions() const override { return dim_; }
  MixedStrategy Next() override;
  void Observe(const UtilityVector& u) override;
  std::unique_ptr<Learner> Clone() const override;
  std::string name() const override { return "anytime_mwu"; }

 private:
  std::vector<double> cum_;
  std::size_t t_ = 0;
};

// Ignores feedback and replays a fixed strategy sequence, each entry held for
// `hold` rounds, cyclically. Used to build adversaries.
class ScriptedLearner : public AlternatingLearner {
 public:
  ScriptedLearner(std::vector<MixedStrategy> script, std::size_t hold = 1);

  std::size_t num_actions() const override { return dim_; }
  MixedStrategy Next() override;
  void Observe(const UtilityVector& u) override;
  std::unique_ptr<Learner> Clone() const override;
  std::string name() const override { return "scripted"; }

 private:
  std::vector<MixedStrategy> script_;
  std::size_t hold_;
  std::size_t t_ = 0;
};

// max over coordinates of sum u^t minus sum <u^t, x^t>.
double external_regret(std::span<const MixedStrategy> xs,
                       std::span<const UtilityVector> us);

struct RvuRecord {
  double regret = 0.0;
  double bound_rhs = 0.0;
  double slack = 0.0;  // bound_rhs - regret
};

// Evaluates both sides of the RVU inequality
//   Reg <= log d / eta + eta sum ||u^t - u^{t-1}||_inf^2
//                      - 1/(4 eta) sum ||x^t - x^{t-1}||_1^2
// with u^0 = 0 and x^0 = x^1. Throws on an empty trajectory.
RvuRecord rvu_diagnostic(std::span<const MixedStrategy> xs,
                         std::span<const UtilityVector> us, double eta);

double LInfDistance(std::span<const double> a, std::span<const double> b);
double L1Distance(std::span<const double> a, std::span<const double> b);

}  // namespace a2l

#endif  // A2L_LEARNERS_H_
