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

#ifndef A2L_REDUCTION_H_
#define A2L_REDUCTION_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include "a2l/game.h"
#include "a2l/learners.h"

namespace a2l {

// Averaging weights alpha_t. All players of one run must use the same rule.
enum class WeightRule { kUniform, kLinear };

WeightRule ParseWeightRule(const std::string& name);
std::string WeightRuleName(WeightRule rule);
// alpha_t for t >= 1.
double AveragingWeight(WeightRule rule, std::size_t t);

// Average-to-last-iterate wrapper.
//
// Each round the wrapper pulls x^t from the inner learner and plays the
// running weighted average
//   xbar^t = xbar^{t-1} + (alpha_t / W_t) (x^t - xbar^{t-1}),  W_t = sum alpha_k.
// The feedback it receives is the utility at the averaged profile; when every
// opponent's utility is linear in the others' strategies, that feedback is the
// weighted average of the utilities at the inner iterates, so the inner
// utility is recovered as
//   u^t = (W_t ubar^t - sum_{k<t} alpha_k u^k) / alpha_t
// and forwarded to the inner learner. The inner learner therefore sees exactly
// the sequence it would see if every player ran it bare, and the played
// iterate is its running average.
class A2L : public Learner {
 public:
  explicit A2L(std::unique_ptr<Learner> inner,
               WeightRule rule = WeightRule::kUniform);
  A2L(const A2L& other);
  A2L& operator=(const A2L&) = delete;

  std::size_t num_actions() const override { return inner_->num_actions(); }
  MixedStrategy Next() override;
  void Observe(const UtilityVector& avg_util) override;
  std::unique_ptr<Learner> Clone() const override;
  std::string name() const override;
  std::optional<MixedStrategy> InnerIterate() const override {
    return inner_iterate_;
  }

  std::size_t round() const { return t_; }
  WeightRule weight_rule() const { return rule_; }
  double cum_weight() const { return cum_weight_; }
  const std::optional<MixedStrategy>& average() const { return avg_; }
  // Weighted sum of the recovered utilities, sum_{k<=t} alpha_k u^k.
  const UtilityVector& cum_recovered() const { return cum_recovered_; }
  const UtilityVector& last_recovered() const { return last_recovered_; }
  const Learner& inner() const { return *inner_; }

 private:
  std::unique_ptr<Learner> inner_;
  WeightRule rule_;
  std::size_t t_ = 0;
  double cum_weight_ = 0.0;
  std::optional<MixedStrategy> avg_;
  std::optional<MixedStrategy> inner_iterate_;
  UtilityVector cum_recovered_;
  UtilityVector last_recovered_;
  bool awaiting_feedback_ = false;
};

}  // namespace a2l

#endif  // A2L_REDUCTION_H_
