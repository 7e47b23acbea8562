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

#include "a2l/reduction.h"

#include <algorithm>
#include <utility>

namespace a2l {

WeightRule ParseWeightRule(const std::string& name) {
  if (name == "uniform") return WeightRule::kUniform;
  if (name == "linear") return WeightRule::kLinear;
  throw std::invalid_argument("unknown weight rule '" + name +
                              "' (expected uniform or linear)");
}

std::string WeightRuleName(WeightRule rule) {
  return rule == WeightRule::kUniform ? "uniform" : "linear";
}

double AveragingWeight(WeightRule rule, std::size_t t) {
  return rule == WeightRule::kUniform ? 1.0 : static_cast<double>(t);
}

A2L::A2L(std::unique_ptr<Learner> inner, WeightRule rule)
    : inner_(std::move(inner)), rule_(rule) {
  if (!inner_) throw std::invalid_argument("A2L needs an inner learner");
  cum_recovered_ = UtilityVector::Zeros(inner_->num_actions());
  last_recovered_ = UtilityVector::Zeros(inner_->num_actions());
}

A2L::A2L(const A2L& other)
    : inner_(other.inner_->Clone()),
      rule_(other.rule_),
      t_(other.t_),
      cum_weight_(other.cum_weight_),
      avg_(other.avg_),
      inner_iterate_(other.inner_iterate_),
      cum_recovered_(other.cum_recovered_),
      last_recovered_(other.last_recovered_),
      awaiting_feedback_(other.awaiting_feedback_) {}

MixedStrategy A2L::Next() {
  if (awaiting_feedback_) {
    throw ProtocolError("A2L: Next() called twice without Observe()");
  }
  MixedStrategy x = inner_->Next();
  const double alpha = AveragingWeight(rule_, t_ + 1);
  cum_weight_ += alpha;
  if (!avg_) {
    avg_ = x;
  } else {
    const double w = alpha / cum_weight_;
    std::vector<double> next(x.size());
    for (std::size_t a = 0; a < x.size(); ++a) {
      const double prev = (*avg_)[a];
      next[a] = std::max(0.0, prev + w * (x[a] - prev));
    }
    avg_ = MixedStrategy(std::move(next));
  }
  inner_iterate_ = std::move(x);
  awaiting_feedback_ = true;
  return *avg_;
}

void A2L::Observe(const UtilityVector& avg_util) {
  if (!awaiting_feedback_) {
    throw ProtocolError("A2L: Observe() called before Next()");
  }
  const std::size_t d = inner_->num_actions();
  if (avg_util.size() != d) {
    throw DimensionError("A2L feedback", -1, d, avg_util.size());
  }
  ++t_;
  const double alpha = AveragingWeight(rule_, t_);
  std::vector<double> u(d);
  for (std::size_t a = 0; a < d; ++a) {
    u[a] = (cum_weight_ * avg_util[a] - cum_recovered_[a]) / alpha;
  }
  last_recovered_ = UtilityVector(std::move(u));
  cum_recovered_ = cum_recovered_ + alpha * last_recovered_;
  awaiting_feedback_ = false;
  inner_->Observe(last_recovered_);
}

std::unique_ptr<Learner> A2L::Clone() const {
  return std::make_unique<A2L>(*this);
}

std::string A2L::name() const {
  return "a2l-" + inner_->name() +
         (rule_ == WeightRule::kLinear ? "[linear]" : "");
}

}  // namespace a2l
