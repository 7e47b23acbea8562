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

#ifndef A2L_HARNESS_H_
#define A2L_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "a2l/bandit.h"
#include "a2l/dynamics.h"
#include "a2l/fisher.h"
#include "a2l/game.h"

namespace a2l {

inline constexpr int kSummarySchemaVersion = 1;
inline constexpr const char* kPrngName = "mt19937_64";

// Every validation problem of a config, one message each.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

enum class FeedbackMode { kGradient, kBandit, kFisher };

struct GameSource {
  std::string file;                  // JSON game file; wins when set
  std::string kind = "matching_pennies";
  int n = 2;
  std::size_t d = 2;
  std::string graph = "complete";
  std::optional<std::uint64_t> seed; // unset: use the run seed
};

struct MarketSource {
  std::string file;
  std::size_t agents = 3;
  std::size_t goods = 4;
  std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
  FeedbackMode mode = FeedbackMode::kGradient;
  GameSource game;
  MarketSource market;
  // One entry for all players, or one per player. Fisher mode: prd | a2l-prd.
  std::vector<std::string> algorithms{"a2l-omwu"};
  std::optional<double> eta;  // unset: the mode's default bound
  std::size_t T = 1000;       // rounds (gradient, fisher)
  std::size_t epochs = 12;    // bandit
  std::string schedule = "theory";
  std::string weights = "uniform";
  std::vector<std::uint64_t> seeds{0};
  double delta = 0.05;
  bool certified = true;
  bool robust = false;
  std::optional<double> monitor_c;
  std::string out_dir = "out";
  std::size_t threads = 0;  // 0: hardware concurrency

  // Throws ConfigError listing every problem.
  static ExperimentConfig FromJson(const std::string& text);
  static ExperimentConfig Load(const std::string& path);
  // Canonical form: sorted keys, every field explicit.
  std::string ToJson() const;
  // FNV-1a 64 of ToJson(), as 16 hex digits.
  std::string Hash() const;
  // Problems that make the config unrunnable (missing files, bad names,
  // certified-mode violations). Empty when valid.
  std::vector<std::string> Validate() const;
};

FeedbackMode ParseFeedbackMode(const std::string& name);
std::string FeedbackModeName(FeedbackMode mode);

std::uint64_t Fnv1a64(const std::string& bytes);

PolymatrixGame BuildGame(const GameSource& source, std::uint64_t run_seed);
FisherMarket BuildMarket(const MarketSource& source, std::uint64_t run_seed);

struct CheckResult {
  std::string name;
  bool pass = true;
  double value = 0.0;  // worst slack or error, check-specific
  std::string detail;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::string csv_path;
  std::string csv;  // file contents
  double final_gap = 0.0;
  std::vector<CheckResult> checks;
};

struct RunResult {
  std::vector<SeedResult> seeds;
  std::string summary_json;
  std::string summary_path;
  bool all_passed = true;
};

// Executes every seed (in parallel), writes one CSV per seed plus
// summary.json into out_dir. Validation happens before any file is touched;
// a ConfigError leaves the file system unchanged.
RunResult run(const ExperimentConfig& config);
// Same, without writing files.
RunResult run_in_memory(const ExperimentConfig& config);

// Runs fn(0..count-1) on a pool of workers; results stay in index order.
void ParallelFor(std::size_t count, std::size_t threads,
                 const std::function<void(std::size_t)>& fn);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::size_t points = 0;
  std::size_t excluded = 0;  // nonpositive gaps inside the window
};

// OLS of log(gap) on log(t) over points with t in [t_lo, t_hi], pooled
// across series. Throws std::invalid_argument with fewer than 10 usable
// points.
RateFit fit_rate(const std::vector<std::vector<std::pair<double, double>>>& series,
                 double t_lo, double t_hi);

// (t, column) pairs from a trajectory CSV.
std::vector<std::pair<double, double>> ReadCsvColumn(const std::string& path,
                                                     const std::string& column);

}  // namespace a2l

#endif  // A2L_HARNESS_H_
