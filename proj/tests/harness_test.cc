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

#include "a2l/harness.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "a2l/verify.h"
#include "gtest/gtest.h"
#include "json.hpp"

namespace a2l {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const char* base = std::getenv("A2L_TEST_TMP");
  fs::path dir = (base ? fs::path(base) : fs::temp_directory_path() / "a2l_tests") / name;
  fs::remove_all(dir);
  return dir;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

bool Mentions(const ConfigError& e, const std::string& needle) {
  for (const std::string& p : e.problems()) {
    if (p.find(needle) != std::string::npos) return true;
  }
  return false;
}

// -- Config --------------------------------------------------------------------------

TEST(ConfigTest, DefaultsAndRoundTrip) {
  const ExperimentConfig c = ExperimentConfig::FromJson(
      R"({"mode": "gradient", "game": {"kind": "rps"}, "T": 50, "seeds": [1, 2]})");
  EXPECT_EQ(c.T, 50u);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2}));
  const ExperimentConfig again = ExperimentConfig::FromJson(c.ToJson());
  EXPECT_EQ(again.ToJson(), c.ToJson());
  EXPECT_EQ(again.Hash(), c.Hash());
  EXPECT_EQ(c.Hash().size(), 16u);
}

TEST(ConfigTest, CollectsEveryProblem) {
  try {
    ExperimentConfig::FromJson(R"({"mode": "telepathy", "T": "many", "colour": 1})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_GE(e.problems().size(), 3u);
    EXPECT_TRUE(Mentions(e, "colour"));
    EXPECT_TRUE(Mentions(e, "telepathy"));
  }
}

TEST(ConfigTest, CertifiedModeRefusesLargeGradientStep) {
  ExperimentConfig c;
  c.game.kind = "random_zs";
  c.game.n = 3;
  c.eta = 0.4;
  const std::vector<std::string> problems = c.Validate();
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("eta <= 1/(2(n-1))"), std::string::npos);
  c.certified = false;
  EXPECT_TRUE(c.Validate().empty());
}

TEST(ConfigTest, CertifiedModeRefusesCustomBanditSchedule) {
  ExperimentConfig c;
  c.mode = FeedbackMode::kBandit;
  c.algorithms = {"a2l-omwu-bandit"};
  c.game.kind = "random_zs";
  c.game.d = 3;
  c.schedule = "custom:10:2";
  c.eta = 0.5;
  EXPECT_EQ(c.Validate().size(), 2u);
}

TEST(ConfigTest, MissingFileReported) {
  ExperimentConfig c;
  c.game.file = "/nonexistent/game.json";
  const std::vector<std::string> problems = c.Validate();
  ASSERT_FALSE(problems.empty());
  EXPECT_NE(problems[0].find("/nonexistent/game.json"), std::string::npos);
}

TEST(ConfigTest, FnvKnownValues) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

// -- run ---------------------------------------------------------------------------

TEST(RunTest, GradientSuiteWritesCsvsAndSummary) {
  ExperimentConfig c;
  c.game.kind = "random_zs";
  c.game.n = 3;
  c.game.d = 4;
  c.T = 300;
  c.seeds.clear();
  for (std::uint64_t s = 0; s < 20; ++s) c.seeds.push_back(s);
  c.out_dir = TempDir("gradient").string();
  const RunResult r = run(c);
  EXPECT_TRUE(r.all_passed);
  ASSERT_EQ(r.seeds.size(), 20u);
  for (const SeedResult& s : r.seeds) {
    EXPECT_TRUE(fs::exists(s.csv_path));
    EXPECT_EQ(Slurp(s.csv_path), s.csv);
  }
  const nlohmann::json summary = nlohmann::json::parse(Slurp(r.summary_path));
  EXPECT_EQ(summary["schema_version"], kSummarySchemaVersion);
  EXPECT_EQ(summary["prng"], "mt19937_64");
  EXPECT_EQ(summary["config_hash"], c.Hash());
  EXPECT_EQ(summary["runs"].size(), 20u);
  bool found = false;
  for (const auto& check : summary["runs"][0]["checks"]) {
    if (check["name"] == "last_iterate_bound") {
      found = true;
      EXPECT_GE(check["value"].get<double>(), 0.0);
    }
  }
  EXPECT_TRUE(found);
}

TEST(RunTest, RerunIsByteIdentical) {
  for (FeedbackMode mode :
       {FeedbackMode::kGradient, FeedbackMode::kBandit, FeedbackMode::kFisher}) {
    ExperimentConfig c;
    c.mode = mode;
    c.game.kind = "random_zs";
    c.game.d = 3;
    c.epochs = 6;
    c.T = 200;
    if (mode == FeedbackMode::kBandit) c.algorithms = {"a2l-omwu-bandit"};
    if (mode == FeedbackMode::kFisher) c.algorithms = {"a2l-prd"};
    c.seeds = {3, 4};
    c.threads = 1;
    const RunResult a = run_in_memory(c);
    c.threads = 2;
    const RunResult b = run_in_memory(c);
    ASSERT_EQ(a.seeds.size(), b.seeds.size());
    for (std::size_t k = 0; k < a.seeds.size(); ++k) {
      EXPECT_EQ(a.seeds[k].csv, b.seeds[k].csv) << FeedbackModeName(mode);
    }
    EXPECT_EQ(a.summary_json, b.summary_json);
  }
}

TEST(RunTest, ValidationFailureWritesNothing) {
  ExperimentConfig c;
  c.game.kind = "random_zs";
  c.game.n = 3;
  c.eta = 0.9;
  c.out_dir = TempDir("refused").string();
  EXPECT_THROW(run(c), ConfigError);
  EXPECT_FALSE(fs::exists(c.out_dir));
}

TEST(RunTest, UncertifiedBanditRunIsFlagged) {
  ExperimentConfig c;
  c.mode = FeedbackMode::kBandit;
  c.algorithms = {"a2l-omwu-bandit"};
  c.game.kind = "random_zs";
  c.game.d = 3;
  c.schedule = "custom:50:2";
  c.epochs = 4;
  c.certified = false;
  const RunResult r = run_in_memory(c);
  bool flagged = false;
  for (const CheckResult& check : r.seeds[0].checks) {
    if (check.name == "certified") flagged = check.value == 0.0 && !check.detail.empty();
  }
  EXPECT_TRUE(flagged);
}

TEST(ParallelForTest, RethrowsLowestIndexError) {
  try {
    ParallelFor(10, 3, [](std::size_t k) {
      if (k == 7 || k == 4) throw std::runtime_error("boom " + std::to_string(k));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "boom 4");
  }
}

// -- fit_rate ------------------------------------------------------------------------

std::vector<std::pair<double, double>> PowerLaw(double c, double p, int n) {
  std::vector<std::pair<double, double>> s;
  for (int t = 1; t <= n; ++t) s.emplace_back(t, c * std::pow(t, p));
  return s;
}

TEST(FitRateTest, ExactOneOverT) {
  const RateFit f = fit_rate({PowerLaw(3.0, -1.0, 1000)}, 10, 1000);
  EXPECT_NEAR(f.slope, -1.0, 1e-6);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-6);
  EXPECT_LT(f.stderr_slope, 1e-9);
}

TEST(FitRateTest, FifthRoot) {
  const RateFit f = fit_rate({PowerLaw(1.0, -0.2, 1000)}, 1, 1000);
  EXPECT_NEAR(f.slope, -0.2, 1e-6);
}

TEST(FitRateTest, NonPositiveGapsExcludedAndCounted) {
  auto s = PowerLaw(1.0, -1.0, 100);
  s[20].second = 0.0;
  s[30].second = -1.0;
  const RateFit f = fit_rate({s}, 1, 100);
  EXPECT_EQ(f.excluded, 2u);
  EXPECT_EQ(f.points, 98u);
  EXPECT_NEAR(f.slope, -1.0, 1e-9);
}

TEST(FitRateTest, TooFewPoints) {
  EXPECT_THROW(fit_rate({PowerLaw(1.0, -1.0, 9)}, 1, 100), std::invalid_argument);
}

TEST(FitRateTest, ReadsTrajectoryCsv) {
  const fs::path dir = TempDir("csv");
  fs::create_directories(dir);
  std::ofstream(dir / "g.csv") << "t,tgap_last,tgap_avg\n1,0.5,1\n2,0.25,1\n";
  const auto col = ReadCsvColumn((dir / "g.csv").string(), "tgap_last");
  ASSERT_EQ(col.size(), 2u);
  EXPECT_EQ(col[1], std::make_pair(2.0, 0.25));
  EXPECT_THROW(ReadCsvColumn((dir / "g.csv").string(), "nope"), std::invalid_argument);
}

// -- verify ------------------------------------------------------------------------

TEST(VerifyTest, UnknownSuiteListsAvailable) {
  try {
    verify("nonexistent");
    FAIL();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    for (const std::string& s : AvailableSuites()) {
      EXPECT_NE(msg.find(s), std::string::npos) << s;
    }
  }
}

TEST(VerifyTest, RegistryMatchesDirectCalls) {
  VerifyOptions o;
  o.seeds = 3;
  const SuiteReport a = verify("fisher", o);
  const SuiteReport b = VerifyFisher(o);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t k = 0; k < a.checks.size(); ++k) {
    EXPECT_EQ(a.checks[k].value, b.checks[k].value);
  }
  EXPECT_TRUE(a.pass);
  EXPECT_EQ(nlohmann::json::parse(a.ToJson())["suite"], "fisher");
}

}  // namespace
}  // namespace a2l
