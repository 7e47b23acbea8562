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

// Command-line front end. Every subcommand is a thin wrapper over the
// library; exit status is 0 iff all checks passed.
//
//   a2l gen --kind random_zs --n 3 --d 5 --seed 7 --out game.json
//   a2l run-gradient --config cfg.json --seeds 0-19 --out runs/
//   a2l fit-rate runs/gradient_seed*.csv --from 100 --to 10000
//   a2l verify a2l_equivalence
//
// Log level comes from SPDLOG_LEVEL (trace, debug, info, warn, error, off).

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "a2l/fisher.h"
#include "a2l/game.h"
#include "a2l/harness.h"
#include "a2l/verify.h"
#include "json.hpp"
#include "spdlog/cfg/env.h"
#include "spdlog/spdlog.h"

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitUsage = 2;

// "3", "0-19", "0,4,7" or mixtures like "0-3,9".
std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (part.empty()) continue;
    const std::size_t dash = part.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(std::stoull(part));
      continue;
    }
    const std::uint64_t lo = std::stoull(part.substr(0, dash));
    const std::uint64_t hi = std::stoull(part.substr(dash + 1));
    if (hi < lo) throw std::invalid_argument("empty seed range '" + part + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw std::invalid_argument("no seeds in '" + text + "'");
  return seeds;
}

struct RunFlags {
  std::string config;
  std::string out;
  std::string seeds;
  std::size_t threads = 0;
};

int RunMode(a2l::FeedbackMode mode, const RunFlags& flags) {
  a2l::ExperimentConfig config;
  try {
    config = a2l::ExperimentConfig::Load(flags.config);
  } catch (const a2l::ConfigError& e) {
    for (const std::string& p : e.problems()) spdlog::error("config: {}", p);
    return kExitUsage;
  }
  if (config.mode != mode) {
    spdlog::warn("config mode '{}' overridden by subcommand ('{}')",
                 a2l::FeedbackModeName(config.mode), a2l::FeedbackModeName(mode));
    config.mode = mode;
  }
  if (!flags.out.empty()) config.out_dir = flags.out;
  if (!flags.seeds.empty()) config.seeds = ParseSeeds(flags.seeds);
  if (flags.threads > 0) config.threads = flags.threads;

  spdlog::info("config hash {} | {} seed(s) | out {}", config.Hash(),
               config.seeds.size(), config.out_dir);
  a2l::RunResult result;
  try {
    result = a2l::run(config);
  } catch (const a2l::ConfigError& e) {
    for (const std::string& p : e.problems()) spdlog::error("config: {}", p);
    return kExitUsage;
  }
  for (const a2l::SeedResult& s : result.seeds) {
    for (const a2l::CheckResult& c : s.checks) {
      if (c.pass) {
        spdlog::debug("seed {} {} ok ({})", s.seed, c.name, c.value);
      } else {
        spdlog::warn("seed {} {} FAILED: {} (value {})", s.seed, c.name, c.detail, c.value);
      }
    }
  }
  std::cout << result.summary_path << "\n";
  return result.all_passed ? 0 : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::cfg::load_env_levels();
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"A2L learning dynamics: simulation, analysis and verification"};
  app.require_subcommand(1);

  // gen
  CLI::App* gen = app.add_subcommand("gen", "Generate a game or Fisher market as JSON");
  std::string kind = "random_zs";
  int n = 2;
  std::size_t d = 3;
  std::string graph = "complete";
  std::uint64_t gen_seed = 0;
  std::size_t agents = 3;
  std::size_t goods = 4;
  std::string gen_out;
  gen->add_option("--kind", kind,
                  "matching_pennies | rps | random_zs | random_gs | fisher");
  gen->add_option("--n", n, "players");
  gen->add_option("--d", d, "actions per player");
  gen->add_option("--graph", graph, "complete | cycle | gnp:<p>");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--agents", agents, "Fisher agents");
  gen->add_option("--goods", goods, "Fisher goods");
  gen->add_option("--out", gen_out, "output path (stdout when omitted)");

  // run-*
  RunFlags run_flags;
  const std::vector<std::pair<std::string, a2l::FeedbackMode>> modes = {
      {"run-gradient", a2l::FeedbackMode::kGradient},
      {"run-bandit", a2l::FeedbackMode::kBandit},
      {"run-fisher", a2l::FeedbackMode::kFisher}};
  std::vector<CLI::App*> run_cmds;
  for (const auto& [name, mode] : modes) {
    CLI::App* cmd = app.add_subcommand(name, "Run an experiment config in " +
                                                 a2l::FeedbackModeName(mode) + " mode");
    cmd->add_option("--config", run_flags.config, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", run_flags.out, "output directory (overrides config)");
    cmd->add_option("--seeds", run_flags.seeds, "seed list, e.g. 0-19 or 1,5,9");
    cmd->add_option("--threads", run_flags.threads, "worker threads (0: all cores)");
    run_cmds.push_back(cmd);
  }

  // fit-rate
  CLI::App* fit = app.add_subcommand("fit-rate", "Log-log slope of a gap column");
  std::vector<std::string> csvs;
  std::string column = "tgap_last";
  double t_lo = 100.0;
  double t_hi = 10000.0;
  fit->add_option("csv", csvs, "trajectory CSVs")->required()->check(CLI::ExistingFile);
  fit->add_option("--column", column, "gap column");
  fit->add_option("--from", t_lo, "window start");
  fit->add_option("--to", t_hi, "window end");

  // verify
  CLI::App* ver = app.add_subcommand("verify", "Run a verification suite");
  std::string suite;
  std::size_t verify_seeds = 20;
  std::size_t verify_threads = 0;
  std::string verify_out;
  bool list = false;
  ver->add_option("suite", suite, "suite name, or 'all'");
  ver->add_flag("--list", list, "list suites and exit");
  ver->add_option("--seeds", verify_seeds, "number of seeds (0..N-1)");
  ver->add_option("--threads", verify_threads, "worker threads (0: all cores)");
  ver->add_option("--out", verify_out, "write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      std::string text;
      if (kind == "fisher") {
        text = a2l::MarketToJson(a2l::FisherMarket::Random(agents, goods, gen_seed));
      } else {
        text = a2l::GameToJson(a2l::generate_game(a2l::ParseGameKind(kind), n, d,
                                                  a2l::GraphSpec::Parse(graph), gen_seed));
      }
      if (gen_out.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream(gen_out) << text << "\n";
        spdlog::info("wrote {}", gen_out);
      }
      return 0;
    }
    for (std::size_t k = 0; k < run_cmds.size(); ++k) {
      if (run_cmds[k]->parsed()) return RunMode(modes[k].second, run_flags);
    }
    if (fit->parsed()) {
      std::vector<std::vector<std::pair<double, double>>> series;
      for (const std::string& path : csvs) series.push_back(a2l::ReadCsvColumn(path, column));
      const a2l::RateFit f = a2l::fit_rate(series, t_lo, t_hi);
      const nlohmann::json j = {{"slope", f.slope},         {"intercept", f.intercept},
                                {"stderr", f.stderr_slope}, {"points", f.points},
                                {"excluded", f.excluded},   {"column", column}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (ver->parsed()) {
      if (list || suite.empty()) {
        for (const std::string& s : a2l::AvailableSuites()) std::cout << s << "\n";
        return list ? 0 : kExitUsage;
      }
      a2l::VerifyOptions options;
      options.seeds = verify_seeds;
      options.threads = verify_threads;
      std::vector<std::string> names =
          suite == "all" ? a2l::AvailableSuites() : std::vector<std::string>{suite};
      nlohmann::json reports = nlohmann::json::array();
      bool pass = true;
      for (const std::string& name : names) {
        const a2l::SuiteReport r = a2l::verify(name, options);
        for (const a2l::CheckResult& c : r.checks) {
          std::cout << (c.pass ? "[ PASS ] " : "[ FAIL ] ") << r.name << "." << c.name
                    << "  value=" << c.value << "  (" << c.detail << ")\n";
        }
        spdlog::info("{}: {} in {:.2f}s", r.name, r.pass ? "pass" : "FAIL", r.seconds);
        pass = pass && r.pass;
        reports.push_back(nlohmann::json::parse(r.ToJson()));
      }
      if (!verify_out.empty()) {
        std::ofstream(verify_out) << reports.dump(2) << "\n";
      }
      return pass ? 0 : kExitChecksFailed;
    }
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitChecksFailed;
  }
  return 0;
}
