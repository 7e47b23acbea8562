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

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "format.h"
#include "json.hpp"

namespace a2l {

using nlohmann::json;
using internal::FormatDouble;

namespace {

std::string JoinProblems(const std::vector<std::string>& problems) {
  std::string s = "invalid configuration:";
  for (const std::string& p : problems) s += "\n  - " + p;
  return s;
}

const std::set<std::string> kGradientAlgorithms = {"mwu", "omwu", "a2l-mwu",
                                                   "a2l-omwu", "anytime-mwu"};
const std::set<std::string> kBanditAlgorithms = {"a2l-omwu-bandit"};
const std::set<std::string> kFisherAlgorithms = {"prd", "a2l-prd"};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument(JoinProblems(problems)), problems_(std::move(problems)) {}

FeedbackMode ParseFeedbackMode(const std::string& name) {
  if (name == "gradient") return FeedbackMode::kGradient;
  if (name == "bandit") return FeedbackMode::kBandit;
  if (name == "fisher") return FeedbackMode::kFisher;
  throw std::invalid_argument("unknown mode '" + name +
                              "' (expected gradient, bandit, fisher)");
}

std::string FeedbackModeName(FeedbackMode mode) {
  switch (mode) {
    case FeedbackMode::kGradient:
      return "gradient";
    case FeedbackMode::kBandit:
      return "bandit";
    case FeedbackMode::kFisher:
      return "fisher";
  }
  return "";
}

std::uint64_t Fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// -- Config -------------------------------------------------------------------

namespace {

template <typename T>
void Read(const json& j, const char* key, T& out, std::vector<std::string>& problems) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    problems.push_back(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
void ReadOptional(const json& j, const char* key, std::optional<T>& out,
                  std::vector<std::string>& problems) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  Read(j, key, v, problems);
  out = v;
}

void CheckKeys(const json& j, const std::set<std::string>& allowed,
               const std::string& where, std::vector<std::string>& problems) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      problems.push_back("unknown key '" + it.key() + "' in " + where);
    }
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::FromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  if (!j.is_object()) throw ConfigError({"config must be a JSON object"});
  std::vector<std::string> problems;
  CheckKeys(j,
            {"mode", "game", "market", "algorithm", "eta", "T", "epochs",
             "schedule", "weights", "seeds", "delta", "certified", "robust",
             "monitor_c", "out", "threads"},
            "config", problems);

  ExperimentConfig c;
  std::string mode = "gradient";
  Read(j, "mode", mode, problems);
  try {
    c.mode = ParseFeedbackMode(mode);
  } catch (const std::invalid_argument& e) {
    problems.push_back(e.what());
  }
  if (j.contains("game")) {
    const json& g = j.at("game");
    if (!g.is_object()) {
      problems.push_back("field 'game' must be an object");
    } else {
      CheckKeys(g, {"file", "kind", "n", "d", "graph", "seed"}, "game", problems);
      Read(g, "file", c.game.file, problems);
      Read(g, "kind", c.game.kind, problems);
      Read(g, "n", c.game.n, problems);
      Read(g, "d", c.game.d, problems);
      Read(g, "graph", c.game.graph, problems);
      ReadOptional(g, "seed", c.game.seed, problems);
    }
  }
  if (j.contains("market")) {
    const json& m = j.at("market");
    if (!m.is_object()) {
      problems.push_back("field 'market' must be an object");
    } else {
      CheckKeys(m, {"file", "agents", "goods", "seed"}, "market", problems);
      Read(m, "file", c.market.file, problems);
      Read(m, "agents", c.market.agents, problems);
      Read(m, "goods", c.market.goods, problems);
      ReadOptional(m, "seed", c.market.seed, problems);
    }
  }
  if (j.contains("algorithm")) {
    if (j.at("algorithm").is_string()) {
      c.algorithms = {j.at("algorithm").get<std::string>()};
    } else {
      Read(j, "algorithm", c.algorithms, problems);
    }
  } else if (c.mode == FeedbackMode::kBandit) {
    c.algorithms = {"a2l-omwu-bandit"};
  } else if (c.mode == FeedbackMode::kFisher) {
    c.algorithms = {"a2l-prd"};
  }
  ReadOptional(j, "eta", c.eta, problems);
  Read(j, "T", c.T, problems);
  Read(j, "epochs", c.epochs, problems);
  Read(j, "schedule", c.schedule, problems);
  Read(j, "weights", c.weights, problems);
  Read(j, "seeds", c.seeds, problems);
  Read(j, "delta", c.delta, problems);
  Read(j, "certified", c.certified, problems);
  Read(j, "robust", c.robust, problems);
  ReadOptional(j, "monitor_c", c.monitor_c, problems);
  Read(j, "out", c.out_dir, problems);
  Read(j, "threads", c.threads, problems);
  if (!problems.empty()) throw ConfigError(problems);
  return c;
}

ExperimentConfig ExperimentConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJson(buffer.str());
}

std::string ExperimentConfig::ToJson() const {
  json g = {{"file", game.file}, {"kind", game.kind}, {"n", game.n},
            {"d", game.d},       {"graph", game.graph}};
  g["seed"] = game.seed ? json(*game.seed) : json(nullptr);
  json m = {{"file", market.file}, {"agents", market.agents}, {"goods", market.goods}};
  m["seed"] = market.seed ? json(*market.seed) : json(nullptr);
  json j = {{"mode", FeedbackModeName(mode)},
            {"game", g},
            {"market", m},
            {"algorithm", algorithms},
            {"T", T},
            {"epochs", epochs},
            {"schedule", schedule},
            {"weights", weights},
            {"seeds", seeds},
            {"delta", delta},
            {"certified", certified},
            {"robust", robust},
            {"out", out_dir}};
  j["eta"] = eta ? json(*eta) : json(nullptr);
  j["monitor_c"] = monitor_c ? json(*monitor_c) : json(nullptr);
  // nlohmann::json objects keep keys sorted, so dump() is canonical. The
  // thread count does not affect results and is left out.
  return j.dump();
}

std::string ExperimentConfig::Hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(ToJson())));
  return buf;
}

PolymatrixGame BuildGame(const GameSource& source, std::uint64_t run_seed) {
  if (!source.file.empty()) return LoadGame(source.file);
  return generate_game(ParseGameKind(source.kind), source.n, source.d,
                       GraphSpec::Parse(source.graph),
                       source.seed.value_or(run_seed));
}

FisherMarket BuildMarket(const MarketSource& source, std::uint64_t run_seed) {
  if (!source.file.empty()) return LoadMarket(source.file);
  return FisherMarket::Random(source.agents, source.goods,
                              source.seed.value_or(run_seed));
}

std::vector<std::string> ExperimentConfig::Validate() const {
  std::vector<std::string> problems;
  if (seeds.empty()) problems.push_back("seed list is empty");
  if (algorithms.empty()) problems.push_back("algorithm list is empty");
  if (eta && !(*eta > 0.0)) problems.push_back("eta must be positive");
  if (!(delta > 0.0 && delta < 1.0)) problems.push_back("delta must lie in (0, 1)");
  if (monitor_c && !(*monitor_c > 0.0)) problems.push_back("monitor_c must be positive");

  const std::set<std::string>* allowed = &kGradientAlgorithms;
  if (mode == FeedbackMode::kBandit) allowed = &kBanditAlgorithms;
  if (mode == FeedbackMode::kFisher) allowed = &kFisherAlgorithms;
  for (const std::string& a : algorithms) {
    if (!allowed->count(a)) {
      problems.push_back("algorithm '" + a + "' is not available in " +
                         FeedbackModeName(mode) + " mode");
    }
  }

  if (mode == FeedbackMode::kFisher) {
    if (T < 1) problems.push_back("T must be at least 1");
    if (algorithms.size() != 1) {
      problems.push_back("fisher mode takes one algorithm for all agents");
    }
    if (!market.file.empty() && !std::filesystem::exists(market.file)) {
      problems.push_back("market file '" + market.file + "' does not exist");
    } else if (!seeds.empty()) {
      try {
        BuildMarket(market, seeds.front());
      } catch (const std::exception& e) {
        problems.push_back(std::string("market: ") + e.what());
      }
    }
    return problems;
  }

  if (!game.file.empty() && !std::filesystem::exists(game.file)) {
    problems.push_back("game file '" + game.file + "' does not exist");
    return problems;
  }
  if (seeds.empty()) return problems;
  std::optional<PolymatrixGame> g;
  try {
    g.emplace(BuildGame(game, seeds.front()));
  } catch (const std::exception& e) {
    problems.push_back(std::string("game: ") + e.what());
    return problems;
  }
  const int n = g->num_players();
  if (algorithms.size() != 1 && static_cast<int>(algorithms.size()) != n) {
    problems.push_back("algorithm list has " + std::to_string(algorithms.size()) +
                       " entries for " + std::to_string(n) + " players");
  }

  if (mode == FeedbackMode::kGradient) {
    if (T < 1) problems.push_back("T must be at least 1");
    try {
      ParseWeightRule(weights);
    } catch (const std::invalid_argument& e) {
      problems.push_back(e.what());
    }
    const double bound = DefaultGradientEta(n);
    if (certified && n >= 2 && eta && *eta > bound) {
      problems.push_back("certified mode requires eta <= 1/(2(n-1)) = " +
                         FormatDouble(bound) + " for the last-iterate bound; got " +
                         FormatDouble(*eta));
    }
  } else {
    if (epochs < 1) problems.push_back("epochs must be at least 1");
    if (n < 2) problems.push_back("bandit mode needs at least two players");
    try {
      EpochSchedule::Parse(schedule, g->dimension());
    } catch (const std::invalid_argument& e) {
      problems.push_back(e.what());
    }
    const double bound = 1.0 / (6.0 * n);
    if (certified && eta && *eta > bound) {
      problems.push_back("certified mode requires eta <= 1/(6n) = " +
                         FormatDouble(bound) + " for the bandit guarantee; got " +
                         FormatDouble(*eta));
    }
    if (certified && schedule.rfind("custom", 0) == 0) {
      problems.push_back("certified mode requires a theory schedule (B_t >= t^4)");
    }
  }
  return problems;
}

// -- Parallel execution -------------------------------------------------------

void ParallelFor(std::size_t count, std::size_t threads,
                 const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  // Lowest failing index wins, so the error does not depend on scheduling.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// -- Runs ---------------------------------------------------------------------

namespace {

std::string PlayerAlgorithm(const ExperimentConfig& c, int i) {
  return c.algorithms.size() == 1 ? c.algorithms.front() : c.algorithms[i];
}

SeedResult RunGradientSeed(const ExperimentConfig& c, std::uint64_t seed) {
  const PolymatrixGame game = BuildGame(c.game, seed);
  const int n = game.num_players();
  const double eta = c.eta.value_or(DefaultGradientEta(n));
  std::vector<LearnerSpec> specs;
  bool all_a2l_omwu = true;
  for (int i = 0; i < n; ++i) {
    LearnerSpec s;
    s.algorithm = PlayerAlgorithm(c, i);
    s.eta = eta;
    s.weights = ParseWeightRule(c.weights);
    s.robust = c.robust;
    s.monitor_c = c.monitor_c.value_or(2.0);
    all_a2l_omwu = all_a2l_omwu && s.algorithm == "a2l-omwu";
    specs.push_back(std::move(s));
  }
  const Trajectory traj = run_full_feedback(game, specs, c.T, seed);

  SeedResult r;
  r.seed = seed;
  std::ostringstream csv;
  WriteTrajectoryCsv(traj, csv);
  r.csv = csv.str();
  r.final_gap = traj.rounds.back().tgap_played;

  const bool bound_applies = all_a2l_omwu && game.zero_sum() && n >= 2 &&
                             eta <= DefaultGradientEta(n) + 1e-15 &&
                             c.weights == "uniform";
  const RegretSeries series = regret_series(traj);
  if (bound_applies) {
    const double S = LastIterateScale(game, eta);
    CheckResult last{"last_iterate_bound", true, INFINITY, ""};
    CheckResult ident{"average_gap_identity", true, 0.0, ""};
    for (std::size_t k = 0; k < traj.rounds.size(); ++k) {
      const double t = static_cast<double>(k + 1);
      const double gap = traj.rounds[k].tgap_played;
      last.value = std::min(last.value, S / t + 1e-9 - gap);
      double reg_sum = 0.0;
      for (int i = 0; i < n; ++i) reg_sum += series.reg_inner[i][k];
      ident.value = std::max(ident.value, std::abs(gap - reg_sum / t));
    }
    last.pass = last.value >= 0.0;
    last.detail = "min over t of sum log d_i/(eta t) + 1e-9 - TGap";
    ident.pass = ident.value <= 1e-10;
    ident.detail = "max over t of |TGap(last) - sum_i Reg_i/t|";
    const double T = static_cast<double>(traj.rounds.size());
    CheckResult dreg{"dynamic_regret_bound", true, INFINITY, ""};
    for (int i = 0; i < n; ++i) {
      dreg.value = std::min(dreg.value, S * (1.0 + std::log(T)) - series.dreg[i].back());
    }
    dreg.pass = dreg.value >= 0.0;
    dreg.detail = "min over players of S (1 + ln T) - DReg_i";
    r.checks = {last, ident, dreg};
  }
  CheckResult nonneg{"tgap_nonnegative", true, 0.0, ""};
  for (const RoundRecord& rec : traj.rounds) {
    nonneg.value = std::min(nonneg.value, rec.tgap_played);
  }
  nonneg.pass = nonneg.value >= 0.0;
  r.checks.push_back(nonneg);
  return r;
}

SeedResult RunBanditSeed(const ExperimentConfig& c, std::uint64_t seed) {
  const PolymatrixGame game = BuildGame(c.game, seed);
  BanditConfig bc;
  bc.schedule = EpochSchedule::Parse(c.schedule, game.dimension());
  bc.eta = c.eta.value_or(1.0 / (6.0 * game.num_players()));
  bc.epochs = c.epochs;
  bc.delta = c.delta;
  bc.monitor = c.robust;
  bc.monitor_c = c.monitor_c.value_or(4.0);
  const BanditTrajectory traj = run_bandit(game, bc, seed);

  SeedResult r;
  r.seed = seed;
  std::ostringstream csv;
  WriteBanditCsv(traj, csv);
  r.csv = csv.str();
  r.final_gap = traj.epochs.back().tgap_mixed;

  CheckResult d1{"error_propagation", true, INFINITY,
                 "min slack of both forms of the recovered-error bound"};
  CheckResult d2{"regret_with_error", true, INFINITY,
                 "min slack of the regret bound with estimation error"};
  CheckResult d3{"estimation_error_violations", true, 0.0,
                 "count of epoch-player cells above the concentration bound"};
  bool audited = false;
  for (const BanditEpochRecord& e : traj.epochs) {
    for (const PlayerEpochRecord& p : e.players) {
      if (!p.audit) continue;
      audited = true;
      d1.value = std::min({d1.value, p.audit->d1_slack, p.audit->d1_sq_slack});
      d2.value = std::min(d2.value, p.audit->d2_slack);
      if (p.audit->d3_violated) d3.value += 1.0;
    }
  }
  if (audited) {
    d1.pass = d1.value >= -1e-6;
    d2.pass = d2.value >= -1e-6;
    r.checks = {d1, d2, d3};
  }
  CheckResult cert{"certified", true, traj.certified ? 1.0 : 0.0, ""};
  for (const std::string& w : traj.warnings) cert.detail += (cert.detail.empty() ? "" : "; ") + w;
  r.checks.push_back(cert);
  return r;
}

SeedResult RunFisherSeed(const ExperimentConfig& c, std::uint64_t seed) {
  const FisherMarket market = BuildMarket(c.market, seed);
  const std::vector<FisherRow> rows = c.algorithms.front() == "prd"
                                          ? run_prd(market, c.T)
                                          : run_a2l_prd(market, c.T);
  SeedResult r;
  r.seed = seed;
  std::ostringstream csv;
  WritePriceCsv(rows, csv);
  r.csv = csv.str();
  r.final_gap = rows.back().max_bpb_violation;
  CheckResult cons{"price_conservation", true, 0.0,
                   "max over t of |sum_j p_j - sum_i B_i|"};
  const double total = market.total_budget();
  for (const FisherRow& row : rows) {
    const double s = std::accumulate(row.prices.begin(), row.prices.end(), 0.0);
    cons.value = std::max(cons.value, std::abs(s - total));
  }
  cons.pass = cons.value <= 1e-9 * std::max(1.0, total);
  r.checks = {cons};
  return r;
}

json CheckToJson(const CheckResult& c) {
  json j = {{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}};
  j["value"] = std::isfinite(c.value) ? json(c.value) : json(nullptr);
  return j;
}

}  // namespace

RunResult run_in_memory(const ExperimentConfig& config) {
  const std::vector<std::string> problems = config.Validate();
  if (!problems.empty()) throw ConfigError(problems);

  RunResult result;
  result.seeds.resize(config.seeds.size());
  ParallelFor(config.seeds.size(), config.threads, [&](std::size_t k) {
    const std::uint64_t seed = config.seeds[k];
    switch (config.mode) {
      case FeedbackMode::kGradient:
        result.seeds[k] = RunGradientSeed(config, seed);
        break;
      case FeedbackMode::kBandit:
        result.seeds[k] = RunBanditSeed(config, seed);
        break;
      case FeedbackMode::kFisher:
        result.seeds[k] = RunFisherSeed(config, seed);
        break;
    }
  });

  const std::filesystem::path dir(config.out_dir);
  json runs = json::array();
  for (SeedResult& s : result.seeds) {
    s.csv_path = (dir / (FeedbackModeName(config.mode) + "_seed" +
                         std::to_string(s.seed) + ".csv"))
                     .string();
    json checks = json::array();
    for (const CheckResult& c : s.checks) {
      checks.push_back(CheckToJson(c));
      result.all_passed = result.all_passed && c.pass;
    }
    runs.push_back({{"seed", s.seed},
                    {"csv", s.csv_path},
                    {"final_gap", s.final_gap},
                    {"checks", std::move(checks)}});
  }
  json summary = {{"schema_version", kSummarySchemaVersion},
                  {"prng", kPrngName},
                  {"config_hash", config.Hash()},
                  {"config", json::parse(config.ToJson())},
                  {"runs", std::move(runs)},
                  {"all_passed", result.all_passed}};
  result.summary_json = summary.dump(2);
  result.summary_path = (dir / "summary.json").string();
  return result;
}

RunResult run(const ExperimentConfig& config) {
  RunResult result = run_in_memory(config);
  std::filesystem::create_directories(config.out_dir);
  for (const SeedResult& s : result.seeds) {
    std::ofstream out(s.csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + s.csv_path + "'");
    out << s.csv;
  }
  std::ofstream out(result.summary_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + result.summary_path + "'");
  out << result.summary_json << '\n';
  return result;
}

// -- Rate fitting -------------------------------------------------------------

RateFit fit_rate(const std::vector<std::vector<std::pair<double, double>>>& series,
                 double t_lo, double t_hi) {
  RateFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& s : series) {
    for (const auto& [t, g] : s) {
      if (t < t_lo || t > t_hi) continue;
      if (!(g > 0.0) || !(t > 0.0)) {
        ++fit.excluded;
        continue;
      }
      xs.push_back(std::log(t));
      ys.push_back(std::log(g));
    }
  }
  fit.points = xs.size();
  if (fit.points < 10) {
    throw std::invalid_argument("rate fit needs at least 10 positive points in the window (got " +
                                std::to_string(fit.points) + ")");
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("rate fit needs at least two distinct t");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double e = ys[k] - fit.intercept - fit.slope * xs[k];
    ssr += e * e;
  }
  fit.stderr_slope = std::sqrt(ssr / (n - 2.0) / sxx);
  return fit;
}

std::vector<std::pair<double, double>> ReadCsvColumn(const std::string& path,
                                                     const std::string& column) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("'" + path + "' is empty");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  const std::vector<std::string> header = split(line);
  const auto find = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw std::invalid_argument("'" + path + "' has no column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ti = find("t");
  const std::size_t ci = find(column);
  std::vector<std::pair<double, double>> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() <= std::max(ti, ci) || cells[ci].empty()) continue;
    out.emplace_back(std::stod(cells[ti]), std::stod(cells[ci]));
  }
  return out;
}

}  // namespace a2l
