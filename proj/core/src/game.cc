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

#include "a2l/game.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

namespace a2l {

namespace {

std::string DimMessage(const std::string& what, int player,
                       std::size_t expected, std::size_t actual) {
  std::ostringstream os;
  os << what << ": player " << player << " expected dimension " << expected
     << ", got " << actual;
  return os.str();
}

constexpr double kZeroSumTolerance = 1e-9;
constexpr double kExhaustiveProfileLimit = 1e6;
constexpr int kSampledProfiles = 10000;

}  // namespace

DimensionError::DimensionError(std::string what, int player,
                               std::size_t expected, std::size_t actual)
    : std::invalid_argument(DimMessage(what, player, expected, actual)),
      player_(player),
      expected_(expected),
      actual_(actual) {}

// -- MixedStrategy ------------------------------------------------------------

MixedStrategy::MixedStrategy(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("empty mixed strategy");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("mixed strategy has a negative entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    std::ostringstream os;
    os << "mixed strategy sums to " << sum;
    throw std::invalid_argument(os.str());
  }
}

MixedStrategy MixedStrategy::Uniform(std::size_t d) {
  return MixedStrategy(std::vector<double>(d, 1.0 / static_cast<double>(d)));
}

MixedStrategy MixedStrategy::Pure(std::size_t d, std::size_t action) {
  std::vector<double> p(d, 0.0);
  p.at(action) = 1.0;
  return MixedStrategy(std::move(p));
}

MixedStrategy MixedStrategy::FromWeights(std::vector<double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (total <= 0.0) return Uniform(weights.size());
  for (double& w : weights) w /= total;
  return MixedStrategy(std::move(weights));
}

// -- UtilityVector ------------------------------------------------------------

UtilityVector::UtilityVector(std::vector<double> values)
    : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("utility vector has a non-finite entry");
    }
  }
}

double UtilityVector::Max() const {
  return *std::max_element(values_.begin(), values_.end());
}

std::size_t UtilityVector::Argmax() const {
  return static_cast<std::size_t>(
      std::max_element(values_.begin(), values_.end()) - values_.begin());
}

double UtilityVector::Dot(std::span<const double> x) const {
  if (x.size() != values_.size()) {
    throw DimensionError("dot product", -1, values_.size(), x.size());
  }
  double s = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) s += values_[a] * x[a];
  return s;
}

double UtilityVector::Dot(const MixedStrategy& x) const {
  return Dot(x.probs());
}

double UtilityVector::MaxAbs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

UtilityVector operator+(const UtilityVector& a, const UtilityVector& b) {
  std::vector<double> out(a.vec());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += b[k];
  return UtilityVector(std::move(out));
}

UtilityVector operator-(const UtilityVector& a, const UtilityVector& b) {
  std::vector<double> out(a.vec());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= b[k];
  return UtilityVector(std::move(out));
}

UtilityVector operator*(double s, const UtilityVector& a) {
  std::vector<double> out(a.vec());
  for (double& v : out) v *= s;
  return UtilityVector(std::move(out));
}

// -- Matrix -------------------------------------------------------------------

Matrix Matrix::FromRows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols) {
      throw GameError("ragged payoff matrix");
    }
    for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Matrix Matrix::Transposed() const {
  Matrix t(cols, rows);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::Negated() const {
  Matrix m = *this;
  for (double& v : m.data) v = -v;
  return m;
}

// -- PolymatrixGame -----------------------------------------------------------

PolymatrixGame::PolymatrixGame(std::vector<std::size_t> action_counts,
                               std::vector<Edge> edges, bool zero_sum,
                               std::string name)
    : action_counts_(std::move(action_counts)),
      edges_(std::move(edges)),
      out_edges_(action_counts_.size()),
      zero_sum_(zero_sum),
      name_(std::move(name)) {
  const int n = num_players();
  if (n < 1) throw GameError("game needs at least one player");
  for (int i = 0; i < n; ++i) {
    if (action_counts_[i] < 1) {
      throw GameError("player " + std::to_string(i) + " has no actions");
    }
  }
  std::map<std::pair<int, int>, std::size_t> seen;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.from < 0 || edge.from >= n || edge.to < 0 || edge.to >= n ||
        edge.from == edge.to) {
      throw GameError("edge (" + std::to_string(edge.from) + "," +
                      std::to_string(edge.to) + ") is not a valid player pair");
    }
    if (!seen.emplace(std::make_pair(edge.from, edge.to), e).second) {
      throw GameError("duplicate edge (" + std::to_string(edge.from) + "," +
                      std::to_string(edge.to) + ")");
    }
    if (edge.payoff.rows != action_counts_[edge.from]) {
      throw DimensionError("payoff rows of edge", edge.from,
                           action_counts_[edge.from], edge.payoff.rows);
    }
    if (edge.payoff.cols != action_counts_[edge.to]) {
      throw DimensionError("payoff columns of edge", edge.to,
                           action_counts_[edge.to], edge.payoff.cols);
    }
    for (double v : edge.payoff.data) {
      if (!std::isfinite(v)) throw GameError("non-finite payoff entry");
    }
    out_edges_[edge.from].push_back(e);
  }
  for (const auto& [key, index] : seen) {
    if (!seen.count({key.second, key.first})) {
      throw GameError("edge (" + std::to_string(key.first) + "," +
                      std::to_string(key.second) + ") has no reverse edge");
    }
  }
  if (zero_sum_) CheckZeroSum();
}

std::size_t PolymatrixGame::dimension() const {
  return *std::max_element(action_counts_.begin(), action_counts_.end());
}

double PolymatrixGame::payoff_bound() const {
  double m = 0.0;
  for (const Edge& e : edges_)
    for (double v : e.payoff.data) m = std::max(m, std::abs(v));
  return m;
}

double PolymatrixGame::PurePayoff(int player,
                                  std::span<const std::size_t> actions) const {
  double total = 0.0;
  for (std::size_t e : out_edges_[player]) {
    const Edge& edge = edges_[e];
    total += edge.payoff(actions[edge.from], actions[edge.to]);
  }
  return total;
}

void PolymatrixGame::CheckZeroSum() const {
  const int n = num_players();
  double profiles = 1.0;
  for (std::size_t d : action_counts_) profiles *= static_cast<double>(d);

  std::vector<std::size_t> actions(n, 0);
  auto check = [&]() {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += PurePayoff(i, actions);
    if (std::abs(sum) > kZeroSumTolerance) {
      std::ostringstream os;
      os << "game flagged zero-sum but a pure profile sums to " << sum;
      throw GameError(os.str());
    }
  };

  if (profiles <= kExhaustiveProfileLimit) {
    while (true) {
      check();
      int k = 0;
      while (k < n && ++actions[k] == action_counts_[k]) actions[k++] = 0;
      if (k == n) break;
    }
  } else {
    std::mt19937_64 rng(0x5eed);
    for (int s = 0; s < kSampledProfiles; ++s) {
      for (int i = 0; i < n; ++i) {
        actions[i] = std::uniform_int_distribution<std::size_t>(
            0, action_counts_[i] - 1)(rng);
      }
      check();
    }
  }
}

void PolymatrixGame::ValidateProfile(const StrategyProfile& profile) const {
  if (profile.size() != action_counts_.size()) {
    throw DimensionError("profile length", -1, action_counts_.size(),
                         profile.size());
  }
  for (int i = 0; i < num_players(); ++i) {
    if (profile[i].size() != action_counts_[i]) {
      throw DimensionError("strategy dimension", i, action_counts_[i],
                           profile[i].size());
    }
  }
}

UtilityVector utility_vector(const PolymatrixGame& game, int player,
                             const StrategyProfile& profile) {
  game.ValidateProfile(profile);
  std::vector<double> v(game.num_actions(player), 0.0);
  for (std::size_t e : game.out_edges(player)) {
    const Edge& edge = game.edges()[e];
    const MixedStrategy& xj = profile[edge.to];
    for (std::size_t r = 0; r < edge.payoff.rows; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < edge.payoff.cols; ++c) {
        s += edge.payoff(r, c) * xj[c];
      }
      v[r] += s;
    }
  }
  return UtilityVector(std::move(v));
}

std::vector<double> utility(const PolymatrixGame& game,
                            const StrategyProfile& profile) {
  std::vector<double> out(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    out[i] = utility_vector(game, i, profile).Dot(profile[i]);
  }
  return out;
}

std::vector<double> player_gaps(const PolymatrixGame& game,
                                const StrategyProfile& profile) {
  std::vector<double> gaps(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    const UtilityVector u = utility_vector(game, i, profile);
    gaps[i] = std::max(0.0, u.Max() - u.Dot(profile[i]));
  }
  return gaps;
}

double total_gap(const PolymatrixGame& game, const StrategyProfile& profile) {
  const std::vector<double> gaps = player_gaps(game, profile);
  return std::accumulate(gaps.begin(), gaps.end(), 0.0);
}

// -- Generators ---------------------------------------------------------------

GraphSpec GraphSpec::Parse(const std::string& text) {
  GraphSpec g;
  if (text == "complete") {
    g.type = Type::kComplete;
  } else if (text == "cycle") {
    g.type = Type::kCycle;
  } else if (text.rfind("gnp:", 0) == 0) {
    g.type = Type::kGnp;
    try {
      g.p = std::stod(text.substr(4));
    } catch (const std::exception&) {
      throw GameError("invalid graph spec '" + text + "'");
    }
    if (!(g.p >= 0.0 && g.p <= 1.0)) {
      throw GameError("invalid graph spec '" + text + "': p outside [0,1]");
    }
  } else {
    throw GameError("invalid graph spec '" + text +
                    "' (expected complete, cycle or gnp:<p>)");
  }
  return g;
}

std::string GraphSpec::ToString() const {
  switch (type) {
    case Type::kComplete: return "complete";
    case Type::kCycle: return "cycle";
    case Type::kGnp: {
      std::ostringstream os;
      os << "gnp:" << p;
      return os.str();
    }
  }
  return "complete";
}

GameKind ParseGameKind(const std::string& name) {
  if (name == "matching_pennies") return GameKind::kMatchingPennies;
  if (name == "rps") return GameKind::kRockPaperScissors;
  if (name == "random_zs") return GameKind::kRandomZeroSum;
  if (name == "random_gs") return GameKind::kRandomGeneralSum;
  throw GameError("unknown game kind '" + name +
                  "' (expected matching_pennies, rps, random_zs, random_gs)");
}

std::string GameKindName(GameKind kind) {
  switch (kind) {
    case GameKind::kMatchingPennies: return "matching_pennies";
    case GameKind::kRockPaperScissors: return "rps";
    case GameKind::kRandomZeroSum: return "random_zs";
    case GameKind::kRandomGeneralSum: return "random_gs";
  }
  return "unknown";
}

namespace {

std::vector<std::pair<int, int>> GraphPairs(int n, const GraphSpec& graph,
                                            std::mt19937_64& rng) {
  std::vector<std::pair<int, int>> pairs;
  switch (graph.type) {
    case GraphSpec::Type::kComplete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
      break;
    case GraphSpec::Type::kCycle:
      if (n == 2) {
        pairs.emplace_back(0, 1);
      } else {
        for (int i = 0; i < n; ++i) {
          const int j = (i + 1) % n;
          pairs.emplace_back(std::min(i, j), std::max(i, j));
        }
      }
      break;
    case GraphSpec::Type::kGnp: {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (coin(rng) < graph.p) pairs.emplace_back(i, j);
      break;
    }
  }
  return pairs;
}

Matrix RandomMatrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  Matrix m(r, c);
  for (double& v : m.data) v = entry(rng);
  return m;
}

}  // namespace

PolymatrixGame generate_game(GameKind kind, int n, std::size_t d,
                             const GraphSpec& graph, std::uint64_t seed) {
  switch (kind) {
    case GameKind::kMatchingPennies: {
      const Matrix a = Matrix::FromRows({{1, 0}, {0, 1}});
      return PolymatrixGame({2, 2}, {{0, 1, a}, {1, 0, a.Transposed().Negated()}},
                            true, "matching_pennies");
    }
    case GameKind::kRockPaperScissors: {
      const Matrix a = Matrix::FromRows({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}});
      return PolymatrixGame({3, 3}, {{0, 1, a}, {1, 0, a.Transposed().Negated()}},
                            true, "rps");
    }
    case GameKind::kRandomZeroSum:
    case GameKind::kRandomGeneralSum: {
      if (n < 2) throw GameError("random games need n >= 2");
      if (d < 2) throw GameError("random games need d >= 2");
      std::mt19937_64 rng(seed);
      const bool zs = kind == GameKind::kRandomZeroSum;
      std::vector<Edge> edges;
      for (const auto& [i, j] : GraphPairs(n, graph, rng)) {
        Matrix a = RandomMatrix(d, d, rng);
        Matrix b = zs ? a.Transposed().Negated() : RandomMatrix(d, d, rng);
        edges.push_back({i, j, std::move(a)});
        edges.push_back({j, i, std::move(b)});
      }
      std::ostringstream name;
      name << GameKindName(kind) << "(n=" << n << ",d=" << d
           << ",graph=" << graph.ToString() << ",seed=" << seed << ")";
      return PolymatrixGame(std::vector<std::size_t>(n, d), std::move(edges), zs,
                            name.str());
    }
  }
  throw GameError("unknown game kind");
}

}  // namespace a2l
