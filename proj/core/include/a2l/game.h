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

#ifndef A2L_GAME_H_
#define A2L_GAME_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace a2l {

inline constexpr double kSimplexTolerance = 1e-9;

// Raised when a vector or matrix does not have the shape its owner expects.
class DimensionError : public std::invalid_argument {
 public:
  DimensionError(std::string what, int player, std::size_t expected,
                 std::size_t actual);

  int player() const { return player_; }
  std::size_t expected() const { return expected_; }
  std::size_t actual() const { return actual_; }

 private:
  int player_;
  std::size_t expected_;
  std::size_t actual_;
};

// Raised for malformed games: bad edges, non-zero-sum games flagged zero-sum,
// unknown generator kinds.
class GameError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A point of the probability simplex. Entries are non-negative and sum to one
// within kSimplexTolerance; construction rejects anything else.
class MixedStrategy {
 public:
  explicit MixedStrategy(std::vector<double> probs);
  MixedStrategy(std::initializer_list<double> probs)
      : MixedStrategy(std::vector<double>(probs)) {}

  static MixedStrategy Uniform(std::size_t d);
  static MixedStrategy Pure(std::size_t d, std::size_t action);
  // Normalizes non-negative weights; all-zero weights give the uniform point.
  static MixedStrategy FromWeights(std::vector<double> weights);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t a) const { return probs_[a]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& vec() const { return probs_; }

  bool operator==(const MixedStrategy&) const = default;

 private:
  std::vector<double> probs_;
};

// Per-action expected payoffs u_i(., x_{-i}) seen by one player.
class UtilityVector {
 public:
  UtilityVector() = default;
  explicit UtilityVector(std::vector<double> values);
  UtilityVector(std::initializer_list<double> values)
      : UtilityVector(std::vector<double>(values)) {}
  static UtilityVector Zeros(std::size_t d) {
    return UtilityVector(std::vector<double>(d, 0.0));
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t a) const { return values_[a]; }
  double& operator[](std::size_t a) { return values_[a]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vec() const { return values_; }

  double Max() const;
  // Lowest index among the maximizers.
  std::size_t Argmax() const;
  double Dot(const MixedStrategy& x) const;
  double Dot(std::span<const double> x) const;
  double MaxAbs() const;

  bool operator==(const UtilityVector&) const = default;

 private:
  std::vector<double> values_;
};

UtilityVector operator+(const UtilityVector& a, const UtilityVector& b);
UtilityVector operator-(const UtilityVector& a, const UtilityVector& b);
UtilityVector operator*(double s, const UtilityVector& a);

using StrategyProfile = std::vector<MixedStrategy>;

// Dense row-major payoff block.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}
  static Matrix FromRows(const std::vector<std::vector<double>>& rows);

  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  Matrix Transposed() const;
  Matrix Negated() const;

  bool operator==(const Matrix&) const = default;
};

struct Edge {
  int from = 0;
  int to = 0;
  Matrix payoff;  // from's payoff, shape d_from x d_to
};

// Polymatrix game on a directed graph whose edge set is closed under
// reversal. Immutable after construction.
class PolymatrixGame {
 public:
  // Validates shapes, reverse edges and, when zero_sum is set, the zero-sum
  // property over pure profiles.
  PolymatrixGame(std::vector<std::size_t> action_counts, std::vector<Edge> edges,
                 bool zero_sum, std::string name = "");

  int num_players() const { return static_cast<int>(action_counts_.size()); }
  std::size_t num_actions(int player) const { return action_counts_[player]; }
  const std::vector<std::size_t>& action_counts() const {
    return action_counts_;
  }
  // max_i d_i
  std::size_t dimension() const;
  bool zero_sum() const { return zero_sum_; }
  const std::string& name() const { return name_; }
  const std::vector<Edge>& edges() const { return edges_; }
  // Indices into edges() of the out-edges of `player`.
  const std::vector<std::size_t>& out_edges(int player) const {
    return out_edges_[player];
  }
  // Largest |entry| over all payoff blocks.
  double payoff_bound() const;

  // Payoff of a pure action profile for one player.
  double PurePayoff(int player, std::span<const std::size_t> actions) const;

  // Throws DimensionError when the profile does not match the game.
  void ValidateProfile(const StrategyProfile& profile) const;

 private:
  void CheckZeroSum() const;

  std::vector<std::size_t> action_counts_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> out_edges_;
  bool zero_sum_;
  std::string name_;
};

// u_i(., x_{-i}) = sum over out-edges (i,j) of A_ij x_j.
UtilityVector utility_vector(const PolymatrixGame& game, int player,
                             const StrategyProfile& profile);

// Expected utility of every player.
std::vector<double> utility(const PolymatrixGame& game,
                            const StrategyProfile& profile);

// Sum over players of the best-response improvement.
double total_gap(const PolymatrixGame& game, const StrategyProfile& profile);

// Per-player best-response improvement (the summands of total_gap).
std::vector<double> player_gaps(const PolymatrixGame& game,
                                const StrategyProfile& profile);

enum class GameKind { kMatchingPennies, kRockPaperScissors, kRandomZeroSum,
                      kRandomGeneralSum };

// Graph spec for the random generators: "complete", "cycle", or "gnp:<p>".
struct GraphSpec {
  enum class Type { kComplete, kCycle, kGnp } type = Type::kComplete;
  double p = 1.0;

  static GraphSpec Parse(const std::string& text);
  std::string ToString() const;
};

GameKind ParseGameKind(const std::string& name);
std::string GameKindName(GameKind kind);

// Deterministic for a fixed seed. Random generators draw entries uniformly in
// [-1, 1]; the zero-sum one sets A_ji = -A_ij^T on every edge.
PolymatrixGame generate_game(GameKind kind, int n, std::size_t d,
                             const GraphSpec& graph, std::uint64_t seed);

// JSON game file: {n, action_counts, zero_sum, edges:[{i, j, matrix}]}.
PolymatrixGame GameFromJson(const std::string& text);
PolymatrixGame LoadGame(const std::string& path);
std::string GameToJson(const PolymatrixGame& game);
void SaveGame(const PolymatrixGame& game, const std::string& path);

}  // namespace a2l

#endif  // A2L_GAME_H_
