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

#include <fstream>
#include <sstream>

#include "a2l/game.h"
#include "json.hpp"

namespace a2l {

using nlohmann::json;

PolymatrixGame GameFromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw GameError(std::string("game file is not valid JSON: ") + e.what());
  }
  try {
    const int n = j.at("n").get<int>();
    auto counts = j.at("action_counts").get<std::vector<std::size_t>>();
    if (static_cast<int>(counts.size()) != n) {
      throw DimensionError("action_counts length", -1,
                           static_cast<std::size_t>(n), counts.size());
    }
    const bool zero_sum = j.value("zero_sum", false);
    std::vector<Edge> edges;
    for (const json& e : j.at("edges")) {
      Edge edge;
      edge.from = e.at("i").get<int>();
      edge.to = e.at("j").get<int>();
      edge.payoff = Matrix::FromRows(
          e.at("matrix").get<std::vector<std::vector<double>>>());
      edges.push_back(std::move(edge));
    }
    return PolymatrixGame(std::move(counts), std::move(edges), zero_sum,
                          j.value("name", std::string()));
  } catch (const json::exception& e) {
    throw GameError(std::string("malformed game file: ") + e.what());
  }
}

PolymatrixGame LoadGame(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GameError("cannot open game file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return GameFromJson(buffer.str());
}

std::string GameToJson(const PolymatrixGame& game) {
  json j;
  j["n"] = game.num_players();
  j["action_counts"] = game.action_counts();
  j["zero_sum"] = game.zero_sum();
  if (!game.name().empty()) j["name"] = game.name();
  json edges = json::array();
  for (const Edge& e : game.edges()) {
    json rows = json::array();
    for (std::size_t r = 0; r < e.payoff.rows; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < e.payoff.cols; ++c) row.push_back(e.payoff(r, c));
      rows.push_back(std::move(row));
    }
    edges.push_back({{"i", e.from}, {"j", e.to}, {"matrix", std::move(rows)}});
  }
  j["edges"] = std::move(edges);
  return j.dump(2);
}

void SaveGame(const PolymatrixGame& game, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw GameError("cannot write game file '" + path + "'");
  out << GameToJson(game) << '\n';
}

}  // namespace a2l
