/*
 * Copyright 2026 The prsrank Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "prsrank/propensity_est.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "prsrank/simulate.h"

namespace prsrank {

void SwapLog::merge(const SwapLog& other) {
  if (other.pairs.size() != pairs.size()) {
    throw std::invalid_argument("cannot merge swap logs of different depth");
  }
  for (std::size_t m = 0; m < pairs.size(); ++m) {
    pairs[m].clicks_upper += other.pairs[m].clicks_upper;
    pairs[m].clicks_lower += other.pairs[m].clicks_lower;
    pairs[m].sessions += other.pairs[m].sessions;
  }
}

std::vector<double> estimate_ratios(const SwapLog& log) {
  std::vector<double> ratios = {1.0};
  for (std::size_t m = 0; m < log.pairs.size(); ++m) {
    const SwapCounts& c = log.pairs[m];
    if (c.position != m + 2) {
      throw std::invalid_argument("swap log positions must be contiguous from 2");
    }
    if (!(c.clicks_upper > 0.0)) {
      throw std::invalid_argument("no clicks at position " +
                                  std::to_string(c.position - 1) +
                                  " while swapping positions " +
                                  std::to_string(c.position - 1) + " and " +
                                  std::to_string(c.position));
    }
    ratios.push_back(ratios.back() * c.clicks_lower / c.clicks_upper);
  }
  return ratios;
}

PropensityCurve fit_propensity_curve(std::vector<double> ratios) {
  if (ratios.empty()) throw std::invalid_argument("no propensity ratios to fit");
  PropensityCurve curve;
  for (double r : ratios) {
    if (!(r > 0.0)) throw std::invalid_argument("propensity ratios must be positive");
  }
  // Least squares through the origin: log r_k = -eta * log k.
  double xy = 0.0, xx = 0.0;
  for (std::size_t k = 1; k <= ratios.size(); ++k) {
    const double x = std::log(static_cast<double>(k));
    xy += x * std::log(ratios[k - 1]);
    xx += x * x;
  }
  curve.fitted_eta = xx > 0.0 ? std::max(0.0, -xy / xx) : 0.0;
  curve.ratios = std::move(ratios);
  return curve;
}

double PropensityCurve::operator()(std::size_t rank) const {
  if (rank == 0) throw std::invalid_argument("ranks are 1-based");
  if (rank <= ratios.size()) return std::min(1.0, ratios[rank - 1]);
  const double depth = static_cast<double>(ratios.size());
  const double last = std::min(1.0, ratios.back());
  return last * std::pow(depth / static_cast<double>(rank), fitted_eta);
}

SwapLog simulate_swap_experiment(const Ranker& ranker, const Dataset& pool,
                                 const SwapExperimentConfig& config) {
  if (pool.queries.empty()) throw std::invalid_argument("empty query pool");
  if (config.max_position < 2) throw std::invalid_argument("max_position must be >= 2");
  if (!(config.mu >= 0.0 && config.mu < 0.5)) {
    throw std::invalid_argument("mu must lie in [0, 0.5)");
  }
  std::vector<std::size_t> eligible;
  std::vector<std::vector<std::size_t>> orders(pool.queries.size());
  for (std::size_t q = 0; q < pool.queries.size(); ++q) {
    if (pool.queries[q].size() < 2) continue;
    eligible.push_back(q);
    orders[q] = rank_order(score_query(ranker, pool.queries[q]));
  }
  if (eligible.empty()) throw std::invalid_argument("no query has two documents");

  SwapLog log;
  for (std::size_t k = 2; k <= config.max_position; ++k) log.pairs.push_back({k, 0, 0, 0});

  const NoiseModel noise{config.mu};
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  for (std::size_t s = 0; s < config.sessions; ++s) {
    const std::size_t q = eligible[pick(rng)];
    const QueryGroup& query = pool.queries[q];
    std::vector<std::size_t> order = orders[q];
    const std::size_t deepest = std::min(config.max_position, order.size());
    std::uniform_int_distribution<std::size_t> pick_pair(2, deepest);
    const std::size_t k = pick_pair(rng);
    if (coin(rng)) std::swap(order[k - 2], order[k - 1]);

    SwapCounts& counts = log.pairs[k - 2];
    ++counts.sessions;
    for (std::size_t slot : {k - 2, k - 1}) {
      const double p = observation_propensity(slot + 1, config.eta);
      if (!(unit(rng) < p)) continue;
      const bool relevant = query.binary_relevance[order[slot]];
      const double p_click = relevant ? noise.click_relevant() : noise.click_irrelevant();
      if (unit(rng) < p_click) {
        (slot == k - 2 ? counts.clicks_upper : counts.clicks_lower) += 1.0;
      }
    }
  }
  return log;
}

void write_swap_log(const SwapLog& log, std::ostream& out) {
  out << "position,clicks_upper,clicks_lower,sessions\n";
  for (const auto& c : log.pairs) {
    out << c.position << ',' << c.clicks_upper << ',' << c.clicks_lower << ','
        << c.sessions << '\n';
  }
}

SwapLog read_swap_log(std::istream& in) {
  SwapLog log;
  std::string line;
  if (!std::getline(in, line) || line.rfind("position,", 0) != 0) {
    throw std::runtime_error("swap log: missing CSV header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    SwapCounts c;
    char comma1 = 0, comma2 = 0, comma3 = 0;
    if (!(row >> c.position >> comma1 >> c.clicks_upper >> comma2 >> c.clicks_lower >>
          comma3 >> c.sessions) ||
        comma1 != ',' || comma2 != ',' || comma3 != ',') {
      throw std::runtime_error("swap log: malformed row '" + line + "'");
    }
    log.pairs.push_back(c);
  }
  return log;
}

}  // namespace prsrank
