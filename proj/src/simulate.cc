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

#include "prsrank/simulate.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "prsrank/learn.h"

namespace prsrank {
namespace {

std::string bits(const std::vector<std::uint8_t>& v) {
  std::string s(v.size(), '0');
  for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i] ? '1' : '0';
  return s;
}

std::vector<std::uint8_t> parse_bits(const std::string& s, std::size_t line_no) {
  std::vector<std::uint8_t> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') {
      throw std::runtime_error("click log line " + std::to_string(line_no) +
                               ": bad bit string");
    }
    v[i] = s[i] == '1';
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

double observation_propensity(std::size_t rank, double eta) {
  if (rank == 0) throw std::invalid_argument("rank is 1-based");
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
  return std::pow(1.0 / static_cast<double>(rank), eta);
}

std::size_t ClickSession::num_clicks() const {
  return static_cast<std::size_t>(std::count(clicks.begin(), clicks.end(), 1));
}

std::size_t ClickLog::total_clicks() const {
  std::size_t total = 0;
  for (const auto& s : sessions) total += s.num_clicks();
  return total;
}

LinearRanker train_production_ranker(const Dataset& production,
                                     const LogRegConfig& config) {
  if (production.queries.empty()) {
    throw std::invalid_argument("production slice is empty");
  }
  return train_logreg_full_info(production, config);
}

ClickLog simulate_clicks(const Ranker& ranker, const Dataset& pool,
                         const SimulationConfig& config) {
  if (pool.queries.empty()) throw std::invalid_argument("empty query pool");
  if (config.total_clicks == 0) throw std::invalid_argument("total_clicks must be >= 1");
  if (!(config.mu >= 0.0 && config.mu < 0.5)) {
    throw std::invalid_argument("mu must lie in [0, 0.5)");
  }
  // Queries without any relevant document can still produce noisy clicks,
  // but with mu = 0 a pool of such queries would never terminate.
  if (config.mu == 0.0) {
    const bool any_relevant = std::any_of(
        pool.queries.begin(), pool.queries.end(),
        [](const QueryGroup& q) { return q.num_relevant() > 0; });
    if (!any_relevant) {
      throw std::invalid_argument("noise-free simulation needs a relevant document");
    }
  }

  std::vector<std::vector<std::size_t>> orders;
  orders.reserve(pool.queries.size());
  for (const auto& q : pool.queries) {
    const auto scores = score_query(ranker, q);
    orders.push_back(rank_order(scores));
  }
  std::size_t max_docs = 0;
  for (const auto& q : pool.queries) max_docs = std::max(max_docs, q.size());
  std::vector<double> propensity(max_docs);
  for (std::size_t k = 0; k < max_docs; ++k) {
    propensity[k] = observation_propensity(k + 1, config.eta);
  }

  const NoiseModel noise{config.mu};
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.queries.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ClickLog log;
  log.config = config;
  std::size_t clicks_so_far = 0;
  while (clicks_so_far < config.total_clicks) {
    const std::size_t qi = pick(rng);
    const QueryGroup& query = pool.queries[qi];
    const auto& order = orders[qi];
    const std::size_t n = order.size();

    ClickSession session;
    session.qid = query.qid;
    session.presented = order;
    session.clicks.assign(n, 0);
    session.propensities.assign(propensity.begin(), propensity.begin() + n);
    std::vector<std::uint8_t> observed(n, 0), relevant(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
      relevant[k] = query.binary_relevance[order[k]];
      observed[k] = unit(rng) < propensity[k];
      if (!observed[k]) continue;
      const double p_click =
          relevant[k] ? noise.click_relevant() : noise.click_irrelevant();
      session.clicks[k] = unit(rng) < p_click;
      clicks_so_far += session.clicks[k];
    }
    if (config.oracle_mode) {
      session.hidden_observation = std::move(observed);
      session.hidden_relevance = std::move(relevant);
    }
    log.sessions.push_back(std::move(session));
  }
  return log;
}

ClickLog with_propensities(
    ClickLog log, const std::function<double(std::size_t)>& propensity_by_rank) {
  for (auto& session : log.sessions) {
    for (std::size_t k = 0; k < session.propensities.size(); ++k) {
      session.propensities[k] = propensity_by_rank(k + 1);
    }
  }
  return log;
}

ClickLog strip_hidden(ClickLog log) {
  log.config.oracle_mode = false;
  for (auto& session : log.sessions) {
    session.hidden_observation.reset();
    session.hidden_relevance.reset();
  }
  return log;
}

void write_click_log(const ClickLog& log, std::ostream& out) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", log.config.eta);
  out << "# prsrank-clicklog v1 eta=" << buffer;
  std::snprintf(buffer, sizeof(buffer), "%.17g", log.config.mu);
  out << " mu=" << buffer << " seed=" << log.config.seed
      << " total_clicks=" << log.config.total_clicks
      << " oracle=" << (log.config.oracle_mode ? 1 : 0) << '\n';
  for (const auto& s : log.sessions) {
    out << s.qid << '\t';
    for (std::size_t k = 0; k < s.presented.size(); ++k) {
      out << (k ? "," : "") << s.presented[k];
    }
    out << '\t' << bits(s.clicks) << '\t';
    for (std::size_t k = 0; k < s.propensities.size(); ++k) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", s.propensities[k]);
      out << (k ? "," : "") << buffer;
    }
    if (s.hidden_observation && s.hidden_relevance) {
      out << '\t' << bits(*s.hidden_observation) << '\t' << bits(*s.hidden_relevance);
    }
    out << '\n';
  }
}

void write_click_log(const ClickLog& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_click_log(log, out);
}

ClickLog read_click_log(std::istream& in) {
  ClickLog log;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# prsrank-clicklog v1", 0) != 0) {
    throw std::runtime_error("click log: missing header");
  }
  for (const auto& field : split(line.substr(22), ' ')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "eta") log.config.eta = std::stod(value);
    else if (key == "mu") log.config.mu = std::stod(value);
    else if (key == "seed") log.config.seed = std::stoull(value);
    else if (key == "total_clicks") log.config.total_clicks = std::stoull(value);
    else if (key == "oracle") log.config.oracle_mode = value == "1";
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 4 && fields.size() != 6) {
      throw std::runtime_error("click log line " + std::to_string(line_no) +
                               ": expected 4 or 6 fields");
    }
    ClickSession s;
    s.qid = fields[0];
    for (const auto& v : split(fields[1], ',')) s.presented.push_back(std::stoull(v));
    s.clicks = parse_bits(fields[2], line_no);
    for (const auto& v : split(fields[3], ',')) s.propensities.push_back(std::stod(v));
    if (fields.size() == 6) {
      s.hidden_observation = parse_bits(fields[4], line_no);
      s.hidden_relevance = parse_bits(fields[5], line_no);
    }
    const std::size_t n = s.presented.size();
    if (s.clicks.size() != n || s.propensities.size() != n ||
        (s.hidden_observation && (s.hidden_observation->size() != n ||
                                  s.hidden_relevance->size() != n))) {
      throw std::runtime_error("click log line " + std::to_string(line_no) +
                               ": field lengths disagree");
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (s.clicks[k] && !(s.propensities[k] > 0.0)) {
        throw std::runtime_error("click log line " + std::to_string(line_no) +
                                 ": clicked document with zero propensity");
      }
    }
    log.sessions.push_back(std::move(s));
  }
  return log;
}

ClickLog read_click_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_click_log(in);
}

}  // namespace prsrank
