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

#include "prsrank/oracle.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace prsrank {
namespace {

// Probability of one observation vector; `mask` bit k is o_k.
double observation_probability(std::span<const double> p, std::uint32_t mask) {
  double prob = 1.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    prob *= (mask >> k) & 1u ? p[k] : 1.0 - p[k];
  }
  return prob;
}

std::size_t count_relevant(const OracleSession& s) {
  return static_cast<std::size_t>(std::count(s.relevance.begin(), s.relevance.end(), 1));
}

}  // namespace

void OracleSession::validate() const {
  if (propensities.size() != relevance.size()) {
    throw std::invalid_argument("oracle session vectors differ in length");
  }
  if (relevance.size() > kMaxOracleDocs) {
    throw std::invalid_argument("oracle enumeration supports at most 16 documents");
  }
  for (double p : propensities) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw std::invalid_argument("oracle propensities must lie in (0, 1]");
    }
  }
  if (!delta) throw std::invalid_argument("oracle session has no pairwise loss");
}

PairLossFn logistic_pair_loss(std::vector<double> scores) {
  return [scores = std::move(scores)](std::size_t i, std::size_t j) {
    const double x = -(scores[i] - scores[j]);
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  };
}

double exact_expected_loss(const OracleSession& session, const WeightScheme& scheme,
                           PairStrategy strategy) {
  session.validate();
  const std::size_t n = session.size();
  ClickSession clicks;
  clicks.presented.resize(n);
  std::iota(clicks.presented.begin(), clicks.presented.end(), 0);
  clicks.propensities = session.propensities;
  clicks.hidden_relevance = session.relevance;
  clicks.hidden_observation = std::vector<std::uint8_t>(n, 0);

  double expectation = 0.0;
  const std::uint32_t count = 1u << n;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    const double prob = observation_probability(session.propensities, mask);
    if (prob == 0.0) continue;
    clicks.clicks.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const bool observed = (mask >> k) & 1u;
      (*clicks.hidden_observation)[k] = observed;
      clicks.clicks[k] = observed && session.relevance[k];
    }
    double loss = 0.0;
    for (const auto& pair : generate_pairs(clicks, strategy, scheme)) {
      loss += pair.weight * session.delta(pair.i, pair.j);
    }
    expectation += prob * loss;
  }
  return expectation;
}

double closed_form_ips_expectation(const OracleSession& session) {
  session.validate();
  const std::size_t n = session.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!session.relevance[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double factor =
          session.relevance[j] ? 1.0 - session.propensities[j] : 1.0;
      total += factor * session.delta(i, j);
    }
  }
  return total;
}

double ips_contamination(const OracleSession& session) {
  session.validate();
  const std::size_t n = session.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!session.relevance[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !session.relevance[j]) continue;
      total += (1.0 - session.propensities[j]) * session.delta(i, j);
    }
  }
  return total;
}

double closed_form_prs_expectation(const OracleSession& session) {
  session.validate();
  const std::size_t n = session.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!session.relevance[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (session.relevance[j]) continue;
      total += session.propensities[j] * session.delta(i, j);
    }
  }
  return total;
}

double prs_relevant_residue(const OracleSession& session) {
  session.validate();
  const std::size_t n = session.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!session.relevance[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !session.relevance[j]) continue;
      const double p = session.propensities[j];
      total += p * (1.0 - p) * session.delta(i, j);
    }
  }
  return total;
}

UnbiasednessCheck pointwise_ips_unbiasedness(const OracleSession& session,
                                             std::span<const double> delta_per_doc) {
  session.validate();
  const std::size_t n = session.size();
  if (delta_per_doc.size() != n) {
    throw std::invalid_argument("one Delta per document expected");
  }
  UnbiasednessCheck check;
  for (std::size_t i = 0; i < n; ++i) {
    if (session.relevance[i]) check.true_risk += delta_per_doc[i];
  }
  const std::uint32_t count = 1u << n;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    const double prob = observation_probability(session.propensities, mask);
    if (prob == 0.0) continue;
    double estimate = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool clicked = ((mask >> i) & 1u) && session.relevance[i];
      if (clicked) estimate += delta_per_doc[i] / session.propensities[i];
    }
    check.estimate_expectation += prob * estimate;
  }
  return check;
}

HoeffdingBounds hoeffding_bounds(const OracleSession& session, double xi) {
  session.validate();
  if (!(xi > 0.0 && xi < 1.0)) {
    throw std::invalid_argument("confidence level xi must lie in (0, 1)");
  }
  const std::size_t n = session.size();
  const std::size_t relevant = count_relevant(session);
  if (relevant == 0) {
    throw std::invalid_argument("Hoeffding bounds need at least one relevant document");
  }
  HoeffdingBounds out;
  out.rho.assign(n, 0.0);
  out.tau.assign(n, 0.0);
  double rho_sq = 0.0, tau_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p_i = session.propensities[i];
    if (!session.relevance[i] || !(p_i > 0.0 && p_i < 1.0)) continue;
    double rho = 0.0, tau = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = session.delta(i, j);
      if (!session.relevance[j]) rho += session.propensities[j] * d;
      tau += d;
    }
    out.rho[i] = rho / p_i;
    out.tau[i] = tau / p_i;
    rho_sq += out.rho[i] * out.rho[i];
    tau_sq += out.tau[i] * out.tau[i];
  }
  const double scale = std::log(2.0 / xi) / 2.0;
  const double inv_n = 1.0 / static_cast<double>(relevant);
  out.prs_bound = inv_n * std::sqrt(scale * rho_sq);
  out.ips_bound = inv_n * std::sqrt(scale * tau_sq);
  return out;
}

double fd_gradient_check(const ScalarFn& loss, const GradientFn& gradient,
                         std::span<const double> point, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const std::vector<double> analytic = gradient(point);
  if (analytic.size() != point.size()) {
    throw std::invalid_argument("gradient dimension mismatch");
  }
  std::vector<double> x(point.begin(), point.end());
  double worst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double saved = x[k];
    x[k] = saved + h;
    const double up = loss(x);
    x[k] = saved - h;
    const double down = loss(x);
    x[k] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-7});
    worst = std::max(worst, std::abs(analytic[k] - numeric) / scale);
  }
  return worst;
}

}  // namespace prsrank
