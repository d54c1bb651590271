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

// Brute-force expectations over observation vectors.
//
// A session here is a ground-truth view of one query: binary relevance,
// observation propensities and a pairwise loss delta(i, j). Clicks are
// noise-free (click = observed AND relevant), so every expectation is a
// finite sum over the 2^n observation vectors.

#ifndef PRSRANK_ORACLE_H_
#define PRSRANK_ORACLE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "prsrank/weighting.h"

namespace prsrank {

inline constexpr std::size_t kMaxOracleDocs = 16;

using PairLossFn = std::function<double(std::size_t i, std::size_t j)>;

struct OracleSession {
  std::vector<std::uint8_t> relevance;
  std::vector<double> propensities;
  PairLossFn delta;

  std::size_t size() const { return relevance.size(); }
  // Throws std::invalid_argument on length mismatch, n > kMaxOracleDocs or
  // propensities outside (0, 1].
  void validate() const;
};

// delta(i, j) = log(1 + exp(-(s_i - s_j))).
PairLossFn logistic_pair_loss(std::vector<double> scores);

// E_o[ sum over generated pairs of weight * delta(i, j) ], enumerating all
// observation vectors and reusing generate_pairs on each induced session.
double exact_expected_loss(const OracleSession& session, const WeightScheme& scheme,
                           PairStrategy strategy);

// sum_{i rel} [ sum_{j irr} delta(i,j) + sum_{j rel, j != i} (1 - p_j) delta(i,j) ]
double closed_form_ips_expectation(const OracleSession& session);

// The relevant-vs-relevant part of the IPS expectation alone.
double ips_contamination(const OracleSession& session);

// sum_{i rel} sum_{j irr} p_j delta(i,j)
double closed_form_prs_expectation(const OracleSession& session);

// sum_{i rel} sum_{j rel, j != i} p_j (1 - p_j) delta(i,j): the part of the
// exact PRS expectation contributed by relevant documents that happen to be
// unobserved. Zero when at most one document is relevant or every relevant
// propensity is 1.
double prs_relevant_residue(const OracleSession& session);

struct UnbiasednessCheck {
  double estimate_expectation = 0.0;
  double true_risk = 0.0;
};

// E_o[ sum_{clicked i} Delta_i / p_i ] against sum_{relevant i} Delta_i.
UnbiasednessCheck pointwise_ips_unbiasedness(const OracleSession& session,
                                             std::span<const double> delta_per_doc);

struct HoeffdingBounds {
  double prs_bound = 0.0;
  double ips_bound = 0.0;
  // Per document; zero for irrelevant documents and for p outside (0, 1).
  std::vector<double> rho;
  std::vector<double> tau;
};

// rho_i = (1/p_i) sum_{j irr} p_j delta(i,j).
// tau_i = (1/p_i) sum_{j != i, j irr or rel} delta(i,j), i.e. the non-clicked
//         sum at its largest realization (every other relevant document
//         unobserved).
// bound = (1/N) sqrt(log(2/xi)/2 * sum x_i^2), N = number of relevant docs.
HoeffdingBounds hoeffding_bounds(const OracleSession& session, double xi);

using ScalarFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

// Largest componentwise relative error between `gradient` and central
// differences of `loss` with step h. Components are compared relative to
// max(|analytic|, |numeric|, 1e-7).
double fd_gradient_check(const ScalarFn& loss, const GradientFn& gradient,
                         std::span<const double> point, double h = 1e-6);

}  // namespace prsrank

#endif  // PRSRANK_ORACLE_H_
