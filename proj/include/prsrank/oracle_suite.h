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

#ifndef PRSRANK_ORACLE_SUITE_H_
#define PRSRANK_ORACLE_SUITE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "prsrank/oracle.h"

namespace prsrank {

// A random ground-truth session with 1..max_docs documents. Propensities are
// drawn either from the position model with a random eta in [0, 2] or
// uniformly from [0.05, 1]; scores (stored in `scores`) are standard normal
// and delta is the logistic pair loss on them.
struct RandomOracleSession {
  OracleSession session;
  std::vector<double> scores;
};
RandomOracleSession random_oracle_session(std::mt19937_64& rng, std::size_t max_docs);

struct OracleCheck {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // largest observed error or violation
  std::size_t trials = 0;
  std::string detail;
};

struct OracleSuiteOptions {
  std::uint64_t seed = 0;
  std::size_t trials = 200;
  std::size_t max_docs = 8;
  // Exposed so the harness itself can be mutation-tested.
  std::function<double(const OracleSession&)> prs_closed_form = closed_form_prs_expectation;
  std::function<double(const OracleSession&)> ips_closed_form = closed_form_ips_expectation;
};

// Runs enumeration vs closed form (IPS, and PRS plus its relevant residue),
// pointwise IPS unbiasedness, rho <= tau, and gradient checks.
std::vector<OracleCheck> run_oracle_suite(const OracleSuiteOptions& options);

bool all_passed(const std::vector<OracleCheck>& checks);
void print_oracle_report(const std::vector<OracleCheck>& checks, std::ostream& out);

// |a - b| <= tol * max(1, |b|).
bool close_enough(double a, double b, double tol);

}  // namespace prsrank

#endif  // PRSRANK_ORACLE_SUITE_H_
