// Copyright 2026 The QBA Authors
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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "qba/model.hpp"
#include "qba/stats.hpp"

namespace qba {

// Simulated analog-bid optimal auction for n i.i.d. Uniform[lower, upper]
// bidders: second-price with reserve clamp((upper + v0) / 2, lower, upper).
// The seller keeps the object (utility v0) when no bid reaches the reserve;
// otherwise he is paid max(second-highest bid, reserve). Returns the exact
// value v0 with zero error when v0 > upper (the object is never sold).
Estimate myerson_uniform(double seller_value, double lower, double upper, int n_bidders,
                         std::uint64_t trials, std::uint64_t seed);

// Independent per-buyer thresholds drawn uniformly over each support.
ThresholdVector random_thresholds(const AuctionInstance& instance, std::mt19937_64& rng);

struct CompareOptions {
  std::vector<int> bidder_counts;
  std::uint64_t trials = 100'000;
  int threshold_draws = 200;
  double grid_step = 0.25;
  std::uint64_t seed = 0;
};

// One row of the analog / binary-optimal / binary-random comparison.
// The analog and random columns are simulated (mean with standard error);
// the binary-optimal column is an exact expectation at the thresholds found
// by the symmetric-then-coordinate grid search.
struct ComparisonRow {
  int n_bidders = 0;
  Estimate analog_utility;
  double binary_optimal_utility = 0.0;
  Estimate binary_random_utility;
  std::vector<double> binary_optimal_thresholds;
  bool optimum_symmetric = true;
};

// Per bidder count: the three seller-utility columns for i.i.d.
// Uniform[lower, upper] bidders. Binary-optimal thresholds are searched on
// the shared symmetric grid first, then refined one buyer at a time until
// no grid move improves the exact gain; symmetry of the refined optimum is
// checked, not assumed. Rows are independent, with per-row seeds derived
// from the master seed.
std::vector<ComparisonRow> compare_sweep(double seller_value, double lower, double upper,
                                         const CompareOptions& options);

// CSV columns: n, analog_mean, analog_se, binary_optimal,
// binary_random_mean, binary_random_se.
void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows);

}  // namespace qba
