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

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qba/baseline.hpp"
#include "qba/mechanism.hpp"
#include "qba/thresholds.hpp"
#include "test_support.hpp"

using namespace qba;

TEST_CASE("single-bidder analog auction matches the posted-price closed form") {
  const double v0 = 5.0, a = 5.0, b = 20.0;
  const double reserve = (b + v0) / 2.0;
  // Sell at the reserve when the value clears it: expected gain
  // (b - r)(r - v0)/(b - a), via the cdf and via quadrature.
  const double closed_form = (b - reserve) * (reserve - v0) / (b - a);
  const ValueDistribution d = ValueDistribution::uniform(a, b);
  const double by_quadrature =
      v0 * d.cdf(reserve) +
      reserve * test::simpson([&](double x) { return d.pdf(x); }, reserve, b, 2000);
  CHECK(by_quadrature == doctest::Approx(v0 + closed_form).epsilon(1e-10));

  const Estimate sim = myerson_uniform(v0, a, b, 1, 10'000'000, 31);
  CHECK(std::abs(sim.mean - (v0 + closed_form)) < 4.0 * sim.std_error);
  CHECK(sim.std_error > 0.0);
}

TEST_CASE("two-bidder analog auction matches a quadrature oracle") {
  const double v0 = 5.0, a = 5.0, b = 20.0;
  const double r = (b + v0) / 2.0;
  const ValueDistribution d = ValueDistribution::uniform(a, b);
  // Outcomes: no bid clears the reserve; one does (price r); both do
  // (price = lower bid, the minimum of the two, with density 2 f (1-F)).
  const double none = d.cdf(r) * d.cdf(r);
  const double one = 2.0 * d.cdf(r) * (1.0 - d.cdf(r));
  const double both_term = test::simpson(
      [&](double s) { return s * 2.0 * d.pdf(s) * (1.0 - d.cdf(s)); }, r, b, 4000);
  const double expected = v0 * none + r * one + both_term;

  const Estimate sim = myerson_uniform(v0, a, b, 2, 4'000'000, 33);
  CHECK(std::abs(sim.mean - expected) < 4.0 * sim.std_error);
}

TEST_CASE("analog auction never sells above the seller's value") {
  const Estimate e = myerson_uniform(25.0, 5.0, 20.0, 3, 1000, 1);
  CHECK(e.mean == 25.0);
  CHECK(e.std_error == 0.0);
}

TEST_CASE("analog utility grows with competition") {
  Estimate previous = myerson_uniform(5.0, 5.0, 20.0, 1, 200'000, 41);
  for (int n = 2; n <= 5; ++n) {
    const Estimate current = myerson_uniform(5.0, 5.0, 20.0, n, 200'000, 41 + n);
    const double combined =
        std::sqrt(previous.std_error * previous.std_error +
                  current.std_error * current.std_error);
    CHECK(current.mean >= previous.mean - 4.0 * combined);
    previous = current;
  }
  CHECK_THROWS_AS(myerson_uniform(5.0, 5.0, 20.0, 0, 100, 1), ValidationError);
  CHECK_THROWS_AS(myerson_uniform(5.0, 5.0, 20.0, 1, 0, 1), ValidationError);
}

TEST_CASE("random thresholds stay inside each support and are seedable") {
  const auto instance = test::uniform_instance(10.0, {{2.0, 8.0}, {12.0, 20.0}});
  std::mt19937_64 rng_a(55);
  std::mt19937_64 rng_b(55);
  for (int k = 0; k < 200; ++k) {
    const auto eta = random_thresholds(instance, rng_a);
    const auto same = random_thresholds(instance, rng_b);
    CHECK(eta.values == same.values);
    CHECK(eta.values[0] >= 2.0);
    CHECK(eta.values[0] <= 8.0);
    CHECK(eta.values[1] >= 12.0);
    CHECK(eta.values[1] <= 20.0);
  }
}

TEST_CASE("random thresholds average to the support midpoint") {
  const auto instance = test::uniform_instance(0.0, {{3.0, 11.0}});
  std::mt19937_64 rng(57);
  RunningStats stats;
  for (int k = 0; k < 100'000; ++k) {
    stats.add(random_thresholds(instance, rng).values[0]);
  }
  CHECK(std::abs(stats.mean() - 7.0) < 4.0 * stats.std_error());
}

TEST_CASE("comparison sweep orders the three columns") {
  CompareOptions options;
  options.bidder_counts = {1, 2, 3};
  options.trials = 100'000;
  options.threshold_draws = 150;
  options.grid_step = 0.25;
  options.seed = 61;
  const auto rows = compare_sweep(5.0, 5.0, 20.0, options);
  REQUIRE(rows.size() == 3);

  // One bidder: the quantized-optimal gain equals the posted-price gain,
  // (20-5)^2 / (4*15) = 3.75, and the search grid contains 12.5 exactly.
  CHECK(rows[0].binary_optimal_utility == doctest::Approx(8.75).epsilon(1e-14));
  CHECK(rows[0].binary_optimal_thresholds[0] == doctest::Approx(12.5).epsilon(1e-12));
  CHECK(std::abs(rows[0].analog_utility.mean - 8.75) < 4.0 * rows[0].analog_utility.std_error);

  for (const auto& row : rows) {
    CHECK(row.analog_utility.mean >=
          row.binary_optimal_utility - 4.0 * row.analog_utility.std_error);
    CHECK(row.binary_optimal_utility >= row.binary_random_utility.mean);
    CHECK(row.binary_random_utility.std_error > 0.0);
    // The symmetry flag reflects the refined thresholds.
    bool equal = true;
    for (const double eta : row.binary_optimal_thresholds) {
      if (std::abs(eta - row.binary_optimal_thresholds.front()) > kGridTieTolerance) {
        equal = false;
      }
    }
    CHECK(row.optimum_symmetric == equal);
  }
  CHECK(rows[0].optimum_symmetric);
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    CHECK(rows[k + 1].binary_optimal_utility >= rows[k].binary_optimal_utility - 1e-12);
  }
}

TEST_CASE("identical bidders can have an asymmetric optimal quantization") {
  // Two U[5,20] bidders, v0 = 5. Raising one threshold above the shared
  // vertex increases the chance the other bidder wins at his own positive
  // score, so the optimum splits: one threshold at the solo vertex 12.5,
  // the other at 12.5 + gain_at_vertex/2 = 14.375.
  CompareOptions options;
  options.bidder_counts = {2};
  options.trials = 1000;
  options.threshold_draws = 5;
  options.grid_step = 0.125;
  options.seed = 13;
  const auto rows = compare_sweep(5.0, 5.0, 20.0, options);
  REQUIRE(rows.size() == 1);
  const auto& eta = rows[0].binary_optimal_thresholds;
  REQUIRE(eta.size() == 2);
  CHECK(!rows[0].optimum_symmetric);
  const double lo = std::min(eta[0], eta[1]);
  const double hi = std::max(eta[0], eta[1]);
  CHECK(lo == doctest::Approx(12.5).epsilon(1e-12));
  CHECK(hi == doctest::Approx(14.375).epsilon(1e-12));
  CHECK(rows[0].binary_optimal_utility - 5.0 == doctest::Approx(5.859375).epsilon(1e-12));
}

TEST_CASE("no individual random draw beats the searched optimum beyond grid slack") {
  const double v0 = 5.0, a = 5.0, b = 20.0;
  const double step = 0.25;
  CompareOptions options;
  options.bidder_counts = {2};
  options.trials = 1000;
  options.threshold_draws = 10;
  options.grid_step = step;
  options.seed = 67;
  const auto rows = compare_sweep(v0, a, b, options);
  const double optimal_gain = rows[0].binary_optimal_utility - v0;

  // Lipschitz slack: the gain moves at most (1 + 2*(b-v0)/(b-a)) per unit of
  // one threshold, and some grid point is within step/2 per coordinate of
  // any draw's continuum optimum.
  const double slack = 2.0 * (step / 2.0) * (1.0 + 2.0 * (b - v0) / (b - a));
  const auto instance = test::uniform_instance(v0, {{a, b}, {a, b}});
  std::mt19937_64 rng(71);
  for (int draw = 0; draw < 300; ++draw) {
    const auto eta = random_thresholds(instance, rng);
    CHECK(expected_seller_gain(instance, eta) <= optimal_gain + slack);
  }
}

TEST_CASE("comparison csv has the documented columns") {
  CompareOptions options;
  options.bidder_counts = {1, 2};
  options.trials = 2000;
  options.threshold_draws = 20;
  options.grid_step = 0.5;
  options.seed = 3;
  const auto rows = compare_sweep(5.0, 5.0, 20.0, options);
  std::ostringstream os;
  write_comparison_csv(os, rows);
  const std::string text = os.str();
  CHECK(text.find("n,analog_mean,analog_se,binary_optimal,binary_random_mean,binary_random_se\n") ==
        0);
  std::size_t lines = 0;
  for (std::size_t pos = text.find('\n'); pos != std::string::npos;
       pos = text.find('\n', pos + 1)) {
    ++lines;
  }
  CHECK(lines == 3);
  CHECK(text.find("1,") != std::string::npos);
  CHECK(text.find("\n2,") != std::string::npos);
}

TEST_CASE("comparison sweep validates its options") {
  CompareOptions options;
  options.bidder_counts = {};
  CHECK_THROWS_AS(compare_sweep(5.0, 5.0, 20.0, options), ValidationError);
  options.bidder_counts = {0};
  CHECK_THROWS_AS(compare_sweep(5.0, 5.0, 20.0, options), ValidationError);
  options.bidder_counts = {kMaxBuyers + 1};
  CHECK_THROWS_AS(compare_sweep(5.0, 5.0, 20.0, options), CapacityError);
  options.bidder_counts = {1};
  options.threshold_draws = 0;
  CHECK_THROWS_AS(compare_sweep(5.0, 5.0, 20.0, options), ValidationError);
}
