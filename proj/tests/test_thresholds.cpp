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
#include "qba/thresholds.hpp"
#include "test_support.hpp"

using namespace qba;

namespace {

// Independent single-buyer optimizer: scan the threshold range and take the
// better of selling on each bid by the sign of its own coefficient.
struct ScanResult {
  double eta = 0.0;
  double gain = 0.0;
};

ScanResult scan_single_buyer(double v0, double a, double b, double step) {
  ScanResult best{a, -1e300};
  for (double eta = a; eta <= b + 1e-12; eta += step) {
    const double t = std::min(eta, b);
    const double c0 = (t - a) * (t - b + a - v0) / (b - a);
    const double c1 = (b - t) * (t - v0) / (b - a);
    const double gain = std::max(0.0, c0) + std::max(0.0, c1);
    if (gain > best.gain) best = {t, gain};
  }
  return best;
}

bool allows(AllocationChoice c, int q) {
  return c == AllocationChoice::kIndifferent || (c == AllocationChoice::kAlways ? q == 1 : q == 0);
}

}  // namespace

TEST_CASE("single-buyer optimum in each parameter regime") {
  SUBCASE("seller value below the support, interior vertex") {
    const auto sol = single_buyer_optimum(10.0, 12.0, 20.0);
    CHECK(sol.regime == SingleBuyerRegime::kInteriorVertex);
    REQUIRE(sol.optimal_threshold.has_value());
    CHECK(*sol.optimal_threshold == doctest::Approx(15.0).epsilon(1e-15));
    CHECK(sol.optimal_gain == doctest::Approx(3.125).epsilon(1e-15));
    CHECK(sol.sell_on_bit0 == AllocationChoice::kNever);
    CHECK(sol.sell_on_bit1 == AllocationChoice::kAlways);
  }
  SUBCASE("seller value inside the support") {
    const auto sol = single_buyer_optimum(10.0, 5.0, 20.0);
    CHECK(sol.regime == SingleBuyerRegime::kSellerValueInterior);
    CHECK(*sol.optimal_threshold == doctest::Approx(15.0));
    CHECK(sol.optimal_gain == doctest::Approx(100.0 / 60.0).epsilon(1e-14));
  }
  SUBCASE("seller value at the upper bound") {
    const auto sol = single_buyer_optimum(10.0, 5.0, 10.0);
    CHECK(sol.regime == SingleBuyerRegime::kSellerValueInterior);
    CHECK(*sol.optimal_threshold == doctest::Approx(10.0));
    CHECK(sol.optimal_gain == doctest::Approx(0.0));
  }
  SUBCASE("seller value at the lower bound") {
    const auto sol = single_buyer_optimum(5.0, 5.0, 20.0);
    CHECK(sol.regime == SingleBuyerRegime::kSellerValueAtLowerBound);
    CHECK(*sol.optimal_threshold == doctest::Approx(12.5));
    CHECK(sol.optimal_gain == doctest::Approx(225.0 / 60.0).epsilon(1e-14));
  }
  SUBCASE("vertex at or below the lower bound: always sell, any threshold") {
    const auto sol = single_buyer_optimum(0.0, 6.0, 8.0);
    CHECK(sol.regime == SingleBuyerRegime::kAlwaysSell);
    CHECK(!sol.optimal_threshold.has_value());
    CHECK(sol.optimal_gain == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(sol.sell_on_bit0 == AllocationChoice::kAlways);
    CHECK(sol.sell_on_bit1 == AllocationChoice::kAlways);
  }
  SUBCASE("seller value above the support: keep the object") {
    const auto sol = single_buyer_optimum(10.0, 2.0, 8.0);
    CHECK(sol.regime == SingleBuyerRegime::kKeepObject);
    CHECK(!sol.optimal_threshold.has_value());
    CHECK(sol.optimal_gain == 0.0);
    CHECK(sol.sell_on_bit0 == AllocationChoice::kNever);
    CHECK(sol.sell_on_bit1 == AllocationChoice::kNever);
  }
  SUBCASE("invalid support") {
    CHECK_THROWS_AS(single_buyer_optimum(1.0, 4.0, 4.0), ValidationError);
  }
}

TEST_CASE("closed form matches an independent fine scan") {
  CHECK(scan_single_buyer(10.0, 5.0, 20.0, 0.001).gain ==
        doctest::Approx(100.0 / 60.0).epsilon(1e-6));
  CHECK(scan_single_buyer(10.0, 5.0, 20.0, 0.001).eta == doctest::Approx(15.0).epsilon(1e-3));

  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 60; ++trial) {
    const double a = 15.0 * test::uniform_unit(rng);
    const double b = a + 1.0 + 10.0 * test::uniform_unit(rng);
    const double v0 = b * test::uniform_unit(rng);
    const auto sol = single_buyer_optimum(v0, a, b);
    const auto scanned = scan_single_buyer(v0, a, b, 0.001);
    CHECK(scanned.gain <= sol.optimal_gain + 1e-9);
    CHECK(sol.optimal_gain - scanned.gain <= 1e-4);
  }
}

TEST_CASE("allocation classifier signs") {
  SUBCASE("interior vertex instance sells only on bid 1") {
    const auto [q0, q1] = classify_single_buyer(10.0, 12.0, 20.0, 15.0);
    CHECK(q0 == AllocationChoice::kNever);
    CHECK(q1 == AllocationChoice::kAlways);
    const auto [c0, c1] = single_buyer_objective_coefficients(10.0, 12.0, 20.0, 15.0);
    CHECK(c0 == doctest::Approx(-9.0 / 8.0).epsilon(1e-14));
    CHECK(c1 == doctest::Approx(25.0 / 8.0).epsilon(1e-14));
  }
  SUBCASE("seller value above the support never sells") {
    for (const double eta : {2.0, 5.0, 8.0}) {
      const auto [q0, q1] = classify_single_buyer(10.0, 2.0, 8.0, eta);
      CHECK(q0 != AllocationChoice::kAlways);
      CHECK(q1 != AllocationChoice::kAlways);
    }
  }
  SUBCASE("cheap object sells on both bids") {
    // v0 < a < (b+v0)/2 < b-a+v0 < b with the threshold above b-a+v0.
    const auto [q0, q1] = classify_single_buyer(1.0, 3.0, 8.0, 7.0);
    CHECK(q0 == AllocationChoice::kAlways);
    CHECK(q1 == AllocationChoice::kAlways);
  }
  SUBCASE("boundary thresholds are indifferent on the empty side") {
    CHECK(classify_single_buyer(10.0, 12.0, 20.0, 12.0).first == AllocationChoice::kIndifferent);
    CHECK(classify_single_buyer(10.0, 12.0, 20.0, 20.0).second == AllocationChoice::kIndifferent);
    // Threshold exactly at the seller value zeroes the bid-1 coefficient.
    CHECK(classify_single_buyer(10.0, 5.0, 20.0, 10.0).second == AllocationChoice::kIndifferent);
  }
}

TEST_CASE("classifier agrees with brute force over the four allocation pairs") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = 20.0 * test::uniform_unit(rng);
    const double b = a + 0.5 + 14.5 * test::uniform_unit(rng);
    const double v0 = 25.0 * test::uniform_unit(rng);
    const double eta = a + (b - a) * test::uniform_unit(rng);

    // Independent coefficient computation.
    const double c0 = (eta - a) * (eta - b + a - v0) / (b - a);
    const double c1 = (b - eta) * (eta - v0) / (b - a);
    double best = -1e300;
    double second = -1e300;
    for (const int q0 : {0, 1}) {
      for (const int q1 : {0, 1}) {
        const double value = c0 * q0 + c1 * q1;
        if (value > best) {
          second = best;
          best = value;
        } else if (value > second) {
          second = value;
        }
      }
    }
    const auto [cls0, cls1] = classify_single_buyer(v0, a, b, eta);
    const double tol = 1e-12 * std::max({1.0, std::abs(c0), std::abs(c1)});
    // Every classified pair attains the maximum.
    for (const int q0 : {0, 1}) {
      for (const int q1 : {0, 1}) {
        const double value = c0 * q0 + c1 * q1;
        if (allows(cls0, q0) && allows(cls1, q1)) {
          CHECK(value >= best - tol);
        } else {
          CHECK(value < best - (best - second) / 2.0 + tol);
        }
      }
    }
  }
}

TEST_CASE("bid-1 coefficient is a downward parabola with the documented vertex") {
  const double v0 = 10.0, a = 8.0, b = 20.0;
  const double vertex = (b + v0) / 2.0;
  const auto c1_at = [&](double eta) {
    return single_buyer_objective_coefficients(v0, a, b, eta).second;
  };
  CHECK(c1_at(vertex) == doctest::Approx((b - v0) * (b - v0) / (4.0 * (b - a))).epsilon(1e-14));
  const double s = 0.5;
  for (double eta = a + s; eta <= b - s; eta += s) {
    const double second_difference = c1_at(eta - s) - 2.0 * c1_at(eta) + c1_at(eta + s);
    CHECK(second_difference == doctest::Approx(-2.0 * s * s / (b - a)).epsilon(1e-9));
    CHECK(c1_at(eta) <= c1_at(vertex) + 1e-12);
  }
}

TEST_CASE("grid search reproduces the flat direction of the disjoint instance") {
  const auto instance = test::disjoint_support_instance();
  const auto result = grid_search(instance, {{2.0, 8.0, 1.0}, {12.0, 20.0, 1.0}});
  REQUIRE(result.axes()[0].size() == 7);
  REQUIRE(result.axes()[1].size() == 9);

  // Gain is flat in buyer 0's threshold for every fixed buyer-1 threshold.
  for (std::size_t k2 = 0; k2 < 9; ++k2) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t k1 = 0; k1 < 7; ++k1) {
      const double g = result.gains()[k1 * 9 + k2];
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    CHECK(hi - lo < 1e-12);
  }

  CHECK(result.optimal_gain() == doctest::Approx(3.125).epsilon(1e-13));
  CHECK(result.optimal().values[0] == 2.0);  // lowest-lexicographic tie
  CHECK(result.optimal().values[1] == 15.0);
  CHECK(result.tie_indices().size() == 7);
  for (const auto& tie : result.ties()) CHECK(tie.values[1] == 15.0);
}

TEST_CASE("grid search finds the overlapping-instance optimum with its exact tie") {
  const auto instance = test::overlapping_support_instance();
  const auto result = grid_search(instance, {{5.0, 15.0, 1.0}, {8.0, 20.0, 1.0}});
  CHECK(result.optimal_gain() == doctest::Approx(73.0 / 30.0).epsilon(1e-13));
  // (12, 15) and (13, 15) tie: the one-buyer factor (15-e)(e-10) is symmetric
  // around 12.5.
  REQUIRE(result.tie_indices().size() == 2);
  const auto ties = result.ties();
  CHECK(ties[0].values[0] == 12.0);
  CHECK(ties[0].values[1] == 15.0);
  CHECK(ties[1].values[0] == 13.0);
  CHECK(ties[1].values[1] == 15.0);
  // The argmax is one of the tied pair.
  CHECK(result.optimal().values[1] == 15.0);
  CHECK((result.optimal().values[0] == 12.0 || result.optimal().values[0] == 13.0));
}

TEST_CASE("fine grid exposes the coupled optimum of the overlapping instance") {
  // At 0.01 resolution the flat unit-grid tie resolves to the true interior
  // optimum: buyer 0 at his one-buyer vertex 12.5, buyer 1 pushed above his
  // one-buyer vertex 15 by the coupling term, to 15.31.
  const auto instance = test::overlapping_support_instance();
  const auto result = grid_search(instance, {{5.0, 15.0, 0.01}, {8.0, 20.0, 0.01}});
  CHECK(result.optimal().values[0] == doctest::Approx(12.5).epsilon(1e-9));
  CHECK(result.optimal().values[1] == doctest::Approx(15.31).epsilon(1e-9));
  CHECK(result.optimal_gain() == doctest::Approx(29.47265 / 12.0).epsilon(1e-12));
  // Strictly better than the unit-grid optimum.
  CHECK(result.optimal_gain() > 73.0 / 30.0 + 1e-3);
}

TEST_CASE("one-buyer grid search brackets the closed form") {
  std::mt19937_64 rng(79);
  int cases = 0;
  while (cases < 200) {
    const double a = 15.0 * test::uniform_unit(rng);
    const double b = a + 1.0 + 10.0 * test::uniform_unit(rng);
    const double v0 = b * test::uniform_unit(rng);
    if ((b + v0) / 2.0 <= a) continue;
    ++cases;
    const auto sol = single_buyer_optimum(v0, a, b);
    AuctionInstance instance;
    instance.seller_value = v0;
    instance.buyers.push_back(BuyerSpec{ValueDistribution::uniform(a, b)});
    const double step = 0.01;
    const auto result = grid_search(instance, {{a, b, step}});
    CHECK(std::abs(result.optimal().values[0] - *sol.optimal_threshold) <= step + 1e-12);
    CHECK(result.optimal_gain() <= sol.optimal_gain + 1e-12);
    // Quadratic loss bound around the vertex.
    CHECK(sol.optimal_gain - result.optimal_gain() <=
          step * step / (4.0 * (b - a)) + 1e-12);
  }
}

TEST_CASE("grid search caps its evaluation budget") {
  const auto instance = test::uniform_instance(0.5, {{0.0, 1.0}, {0.0, 1.0}});
  CHECK_THROWS_AS(grid_search(instance, {{0.0, 1.0, 1e-5}, {0.0, 1.0, 1e-5}}), CapacityError);
}

TEST_CASE("grid validation") {
  const auto instance = test::disjoint_support_instance();
  CHECK_THROWS_AS(grid_search(instance, {{2.0, 9.0, 1.0}, {12.0, 20.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(grid_search(instance, {{2.0, 8.0, 0.0}, {12.0, 20.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(grid_search(instance, {{8.0, 2.0, 1.0}, {12.0, 20.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(grid_search(instance, {{2.0, 8.0, 1.0}}), ValidationError);
}

TEST_CASE("shared-step grids span each support and clamp the last value") {
  const auto instance = test::overlapping_support_instance();
  const auto grids = grids_from_step(instance, 0.01);
  REQUIRE(grids.size() == 2);
  CHECK(grids[1].start == 8.0);
  CHECK(grids[1].stop == 20.0);
  const auto result = grid_search(instance, grids);
  const auto& axis1 = result.axes()[1];
  CHECK(axis1.size() == 1201);
  CHECK(axis1.back() == 20.0);
}

TEST_CASE("surface csv lists every point with an argmax trailer") {
  AuctionInstance instance;
  instance.seller_value = 10.0;
  instance.buyers.push_back(BuyerSpec{ValueDistribution::uniform(12.0, 20.0)});
  const auto result = grid_search(instance, {{12.0, 20.0, 1.0}});
  std::ostringstream os;
  write_surface_csv(os, instance, result);
  const std::string text = os.str();
  CHECK(text.find("eta_1,gain,utility\n") == 0);
  CHECK(text.find("# argmax,15,3.125,13.125") != std::string::npos);
  CHECK(text.find("# ties,1") != std::string::npos);
  std::size_t rows = 0;
  for (std::size_t pos = text.find('\n'); pos != std::string::npos;
       pos = text.find('\n', pos + 1)) {
    ++rows;
  }
  CHECK(rows == 1 + 9 + 3);  // header + points + argmax/tie-count/tie lines
}
