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

// Shared fixtures and independent reference computations. Everything here
// recomputes expected values from first principles so the checks stay
// decoupled from the library's own code paths.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "qba/model.hpp"

namespace qba::test {

inline AuctionInstance uniform_instance(double v0,
                                        std::initializer_list<std::pair<double, double>> supports) {
  AuctionInstance instance;
  instance.seller_value = v0;
  for (const auto& [a, b] : supports) {
    instance.buyers.push_back(BuyerSpec{ValueDistribution::uniform(a, b)});
  }
  return instance;
}

// The two-buyer example instances used throughout: non-overlapping supports
// (the seller only ever sells to the second buyer) and overlapping supports.
inline AuctionInstance disjoint_support_instance() {
  return uniform_instance(10.0, {{2.0, 8.0}, {12.0, 20.0}});
}

inline AuctionInstance overlapping_support_instance() {
  return uniform_instance(10.0, {{5.0, 15.0}, {8.0, 20.0}});
}

struct RandomCase {
  AuctionInstance instance;
  ThresholdVector thresholds;
};

inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Random instance with up to max_buyers buyers. interior_thresholds keeps
// every threshold strictly inside its support so all outcomes carry
// positive probability.
inline RandomCase random_case(std::mt19937_64& rng, int max_buyers = 4,
                              bool interior_thresholds = false) {
  RandomCase c;
  const int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_buyers));
  c.instance.seller_value = 25.0 * uniform_unit(rng);
  for (int i = 0; i < n; ++i) {
    const double a = 20.0 * uniform_unit(rng);
    const double b = a + 0.5 + 14.5 * uniform_unit(rng);
    c.instance.buyers.push_back(BuyerSpec{ValueDistribution::uniform(a, b)});
    const double u = interior_thresholds ? 0.05 + 0.9 * uniform_unit(rng) : uniform_unit(rng);
    c.thresholds.values.push_back(a + u * (b - a));
  }
  return c;
}

// Composite Simpson integral, used as the quadrature oracle for cdf values.
template <typename F>
double simpson(F f, double lo, double hi, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (hi - lo) / intervals;
  double sum = f(lo) + f(hi);
  for (int k = 1; k < intervals; ++k) {
    sum += f(lo + k * h) * (k % 2 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

// Reference winner rule, recomputed from raw parameters: per-buyer scores
// straight from the definitions, explicit positive-max scan, lowest index
// on ties.
inline std::optional<int> reference_winner(const AuctionInstance& instance,
                                           const ThresholdVector& eta,
                                           const std::vector<int>& bits) {
  const int n = instance.n_buyers();
  std::optional<int> winner;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& d = instance.buyers[static_cast<std::size_t>(i)].distribution;
    const double t = eta.values[static_cast<std::size_t>(i)];
    const double lam = (t - d.lower()) / (d.upper() - d.lower());
    double score;
    if (bits[static_cast<std::size_t>(i)] == 1) {
      score = t - instance.seller_value;
    } else if (lam > 0.0) {
      score = (d.lower() - (1.0 - lam) * t) / lam - instance.seller_value;
    } else {
      score = -std::numeric_limits<double>::infinity();
    }
    if (score > best) {
      best = score;
      winner = i;
    }
  }
  return winner;
}

// Reference expected gain: enumerate outcomes, joint pmf as a plain product
// of uniform cdf values, winner via reference_winner, contribution in the
// direct score-times-pmf form (the route the library does not use).
inline double reference_gain(const AuctionInstance& instance, const ThresholdVector& eta) {
  const int n = instance.n_buyers();
  double gain = 0.0;
  for (std::uint32_t code = 0; code < (1u << n); ++code) {
    std::vector<int> bits(static_cast<std::size_t>(n));
    double pmf = 1.0;
    for (int i = 0; i < n; ++i) {
      bits[static_cast<std::size_t>(i)] = static_cast<int>((code >> i) & 1u);
      const auto& d = instance.buyers[static_cast<std::size_t>(i)].distribution;
      const double lam =
          (eta.values[static_cast<std::size_t>(i)] - d.lower()) / (d.upper() - d.lower());
      pmf *= bits[static_cast<std::size_t>(i)] ? 1.0 - lam : lam;
    }
    const auto w = reference_winner(instance, eta, bits);
    if (!w) continue;
    const auto& d = instance.buyers[static_cast<std::size_t>(*w)].distribution;
    const double t = eta.values[static_cast<std::size_t>(*w)];
    const double lam = (t - d.lower()) / (d.upper() - d.lower());
    const double score = bits[static_cast<std::size_t>(*w)]
                             ? t - instance.seller_value
                             : (d.lower() - (1.0 - lam) * t) / lam - instance.seller_value;
    gain += pmf * score;
  }
  return gain;
}

}  // namespace qba::test
