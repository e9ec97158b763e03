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

#include "qba/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "qba/csv.hpp"
#include "qba/mechanism.hpp"
#include "qba/thresholds.hpp"

namespace qba {

Estimate myerson_uniform(double seller_value, double lower, double upper, int n_bidders,
                         std::uint64_t trials, std::uint64_t seed) {
  if (n_bidders < 1) {
    throw ValidationError("myerson_uniform: need at least one bidder");
  }
  if (trials < 1) {
    throw ValidationError("myerson_uniform: trials must be at least 1");
  }
  const ValueDistribution d = ValueDistribution::uniform(lower, upper);
  if (seller_value > upper) {
    return {seller_value, 0.0};  // never sold; no sampling noise
  }
  const double reserve = std::clamp((upper + seller_value) / 2.0, lower, upper);

  std::mt19937_64 rng(seed);
  RunningStats stats;
  for (std::uint64_t t = 0; t < trials; ++t) {
    double highest = -std::numeric_limits<double>::infinity();
    double second = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_bidders; ++i) {
      const double v = d.sample(rng);
      if (v > highest) {
        second = highest;
        highest = v;
      } else if (v > second) {
        second = v;
      }
    }
    stats.add(highest >= reserve ? std::max(second, reserve) : seller_value);
  }
  return stats.estimate();
}

ThresholdVector random_thresholds(const AuctionInstance& instance, std::mt19937_64& rng) {
  ThresholdVector eta;
  eta.values.reserve(instance.buyers.size());
  for (const auto& buyer : instance.buyers) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto& d = buyer.distribution;
    eta.values.push_back(d.lower() + u * (d.upper() - d.lower()));
  }
  return eta;
}

namespace {

struct AxisPoint {
  double eta = 0.0;
  double zero_prob = 0.0;
  VirtualUtility utility;
};

// Symmetric scan plus per-buyer coordinate refinement over a shared grid.
struct BinaryOptimum {
  double gain = 0.0;
  std::vector<double> thresholds;
  bool symmetric = true;
};

BinaryOptimum optimize_symmetric_instance(double seller_value, double lower, double upper,
                                          int n_bidders, double grid_step) {
  const ValueDistribution d = ValueDistribution::uniform(lower, upper);
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) {
    throw ValidationError("compare: grid step must be positive");
  }
  const double step_count = std::floor((upper - lower) / grid_step + 1e-9);
  if ((step_count + 1.0) * static_cast<double>(n_bidders + 1) *
          static_cast<double>(1u << n_bidders) >
      static_cast<double>(kGridEvalBudget)) {
    std::ostringstream os;
    os << "compare: symmetric search for " << n_bidders
       << " bidders exceeds the evaluation budget";
    throw CapacityError(os.str());
  }
  const std::uint64_t steps = static_cast<std::uint64_t>(step_count);
  std::vector<AxisPoint> axis(steps + 1);
  for (std::uint64_t k = 0; k <= steps; ++k) {
    AxisPoint p;
    p.eta = std::min(lower + static_cast<double>(k) * grid_step, upper);
    p.zero_prob = d.cdf(p.eta);
    p.utility.score1 = p.eta - seller_value;
    p.utility.weighted_score0 =
        lower - (1.0 - p.zero_prob) * p.eta - p.zero_prob * seller_value;
    p.utility.score0 = p.zero_prob > 0.0
                           ? p.utility.weighted_score0 / p.zero_prob
                           : -std::numeric_limits<double>::infinity();
    axis[k] = p;
  }

  std::vector<std::size_t> current(static_cast<std::size_t>(n_bidders), 0);
  std::vector<double> zero_probs(static_cast<std::size_t>(n_bidders));
  std::vector<VirtualUtility> utilities(static_cast<std::size_t>(n_bidders));
  const auto eval = [&](const std::vector<std::size_t>& idx) {
    for (int i = 0; i < n_bidders; ++i) {
      const AxisPoint& p = axis[idx[static_cast<std::size_t>(i)]];
      zero_probs[static_cast<std::size_t>(i)] = p.zero_prob;
      utilities[static_cast<std::size_t>(i)] = p.utility;
    }
    return expected_seller_gain(zero_probs, utilities);
  };

  // Shared symmetric scan.
  double best_gain = -std::numeric_limits<double>::infinity();
  std::size_t best_shared = 0;
  std::vector<std::size_t> probe(static_cast<std::size_t>(n_bidders), 0);
  for (std::size_t k = 0; k < axis.size(); ++k) {
    std::fill(probe.begin(), probe.end(), k);
    const double gain = eval(probe);
    if (gain > best_gain) {
      best_gain = gain;
      best_shared = k;
    }
  }
  std::fill(current.begin(), current.end(), best_shared);

  // Coordinate refinement until no single-buyer move strictly improves.
  constexpr int kMaxPasses = 100;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool improved = false;
    for (int i = 0; i < n_bidders; ++i) {
      std::size_t best_k = current[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < axis.size(); ++k) {
        probe = current;
        probe[static_cast<std::size_t>(i)] = k;
        const double gain = eval(probe);
        if (gain > best_gain) {
          best_gain = gain;
          best_k = k;
          improved = true;
        }
      }
      current[static_cast<std::size_t>(i)] = best_k;
    }
    if (!improved) break;
  }

  BinaryOptimum result;
  result.gain = best_gain;
  result.thresholds.reserve(static_cast<std::size_t>(n_bidders));
  for (int i = 0; i < n_bidders; ++i) {
    result.thresholds.push_back(axis[current[static_cast<std::size_t>(i)]].eta);
  }
  for (const double eta : result.thresholds) {
    if (std::abs(eta - result.thresholds.front()) > kGridTieTolerance) {
      result.symmetric = false;
    }
  }
  return result;
}

}  // namespace

std::vector<ComparisonRow> compare_sweep(double seller_value, double lower, double upper,
                                         const CompareOptions& options) {
  if (options.bidder_counts.empty()) {
    throw ValidationError("compare: n_range must be nonempty");
  }
  if (options.threshold_draws < 1) {
    throw ValidationError("compare: draws must be at least 1");
  }
  for (const int n : options.bidder_counts) {
    if (n < 1) throw ValidationError("compare: bidder counts must be at least 1");
    if (n > kMaxBuyers) {
      std::ostringstream os;
      os << "compare: " << n << " bidders exceeds the cap of " << kMaxBuyers;
      throw CapacityError(os.str());
    }
  }

  std::vector<ComparisonRow> rows;
  rows.reserve(options.bidder_counts.size());
  for (const int n : options.bidder_counts) {
    ComparisonRow row;
    row.n_bidders = n;

    const std::uint64_t analog_seed = split_seed(options.seed, 2 * static_cast<std::uint64_t>(n));
    const std::uint64_t random_seed =
        split_seed(options.seed, 2 * static_cast<std::uint64_t>(n) + 1);

    row.analog_utility =
        myerson_uniform(seller_value, lower, upper, n, options.trials, analog_seed);

    const BinaryOptimum opt =
        optimize_symmetric_instance(seller_value, lower, upper, n, options.grid_step);
    row.binary_optimal_utility = seller_value + opt.gain;
    row.binary_optimal_thresholds = opt.thresholds;
    row.optimum_symmetric = opt.symmetric;

    AuctionInstance instance;
    instance.seller_value = seller_value;
    instance.buyers.assign(static_cast<std::size_t>(n),
                           BuyerSpec{ValueDistribution::uniform(lower, upper)});
    std::mt19937_64 rng(random_seed);
    RunningStats random_utility;
    for (int draw = 0; draw < options.threshold_draws; ++draw) {
      const ThresholdVector eta = random_thresholds(instance, rng);
      random_utility.add(seller_value + expected_seller_gain(instance, eta));
    }
    row.binary_random_utility = random_utility.estimate();

    rows.push_back(std::move(row));
  }
  return rows;
}

void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
  os << "n,analog_mean,analog_se,binary_optimal,binary_random_mean,binary_random_se\n";
  for (const auto& row : rows) {
    os << row.n_bidders << "," << csv_number(row.analog_utility.mean) << ","
       << csv_number(row.analog_utility.std_error) << ","
       << csv_number(row.binary_optimal_utility) << ","
       << csv_number(row.binary_random_utility.mean) << ","
       << csv_number(row.binary_random_utility.std_error) << "\n";
  }
}

}  // namespace qba
