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

#include "qba/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace qba {

namespace {

void check_table_matches(const AuctionInstance& instance, const MechanismTable& table) {
  if (table.n_buyers() != instance.n_buyers()) {
    std::ostringstream os;
    os << "mechanism table built for " << table.n_buyers() << " buyers, instance has "
       << instance.n_buyers();
    throw ValidationError(os.str());
  }
}

// Value grid for the deviation scan: `grid_points` evenly spaced values
// with both endpoints exact, plus the threshold itself.
std::vector<double> deviation_grid(double lower, double upper, double threshold,
                                   int grid_points) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(grid_points) + 1);
  for (int k = 0; k < grid_points; ++k) {
    const double v = (k == grid_points - 1)
                         ? upper
                         : lower + static_cast<double>(k) * (upper - lower) /
                                       static_cast<double>(grid_points - 1);
    grid.push_back(v);
  }
  grid.push_back(threshold);
  return grid;
}

}  // namespace

InterimCheck check_interim_conditions(const MechanismTable& table) {
  InterimCheck result;
  result.max_payment_residual = 0.0;
  result.min_win_prob_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < table.n_buyers(); ++i) {
    const InterimQuantities q = interim_quantities(table, i);
    const double eta = table.thresholds().values[static_cast<std::size_t>(i)];
    const double gap = q.win_prob_bit1 - q.win_prob_bit0;
    const double residual = std::abs(q.payment_bit1 - q.payment_bit0 - eta * gap);
    result.max_payment_residual = std::max(result.max_payment_residual, residual);
    result.min_win_prob_gap = std::min(result.min_win_prob_gap, gap);
  }
  return result;
}

DeviationCheck check_deviations(const AuctionInstance& instance,
                                const ThresholdVector& thresholds, const MechanismTable& table,
                                int grid_points) {
  check_table_matches(instance, table);
  validate_thresholds(instance, thresholds);
  if (grid_points < 3) {
    throw ValidationError("check_deviations: need at least 3 grid points");
  }
  DeviationCheck result;
  result.max_lying_gain = -std::numeric_limits<double>::infinity();
  result.min_truthful_utility = std::numeric_limits<double>::infinity();
  for (int i = 0; i < instance.n_buyers(); ++i) {
    const auto& d = instance.buyers[static_cast<std::size_t>(i)].distribution;
    const double eta = thresholds.values[static_cast<std::size_t>(i)];
    const InterimQuantities q = interim_quantities(table, i);
    for (const double v : deviation_grid(d.lower(), d.upper(), eta, grid_points)) {
      const int truthful = quantize(v, eta, d.lower(), d.upper());
      const double u_truth = truthful ? v * q.win_prob_bit1 - q.payment_bit1
                                      : v * q.win_prob_bit0 - q.payment_bit0;
      const double u_flip = truthful ? v * q.win_prob_bit0 - q.payment_bit0
                                     : v * q.win_prob_bit1 - q.payment_bit1;
      result.max_lying_gain = std::max(result.max_lying_gain, u_flip - u_truth);
      result.min_truthful_utility = std::min(result.min_truthful_utility, u_truth);
    }
  }
  return result;
}

OracleResult allocation_oracle(const AuctionInstance& instance,
                               const ThresholdVector& thresholds) {
  instance.validate();
  validate_thresholds(instance, thresholds);
  const int n = instance.n_buyers();
  if (n > kOracleMaxBuyers) {
    std::ostringstream os;
    os << "allocation_oracle: " << n << " buyers exceeds the exhaustive cap of "
       << kOracleMaxBuyers;
    throw CapacityError(os.str());
  }

  const double v0 = instance.seller_value;
  std::vector<double> zero_probs(static_cast<std::size_t>(n));
  std::vector<double> lowers(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& d = instance.buyers[static_cast<std::size_t>(i)].distribution;
    zero_probs[static_cast<std::size_t>(i)] =
        d.cdf(thresholds.values[static_cast<std::size_t>(i)]);
    lowers[static_cast<std::size_t>(i)] = d.lower();
  }

  OracleResult result;
  const std::uint32_t count = 1u << n;
  result.optimal_winners.resize(count);
  for (std::uint32_t code = 0; code < count; ++code) {
    // Expected contribution of selling to buyer i at this outcome. The
    // bid-0 branch multiplies the finite weighted score by the opponents'
    // pmf instead of dividing by a possibly zero bid probability.
    double best = 0.0;
    std::vector<double> contributions(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double lam = zero_probs[static_cast<std::size_t>(i)];
      const double eta = thresholds.values[static_cast<std::size_t>(i)];
      double weight = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        weight *= (code >> j) & 1u ? (1.0 - zero_probs[static_cast<std::size_t>(j)])
                                   : zero_probs[static_cast<std::size_t>(j)];
      }
      double contribution;
      if ((code >> i) & 1u) {
        contribution = weight * (1.0 - lam) * (eta - v0);
      } else {
        contribution = weight * (lowers[static_cast<std::size_t>(i)] - (1.0 - lam) * eta -
                                 lam * v0);
      }
      contributions[static_cast<std::size_t>(i)] = contribution;
      best = std::max(best, contribution);
    }
    result.gain += best;
    auto& winners = result.optimal_winners[code];
    if (best <= 0.0) winners.push_back(-1);
    for (int i = 0; i < n; ++i) {
      if (contributions[static_cast<std::size_t>(i)] == best) winners.push_back(i);
    }
  }
  return result;
}

double best_fractional_gain(const AuctionInstance& instance, const ThresholdVector& thresholds,
                            int draws, std::uint64_t seed) {
  instance.validate();
  validate_thresholds(instance, thresholds);
  const int n = instance.n_buyers();
  if (n > kOracleMaxBuyers) {
    throw CapacityError("best_fractional_gain: instance too large for the refuter");
  }
  const double v0 = instance.seller_value;
  const std::uint32_t count = 1u << n;

  // contributions[code][i]: expected objective term of allocating outcome
  // `code` to buyer i with full probability.
  std::vector<std::vector<double>> contributions(count,
                                                 std::vector<double>(static_cast<std::size_t>(n)));
  for (std::uint32_t code = 0; code < count; ++code) {
    for (int i = 0; i < n; ++i) {
      const auto& d = instance.buyers[static_cast<std::size_t>(i)].distribution;
      const double lam = d.cdf(thresholds.values[static_cast<std::size_t>(i)]);
      const double eta = thresholds.values[static_cast<std::size_t>(i)];
      double weight = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const auto& dj = instance.buyers[static_cast<std::size_t>(j)].distribution;
        const double lamj = dj.cdf(thresholds.values[static_cast<std::size_t>(j)]);
        weight *= (code >> j) & 1u ? (1.0 - lamj) : lamj;
      }
      contributions[code][static_cast<std::size_t>(i)] =
          (code >> i) & 1u ? weight * (1.0 - lam) * (eta - v0)
                           : weight * (d.lower() - (1.0 - lam) * eta - lam * v0);
    }
  }

  std::mt19937_64 rng(seed);
  const auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> q(static_cast<std::size_t>(n));
  for (int draw = 0; draw < draws; ++draw) {
    double total = 0.0;
    for (std::uint32_t code = 0; code < count; ++code) {
      // Uniform over the simplex q >= 0, sum(q) <= 1 via normalized
      // exponentials over n+1 coordinates (the extra one is keep).
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        q[static_cast<std::size_t>(i)] = -std::log(1.0 - unit());
        sum += q[static_cast<std::size_t>(i)];
      }
      sum += -std::log(1.0 - unit());
      for (int i = 0; i < n; ++i) {
        total += contributions[code][static_cast<std::size_t>(i)] *
                 (q[static_cast<std::size_t>(i)] / sum);
      }
    }
    best = std::max(best, total);
  }
  return best;
}

SimulationSummary monte_carlo(const AuctionInstance& instance, const ThresholdVector& thresholds,
                              const MechanismTable& table, std::uint64_t trials,
                              std::uint64_t seed) {
  instance.validate();
  validate_thresholds(instance, thresholds);
  check_table_matches(instance, table);
  if (trials < 1) {
    throw ValidationError("monte_carlo: trials must be at least 1");
  }
  const int n = instance.n_buyers();

  std::mt19937_64 rng(seed);
  RunningStats seller;
  std::vector<RunningStats> buyers(static_cast<std::size_t>(n));
  std::vector<std::uint64_t> wins(static_cast<std::size_t>(n), 0);
  std::uint64_t no_sale = 0;
  std::vector<double> values(static_cast<std::size_t>(n));

  for (std::uint64_t t = 0; t < trials; ++t) {
    std::uint32_t code = 0;
    for (int i = 0; i < n; ++i) {
      const auto& d = instance.buyers[static_cast<std::size_t>(i)].distribution;
      const double v = d.sample(rng);
      values[static_cast<std::size_t>(i)] = v;
      if (quantize(v, thresholds.values[static_cast<std::size_t>(i)], d.lower(), d.upper())) {
        code |= 1u << i;
      }
    }
    const auto w = table.winner(code);
    if (w) {
      const double pay = table.winner_payment(code);
      ++wins[static_cast<std::size_t>(*w)];
      seller.add(pay);
      for (int i = 0; i < n; ++i) {
        buyers[static_cast<std::size_t>(i)].add(
            i == *w ? values[static_cast<std::size_t>(i)] - pay : 0.0);
      }
    } else {
      ++no_sale;
      seller.add(instance.seller_value);
      for (int i = 0; i < n; ++i) buyers[static_cast<std::size_t>(i)].add(0.0);
    }
  }

  SimulationSummary summary;
  summary.trials = trials;
  summary.seed = seed;
  summary.seller_utility = seller.estimate();
  summary.buyer_utilities.reserve(static_cast<std::size_t>(n));
  summary.winner_frequencies.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    summary.buyer_utilities.push_back(buyers[static_cast<std::size_t>(i)].estimate());
    summary.winner_frequencies.push_back(static_cast<double>(wins[static_cast<std::size_t>(i)]) /
                                         static_cast<double>(trials));
  }
  summary.no_sale_frequency = static_cast<double>(no_sale) / static_cast<double>(trials);
  return summary;
}

VerificationReport run_verification(const AuctionInstance& instance,
                                    const ThresholdVector& thresholds,
                                    const MechanismTable& table, int deviation_grid_points) {
  VerificationReport report;

  const InterimCheck interim = check_interim_conditions(table);
  report.interim_max_violation =
      std::max(interim.max_payment_residual, std::max(0.0, -interim.min_win_prob_gap));
  report.interim_passed = interim.max_payment_residual <= kInterimIdentityTolerance &&
                          interim.min_win_prob_gap >= 0.0;

  const DeviationCheck dev = check_deviations(instance, thresholds, table, deviation_grid_points);
  report.ic_deviation_max = dev.max_lying_gain;
  report.ic_passed = dev.max_lying_gain <= kIcTolerance;
  report.ir_min_utility = dev.min_truthful_utility;
  report.ir_passed = dev.min_truthful_utility >= -kIrTolerance;

  if (instance.n_buyers() <= kOracleMaxBuyers) {
    const OracleResult oracle = allocation_oracle(instance, thresholds);
    const double table_gain = expected_seller_utility(table) - instance.seller_value;
    report.oracle_gap = std::abs(table_gain - oracle.gain);
    report.oracle_passed = report.oracle_gap <= kOracleTolerance;
    report.oracle_checked = true;
  } else {
    report.oracle_gap = 0.0;
    report.oracle_passed = true;
    report.oracle_checked = false;
  }
  return report;
}

}  // namespace qba
