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

#include "qba/mechanism.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qba {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_buyer_index(int buyer, int n) {
  if (buyer < 0 || buyer >= n) {
    std::ostringstream os;
    os << "buyer index " << buyer << " out of range [0, " << n << ")";
    throw ValidationError(os.str());
  }
}

}  // namespace

std::vector<VirtualUtility> virtual_utilities(const AuctionInstance& instance,
                                              const ThresholdVector& thresholds) {
  instance.validate();
  validate_thresholds(instance, thresholds);
  const double v0 = instance.seller_value;
  std::vector<VirtualUtility> out;
  out.reserve(instance.buyers.size());
  for (std::size_t i = 0; i < instance.buyers.size(); ++i) {
    const auto& d = instance.buyers[i].distribution;
    const double eta = thresholds.values[i];
    const double lam = d.cdf(eta);
    VirtualUtility u;
    u.score1 = eta - v0;
    u.weighted_score0 = d.lower() - (1.0 - lam) * eta - lam * v0;
    u.score0 = lam > 0.0 ? u.weighted_score0 / lam : kNegInf;
    out.push_back(u);
  }
  return out;
}

std::optional<int> allocate(std::span<const VirtualUtility> utilities, const Outcome& omega) {
  // Strict comparison against a running best initialized to zero implements
  // both rules at once: keep the object unless some score is positive, and
  // break exact ties toward the lowest index.
  int best = -1;
  double best_score = 0.0;
  for (int i = 0; i < static_cast<int>(utilities.size()); ++i) {
    const double s = utilities[static_cast<std::size_t>(i)].score(omega.bit(i));
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best < 0 ? std::nullopt : std::optional<int>(best);
}

int counterfactual_win(std::span<const VirtualUtility> utilities, const Outcome& omega,
                       int buyer) {
  const auto w = allocate(utilities, omega.with_bit(buyer, 0));
  return (w && *w == buyer) ? 1 : 0;
}

std::vector<double> payments(const AuctionInstance& instance, const ThresholdVector& thresholds,
                             std::span<const VirtualUtility> utilities, const Outcome& omega,
                             std::optional<int> winner) {
  std::vector<double> pay(instance.buyers.size(), 0.0);
  if (!winner) return pay;
  const int w = *winner;
  check_buyer_index(w, instance.n_buyers());
  const double a = instance.buyers[static_cast<std::size_t>(w)].distribution.lower();
  const double eta = thresholds.values[static_cast<std::size_t>(w)];
  if (omega.bit(w) == 0) {
    pay[static_cast<std::size_t>(w)] = a;
  } else {
    const int still_wins = counterfactual_win(utilities, omega, w);
    pay[static_cast<std::size_t>(w)] = eta - (eta - a) * static_cast<double>(still_wins);
  }
  return pay;
}

MechanismTable::MechanismTable(AuctionInstance instance, ThresholdVector thresholds,
                               std::vector<std::int32_t> winners,
                               std::vector<double> winner_payments)
    : instance_(std::move(instance)),
      thresholds_(std::move(thresholds)),
      winners_(std::move(winners)),
      winner_payments_(std::move(winner_payments)) {
  instance_.validate();
  validate_thresholds(instance_, thresholds_);
  const std::size_t expected = std::size_t{1} << instance_.n_buyers();
  if (winners_.size() != expected || winner_payments_.size() != expected) {
    std::ostringstream os;
    os << "mechanism table: expected " << expected << " outcome rows, got " << winners_.size()
       << " winners / " << winner_payments_.size() << " payments";
    throw ValidationError(os.str());
  }
  for (std::size_t code = 0; code < winners_.size(); ++code) {
    const std::int32_t w = winners_[code];
    if (w < -1 || w >= instance_.n_buyers()) {
      std::ostringstream os;
      os << "mechanism table: outcome " << code << " has invalid winner index " << w;
      throw ValidationError(os.str());
    }
    if (w < 0 && winner_payments_[code] != 0.0) {
      std::ostringstream os;
      os << "mechanism table: outcome " << code << " has a payment but no winner";
      throw ValidationError(os.str());
    }
  }
}

MechanismTable build_mechanism(const AuctionInstance& instance,
                               const ThresholdVector& thresholds) {
  const auto utilities = virtual_utilities(instance, thresholds);
  const int n = instance.n_buyers();
  if (n > kMaxBuyers) {
    std::ostringstream os;
    os << "build_mechanism: " << n << " buyers exceeds the cap of " << kMaxBuyers;
    throw CapacityError(os.str());
  }
  const std::size_t count = std::size_t{1} << n;
  std::vector<std::int32_t> winners(count, -1);
  std::vector<double> pays(count, 0.0);
  for (std::uint32_t code = 0; code < count; ++code) {
    const Outcome omega(code, n);
    const auto w = allocate(utilities, omega);
    if (!w) continue;
    winners[code] = *w;
    pays[code] = payments(instance, thresholds, utilities, omega, w)[static_cast<std::size_t>(*w)];
  }
  return MechanismTable(instance, thresholds, std::move(winners), std::move(pays));
}

double expected_seller_gain(std::span<const double> zero_probs,
                            std::span<const VirtualUtility> utilities) {
  const int n = static_cast<int>(utilities.size());
  const std::uint32_t count = 1u << n;
  double gain = 0.0;
  for (std::uint32_t code = 0; code < count; ++code) {
    int best = -1;
    double best_score = 0.0;
    double pmf = 1.0;
    for (int i = 0; i < n; ++i) {
      const int bit = static_cast<int>((code >> i) & 1u);
      const auto& u = utilities[static_cast<std::size_t>(i)];
      pmf *= bit ? (1.0 - zero_probs[static_cast<std::size_t>(i)])
                 : zero_probs[static_cast<std::size_t>(i)];
      const double s = bit ? u.score1 : u.score0;
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
    if (best < 0) continue;
    if ((code >> best) & 1u) {
      gain += pmf * utilities[static_cast<std::size_t>(best)].score1;
    } else {
      double opponents = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j == best) continue;
        opponents *= (code >> j) & 1u ? (1.0 - zero_probs[static_cast<std::size_t>(j)])
                                      : zero_probs[static_cast<std::size_t>(j)];
      }
      gain += opponents * utilities[static_cast<std::size_t>(best)].weighted_score0;
    }
  }
  return gain;
}

double expected_seller_gain(const AuctionInstance& instance, const ThresholdVector& thresholds) {
  const auto utilities = virtual_utilities(instance, thresholds);
  if (instance.n_buyers() > kMaxBuyers) {
    std::ostringstream os;
    os << "expected_seller_gain: " << instance.n_buyers() << " buyers exceeds the cap of "
       << kMaxBuyers;
    throw CapacityError(os.str());
  }
  std::vector<double> zero_probs(instance.buyers.size());
  for (std::size_t i = 0; i < instance.buyers.size(); ++i) {
    zero_probs[i] = instance.buyers[i].distribution.cdf(thresholds.values[i]);
  }
  return expected_seller_gain(zero_probs, utilities);
}

double expected_seller_utility(const MechanismTable& table) {
  const auto& instance = table.instance();
  const int n = table.n_buyers();
  double total = 0.0;
  for (std::uint32_t code = 0; code < table.n_outcomes(); ++code) {
    const Outcome omega(code, n);
    const double pmf = outcome_pmf(instance, table.thresholds(), omega);
    const auto w = table.winner(code);
    const double value = w ? table.winner_payment(code) : instance.seller_value;
    total += pmf * value;
  }
  return total;
}

InterimQuantities interim_quantities(const MechanismTable& table, int buyer) {
  const int n = table.n_buyers();
  check_buyer_index(buyer, n);
  const auto& instance = table.instance();
  InterimQuantities q;
  const std::uint32_t reduced_count = n > 1 ? (1u << (n - 1)) : 1u;
  // One loop fills both bids with identical accumulation order, so the
  // monotonicity comparison Q1 >= Q0 is exact in floating point.
  for (std::uint32_t reduced = 0; reduced < reduced_count; ++reduced) {
    const Outcome omega0 = Outcome::compose(reduced, buyer, 0, n);
    const Outcome omega1 = Outcome::compose(reduced, buyer, 1, n);
    const double opponents = outcome_pmf_excluding(instance, table.thresholds(), omega0, buyer);
    q.win_prob_bit0 += static_cast<double>(table.allocation(omega0.code(), buyer)) * opponents;
    q.win_prob_bit1 += static_cast<double>(table.allocation(omega1.code(), buyer)) * opponents;
    q.payment_bit0 += table.payment(omega0.code(), buyer) * opponents;
    q.payment_bit1 += table.payment(omega1.code(), buyer) * opponents;
  }
  return q;
}

double buyer_expected_utility(const MechanismTable& table, int buyer, double v,
                              int reported_bit) {
  check_buyer_index(buyer, table.n_buyers());
  const auto& d = table.instance().buyers[static_cast<std::size_t>(buyer)].distribution;
  if (!(v >= d.lower() && v <= d.upper())) {
    std::ostringstream os;
    os << "buyer_expected_utility: value " << v << " outside buyer " << buyer << "'s support ["
       << d.lower() << ", " << d.upper() << "]";
    throw ValidationError(os.str());
  }
  const InterimQuantities q = interim_quantities(table, buyer);
  return reported_bit ? v * q.win_prob_bit1 - q.payment_bit1
                      : v * q.win_prob_bit0 - q.payment_bit0;
}

}  // namespace qba
