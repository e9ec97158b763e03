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

#include <optional>
#include <span>
#include <vector>

#include "qba/model.hpp"

namespace qba {

// Per-buyer virtual utility: the seller's score for selling to this buyer,
// one value per possible bid.
//
// score1 = eta - v0. score0 = (a - (1-lambda)*eta)/lambda - v0, which is
// -inf when lambda = 0 (the bid-0 branch then has probability zero).
// weighted_score0 = lambda * score0 = a - (1-lambda)*eta - lambda*v0 stays
// finite in every case and is what the exact expectation sums.
struct VirtualUtility {
  double score0 = 0.0;
  double score1 = 0.0;
  double weighted_score0 = 0.0;

  double score(int bit) const { return bit ? score1 : score0; }
};

std::vector<VirtualUtility> virtual_utilities(const AuctionInstance& instance,
                                              const ThresholdVector& thresholds);

// Winner for one bid outcome: the lowest-index buyer whose score attains
// the maximum, provided that maximum is strictly positive; otherwise the
// seller keeps the object.
std::optional<int> allocate(std::span<const VirtualUtility> utilities, const Outcome& omega);

// Would `buyer` still win with his bid forced to 0, the other bids held
// fixed? Returns the 0/1 allocation of that counterfactual outcome.
int counterfactual_win(std::span<const VirtualUtility> utilities, const Outcome& omega,
                       int buyer);

// Payment vector for one outcome given its winner. Non-winners pay zero;
// a winner bidding 0 pays his lowest value a; a winner bidding 1 pays
// eta - (eta - a) * counterfactual_win.
std::vector<double> payments(const AuctionInstance& instance, const ThresholdVector& thresholds,
                             std::span<const VirtualUtility> utilities, const Outcome& omega,
                             std::optional<int> winner);

// The full mechanism for one instance and threshold vector: winner and
// payment for every one of the 2^N bid outcomes. Immutable once built.
class MechanismTable {
 public:
  MechanismTable(AuctionInstance instance, ThresholdVector thresholds,
                 std::vector<std::int32_t> winners, std::vector<double> winner_payments);

  const AuctionInstance& instance() const { return instance_; }
  const ThresholdVector& thresholds() const { return thresholds_; }
  int n_buyers() const { return instance_.n_buyers(); }
  std::size_t n_outcomes() const { return winners_.size(); }

  std::optional<int> winner(std::uint32_t code) const {
    const std::int32_t w = winners_[code];
    return w < 0 ? std::nullopt : std::optional<int>(w);
  }

  // 0/1 allocation of one buyer at one outcome.
  int allocation(std::uint32_t code, int buyer) const {
    return winners_[code] == buyer ? 1 : 0;
  }

  // What `buyer` pays at this outcome (zero unless he is the winner).
  double payment(std::uint32_t code, int buyer) const {
    return winners_[code] == buyer ? winner_payments_[code] : 0.0;
  }

  double winner_payment(std::uint32_t code) const { return winner_payments_[code]; }

 private:
  AuctionInstance instance_;
  ThresholdVector thresholds_;
  std::vector<std::int32_t> winners_;        // -1 = seller keeps the object
  std::vector<double> winner_payments_;      // 0 where there is no winner
};

// Builds the seller-optimal mechanism for the given thresholds.
// Throws CapacityError above kMaxBuyers.
MechanismTable build_mechanism(const AuctionInstance& instance,
                               const ThresholdVector& thresholds);

// Exact expected seller gain (expected utility net of the seller's own
// value) of the optimal mechanism, summed over all 2^N outcomes.
//
// A winner bidding 0 contributes weighted_score0 times the opponents' pmf:
// the bid-0 probability cancels against the 1/lambda inside score0, so the
// lambda = 0 sentinel never enters the sum.
double expected_seller_gain(const AuctionInstance& instance, const ThresholdVector& thresholds);

// Same sum given precomputed per-buyer quantities; the hot path for grid
// sweeps. zero_probs[i] is buyer i's bid-0 probability.
double expected_seller_gain(std::span<const double> zero_probs,
                            std::span<const VirtualUtility> utilities);

// Expected seller utility computed from the table's own allocations and
// payments (keep-value plus payments, weighted by the outcome pmf). For a
// mechanism built here this equals expected_seller_gain + v0; the two
// routes are algebraically independent, which the verification layer uses.
double expected_seller_utility(const MechanismTable& table);

// Buyer i's conditional win probability and expected payment given his own
// bid, averaged over the opponents' bids.
struct InterimQuantities {
  double win_prob_bit0 = 0.0;   // Q0
  double win_prob_bit1 = 0.0;   // Q1
  double payment_bit0 = 0.0;    // P0
  double payment_bit1 = 0.0;    // P1
};

InterimQuantities interim_quantities(const MechanismTable& table, int buyer);

// Expected utility of buyer `buyer` with private value v when he reports
// `reported_bit`: v * Q^bit - P^bit. v must lie in the buyer's support.
double buyer_expected_utility(const MechanismTable& table, int buyer, double v,
                              int reported_bit);

}  // namespace qba
