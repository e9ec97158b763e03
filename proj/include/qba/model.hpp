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
#include <random>
#include <vector>

#include "qba/errors.hpp"

namespace qba {

// Hard cap on the number of buyers: every mechanism is tabulated over all
// 2^N bid outcomes, so N is limited to keep tables in memory.
inline constexpr int kMaxBuyers = 20;

enum class DistributionKind { kUniform };

// A buyer's private-value law on a finite support [lower, upper].
//
// v1 ships the uniform family only; the mechanism itself consumes just the
// support bounds and the probability mass below the quantization threshold,
// so additional families plug in behind this same interface.
class ValueDistribution {
 public:
  // Requires lower < upper, both finite.
  static ValueDistribution uniform(double lower, double upper);

  DistributionKind kind() const { return kind_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }

  // Defined on all of R; clamps to 0 below the support and 1 above it.
  double cdf(double x) const;
  double pdf(double x) const;

  // Draws one value. Uses the top 53 bits of the generator output so the
  // stream is identical across platforms for a fixed seed.
  double sample(std::mt19937_64& rng) const;

 private:
  ValueDistribution(DistributionKind kind, double lower, double upper)
      : kind_(kind), lower_(lower), upper_(upper) {}

  DistributionKind kind_;
  double lower_;
  double upper_;
};

struct BuyerSpec {
  ValueDistribution distribution;
};

// One auction: the seller's own value for the object plus N >= 1 buyers.
// Buyer indices are 0-based and stable; index order doubles as the
// tie-break priority in winner determination.
struct AuctionInstance {
  double seller_value = 0.0;
  std::vector<BuyerSpec> buyers;

  int n_buyers() const { return static_cast<int>(buyers.size()); }

  // Throws ValidationError naming the offending field.
  void validate() const;
};

// Per-buyer quantization thresholds. Valid when values[i] lies inside
// buyer i's support.
struct ThresholdVector {
  std::vector<double> values;
};

void validate_thresholds(const AuctionInstance& instance, const ThresholdVector& thresholds);

// A joint bid realization: one bit per buyer. Canonically encoded as the
// integer sum of bit_i * 2^i, so tables index outcomes directly and the
// "all opponents" slices are plain bit operations.
class Outcome {
 public:
  Outcome(std::uint32_t code, int n_buyers) : code_(code), n_(n_buyers) {}

  std::uint32_t code() const { return code_; }
  int size() const { return n_; }
  int bit(int i) const { return static_cast<int>((code_ >> i) & 1u); }

  Outcome with_bit(int i, int value) const {
    const std::uint32_t mask = 1u << i;
    return Outcome(value ? (code_ | mask) : (code_ & ~mask), n_);
  }

  std::vector<int> bits() const {
    std::vector<int> out(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = bit(i);
    return out;
  }

  // Builds the full outcome from an opponents-only code (bit j of
  // reduced_code is buyer j's bit, skipping position `buyer`).
  static Outcome compose(std::uint32_t reduced_code, int buyer, int bit_value, int n_buyers);

 private:
  std::uint32_t code_;
  int n_;
};

// Binary bid of a value v against threshold eta on support [lower, upper]:
// 0 on [lower, eta], 1 on (eta, upper]. Throws ValidationError when v or
// eta is outside the support.
int quantize(double v, double eta, double lower, double upper);

// Probability that the buyer's quantized bid is 0, i.e. cdf(eta).
double bit_zero_probability(const BuyerSpec& buyer, double eta);

// Joint probability of an outcome: product over buyers of the per-buyer
// bit probability. Sums to 1 over all 2^N outcomes.
double outcome_pmf(const AuctionInstance& instance, const ThresholdVector& thresholds,
                   const Outcome& omega);

// Same product with buyer `skip` left out (the opponents' joint pmf).
double outcome_pmf_excluding(const AuctionInstance& instance, const ThresholdVector& thresholds,
                             const Outcome& omega, int skip);

// All 2^n outcomes in canonical integer order. Throws CapacityError above
// kMaxBuyers.
std::vector<Outcome> enumerate_outcomes(int n);

}  // namespace qba
