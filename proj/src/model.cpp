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

#include "qba/model.hpp"

#include <cmath>
#include <sstream>

namespace qba {

namespace {

std::string range_text(double lo, double hi) {
  std::ostringstream os;
  os << "[" << lo << ", " << hi << "]";
  return os.str();
}

}  // namespace

ValueDistribution ValueDistribution::uniform(double lower, double upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper)) {
    throw ValidationError("uniform distribution: support bounds must be finite");
  }
  if (!(lower < upper)) {
    std::ostringstream os;
    os << "uniform distribution: lower bound " << lower << " must be below upper bound " << upper;
    throw ValidationError(os.str());
  }
  return ValueDistribution(DistributionKind::kUniform, lower, upper);
}

double ValueDistribution::cdf(double x) const {
  if (x <= lower_) return 0.0;
  if (x >= upper_) return 1.0;
  switch (kind_) {
    case DistributionKind::kUniform:
      return (x - lower_) / (upper_ - lower_);
  }
  return 0.0;  // unreachable
}

double ValueDistribution::pdf(double x) const {
  if (x < lower_ || x > upper_) return 0.0;
  switch (kind_) {
    case DistributionKind::kUniform:
      return 1.0 / (upper_ - lower_);
  }
  return 0.0;  // unreachable
}

double ValueDistribution::sample(std::mt19937_64& rng) const {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
  switch (kind_) {
    case DistributionKind::kUniform:
      return lower_ + u * (upper_ - lower_);
  }
  return lower_;  // unreachable
}

void AuctionInstance::validate() const {
  if (!std::isfinite(seller_value)) {
    throw ValidationError("instance.v0: seller value must be finite");
  }
  if (buyers.empty()) {
    throw ValidationError("instance.buyers: at least one buyer is required");
  }
  // Distribution invariants are enforced at construction.
}

void validate_thresholds(const AuctionInstance& instance, const ThresholdVector& thresholds) {
  if (thresholds.values.size() != instance.buyers.size()) {
    std::ostringstream os;
    os << "thresholds: expected " << instance.buyers.size() << " entries, got "
       << thresholds.values.size();
    throw ValidationError(os.str());
  }
  for (std::size_t i = 0; i < thresholds.values.size(); ++i) {
    const auto& d = instance.buyers[i].distribution;
    const double eta = thresholds.values[i];
    if (!std::isfinite(eta) || eta < d.lower() || eta > d.upper()) {
      std::ostringstream os;
      os << "thresholds[" << i << "] = " << eta << ": must lie within buyer " << i
         << "'s support " << range_text(d.lower(), d.upper());
      throw ValidationError(os.str());
    }
  }
}

Outcome Outcome::compose(std::uint32_t reduced_code, int buyer, int bit_value, int n_buyers) {
  const std::uint32_t low = reduced_code & ((1u << buyer) - 1u);
  const std::uint32_t high = reduced_code >> buyer;
  const std::uint32_t code =
      low | (static_cast<std::uint32_t>(bit_value) << buyer) | (high << (buyer + 1));
  return Outcome(code, n_buyers);
}

int quantize(double v, double eta, double lower, double upper) {
  if (!(v >= lower && v <= upper)) {
    std::ostringstream os;
    os << "quantize: value " << v << " outside support " << range_text(lower, upper);
    throw ValidationError(os.str());
  }
  if (!(eta >= lower && eta <= upper)) {
    std::ostringstream os;
    os << "quantize: threshold " << eta << " outside support " << range_text(lower, upper);
    throw ValidationError(os.str());
  }
  return v <= eta ? 0 : 1;
}

double bit_zero_probability(const BuyerSpec& buyer, double eta) {
  const auto& d = buyer.distribution;
  if (!(eta >= d.lower() && eta <= d.upper())) {
    std::ostringstream os;
    os << "threshold " << eta << " outside support " << range_text(d.lower(), d.upper());
    throw ValidationError(os.str());
  }
  return d.cdf(eta);
}

double outcome_pmf(const AuctionInstance& instance, const ThresholdVector& thresholds,
                   const Outcome& omega) {
  double p = 1.0;
  for (int i = 0; i < instance.n_buyers(); ++i) {
    const double lam = bit_zero_probability(instance.buyers[static_cast<std::size_t>(i)],
                                            thresholds.values[static_cast<std::size_t>(i)]);
    p *= omega.bit(i) ? (1.0 - lam) : lam;
  }
  return p;
}

double outcome_pmf_excluding(const AuctionInstance& instance, const ThresholdVector& thresholds,
                             const Outcome& omega, int skip) {
  double p = 1.0;
  for (int i = 0; i < instance.n_buyers(); ++i) {
    if (i == skip) continue;
    const double lam = bit_zero_probability(instance.buyers[static_cast<std::size_t>(i)],
                                            thresholds.values[static_cast<std::size_t>(i)]);
    p *= omega.bit(i) ? (1.0 - lam) : lam;
  }
  return p;
}

std::vector<Outcome> enumerate_outcomes(int n) {
  if (n < 1) {
    throw ValidationError("enumerate_outcomes: need at least one buyer");
  }
  if (n > kMaxBuyers) {
    std::ostringstream os;
    os << "enumerate_outcomes: " << n << " buyers exceeds the cap of " << kMaxBuyers
       << " (2^N outcome table)";
    throw CapacityError(os.str());
  }
  const std::uint32_t count = 1u << n;
  std::vector<Outcome> out;
  out.reserve(count);
  for (std::uint32_t code = 0; code < count; ++code) out.emplace_back(code, n);
  return out;
}

}  // namespace qba
