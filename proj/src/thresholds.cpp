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

#include "qba/thresholds.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>

#include "qba/csv.hpp"

namespace qba {

namespace {

void check_support(double seller_value, double lower, double upper) {
  if (!std::isfinite(seller_value) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw ValidationError("single buyer problem: v0 and the support must be finite");
  }
  if (!(lower < upper)) {
    std::ostringstream os;
    os << "single buyer problem: lower bound " << lower << " must be below upper bound "
       << upper;
    throw ValidationError(os.str());
  }
}

AllocationChoice choice_from_sign(double coefficient) {
  if (coefficient > 0.0) return AllocationChoice::kAlways;
  if (coefficient < 0.0) return AllocationChoice::kNever;
  return AllocationChoice::kIndifferent;
}

}  // namespace

std::pair<double, double> single_buyer_objective_coefficients(double seller_value, double lower,
                                                              double upper, double threshold) {
  check_support(seller_value, lower, upper);
  if (!(threshold >= lower && threshold <= upper)) {
    std::ostringstream os;
    os << "threshold " << threshold << " outside support [" << lower << ", " << upper << "]";
    throw ValidationError(os.str());
  }
  const double width = upper - lower;
  const double c0 = (threshold - lower) * (threshold - upper + lower - seller_value) / width;
  const double c1 = (upper - threshold) * (threshold - seller_value) / width;
  return {c0, c1};
}

std::pair<AllocationChoice, AllocationChoice> classify_single_buyer(double seller_value,
                                                                    double lower, double upper,
                                                                    double threshold) {
  const auto [c0, c1] = single_buyer_objective_coefficients(seller_value, lower, upper, threshold);
  return {choice_from_sign(c0), choice_from_sign(c1)};
}

SingleBuyerSolution single_buyer_optimum(double seller_value, double lower, double upper) {
  check_support(seller_value, lower, upper);
  SingleBuyerSolution sol;
  const double vertex = (upper + seller_value) / 2.0;

  if (seller_value > upper) {
    sol.regime = SingleBuyerRegime::kKeepObject;
    sol.optimal_threshold = std::nullopt;
    sol.optimal_gain = 0.0;
  } else if (vertex > lower) {
    if (seller_value > lower) {
      sol.regime = SingleBuyerRegime::kSellerValueInterior;
    } else if (seller_value == lower) {
      sol.regime = SingleBuyerRegime::kSellerValueAtLowerBound;
    } else {
      sol.regime = SingleBuyerRegime::kInteriorVertex;
    }
    sol.optimal_threshold = vertex;
    sol.optimal_gain =
        (upper - seller_value) * (upper - seller_value) / (4.0 * (upper - lower));
  } else {
    sol.regime = SingleBuyerRegime::kAlwaysSell;
    sol.optimal_threshold = std::nullopt;
    sol.optimal_gain = lower - seller_value;
  }

  const double representative =
      sol.optimal_threshold ? *sol.optimal_threshold : (lower + upper) / 2.0;
  std::tie(sol.sell_on_bit0, sol.sell_on_bit1) =
      classify_single_buyer(seller_value, lower, upper, representative);
  return sol;
}

namespace {

std::vector<double> axis_values(const GridSpec& grid, const ValueDistribution& d, int buyer) {
  std::ostringstream prefix;
  prefix << "grid[" << buyer << "]";
  if (!std::isfinite(grid.start) || !std::isfinite(grid.stop) || !std::isfinite(grid.step)) {
    throw ValidationError(prefix.str() + ": start/stop/step must be finite");
  }
  if (grid.step <= 0.0) {
    throw ValidationError(prefix.str() + ": step must be positive");
  }
  if (grid.start > grid.stop) {
    throw ValidationError(prefix.str() + ": start must not exceed stop");
  }
  if (grid.start < d.lower() || grid.stop > d.upper()) {
    std::ostringstream os;
    os << prefix.str() << ": range [" << grid.start << ", " << grid.stop
       << "] outside buyer support [" << d.lower() << ", " << d.upper() << "]";
    throw ValidationError(os.str());
  }
  const double span = grid.stop - grid.start;
  const double step_count = std::floor(span / grid.step + 1e-9);
  if (step_count + 1.0 > static_cast<double>(kGridEvalBudget)) {
    throw CapacityError(prefix.str() + ": grid axis alone exceeds the evaluation budget");
  }
  const std::uint64_t steps = static_cast<std::uint64_t>(step_count);
  std::vector<double> values(steps + 1);
  for (std::uint64_t k = 0; k <= steps; ++k) {
    values[k] = std::min(grid.start + static_cast<double>(k) * grid.step, grid.stop);
  }
  return values;
}

}  // namespace

GridSearchResult::GridSearchResult(std::vector<std::vector<double>> axes,
                                   std::vector<double> gains)
    : axes_(std::move(axes)), gains_(std::move(gains)) {
  optimal_gain_ = -std::numeric_limits<double>::infinity();
  for (const double g : gains_) optimal_gain_ = std::max(optimal_gain_, g);
  for (std::size_t flat = 0; flat < gains_.size(); ++flat) {
    if (optimal_gain_ - gains_[flat] <= kGridTieTolerance) tie_indices_.push_back(flat);
  }
  optimal_ = point(tie_indices_.front());
}

ThresholdVector GridSearchResult::point(std::size_t flat_index) const {
  ThresholdVector eta;
  eta.values.resize(axes_.size());
  for (std::size_t i = axes_.size(); i-- > 0;) {
    const std::size_t extent = axes_[i].size();
    eta.values[i] = axes_[i][flat_index % extent];
    flat_index /= extent;
  }
  return eta;
}

std::vector<ThresholdVector> GridSearchResult::ties() const {
  std::vector<ThresholdVector> out;
  out.reserve(tie_indices_.size());
  for (const std::size_t idx : tie_indices_) out.push_back(point(idx));
  return out;
}

GridSearchResult grid_search(const AuctionInstance& instance, const std::vector<GridSpec>& grids) {
  instance.validate();
  const int n = instance.n_buyers();
  if (n > kMaxBuyers) {
    std::ostringstream os;
    os << "grid_search: " << n << " buyers exceeds the cap of " << kMaxBuyers;
    throw CapacityError(os.str());
  }
  if (static_cast<int>(grids.size()) != n) {
    std::ostringstream os;
    os << "grid: expected " << n << " per-buyer specs, got " << grids.size();
    throw ValidationError(os.str());
  }

  std::vector<std::vector<double>> axes(grids.size());
  std::uint64_t total_points = 1;
  for (std::size_t i = 0; i < grids.size(); ++i) {
    axes[i] = axis_values(grids[i], instance.buyers[i].distribution, static_cast<int>(i));
    if (total_points > kGridEvalBudget / axes[i].size()) {
      throw CapacityError("grid_search: grid size exceeds the evaluation budget");
    }
    total_points *= axes[i].size();
  }
  const std::uint64_t evals = total_points << n;
  if (total_points > (kGridEvalBudget >> n) || evals > kGridEvalBudget) {
    std::ostringstream os;
    os << "grid_search: " << total_points << " grid points x 2^" << n
       << " outcomes exceeds the evaluation budget of " << kGridEvalBudget;
    throw CapacityError(os.str());
  }

  // Per-axis precomputation: bid-0 probability and scores for every grid
  // value of every buyer.
  std::vector<std::vector<double>> axis_probs(axes.size());
  std::vector<std::vector<VirtualUtility>> axis_utils(axes.size());
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const auto& d = instance.buyers[i].distribution;
    axis_probs[i].resize(axes[i].size());
    axis_utils[i].resize(axes[i].size());
    for (std::size_t k = 0; k < axes[i].size(); ++k) {
      const double eta = axes[i][k];
      const double lam = d.cdf(eta);
      VirtualUtility u;
      u.score1 = eta - instance.seller_value;
      u.weighted_score0 = d.lower() - (1.0 - lam) * eta - lam * instance.seller_value;
      u.score0 = lam > 0.0 ? u.weighted_score0 / lam
                           : -std::numeric_limits<double>::infinity();
      axis_probs[i][k] = lam;
      axis_utils[i][k] = u;
    }
  }

  std::vector<double> gains(total_points);
  std::vector<std::size_t> index(axes.size(), 0);
  std::vector<double> zero_probs(axes.size());
  std::vector<VirtualUtility> utilities(axes.size());

  // Lexicographic iteration, first buyer outermost: the tie scan inside
  // GridSearchResult then finds the lowest-lexicographic maximizer first.
  for (std::size_t flat = 0; flat < total_points; ++flat) {
    for (std::size_t i = 0; i < axes.size(); ++i) {
      zero_probs[i] = axis_probs[i][index[i]];
      utilities[i] = axis_utils[i][index[i]];
    }
    gains[flat] = expected_seller_gain(zero_probs, utilities);
    for (std::size_t i = axes.size(); i-- > 0;) {
      if (++index[i] < axes[i].size()) break;
      index[i] = 0;
    }
  }
  return GridSearchResult(std::move(axes), std::move(gains));
}

std::vector<GridSpec> grids_from_step(const AuctionInstance& instance, double step) {
  std::vector<GridSpec> grids;
  grids.reserve(instance.buyers.size());
  for (const auto& buyer : instance.buyers) {
    grids.push_back({buyer.distribution.lower(), buyer.distribution.upper(), step});
  }
  return grids;
}

void write_surface_csv(std::ostream& os, const AuctionInstance& instance,
                       const GridSearchResult& result) {
  const std::size_t n = result.axes().size();
  for (std::size_t i = 0; i < n; ++i) os << "eta_" << (i + 1) << ",";
  os << "gain,utility\n";
  for (std::size_t flat = 0; flat < result.n_points(); ++flat) {
    const ThresholdVector eta = result.point(flat);
    for (std::size_t i = 0; i < n; ++i) os << csv_number(eta.values[i]) << ",";
    const double gain = result.gains()[flat];
    os << csv_number(gain) << "," << csv_number(gain + instance.seller_value) << "\n";
  }
  os << "# argmax";
  for (const double v : result.optimal().values) os << "," << csv_number(v);
  os << "," << csv_number(result.optimal_gain()) << ","
     << csv_number(result.optimal_gain() + instance.seller_value) << "\n";
  os << "# ties," << result.tie_indices().size() << "\n";
  constexpr std::size_t kMaxListedTies = 20;
  const auto& ties = result.tie_indices();
  for (std::size_t t = 0; t < ties.size() && t < kMaxListedTies; ++t) {
    const ThresholdVector eta = result.point(ties[t]);
    os << "# tie";
    for (const double v : eta.values) os << "," << csv_number(v);
    os << "\n";
  }
}

}  // namespace qba
