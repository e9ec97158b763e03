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
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "qba/mechanism.hpp"
#include "qba/model.hpp"

namespace qba {

// Points whose gain is within this absolute distance of the maximum are
// reported as ties. Flat directions are the expected case, not an anomaly.
inline constexpr double kGridTieTolerance = 1e-9;

// Cap on (grid points) * 2^N exact-objective evaluations per search.
inline constexpr std::uint64_t kGridEvalBudget = 100'000'000ULL;

// Optimal allocation choice for one bid value: sell never, always, or
// either (the objective coefficient is exactly zero).
enum class AllocationChoice { kNever, kAlways, kIndifferent };

// Parameter regimes of the single-buyer problem, ordered by how the seller
// value v0 sits against the support [a, b] and the parabola vertex
// (b + v0) / 2.
enum class SingleBuyerRegime {
  kKeepObject,              // v0 > b: never sell
  kSellerValueInterior,     // a < v0 <= b: sell only on bid 1
  kSellerValueAtLowerBound, // v0 = a
  kInteriorVertex,          // v0 < a < (b + v0) / 2
  kAlwaysSell,              // (b + v0) / 2 <= a: every threshold is optimal
};

struct SingleBuyerSolution {
  SingleBuyerRegime regime;
  // nullopt means any threshold in [a, b] achieves the optimum.
  std::optional<double> optimal_threshold;
  // Optimal allocation per bid, evaluated at optimal_threshold (or at the
  // support midpoint when any threshold is optimal).
  AllocationChoice sell_on_bit0 = AllocationChoice::kNever;
  AllocationChoice sell_on_bit1 = AllocationChoice::kNever;
  double optimal_gain = 0.0;
};

// Coefficients (c0, c1) of the single-buyer objective c0*q(0) + c1*q(1):
//   c0 = (eta - a)(eta - b + a - v0) / (b - a)
//   c1 = (b - eta)(eta - v0) / (b - a)
std::pair<double, double> single_buyer_objective_coefficients(double seller_value, double lower,
                                                              double upper, double threshold);

// Optimal allocation pair for a fixed threshold: sell on a bid exactly when
// its objective coefficient is positive, indifferent when it is zero.
std::pair<AllocationChoice, AllocationChoice> classify_single_buyer(double seller_value,
                                                                    double lower, double upper,
                                                                    double threshold);

// Closed-form optimal threshold and gain for one buyer.
SingleBuyerSolution single_buyer_optimum(double seller_value, double lower, double upper);

// One buyer's sweep axis: values start, start + step, ..., capped at stop.
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
};

// Exhaustive exact-expectation sweep over the threshold grid.
class GridSearchResult {
 public:
  GridSearchResult(std::vector<std::vector<double>> axes, std::vector<double> gains);

  // Lowest-lexicographic point among the ties (flat directions carry
  // rounding noise well below the tie tolerance, so the tie-break applies
  // to the tie set, not to bitwise gain equality).
  const ThresholdVector& optimal() const { return optimal_; }
  // Maximum gain over the whole surface.
  double optimal_gain() const { return optimal_gain_; }

  // Per-buyer grid values and the gain at every point, stored row-major
  // with the last buyer's axis varying fastest.
  const std::vector<std::vector<double>>& axes() const { return axes_; }
  const std::vector<double>& gains() const { return gains_; }
  std::size_t n_points() const { return gains_.size(); }

  ThresholdVector point(std::size_t flat_index) const;
  const std::vector<std::size_t>& tie_indices() const { return tie_indices_; }
  std::vector<ThresholdVector> ties() const;

 private:
  std::vector<std::vector<double>> axes_;
  std::vector<double> gains_;
  std::vector<std::size_t> tie_indices_;
  ThresholdVector optimal_;
  double optimal_gain_ = 0.0;
};

// Evaluates expected_seller_gain at every grid point (no simulation) and
// returns the argmax with all ties. Grids must stay inside the buyers'
// supports; throws CapacityError when the evaluation budget is exceeded.
GridSearchResult grid_search(const AuctionInstance& instance, const std::vector<GridSpec>& grids);

// Full-support grids with a shared step, one per buyer.
std::vector<GridSpec> grids_from_step(const AuctionInstance& instance, double step);

// CSV columns eta_1..eta_N, gain, utility (= gain + v0), one row per grid
// point, followed by '#'-prefixed summary lines (argmax and ties).
void write_surface_csv(std::ostream& os, const AuctionInstance& instance,
                       const GridSearchResult& result);

}  // namespace qba
