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

#include "qba/cli.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qba/baseline.hpp"
#include "qba/config.hpp"
#include "qba/csv.hpp"
#include "qba/mechanism.hpp"
#include "qba/serialize.hpp"
#include "qba/thresholds.hpp"
#include "qba/verify.hpp"

namespace qba {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitCapacityOrIo = 3;

const char* choice_text(AllocationChoice c) {
  switch (c) {
    case AllocationChoice::kNever: return "0";
    case AllocationChoice::kAlways: return "1";
    case AllocationChoice::kIndifferent: return "any";
  }
  return "?";
}

const char* regime_text(SingleBuyerRegime r) {
  switch (r) {
    case SingleBuyerRegime::kKeepObject: return "keep-object";
    case SingleBuyerRegime::kSellerValueInterior: return "seller-value-interior";
    case SingleBuyerRegime::kSellerValueAtLowerBound: return "seller-value-at-lower-bound";
    case SingleBuyerRegime::kInteriorVertex: return "interior-vertex";
    case SingleBuyerRegime::kAlwaysSell: return "always-sell";
  }
  return "?";
}

const AuctionInstance& require_instance(const ExperimentConfig& config) {
  if (!config.instance) {
    throw ValidationError("config.instance: required for this command");
  }
  return *config.instance;
}

std::string require_out(const ExperimentConfig& config, const char* command) {
  if (!config.out) {
    std::ostringstream os;
    os << command << ": an output path is required (--out or config.out)";
    throw ValidationError(os.str());
  }
  return *config.out;
}

// Thresholds for commands that need concrete values: explicit ones win;
// "optimize" solves for them first (closed form for one buyer, grid search
// otherwise).
ThresholdVector concrete_thresholds(const ExperimentConfig& config,
                                    const AuctionInstance& instance, bool allow_optimize) {
  if (config.thresholds) {
    validate_thresholds(instance, *config.thresholds);
    return *config.thresholds;
  }
  if (!config.optimize_thresholds) {
    throw ValidationError("config.thresholds: required (explicit values or \"optimize\")");
  }
  if (!allow_optimize) {
    throw ValidationError("config.thresholds: this command needs explicit threshold values");
  }
  if (instance.n_buyers() == 1) {
    const auto& d = instance.buyers[0].distribution;
    const SingleBuyerSolution sol =
        single_buyer_optimum(instance.seller_value, d.lower(), d.upper());
    ThresholdVector eta;
    eta.values.push_back(sol.optimal_threshold ? *sol.optimal_threshold
                                               : (d.lower() + d.upper()) / 2.0);
    return eta;
  }
  const GridSearchResult result = grid_search(instance, resolve_grids(config, instance));
  return result.optimal();
}

void print_mechanism_summary(const AuctionInstance& instance, const ThresholdVector& eta) {
  const auto utilities = virtual_utilities(instance, eta);
  std::cout << "buyers: " << instance.n_buyers() << ", outcomes: " << (1u << instance.n_buyers())
            << "\n";
  for (int i = 0; i < instance.n_buyers(); ++i) {
    const auto& d = instance.buyers[static_cast<std::size_t>(i)].distribution;
    const auto& u = utilities[static_cast<std::size_t>(i)];
    const double lam = d.cdf(eta.values[static_cast<std::size_t>(i)]);
    std::cout << "buyer " << i << ": uniform[" << csv_number(d.lower()) << ", "
              << csv_number(d.upper()) << "], threshold "
              << csv_number(eta.values[static_cast<std::size_t>(i)]) << ", lambda "
              << csv_number(lam) << ", score0 " << csv_number(u.score0) << ", score1 "
              << csv_number(u.score1) << "\n";
  }
  const double gain = expected_seller_gain(instance, eta);
  std::cout << "expected gain " << csv_number(gain) << ", seller utility "
            << csv_number(gain + instance.seller_value) << "\n";
}

int cmd_design(const ExperimentConfig& config) {
  const AuctionInstance& instance = require_instance(config);
  const std::string out = require_out(config, "design");
  const ThresholdVector eta = concrete_thresholds(config, instance, /*allow_optimize=*/true);
  const MechanismTable table = build_mechanism(instance, eta);
  print_mechanism_summary(instance, eta);
  write_json_file(out, table_to_json(table));
  std::cout << "wrote mechanism table to " << out << "\n";
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& config) {
  const AuctionInstance& instance = require_instance(config);
  const std::string out = require_out(config, "sweep");
  const GridSearchResult result = grid_search(instance, resolve_grids(config, instance));
  std::ostringstream csv;
  write_surface_csv(csv, instance, result);
  write_text_file(out, csv.str());
  std::cout << "surface points: " << result.n_points() << "\n";
  std::cout << "argmax:";
  for (const double v : result.optimal().values) std::cout << " " << csv_number(v);
  std::cout << " gain " << csv_number(result.optimal_gain()) << " utility "
            << csv_number(result.optimal_gain() + instance.seller_value) << "\n";
  std::cout << "ties within " << csv_number(kGridTieTolerance) << ": "
            << result.tie_indices().size() << "\n";
  std::cout << "wrote surface to " << out << "\n";
  return kExitOk;
}

void check_table_consistency(const MechanismTable& table, const ExperimentConfig& config) {
  const AuctionInstance& expected = require_instance(config);
  const AuctionInstance& actual = table.instance();
  bool same = actual.seller_value == expected.seller_value &&
              actual.n_buyers() == expected.n_buyers();
  if (same) {
    for (int i = 0; i < actual.n_buyers(); ++i) {
      const auto& da = actual.buyers[static_cast<std::size_t>(i)].distribution;
      const auto& de = expected.buyers[static_cast<std::size_t>(i)].distribution;
      same = same && da.lower() == de.lower() && da.upper() == de.upper();
    }
  }
  if (config.thresholds) {
    same = same && table.thresholds().values == config.thresholds->values;
  }
  if (!same) {
    throw ValidationError("verify: mechanism table file does not match the config instance");
  }
}

int cmd_verify(const ExperimentConfig& config, const std::string& table_path) {
  const AuctionInstance& instance = require_instance(config);
  std::optional<MechanismTable> table;
  if (!table_path.empty()) {
    table = table_from_json(read_json_file(table_path));
    check_table_consistency(*table, config);
  } else {
    table = build_mechanism(instance,
                            concrete_thresholds(config, instance, /*allow_optimize=*/false));
  }
  const VerificationReport report =
      run_verification(table->instance(), table->thresholds(), *table,
                       config.deviation_grid_points);
  const auto line = [](const char* name, bool passed, double metric, double tol) {
    std::cout << (passed ? "[pass] " : "[FAIL] ") << name << ": metric " << csv_number(metric)
              << " (tolerance " << csv_number(tol) << ")\n";
  };
  line("interim payment identity", report.interim_passed, report.interim_max_violation,
       report.interim_tolerance);
  line("ic deviation", report.ic_passed, report.ic_deviation_max, report.ic_tolerance);
  line("ir minimum utility", report.ir_passed, report.ir_min_utility, -report.ir_tolerance);
  if (report.oracle_checked) {
    line("allocation oracle gap", report.oracle_passed, report.oracle_gap,
         report.oracle_tolerance);
  } else {
    std::cout << "[skip] allocation oracle gap: instance above the exhaustive cap\n";
  }
  if (config.out) {
    write_json_file(*config.out, report_to_json(report));
    std::cout << "wrote verification report to " << *config.out << "\n";
  }
  return report.all_passed() ? kExitOk : kExitCheckFailed;
}

int cmd_simulate(const ExperimentConfig& config) {
  const AuctionInstance& instance = require_instance(config);
  const ThresholdVector eta = concrete_thresholds(config, instance, /*allow_optimize=*/false);
  const MechanismTable table = build_mechanism(instance, eta);
  const SimulationSummary summary =
      monte_carlo(instance, eta, table, config.trials, config.seed);
  std::cout << "trials " << summary.trials << ", seed " << summary.seed << "\n";
  std::cout << "seller utility " << csv_number(summary.seller_utility.mean) << " +/- "
            << csv_number(summary.seller_utility.std_error) << "\n";
  for (std::size_t i = 0; i < summary.winner_frequencies.size(); ++i) {
    std::cout << "buyer " << i << ": win frequency " << csv_number(summary.winner_frequencies[i])
              << ", utility " << csv_number(summary.buyer_utilities[i].mean) << " +/- "
              << csv_number(summary.buyer_utilities[i].std_error) << "\n";
  }
  std::cout << "no-sale frequency " << csv_number(summary.no_sale_frequency) << "\n";
  if (config.out) {
    write_json_file(*config.out, summary_to_json(summary));
    std::cout << "wrote simulation summary to " << *config.out << "\n";
  }
  return kExitOk;
}

int cmd_compare(const ExperimentConfig& config) {
  const AuctionInstance& instance = require_instance(config);
  const std::string out = require_out(config, "compare");
  if (instance.n_buyers() != 1) {
    throw ValidationError(
        "compare: config.instance must hold exactly one buyer (the shared bidder law)");
  }
  if (!config.n_range) {
    throw ValidationError("config.n_range: required for compare");
  }
  CompareOptions options;
  for (int n = config.n_range->first; n <= config.n_range->second; ++n) {
    options.bidder_counts.push_back(n);
  }
  options.trials = config.trials;
  options.threshold_draws = config.threshold_draws;
  options.seed = config.seed;
  if (config.grid_step) {
    options.grid_step = *config.grid_step;
  } else {
    throw ValidationError("config.grid: compare needs a shared step ({\"step\": s})");
  }
  const auto& d = instance.buyers[0].distribution;
  const auto rows = compare_sweep(instance.seller_value, d.lower(), d.upper(), options);
  std::ostringstream csv;
  write_comparison_csv(csv, rows);
  write_text_file(out, csv.str());
  for (const auto& row : rows) {
    std::cout << "n=" << row.n_bidders << ": analog " << csv_number(row.analog_utility.mean)
              << " +/- " << csv_number(row.analog_utility.std_error) << ", binary optimal "
              << csv_number(row.binary_optimal_utility) << ", binary random "
              << csv_number(row.binary_random_utility.mean) << " +/- "
              << csv_number(row.binary_random_utility.std_error) << "\n";
  }
  std::cout << "wrote comparison to " << out << "\n";
  return kExitOk;
}

int cmd_optimize(const ExperimentConfig& config) {
  const AuctionInstance& instance = require_instance(config);
  nlohmann::json result_json;
  if (instance.n_buyers() == 1) {
    const auto& d = instance.buyers[0].distribution;
    const SingleBuyerSolution sol =
        single_buyer_optimum(instance.seller_value, d.lower(), d.upper());
    std::cout << "regime: " << regime_text(sol.regime) << "\n";
    std::cout << "optimal threshold: "
              << (sol.optimal_threshold ? csv_number(*sol.optimal_threshold)
                                        : std::string("any"))
              << "\n";
    std::cout << "sell on bid 0: " << choice_text(sol.sell_on_bit0) << ", sell on bid 1: "
              << choice_text(sol.sell_on_bit1) << "\n";
    std::cout << "optimal gain " << csv_number(sol.optimal_gain) << ", seller utility "
              << csv_number(sol.optimal_gain + instance.seller_value) << "\n";
    result_json = {{"type", "threshold_optimum"},
                   {"regime", regime_text(sol.regime)},
                   {"eta_opt", sol.optimal_threshold
                                   ? nlohmann::json(*sol.optimal_threshold)
                                   : nlohmann::json("any")},
                   {"sell_on_bit0", choice_text(sol.sell_on_bit0)},
                   {"sell_on_bit1", choice_text(sol.sell_on_bit1)},
                   {"gain_opt", sol.optimal_gain}};
  } else {
    const GridSearchResult result = grid_search(instance, resolve_grids(config, instance));
    std::cout << "optimal thresholds:";
    for (const double v : result.optimal().values) std::cout << " " << csv_number(v);
    std::cout << "\n";
    std::cout << "optimal gain " << csv_number(result.optimal_gain()) << ", seller utility "
              << csv_number(result.optimal_gain() + instance.seller_value) << "\n";
    std::cout << "ties within " << csv_number(kGridTieTolerance) << ": "
              << result.tie_indices().size() << "\n";
    nlohmann::json ties = nlohmann::json::array();
    for (const auto& tie : result.ties()) ties.push_back(tie.values);
    result_json = {{"type", "threshold_optimum"},
                   {"eta_opt", result.optimal().values},
                   {"gain_opt", result.optimal_gain()},
                   {"ties", ties}};
  }
  if (config.out) {
    write_json_file(*config.out, result_json);
    std::cout << "wrote optimum to " << *config.out << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"optimal auction design for binary-quantized bids"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string table_path;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  double grid_step = 0.0;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config JSON file")->required();
    cmd->add_option("--out", out_path, "output file path (overrides config.out)");
    cmd->add_option("--seed", seed, "random seed (overrides config.seed)");
    cmd->add_option("--trials", trials, "simulation trials (overrides config.trials)");
    cmd->add_option("--grid-step", grid_step, "shared grid step (overrides config.grid)");
  };

  CLI::App* design = app.add_subcommand("design", "build the optimal mechanism table");
  CLI::App* sweep = app.add_subcommand("sweep", "exact gain surface over a threshold grid");
  CLI::App* verify = app.add_subcommand("verify", "run the verification checks");
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo run of a built mechanism");
  CLI::App* compare =
      app.add_subcommand("compare", "analog vs binary seller utility by bidder count");
  CLI::App* optimize = app.add_subcommand("optimize", "optimal quantization thresholds");
  for (CLI::App* cmd : {design, sweep, verify, simulate, compare, optimize}) add_common(cmd);
  verify->add_option("--table", table_path, "verify a mechanism table file instead of building");

  std::vector<const char*> argv;
  argv.push_back("qba");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    ExperimentConfig config = load_config(config_path);
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--out") > 0) config.out = out_path;
    if (sub->count("--seed") > 0) config.seed = seed;
    if (sub->count("--trials") > 0) {
      if (trials < 1) throw ValidationError("--trials: must be at least 1");
      config.trials = trials;
    }
    if (sub->count("--grid-step") > 0) {
      config.grid_step = grid_step;
      config.grid.reset();
    }
    if (config.instance) config.instance->validate();

    if (sub == design) return cmd_design(config);
    if (sub == sweep) return cmd_sweep(config);
    if (sub == verify) return cmd_verify(config, table_path);
    if (sub == simulate) return cmd_simulate(config);
    if (sub == compare) return cmd_compare(config);
    return cmd_optimize(config);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCapacityOrIo;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCapacityOrIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace qba
