#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "kep/compat/compat.hpp"
#include "kep/datagen/datagen.hpp"

namespace kep::dynsim {

enum class Model { kConventional, kGreedy };

std::string to_string(Model m);
Model parse_model(const std::string& text);

/// Maps the pool size at a match run to the days the solver takes. Points are
/// (pool size, days) and are interpolated linearly; no points means zero.
struct RuntimeModel {
  std::vector<std::pair<std::size_t, double>> points;

  double days(std::size_t pool) const;
};

/// Shape of interarrival and residence times around their mean.
enum class Distribution { kExponential, kFixed };

std::string to_string(Distribution d);
Distribution parse_distribution(const std::string& text);

struct SimConfig {
  /// Mean days between arrivals; infinity disables arrivals.
  double arrival_rate_days = 1;
  double match_run_interval_days = 7;
  /// Mean days a pair stays before leaving unmatched.
  double departure_rate_days = 400;
  double match_refusal_pct = 20;
  double crossmatch_fail_high = 0.35;
  double crossmatch_fail_other = 0.10;
  std::uint32_t sensitized_cpra = compat::kHighlySensitizedCpra;
  double reentry_fail_days = 7;
  double reentry_refusal_days = 2;
  double horizon_days = 1825;
  std::size_t repetitions = 50;
  Model model = Model::kGreedy;
  unsigned kappa = 3;
  RuntimeModel solver_runtime;
  /// Greedy runs on a freshly permuted node order each match run, as the
  /// secure protocol does.
  bool greedy_shuffle = true;
  /// Solve only around pairs that arrived or came back since the last run.
  /// Gives the same matches as solving the whole pool.
  bool restrict_to_fresh = true;
  compat::PrioPolicy policy;
  datagen::PopulationModel population;
  std::uint64_t seed = 1;
  Distribution arrival_distribution = Distribution::kExponential;
  Distribution departure_distribution = Distribution::kExponential;
  /// Reject values outside the published parameter grid.
  bool strict_domains = true;

  void validate() const;
};

struct PoolSample {
  double day = 0;
  std::size_t size = 0;

  friend bool operator==(const PoolSample&, const PoolSample&) = default;
};

struct SimResult {
  std::uint64_t arrived = 0;
  std::uint64_t transplanted = 0;
  std::uint64_t departed = 0;
  /// Pairs waiting in the pool at the horizon.
  std::uint64_t waiting = 0;
  /// Pairs on their way back after a failed offer, or locked in a solve.
  std::uint64_t in_flight = 0;
  std::size_t match_runs = 0;
  std::uint64_t offers = 0;
  std::uint64_t crossmatch_failures = 0;
  std::uint64_t refusals = 0;
  /// Pool size at each match run.
  std::vector<PoolSample> pool;
  /// Matching weight found at each match run.
  std::vector<std::uint64_t> run_weight;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

using PairSource = std::function<compat::Quote()>;

/// One repetition. `initial` pairs are in the pool at day 0; arrivals draw
/// from `source`. Crossmatch and refusal outcomes come from per-pair streams
/// keyed by `config.seed`, so the two models see the same draws.
SimResult run_sim(const SimConfig& config, const PairSource& source,
                  const std::vector<compat::Quote>& initial = {});

/// One repetition with pairs from the config's population model.
SimResult run_sim(const SimConfig& config);

/// Seed of repetition `rep` derived from a base seed.
std::uint64_t repetition_seed(std::uint64_t base, std::size_t rep);

struct CellResult {
  double arrival_rate_days = 0;
  double match_run_interval_days = 0;
  std::vector<std::uint64_t> conventional;
  std::vector<std::uint64_t> greedy;

  /// greedy / conventional per repetition; 1 when both are zero.
  std::vector<double> ratios() const;
  double mean_ratio() const;
};

struct Grid {
  std::vector<double> arrival_rates = {1, 2, 4, 7, 14};
  std::vector<double> match_run_intervals = {1, 2, 4, 7, 14, 30, 60, 120};
};

/// Runs both models on every cell of the grid with paired seeds. `threads`
/// of 0 uses the hardware concurrency.
std::vector<CellResult> compare_models(const SimConfig& base, const Grid& grid,
                                       unsigned threads = 0);

struct SignTest {
  std::size_t wins = 0;
  std::size_t losses = 0;
  std::size_t ties = 0;
  /// One-sided exact binomial p-value for "first exceeds second".
  double p_value = 1;
};

SignTest sign_test(const std::vector<double>& first, const std::vector<double>& second);

/// JSON object with the SimConfig field names; missing keys keep defaults and
/// unknown keys are rejected. A null arrival rate means no arrivals.
SimConfig read_config(std::istream& in);
void write_config(std::ostream& out, const SimConfig& config);

/// One row per cell and repetition.
void write_csv(std::ostream& out, const SimConfig& base, const std::vector<CellResult>& cells);

}  // namespace kep::dynsim
