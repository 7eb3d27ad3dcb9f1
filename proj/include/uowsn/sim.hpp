// Copyright 2026 The uowsn-loc Authors
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

#ifndef UOWSN_SIM_HPP
#define UOWSN_SIM_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uowsn/channel.hpp"
#include "uowsn/energy.hpp"
#include "uowsn/localization.hpp"
#include "uowsn/network.hpp"

namespace uowsn {

/// Raised for malformed configuration input (unknown keys, bad values).
/// The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepAxis {
  kActiveNodes,
  kEnergyArrival,
  kTxRange,
  kAnchors,
  kNoiseVariance,
  kMeasurements,
  kNodeCount,
};

enum class Algorithm { kProposed, kMdsShortestPath };

enum class ActiveMode {
  kAll,     ///< every sensor active
  kCount,   ///< first active_count sensors active
  kEnergy,  ///< duty-cycle optimization decides per node
};

struct EnergySpec {
  double arrival_min = 0.5;       ///< J/s
  double arrival_max = 2.0;       ///< J/s
  int slots = 1000;
  double slot_duration = 1.0;     ///< s
  double activity_threshold = 0.1;
  double initial_battery = 1.0;   ///< J
  double capacity = 10.0;         ///< J
  double store_efficiency = 1.0;
  double leak_power = 0.0;        ///< W
  double target_range = 20.0;     ///< m, pins consumption when not explicit
  std::optional<double> consumption;     ///< W, overrides target_range
  double consumption_overhead = 10.0;    ///< consumption watts per radiated watt
  bool range_from_energy = false;  ///< arrival rate also sets the node range
  std::vector<double> arrival_rates;  ///< per-slot override (duty-cycle CLI)
};

struct LocalizationSpec {
  std::vector<Algorithm> algorithms = {Algorithm::kProposed,
                                       Algorithm::kMdsShortestPath};
  MatrixMode matrix_mode = MatrixMode::kSmacof;
  InitMode init = InitMode::kMultiStart;
  int max_iters = 500;
  double tol = 1e-6;
  int samples_per_link = 1;
  double completion_weight_scale = 1e-6;
  int restarts = 3;
};

struct ExperimentSpec {
  SweepAxis sweep_axis = SweepAxis::kActiveNodes;
  std::vector<double> sweep_values;
  int trials = 100;
  std::uint64_t master_seed = 1;
  int threads = 0;  ///< 0 = hardware concurrency
};

struct ScenarioConfig {
  DeploySpec deployment;
  ActiveMode active_mode = ActiveMode::kEnergy;
  int active_count = 0;  ///< used by ActiveMode::kCount
  ChannelParams channel;
  NoiseSpec noise;
  EnergySpec energy;
  LocalizationSpec localization;
  ExperimentSpec experiment;

  void validate() const;  ///< throws ConfigError
};

/// Strict JSON parsing: unknown keys anywhere are ConfigError.
ScenarioConfig parse_config_file(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text);

struct TrialResult {
  int trial_index = 0;
  int active_sensors = 0;
  bool connected = false;
  std::map<Algorithm, double> rmspe;       ///< present iff connected
  std::map<Algorithm, int> iterations;
  std::optional<double> crlb_oracle;       ///< sqrt-normalized, meters
  std::optional<double> crlb_analytic;
  double wall_time_s = 0.0;
};

/// Runs one seeded trial: activity selection (energy stage or forced),
/// deployment, graph construction, connectivity gate, localization per
/// configured algorithm, CRLB evaluation. Deterministic in
/// (config, trial_index).
TrialResult run_trial(const ScenarioConfig& config, int trial_index);

struct SweepRow {
  std::string sweep_axis;
  double sweep_value = 0.0;
  std::string algorithm;
  int trials = 0;
  double connected_fraction = 0.0;
  double rmspe_mean = 0.0;
  double rmspe_std = 0.0;
  double crlb_mean = 0.0;
  double iterations_mean = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<TrialResult> trial_dump;  ///< all trials, trial-major order
};

/// Applies a sweep value to a copy of the config (axis semantics documented
/// in the README). Exposed for tests.
ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweepAxis axis,
                                 double value);

/// Runs trials for every sweep value (parallel across trials, aggregation in
/// trial-index order) and aggregates one row per (value, algorithm).
/// Disconnected trials count only toward connected_fraction.
SweepTable run_sweep(const ScenarioConfig& config);

/// Single-point run: like run_sweep but at the configured scenario only.
SweepTable run_point(const ScenarioConfig& config);

std::string axis_name(SweepAxis axis);
std::string algorithm_name(Algorithm algorithm);

/// Locale-independent CSV with one header row. Throws std::runtime_error
/// (with the path) on I/O failure or an empty table.
void emit_csv(const SweepTable& table, const std::string& path);
std::string table_to_csv(const SweepTable& table);

/// JSON-lines dump of per-trial results (debugging aid).
std::string trials_to_jsonl(const SweepTable& table);

}  // namespace uowsn

#endif  // UOWSN_SIM_HPP
