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

#include "uowsn/sim.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "uowsn/crlb.hpp"

namespace uowsn {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Config parsing (strict: unknown keys are errors)

void check_keys(const json& obj, const std::string& section,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("config: unknown key '" +
                        (section.empty() ? key : section + "." + key) + "'");
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T* out) {
  if (!obj.contains(key)) return;
  try {
    *out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: bad value for '") + key + "'");
  }
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "active_nodes") return SweepAxis::kActiveNodes;
  if (name == "energy_arrival") return SweepAxis::kEnergyArrival;
  if (name == "tx_range") return SweepAxis::kTxRange;
  if (name == "anchors") return SweepAxis::kAnchors;
  if (name == "noise_variance") return SweepAxis::kNoiseVariance;
  if (name == "measurements") return SweepAxis::kMeasurements;
  if (name == "node_count") return SweepAxis::kNodeCount;
  throw ConfigError("config: unknown sweep axis '" + name + "'");
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "proposed") return Algorithm::kProposed;
  if (name == "mds-shortest-path") return Algorithm::kMdsShortestPath;
  throw ConfigError("config: unknown algorithm '" + name + "'");
}

}  // namespace

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kActiveNodes: return "active_nodes";
    case SweepAxis::kEnergyArrival: return "energy_arrival";
    case SweepAxis::kTxRange: return "tx_range";
    case SweepAxis::kAnchors: return "anchors";
    case SweepAxis::kNoiseVariance: return "noise_variance";
    case SweepAxis::kMeasurements: return "measurements";
    case SweepAxis::kNodeCount: return "node_count";
  }
  return "unknown";
}

std::string algorithm_name(Algorithm algorithm) {
  return algorithm == Algorithm::kProposed ? "proposed" : "mds-shortest-path";
}

void ScenarioConfig::validate() const {
  try {
    channel.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (deployment.sensors < 1) throw ConfigError("config: sensors must be >= 1");
  if (deployment.anchors < 3) throw ConfigError("config: anchors must be >= 3");
  if (deployment.area[0] <= 0 || deployment.area[1] <= 0)
    throw ConfigError("config: area sides must be positive");
  if (deployment.tx_range <= 0) throw ConfigError("config: tx_range must be > 0");
  if (noise.variance < 0) throw ConfigError("config: noise variance must be >= 0");
  if (active_mode == ActiveMode::kCount &&
      (active_count < 1 || active_count > deployment.sensors))
    throw ConfigError("config: active_count out of range");
  if (energy.slots < 1) throw ConfigError("config: energy.slots must be >= 1");
  if (energy.arrival_min < 0 || energy.arrival_max < energy.arrival_min)
    throw ConfigError("config: bad arrival-rate interval");
  if (energy.activity_threshold <= 0 || energy.activity_threshold >= 1)
    throw ConfigError("config: activity_threshold must be in (0,1)");
  if (energy.consumption && *energy.consumption <= 0)
    throw ConfigError("config: consumption must be positive");
  if (localization.samples_per_link < 1)
    throw ConfigError("config: samples_per_link must be >= 1");
  if (localization.max_iters < 1 || localization.tol <= 0)
    throw ConfigError("config: bad localization iteration controls");
  if (localization.algorithms.empty())
    throw ConfigError("config: at least one algorithm required");
  if (experiment.trials < 1) throw ConfigError("config: trials must be >= 1");
}

ScenarioConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
  }
  check_keys(root, "", {"deployment", "channel", "noise", "energy",
                        "localization", "experiment"});
  ScenarioConfig cfg;

  if (root.contains("deployment")) {
    const json& d = root["deployment"];
    check_keys(d, "deployment",
               {"sensors", "anchors", "area", "anchor_layout", "tx_range",
                "active"});
    read_field(d, "sensors", &cfg.deployment.sensors);
    read_field(d, "anchors", &cfg.deployment.anchors);
    if (d.contains("area")) {
      auto a = d.at("area");
      if (!a.is_array() || a.size() != 2)
        throw ConfigError("config: deployment.area must be [width, height]");
      cfg.deployment.area = {a[0].get<double>(), a[1].get<double>()};
    }
    if (d.contains("anchor_layout")) {
      const std::string layout = d.at("anchor_layout").get<std::string>();
      if (layout == "random")
        cfg.deployment.anchor_layout = AnchorLayout::kRandom;
      else if (layout == "perimeter")
        cfg.deployment.anchor_layout = AnchorLayout::kPerimeter;
      else
        throw ConfigError("config: unknown anchor_layout '" + layout + "'");
    }
    read_field(d, "tx_range", &cfg.deployment.tx_range);
    if (d.contains("active")) {
      const json& act = d.at("active");
      if (act.is_string()) {
        const std::string s = act.get<std::string>();
        if (s == "all")
          cfg.active_mode = ActiveMode::kAll;
        else if (s == "energy")
          cfg.active_mode = ActiveMode::kEnergy;
        else
          throw ConfigError("config: deployment.active must be a count, "
                            "\"all\", or \"energy\"");
      } else if (act.is_number_integer()) {
        cfg.active_mode = ActiveMode::kCount;
        cfg.active_count = act.get<int>();
      } else {
        throw ConfigError("config: bad deployment.active");
      }
    }
  }

  if (root.contains("channel")) {
    const json& c = root["channel"];
    check_keys(c, "channel",
               {"absorption", "scattering", "tx_power", "tx_efficiency",
                "rx_efficiency", "aperture_area", "pointing_angle",
                "divergence_half_angle"});
    read_field(c, "absorption", &cfg.channel.absorption);
    read_field(c, "scattering", &cfg.channel.scattering);
    read_field(c, "tx_power", &cfg.channel.tx_power);
    read_field(c, "tx_efficiency", &cfg.channel.tx_efficiency);
    read_field(c, "rx_efficiency", &cfg.channel.rx_efficiency);
    read_field(c, "aperture_area", &cfg.channel.aperture_area);
    read_field(c, "pointing_angle", &cfg.channel.pointing_angle);
    read_field(c, "divergence_half_angle", &cfg.channel.divergence_half_angle);
  }

  if (root.contains("noise")) {
    const json& n = root["noise"];
    check_keys(n, "noise", {"mode", "variance"});
    if (n.contains("mode")) {
      const std::string mode = n.at("mode").get<std::string>();
      if (mode == "distance")
        cfg.noise.mode = NoiseMode::kDistance;
      else if (mode == "power")
        cfg.noise.mode = NoiseMode::kPower;
      else
        throw ConfigError("config: noise.mode must be distance or power");
    }
    read_field(n, "variance", &cfg.noise.variance);
  }

  if (root.contains("energy")) {
    const json& e = root["energy"];
    check_keys(e, "energy",
               {"arrival_min", "arrival_max", "slots", "slot_duration",
                "activity_threshold", "initial_battery", "capacity",
                "store_efficiency", "leak_power", "target_range",
                "consumption", "consumption_overhead", "range_from_energy",
                "arrival_rates"});
    read_field(e, "arrival_min", &cfg.energy.arrival_min);
    read_field(e, "arrival_max", &cfg.energy.arrival_max);
    read_field(e, "slots", &cfg.energy.slots);
    read_field(e, "slot_duration", &cfg.energy.slot_duration);
    read_field(e, "activity_threshold", &cfg.energy.activity_threshold);
    read_field(e, "initial_battery", &cfg.energy.initial_battery);
    read_field(e, "capacity", &cfg.energy.capacity);
    read_field(e, "store_efficiency", &cfg.energy.store_efficiency);
    read_field(e, "leak_power", &cfg.energy.leak_power);
    read_field(e, "target_range", &cfg.energy.target_range);
    if (e.contains("consumption"))
      cfg.energy.consumption = e.at("consumption").get<double>();
    read_field(e, "consumption_overhead", &cfg.energy.consumption_overhead);
    read_field(e, "range_from_energy", &cfg.energy.range_from_energy);
    if (e.contains("arrival_rates")) {
      cfg.energy.arrival_rates.clear();
      for (const auto& v : e.at("arrival_rates"))
        cfg.energy.arrival_rates.push_back(v.get<double>());
    }
  }

  if (root.contains("localization")) {
    const json& l = root["localization"];
    check_keys(l, "localization",
               {"algorithms", "matrix_mode", "init", "max_iters", "tol",
                "samples_per_link", "completion_weight_scale", "restarts"});
    if (l.contains("algorithms")) {
      cfg.localization.algorithms.clear();
      for (const auto& name : l.at("algorithms"))
        cfg.localization.algorithms.push_back(
            parse_algorithm(name.get<std::string>()));
    }
    if (l.contains("matrix_mode")) {
      const std::string mode = l.at("matrix_mode").get<std::string>();
      if (mode == "smacof")
        cfg.localization.matrix_mode = MatrixMode::kSmacof;
      else if (mode == "paper-literal")
        cfg.localization.matrix_mode = MatrixMode::kPaperLiteral;
      else
        throw ConfigError("config: matrix_mode must be smacof or paper-literal");
    }
    if (l.contains("init")) {
      const std::string init = l.at("init").get<std::string>();
      if (init == "mds")
        cfg.localization.init = InitMode::kMdsShortestPath;
      else if (init == "trilateration")
        cfg.localization.init = InitMode::kTrilateration;
      else if (init == "random")
        cfg.localization.init = InitMode::kRandom;
      else if (init == "multistart")
        cfg.localization.init = InitMode::kMultiStart;
      else
        throw ConfigError("config: unknown init '" + init + "'");
    }
    read_field(l, "max_iters", &cfg.localization.max_iters);
    read_field(l, "tol", &cfg.localization.tol);
    read_field(l, "samples_per_link", &cfg.localization.samples_per_link);
    read_field(l, "completion_weight_scale",
               &cfg.localization.completion_weight_scale);
    read_field(l, "restarts", &cfg.localization.restarts);
  }

  if (root.contains("experiment")) {
    const json& x = root["experiment"];
    check_keys(x, "experiment",
               {"sweep_axis", "sweep_values", "trials", "master_seed",
                "threads"});
    if (x.contains("sweep_axis"))
      cfg.experiment.sweep_axis = parse_axis(x.at("sweep_axis").get<std::string>());
    if (x.contains("sweep_values")) {
      cfg.experiment.sweep_values.clear();
      for (const auto& v : x.at("sweep_values"))
        cfg.experiment.sweep_values.push_back(v.get<double>());
    }
    read_field(x, "trials", &cfg.experiment.trials);
    read_field(x, "master_seed", &cfg.experiment.master_seed);
    read_field(x, "threads", &cfg.experiment.threads);
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// ---------------------------------------------------------------------------
// Trial execution

namespace {

// Marks active sensors per the configured policy and assigns ranges.
void apply_activity(const ScenarioConfig& cfg, Deployment* dep,
                    const RngStream& trial_rng) {
  const int n = dep->sensor_count();
  switch (cfg.active_mode) {
    case ActiveMode::kAll:
      std::fill(dep->active.begin(), dep->active.end(), 1);
      return;
    case ActiveMode::kCount: {
      std::fill(dep->active.begin(), dep->active.end(), 0);
      const int count = std::min(cfg.active_count, n);
      for (int i = 0; i < count; ++i) dep->active[i] = 1;
      return;
    }
    case ActiveMode::kEnergy:
      break;
  }

  const double pc =
      cfg.energy.consumption
          ? *cfg.energy.consumption
          : RangePowerModel::from_target_range(cfg.channel,
                                               cfg.energy.target_range,
                                               cfg.energy.consumption_overhead)
                .consumption_for_range(cfg.energy.target_range);
  RangePowerModel range_model = RangePowerModel::from_target_range(
      cfg.channel, cfg.energy.target_range, cfg.energy.consumption_overhead);

  DutyCycleProblem base;
  base.slots = cfg.energy.slots;
  base.slot_duration = cfg.energy.slot_duration;
  base.consumption = pc;
  base.leak = cfg.energy.leak_power;
  base.store_efficiency = cfg.energy.store_efficiency;
  base.initial_battery = cfg.energy.initial_battery;
  base.capacity = cfg.energy.capacity;
  base.activity_threshold = cfg.energy.activity_threshold;

  for (int i = 0; i < n; ++i) {
    RngStream node_rng =
        trial_rng.fork({0xa881, static_cast<std::uint64_t>(i)});
    const double arrival =
        node_rng.uniform(cfg.energy.arrival_min, cfg.energy.arrival_max);
    DutyCycleProblem problem = base;
    problem.arrival_rates.assign(problem.slots, arrival);

    if (cfg.energy.range_from_energy) {
      const double affordable = max_sustainable_consumption(
          base, arrival, cfg.energy.activity_threshold);
      const double range = affordable > 0.0
                               ? range_model.range_for_consumption(affordable)
                               : 0.0;
      dep->active[i] = range > 0.0 ? 1 : 0;
      dep->sensor_range[i] = range;
      continue;
    }

    const BatterySchedule schedule = optimize_duty_cycle(problem);
    dep->active[i] = schedule.feasible() && !schedule.active_slots.empty() &&
                             schedule.active_slots.front()
                         ? 1
                         : 0;
  }
}

struct Aggregate {
  int connected = 0;
  std::map<Algorithm, std::vector<double>> rmspe;
  std::map<Algorithm, double> iters_sum;
  std::vector<double> crlb_oracle;
};

}  // namespace

TrialResult run_trial(const ScenarioConfig& config, int trial_index) {
  const auto start_time = std::chrono::steady_clock::now();
  config.validate();

  TrialResult result;
  result.trial_index = trial_index;

  RngStream trial_rng({config.experiment.master_seed,
                       static_cast<std::uint64_t>(trial_index)});
  RngStream deploy_rng = trial_rng.fork({0xdeb1});
  Deployment dep = deploy_network(config.deployment, deploy_rng);
  apply_activity(config, &dep, trial_rng);
  result.active_sensors = dep.active_count();

  RngStream graph_rng = trial_rng.fork({0x6a9});
  const NetworkGraph graph = build_graph(dep, config.channel, config.noise,
                                         config.localization.samples_per_link,
                                         graph_rng);
  result.connected = result.active_sensors > 0 && is_connected(graph);
  if (!result.connected) {
    result.wall_time_s = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start_time)
                             .count();
    return result;
  }

  for (Algorithm alg : config.localization.algorithms) {
    if (alg == Algorithm::kProposed) {
      LocalizeOptions opts;
      opts.mode = config.localization.matrix_mode;
      opts.init = config.localization.init;
      opts.max_iters = config.localization.max_iters;
      opts.tol = config.localization.tol;
      opts.fill_weight_scale = config.localization.completion_weight_scale;
      opts.restarts = config.localization.restarts;
      opts.seed = trial_rng.fork({0x10c}).next_u64();
      const LocalizationResult loc = localize(graph, opts);
      result.rmspe[alg] = loc.rmspe;
      result.iterations[alg] = loc.iterations;
    } else {
      const LocalizationResult loc = localize_mds_baseline(graph);
      result.rmspe[alg] = loc.rmspe;
      result.iterations[alg] = loc.iterations;
    }
  }

  const FimMode fim_mode = config.noise.mode == NoiseMode::kDistance
                               ? FimMode::kDistance
                               : FimMode::kPower;
  try {
    result.crlb_oracle =
        crlb_value(fim_oracle(graph, config.channel, fim_mode), graph)
            .rmspe_bound;
  } catch (const std::runtime_error&) {
    result.crlb_oracle.reset();  // singular FIM: trial carries no bound
  }
  try {
    result.crlb_analytic =
        crlb_value(fim_analytic(graph, config.channel), graph).rmspe_bound;
  } catch (const std::runtime_error&) {
    result.crlb_analytic.reset();
  }

  result.wall_time_s = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start_time)
                           .count();
  return result;
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweepAxis axis,
                                 double value) {
  ScenarioConfig cfg = base;
  switch (axis) {
    case SweepAxis::kActiveNodes:
      cfg.active_mode = ActiveMode::kCount;
      cfg.active_count = static_cast<int>(std::lround(value));
      break;
    case SweepAxis::kEnergyArrival:
      cfg.active_mode = ActiveMode::kEnergy;
      cfg.energy.arrival_min = cfg.energy.arrival_max = value;
      break;
    case SweepAxis::kTxRange:
      cfg.deployment.tx_range = value;
      break;
    case SweepAxis::kAnchors:
      cfg.deployment.anchors = static_cast<int>(std::lround(value));
      break;
    case SweepAxis::kNoiseVariance:
      cfg.noise.variance = value;
      break;
    case SweepAxis::kMeasurements:
      cfg.localization.samples_per_link = static_cast<int>(std::lround(value));
      break;
    case SweepAxis::kNodeCount:
      cfg.deployment.sensors = static_cast<int>(std::lround(value));
      break;
  }
  return cfg;
}

namespace {

std::vector<TrialResult> run_trials_parallel(const ScenarioConfig& cfg) {
  const int trials = cfg.experiment.trials;
  std::vector<TrialResult> results(trials);
  int threads = cfg.experiment.threads;
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, trials));

  if (threads == 1) {
    for (int t = 0; t < trials; ++t) results[t] = run_trial(cfg, t);
    return results;
  }

  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1))
        results[t] = run_trial(cfg, t);
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

void aggregate_rows(const ScenarioConfig& cfg, double sweep_value,
                    const std::vector<TrialResult>& trials, SweepTable* table) {
  Aggregate agg;
  for (const TrialResult& r : trials) {
    if (!r.connected) continue;
    ++agg.connected;
    for (const auto& [alg, value] : r.rmspe) agg.rmspe[alg].push_back(value);
    for (const auto& [alg, value] : r.iterations) agg.iters_sum[alg] += value;
    if (r.crlb_oracle) agg.crlb_oracle.push_back(*r.crlb_oracle);
  }

  const double crlb_mean =
      agg.crlb_oracle.empty()
          ? std::numeric_limits<double>::quiet_NaN()
          : std::accumulate(agg.crlb_oracle.begin(), agg.crlb_oracle.end(),
                            0.0) /
                agg.crlb_oracle.size();

  for (Algorithm alg : cfg.localization.algorithms) {
    SweepRow row;
    row.sweep_axis = axis_name(cfg.experiment.sweep_axis);
    row.sweep_value = sweep_value;
    row.algorithm = algorithm_name(alg);
    row.trials = static_cast<int>(trials.size());
    row.connected_fraction =
        trials.empty() ? 0.0
                       : static_cast<double>(agg.connected) / trials.size();
    const auto& errs = agg.rmspe[alg];
    if (!errs.empty()) {
      const double mean =
          std::accumulate(errs.begin(), errs.end(), 0.0) / errs.size();
      double var = 0.0;
      for (double e : errs) var += (e - mean) * (e - mean);
      row.rmspe_mean = mean;
      row.rmspe_std = errs.size() > 1 ? std::sqrt(var / (errs.size() - 1)) : 0.0;
      row.iterations_mean = agg.iters_sum[alg] / errs.size();
    } else {
      row.rmspe_mean = row.rmspe_std = row.iterations_mean =
          std::numeric_limits<double>::quiet_NaN();
    }
    row.crlb_mean = crlb_mean;
    table->rows.push_back(std::move(row));
  }
}

}  // namespace

SweepTable run_sweep(const ScenarioConfig& config) {
  config.validate();
  if (config.experiment.sweep_values.empty())
    throw ConfigError("config: sweep_values must be non-empty for a sweep");

  SweepTable table;
  for (double value : config.experiment.sweep_values) {
    const ScenarioConfig point =
        apply_sweep_value(config, config.experiment.sweep_axis, value);
    std::vector<TrialResult> trials = run_trials_parallel(point);
    aggregate_rows(point, value, trials, &table);
    for (TrialResult& t : trials) table.trial_dump.push_back(std::move(t));
  }
  return table;
}

SweepTable run_point(const ScenarioConfig& config) {
  config.validate();
  SweepTable table;
  std::vector<TrialResult> trials = run_trials_parallel(config);
  aggregate_rows(config, 0.0, trials, &table);
  for (TrialResult& t : trials) table.trial_dump.push_back(std::move(t));
  return table;
}

std::string table_to_csv(const SweepTable& table) {
  if (table.rows.empty())
    throw std::runtime_error("emit_csv: empty result table");
  std::ostringstream out;
  out << "sweep_axis,sweep_value,algorithm,trials,connected_fraction,"
         "rmspe_mean,rmspe_std,crlb_mean,iterations_mean\n";
  for (const SweepRow& r : table.rows) {
    out << r.sweep_axis << ',' << format_double(r.sweep_value) << ','
        << r.algorithm << ',' << r.trials << ','
        << format_double(r.connected_fraction) << ','
        << format_double(r.rmspe_mean) << ',' << format_double(r.rmspe_std)
        << ',' << format_double(r.crlb_mean) << ','
        << format_double(r.iterations_mean) << '\n';
  }
  return out.str();
}

void emit_csv(const SweepTable& table, const std::string& path) {
  if (path.empty()) throw std::runtime_error("emit_csv: empty output path");
  const std::string text = table_to_csv(table);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

std::string trials_to_jsonl(const SweepTable& table) {
  std::ostringstream out;
  for (const TrialResult& t : table.trial_dump) {
    json j;
    j["trial"] = t.trial_index;
    j["active_sensors"] = t.active_sensors;
    j["connected"] = t.connected;
    for (const auto& [alg, v] : t.rmspe) j["rmspe"][algorithm_name(alg)] = v;
    for (const auto& [alg, v] : t.iterations)
      j["iterations"][algorithm_name(alg)] = v;
    if (t.crlb_oracle) j["crlb_oracle"] = *t.crlb_oracle;
    if (t.crlb_analytic) j["crlb_analytic"] = *t.crlb_analytic;
    j["wall_time_s"] = t.wall_time_s;
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace uowsn
