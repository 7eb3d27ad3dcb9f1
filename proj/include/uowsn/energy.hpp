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

#ifndef UOWSN_ENERGY_HPP
#define UOWSN_ENERGY_HPP

#include <span>
#include <vector>

#include "uowsn/channel.hpp"

namespace uowsn {

/// Per-node duty-cycle optimization instance.
///
/// A node splits each slot of duration T into an active fraction alpha(t)
/// (transmit + harvest) and a passive fraction (harvest only). The battery
/// follows
///   B(t) = B(t-1) + eta_s*T*alpha(t)*[Ph(t)-Pc]+ + eta_s*T*Ph(t)*(1-alpha(t))
///          - T*alpha(t)*[Pc-Ph(t)]+ - T*Pl,
/// clamped at `capacity` (excess harvest is discarded), and must stay
/// nonnegative. The objective is the mean duty cycle.
struct DutyCycleProblem {
  int slots = 0;                       ///< number of slots
  double slot_duration = 1.0;          ///< T, s
  std::vector<double> arrival_rates;   ///< Ph(t), W, length slots
  double consumption = 1.0;            ///< Pc, W
  double leak = 0.0;                   ///< Pl, W
  double store_efficiency = 1.0;       ///< eta_s in (0, 1]
  double initial_battery = 1.0;        ///< B0, J
  double capacity = 10.0;              ///< Bmax, J
  double activity_threshold = 0.1;     ///< beta in (0, 1)

  void validate() const;  ///< throws std::invalid_argument
};

/// Battery levels produced by running the recursion for a given duty vector.
/// Levels are clamped at capacity but not at zero; a dip below zero marks the
/// schedule infeasible and `first_violation` names the offending slot
/// (0-based), -1 when feasible.
struct BatteryTrace {
  std::vector<double> levels;  ///< length slots
  int first_violation = -1;

  bool feasible() const { return first_violation < 0; }
};

BatteryTrace simulate_battery(const DutyCycleProblem& problem,
                              std::span<const double> duty);

/// Energy causality: cumulative stored-plus-initial energy covers cumulative
/// consumption and leakage at every prefix. Equivalent to the trace never
/// dipping negative.
bool check_energy_causality(const DutyCycleProblem& problem,
                            std::span<const double> duty,
                            const BatteryTrace& trace);

enum class ScheduleStatus {
  kOptimal,    ///< duty_cycles maximize the mean duty subject to constraints
  kNodeDead,   ///< no feasible schedule (even alpha = 0 drains the battery)
};

struct BatterySchedule {
  ScheduleStatus status = ScheduleStatus::kNodeDead;
  std::vector<double> duty_cycles;    ///< alpha*(t)
  std::vector<double> battery_trace;  ///< B(t) under alpha*, in [0, capacity]
  double objective = 0.0;             ///< mean duty cycle
  std::vector<char> active_slots;     ///< alpha*(t) > beta

  bool feasible() const { return status == ScheduleStatus::kOptimal; }
};

/// Maximizes the mean duty cycle subject to the battery recursion, capacity,
/// and energy causality. Constant arrival rates take an O(slots) closed-form
/// path; general instances go through the simplex solver. The returned trace
/// is the exact recursion output for the returned duty vector.
BatterySchedule optimize_duty_cycle(const DutyCycleProblem& problem);

/// Per-slot activity flags: slot t is active iff duty(t) > beta.
std::vector<char> classify_active(const BatterySchedule& schedule, double beta);

/// Network-wide cost model for reporting all pairwise measurements to the
/// surface: E_s = packet_ratio * avg_neighbors * K^(3/2) * energy_per_bit.
struct EnergyCostModel {
  double node_count = 1.0;      ///< K
  double packet_ratio = 1.0;    ///< packet size / measurement size
  double avg_neighbors = 1.0;   ///< m
  double energy_per_bit = 1.0;  ///< J

  void validate() const;
};

double pairwise_report_cost(const EnergyCostModel& model);

/// Coupling between consumption power and transmission range. The receiver
/// sensitivity is pinned so that the configured channel reaches exactly
/// `target_range`; a node consuming Pc radiates Pc/overhead and reaches the
/// distance where the received power falls to that sensitivity.
struct RangePowerModel {
  ChannelParams channel;
  double sensitivity = 0.0;  ///< W at the receiver
  double overhead = 10.0;    ///< consumption watts per radiated watt

  static RangePowerModel from_target_range(const ChannelParams& channel,
                                           double target_range,
                                           double overhead);

  /// Consumption needed to reach `range` (meters).
  double consumption_for_range(double range) const;
  /// Range reached when consuming `consumption` watts; 0 if none.
  double range_for_consumption(double consumption) const;
};

/// Largest consumption power a node with constant arrival rate can sustain
/// at mean duty >= beta. Zero when the node cannot stay causal at all.
double max_sustainable_consumption(const DutyCycleProblem& base,
                                   double arrival_rate, double beta);

}  // namespace uowsn

#endif  // UOWSN_ENERGY_HPP
