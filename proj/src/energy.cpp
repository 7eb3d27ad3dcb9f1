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

#include "uowsn/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uowsn/lp.hpp"

namespace uowsn {

namespace {

// Battery delta per unit duty in slot t (always negative for Pc > 0) and the
// duty-independent per-slot gain. The recursion is affine in alpha(t):
//   B(t) = B(t-1) + gain(t)*alpha(t) + base(t).
double duty_gain(const DutyCycleProblem& p, double arrival) {
  const double T = p.slot_duration;
  return p.store_efficiency * T * std::max(arrival - p.consumption, 0.0) -
         p.store_efficiency * T * arrival -
         T * std::max(p.consumption - arrival, 0.0);
}

double slot_base(const DutyCycleProblem& p, double arrival) {
  return p.store_efficiency * p.slot_duration * arrival -
         p.slot_duration * p.leak;
}

// Forward sweep that caps each alpha(t) at the largest feasible value given
// the running battery level. Keeps LP output exactly causal despite float
// round-off; leaves already-feasible schedules untouched (up to 1 ulp).
// Returns false if some slot admits no feasible duty at all.
bool repair_schedule(const DutyCycleProblem& p, std::vector<double>& duty,
                     std::vector<double>& trace) {
  const int n = p.slots;
  trace.assign(n, 0.0);
  double level = p.initial_battery;
  for (int t = 0; t < n; ++t) {
    const double g = duty_gain(p, p.arrival_rates[t]);
    const double base = slot_base(p, p.arrival_rates[t]);
    double a = std::clamp(duty[t], 0.0, 1.0);
    double next = level + g * a + base;
    if (next < 0.0 && g < 0.0) {
      a = std::min(a, std::max(0.0, (level + base) / -g));
      next = level + g * a + base;
      // Round-off on the cap can leave a sub-ulp deficit; shave the duty.
      for (int guard = 0; next < 0.0 && guard < 64; ++guard) {
        a = std::nextafter(a, 0.0);
        next = level + g * a + base;
      }
    }
    if (next < 0.0) return false;  // infeasible even at alpha = 0
    duty[t] = a;
    level = std::min(next, p.capacity);
    trace[t] = level;
  }
  return true;
}

// Closed-form optimum for constant arrival rate: the cheapest schedule is a
// flat duty alpha = min(1, (B0 + slots*base) / (slots * cost)), which never
// overflows the battery and saturates the horizon energy-causality bound.
BatterySchedule solve_stationary(const DutyCycleProblem& p) {
  BatterySchedule out;
  const double arrival = p.arrival_rates.front();
  const double cost = -duty_gain(p, arrival);
  const double base = slot_base(p, arrival);
  const double total = p.initial_battery + p.slots * base;

  if (base < 0.0 && total < 0.0) return out;  // dead even when passive

  double alpha = cost > 0.0 ? std::clamp(total / (cost * p.slots), 0.0, 1.0) : 1.0;
  out.duty_cycles.assign(p.slots, alpha);
  if (!repair_schedule(p, out.duty_cycles, out.battery_trace)) return out;
  out.status = ScheduleStatus::kOptimal;
  double sum = 0.0;
  for (double a : out.duty_cycles) sum += a;
  out.objective = sum / p.slots;
  out.active_slots = classify_active(out, p.activity_threshold);
  return out;
}

BatterySchedule solve_lp_path(const DutyCycleProblem& p) {
  BatterySchedule out;
  const int n = p.slots;
  // Variables: alpha(0..n-1) in [0,1], B(0..n-1) in [0, capacity].
  LpProblem lp;
  lp.num_vars = 2 * n;
  lp.objective.assign(2 * n, 0.0);
  lp.lower.assign(2 * n, 0.0);
  lp.upper.assign(2 * n, 1.0);
  for (int t = 0; t < n; ++t) {
    lp.objective[t] = 1.0;
    lp.upper[n + t] = p.capacity;
  }
  // Free-disposal recursion B(t) <= B(t-1) + gain*alpha + base. Surplus at
  // the capacity clamp is modeled by the inequality; the repaired forward
  // simulation restores the exact clamped trace afterwards.
  lp.rows.reserve(n);
  for (int t = 0; t < n; ++t) {
    LpProblem::Row row;
    row.terms.push_back({n + t, 1.0});
    if (t > 0) row.terms.push_back({n + t - 1, -1.0});
    row.terms.push_back({t, -duty_gain(p, p.arrival_rates[t])});
    row.rhs = slot_base(p, p.arrival_rates[t]) +
              (t == 0 ? p.initial_battery : 0.0);
    lp.rows.push_back(std::move(row));
  }

  LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::kIterationLimit)
    throw std::runtime_error("optimize_duty_cycle: simplex iteration limit");
  if (sol.status != LpStatus::kOptimal) return out;  // node dead

  out.duty_cycles.assign(sol.x.begin(), sol.x.begin() + n);
  if (!repair_schedule(p, out.duty_cycles, out.battery_trace)) return out;
  out.status = ScheduleStatus::kOptimal;
  double sum = 0.0;
  for (double a : out.duty_cycles) sum += a;
  out.objective = sum / n;
  out.active_slots = classify_active(out, p.activity_threshold);
  return out;
}

}  // namespace

void DutyCycleProblem::validate() const {
  if (slots <= 0) throw std::invalid_argument("duty-cycle: slots must be >= 1");
  if (static_cast<int>(arrival_rates.size()) != slots)
    throw std::invalid_argument("duty-cycle: arrival_rates length != slots");
  for (double a : arrival_rates)
    if (a < 0.0) throw std::invalid_argument("duty-cycle: negative arrival rate");
  if (slot_duration <= 0.0)
    throw std::invalid_argument("duty-cycle: slot_duration must be positive");
  if (consumption <= 0.0)
    throw std::invalid_argument("duty-cycle: consumption must be positive");
  if (leak < 0.0) throw std::invalid_argument("duty-cycle: negative leak");
  if (store_efficiency <= 0.0 || store_efficiency > 1.0)
    throw std::invalid_argument("duty-cycle: store_efficiency must be in (0,1]");
  if (capacity <= 0.0 || initial_battery < 0.0 || initial_battery > capacity)
    throw std::invalid_argument("duty-cycle: need 0 <= B0 <= capacity");
  if (activity_threshold <= 0.0 || activity_threshold >= 1.0)
    throw std::invalid_argument("duty-cycle: beta must be in (0,1)");
}

BatteryTrace simulate_battery(const DutyCycleProblem& problem,
                              std::span<const double> duty) {
  problem.validate();
  if (static_cast<int>(duty.size()) != problem.slots)
    throw std::invalid_argument("simulate_battery: duty length != slots");
  for (double a : duty)
    if (a < 0.0 || a > 1.0)
      throw std::invalid_argument("simulate_battery: duty outside [0,1]");

  BatteryTrace trace;
  trace.levels.resize(problem.slots);
  double level = problem.initial_battery;
  for (int t = 0; t < problem.slots; ++t) {
    level += duty_gain(problem, problem.arrival_rates[t]) * duty[t] +
             slot_base(problem, problem.arrival_rates[t]);
    if (level < 0.0 && trace.first_violation < 0) trace.first_violation = t;
    level = std::min(level, problem.capacity);
    trace.levels[t] = level;
  }
  return trace;
}

bool check_energy_causality(const DutyCycleProblem& problem,
                            std::span<const double> duty,
                            const BatteryTrace& trace) {
  (void)problem;
  (void)duty;
  return trace.feasible();
}

BatterySchedule optimize_duty_cycle(const DutyCycleProblem& problem) {
  problem.validate();
  const bool stationary =
      std::all_of(problem.arrival_rates.begin(), problem.arrival_rates.end(),
                  [&](double a) { return a == problem.arrival_rates.front(); });
  return stationary ? solve_stationary(problem) : solve_lp_path(problem);
}

std::vector<char> classify_active(const BatterySchedule& schedule, double beta) {
  std::vector<char> flags(schedule.duty_cycles.size(), 0);
  for (std::size_t t = 0; t < schedule.duty_cycles.size(); ++t)
    flags[t] = schedule.duty_cycles[t] > beta ? 1 : 0;
  return flags;
}

void EnergyCostModel::validate() const {
  if (node_count <= 0.0 || packet_ratio <= 0.0 || avg_neighbors <= 0.0 ||
      energy_per_bit <= 0.0)
    throw std::invalid_argument("energy-cost: all fields must be positive");
}

double pairwise_report_cost(const EnergyCostModel& model) {
  model.validate();
  // K^(3/2) written as K*sqrt(K): sqrt(4K) = 2 sqrt(K) exactly in IEEE, so
  // quadrupling K scales the cost by exactly 8.
  return model.packet_ratio * model.avg_neighbors * model.energy_per_bit *
         (model.node_count * std::sqrt(model.node_count));
}

RangePowerModel RangePowerModel::from_target_range(const ChannelParams& channel,
                                                   double target_range,
                                                   double overhead) {
  channel.validate();
  if (target_range <= 0.0)
    throw std::invalid_argument("range-power: target_range must be positive");
  if (overhead <= 0.0)
    throw std::invalid_argument("range-power: overhead must be positive");
  RangePowerModel model;
  model.channel = channel;
  model.sensitivity = received_power(channel, target_range);
  model.overhead = overhead;
  return model;
}

double RangePowerModel::consumption_for_range(double range) const {
  if (range <= 0.0)
    throw std::invalid_argument("range-power: range must be positive");
  // Received power scales linearly in transmit power.
  const double required_tx =
      channel.tx_power * sensitivity / received_power(channel, range);
  return overhead * required_tx;
}

double RangePowerModel::range_for_consumption(double consumption) const {
  if (consumption <= 0.0) return 0.0;
  ChannelParams scaled = channel;
  scaled.tx_power = consumption / overhead;
  return range_from_power(scaled, sensitivity);
}

double max_sustainable_consumption(const DutyCycleProblem& base,
                                   double arrival_rate, double beta) {
  if (beta <= 0.0 || beta >= 1.0)
    throw std::invalid_argument("max_sustainable_consumption: beta in (0,1)");
  const double T = base.slot_duration;
  const double total =
      base.initial_battery +
      base.slots * (base.store_efficiency * T * arrival_rate - T * base.leak);
  if (total <= 0.0) return 0.0;
  // Invert cost(Pc) = total / (beta * slots); cost is piecewise linear in Pc
  // with a kink at Pc = arrival_rate.
  const double cost = total / (beta * base.slots) / T;
  if (cost <= base.store_efficiency * arrival_rate)
    return cost / base.store_efficiency;
  return cost + (1.0 - base.store_efficiency) * arrival_rate;
}

}  // namespace uowsn
