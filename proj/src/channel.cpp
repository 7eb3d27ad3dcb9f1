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

#include "uowsn/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "uowsn/lambert.hpp"

namespace uowsn {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
}

void ChannelParams::validate() const {
  if (absorption < 0.0 || scattering < 0.0)
    throw std::invalid_argument("channel: absorption/scattering must be >= 0");
  if (absorption + scattering <= 0.0)
    throw std::invalid_argument("channel: extinction a + s must be positive");
  if (tx_power <= 0.0)
    throw std::invalid_argument("channel: tx_power must be positive");
  if (aperture_area <= 0.0)
    throw std::invalid_argument("channel: aperture_area must be positive");
  if (tx_efficiency <= 0.0 || tx_efficiency > 1.0 || rx_efficiency <= 0.0 ||
      rx_efficiency > 1.0)
    throw std::invalid_argument("channel: efficiencies must be in (0, 1]");
  if (pointing_angle < 0.0 || pointing_angle >= kHalfPi)
    throw std::invalid_argument("channel: pointing_angle must be in [0, pi/2)");
  if (divergence_half_angle <= 0.0 || divergence_half_angle >= kHalfPi)
    throw std::invalid_argument(
        "channel: divergence_half_angle must be in (0, pi/2)");
}

double ChannelParams::prefactor() const {
  return tx_power * tx_efficiency * rx_efficiency * aperture_area *
         std::cos(pointing_angle) /
         (2.0 * std::numbers::pi * (1.0 - std::cos(divergence_half_angle)));
}

double extinction_coefficient(const ChannelParams& params) {
  return params.absorption + params.scattering;
}

double channel_gain(double extinction, double distance) {
  if (distance < 0.0)
    throw std::domain_error("channel_gain: negative distance");
  return std::exp(-extinction * distance);
}

double received_power(const ChannelParams& params, double distance) {
  if (distance <= 0.0)
    throw std::domain_error(
        "received_power: distance must be positive (geometric loss singular "
        "at d = 0)");
  const double e = extinction_coefficient(params);
  return params.prefactor() * std::exp(-e * distance) / (distance * distance);
}

double range_from_power(const ChannelParams& params, double power) {
  if (power <= 0.0)
    throw std::domain_error("range_from_power: received power must be > 0");
  const double e = extinction_coefficient(params);
  // P = k exp(-e d)/d^2  <=>  (e d / 2) exp(e d / 2) = (e/2) sqrt(k / P).
  const double arg = 0.5 * e * std::sqrt(params.prefactor() / power);
  return 2.0 / e * lambert_w0(arg);
}

double range_power_sensitivity(const ChannelParams& params, double power) {
  // d = (2/e) W(arg(P)); d(d)/dP = -d / (P (2 + e d)).
  const double d = range_from_power(params, power);
  const double e = extinction_coefficient(params);
  return d / (power * (2.0 + e * d));
}

RangeMeasurement add_measurement_noise(int src, int dst, double true_value,
                                       double stddev, NoiseMode mode,
                                       RngStream& rng) {
  if (stddev < 0.0)
    throw std::invalid_argument("add_measurement_noise: negative stddev");
  RangeMeasurement m;
  m.src = src;
  m.dst = dst;
  m.noise_stddev = stddev;
  m.mode = mode;
  m.observed = stddev == 0.0 ? true_value : true_value + stddev * rng.gaussian();
  return m;
}

RangeEstimate estimate_range(std::span<const RangeMeasurement> samples,
                             const ChannelParams& params) {
  if (samples.empty())
    throw std::invalid_argument("estimate_range: empty sample list");
  const auto& first = samples.front();
  for (const auto& s : samples) {
    if (s.src != first.src || s.dst != first.dst || s.mode != first.mode)
      throw std::invalid_argument(
          "estimate_range: samples must share (src, dst, mode)");
  }

  RangeEstimate est;
  if (first.mode == NoiseMode::kDistance) {
    double sum = 0.0;
    for (const auto& s : samples) sum += s.observed;
    const double mean = sum / static_cast<double>(samples.size());
    if (mean <= 0.0) return est;  // invalid: nonphysical averaged range
    est.distance = mean;
    est.stddev =
        first.noise_stddev / std::sqrt(static_cast<double>(samples.size()));
    est.valid = true;
    return est;
  }

  // Power mode: nonpositive samples carry no usable range and are dropped.
  double sum = 0.0;
  int kept = 0;
  for (const auto& s : samples) {
    if (s.observed > 0.0) {
      sum += s.observed;
      ++kept;
    }
  }
  if (kept == 0) return est;  // link fully lost
  const double mean_power = sum / kept;
  est.distance = range_from_power(params, mean_power);
  est.stddev = range_power_sensitivity(params, mean_power) *
               first.noise_stddev / std::sqrt(static_cast<double>(kept));
  est.valid = true;
  return est;
}

}  // namespace uowsn
