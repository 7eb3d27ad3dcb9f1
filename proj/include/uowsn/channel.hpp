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

#ifndef UOWSN_CHANNEL_HPP
#define UOWSN_CHANNEL_HPP

#include <span>

#include "uowsn/rng.hpp"

namespace uowsn {

/// Constants of a line-of-sight underwater optical link.
///
/// The received power at distance d is
///   P_r = P_t * eta_i * eta_j * exp(-e*d) * A * cos(theta)
///         / (2*pi * d^2 * (1 - cos(theta0)))
/// with extinction e = absorption + scattering. The same model inverts
/// exactly through the Lambert W function (range_from_power).
struct ChannelParams {
  double absorption = 0.114;           ///< a, 1/m (clear ocean default)
  double scattering = 0.037;           ///< s, 1/m
  double tx_power = 0.1;               ///< P_t, W
  double tx_efficiency = 0.9;          ///< eta_i
  double rx_efficiency = 0.9;          ///< eta_j
  double aperture_area = 0.01;         ///< A_j, m^2
  double pointing_angle = 0.0;         ///< theta, rad; boresight default
  double divergence_half_angle = 1.0471975511965977;  ///< theta0, rad (60 deg)

  /// Throws std::invalid_argument when any invariant fails
  /// (a,s >= 0, a+s > 0, P_t > 0, A > 0, efficiencies in (0,1],
  /// 0 <= theta < pi/2, 0 < theta0 < pi/2).
  void validate() const;

  /// Geometric/optical prefactor k = P_t*eta_i*eta_j*A*cos(theta) /
  /// (2*pi*(1-cos(theta0))), so that P_r = k * exp(-e*d) / d^2.
  double prefactor() const;
};

/// e(lambda) = a(lambda) + s(lambda), 1/m.
double extinction_coefficient(const ChannelParams& params);

/// exp(-e*d), in (0, 1]. Requires d >= 0.
double channel_gain(double extinction, double distance);

/// Received power at distance d > 0 (W). Strictly decreasing in d.
/// Throws std::domain_error for d <= 0.
double received_power(const ChannelParams& params, double distance);

/// Exact inverse of received_power: the distance whose forward power equals
/// `power`. Throws std::domain_error for power <= 0.
double range_from_power(const ChannelParams& params, double power);

/// |d range_from_power / d P_r| at the given received power; used to
/// propagate power-domain noise into meters (first-order delta method).
double range_power_sensitivity(const ChannelParams& params, double power);

enum class NoiseMode {
  kDistance,  ///< Gaussian noise added to the true distance (meters)
  kPower,     ///< Gaussian noise added to the received power (watts)
};

/// One noisy observation of a link.
struct RangeMeasurement {
  int src = 0;
  int dst = 0;
  double observed = 0.0;      ///< meters or watts depending on mode
  double noise_stddev = 0.0;  ///< same unit as observed
  NoiseMode mode = NoiseMode::kDistance;
};

/// true_value + Gaussian(0, stddev^2) drawn from `rng`. stddev may be zero
/// (degenerate, returns the true value exactly without consuming draws).
RangeMeasurement add_measurement_noise(int src, int dst, double true_value,
                                       double stddev, NoiseMode mode,
                                       RngStream& rng);

/// Result of fusing repeated measurements of one link.
struct RangeEstimate {
  double distance = 0.0;  ///< m
  double stddev = 0.0;    ///< m, after averaging (sigma/sqrt(n), delta method)
  bool valid = false;     ///< false: all samples lost, link is missing
};

/// Combines repeated measurements of a single link into one range estimate.
///
/// Distance mode: sample mean, stddev/sqrt(n). Power mode: nonpositive power
/// samples are discarded; the mean of the survivors is inverted through
/// range_from_power and the stddev mapped by the delta method. A link whose
/// samples are all discarded (or whose distance mean is nonpositive) comes
/// back with valid = false.
///
/// Requires a non-empty list sharing (src, dst, mode); throws
/// std::invalid_argument otherwise.
RangeEstimate estimate_range(std::span<const RangeMeasurement> samples,
                             const ChannelParams& params);

}  // namespace uowsn

#endif  // UOWSN_CHANNEL_HPP
