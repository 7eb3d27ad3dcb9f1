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

#ifndef UOWSN_CRLB_HPP
#define UOWSN_CRLB_HPP

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "uowsn/channel.hpp"
#include "uowsn/network.hpp"

namespace uowsn {

/// Fisher information over the 2*N_a unknown sensor coordinates, ordered
/// (x1, y1, x2, y2, ...). Anchors contribute measurements but no unknowns.
struct FisherInfo {
  Eigen::MatrixXd matrix;
  int sensors = 0;
};

struct PowerObservation {
  int i = 0;  ///< sensor index (unknown position)
  int j = 0;  ///< neighbor index (sensor or anchor)
  double observed = 0.0;  ///< W
};

/// Gaussian log-likelihood of observed received powers given positions:
/// sum of log N(observed; P_r(d_ij), sigma^2) over the observation list.
double log_likelihood(std::span<const PowerObservation> observations,
                      const PointMatrix& positions,
                      const ChannelParams& channel, double sigma);

/// Closed-form FIM assembled entrywise from the published element formulas:
/// diagonal xx/yy terms 3*k*mu/(sigma^2 d^5) * (1 - 5*dx^2/d^2) summed over
/// neighbors, negated off the diagonal, and xy cross terms
/// 15*k*mu*dx*dy/(sigma^2 d^7), with mu = exp(-e). Per-link sigma comes from
/// the graph weights. Throws on a zero-length link.
FisherInfo fim_analytic(const NetworkGraph& graph,
                        const ChannelParams& channel);

enum class FimMode {
  kPower,     ///< mean model P_r(d_ij); gradients by central differences
  kDistance,  ///< mean model d_ij; analytic unit-vector gradients
};

/// Numerical oracle FIM for mean-parameterized Gaussian observations:
/// F = sum over links (1/sigma_ij^2) grad(mu_ij) grad(mu_ij)^T. Positive
/// semidefinite by construction.
FisherInfo fim_oracle(const NetworkGraph& graph, const ChannelParams& channel,
                      FimMode mode);

/// Derivative of the received power w.r.t. the first endpoint's x (or y)
/// coordinate: P_r * (-e - 2/d) * (x_i - x_j)/d. Used to validate the
/// finite-difference gradients.
double received_power_gradient(const ChannelParams& channel, double d,
                               double delta_coord);

struct CrlbResult {
  double raw_trace = 0.0;    ///< Tr(F^-1)
  double rmspe_bound = 0.0;  ///< sqrt(Tr(F^-1)/N_a), meters
};

/// Inverts the FIM. Throws std::runtime_error listing under-observed sensors
/// (fewer than two neighbors, or all neighbors collinear with the sensor)
/// when F is singular. Requires the graph used to build F for diagnostics.
CrlbResult crlb_value(const FisherInfo& fim, const NetworkGraph& graph);

}  // namespace uowsn

#endif  // UOWSN_CRLB_HPP
