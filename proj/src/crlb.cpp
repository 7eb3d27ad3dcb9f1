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

#include "uowsn/crlb.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace uowsn {

namespace {

// Measured links only: anchor-anchor entries are prior knowledge, and the
// FIM is over sensor coordinates.
bool counts_as_link(const NetworkGraph& g, int i, int j) {
  return g.has_edge(i, j) && !(g.is_anchor(i) && g.is_anchor(j));
}

double link_sigma_sq(const NetworkGraph& g, int i, int j) {
  return 1.0 / g.weights(i, j);
}

}  // namespace

double log_likelihood(std::span<const PowerObservation> observations,
                      const PointMatrix& positions,
                      const ChannelParams& channel, double sigma) {
  if (sigma <= 0.0)
    throw std::invalid_argument("log_likelihood: sigma must be positive");
  const double norm = -std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
  double total = 0.0;
  for (const auto& obs : observations) {
    const double d = (positions.row(obs.i) - positions.row(obs.j)).norm();
    const double mean = received_power(channel, d);
    const double r = obs.observed - mean;
    total += norm - r * r / (2.0 * sigma * sigma);
  }
  return total;
}

FisherInfo fim_analytic(const NetworkGraph& graph,
                        const ChannelParams& channel) {
  channel.validate();
  const int na = graph.active_sensors;
  const int k = graph.size();
  const double kij = channel.prefactor();
  const double mu = std::exp(-extinction_coefficient(channel));

  FisherInfo fim;
  fim.sensors = na;
  fim.matrix = Eigen::MatrixXd::Zero(2 * na, 2 * na);
  auto& f = fim.matrix;

  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < k; ++j) {
      if (j == i || !counts_as_link(graph, i, j)) continue;
      const double dx = graph.positions(i, 0) - graph.positions(j, 0);
      const double dy = graph.positions(i, 1) - graph.positions(j, 1);
      const double d = std::hypot(dx, dy);
      if (d <= 0.0)
        throw std::runtime_error("fim_analytic: zero-length link");
      const double s2 = link_sigma_sq(graph, i, j);
      const double d5 = std::pow(d, 5);
      const double d7 = std::pow(d, 7);
      const double xx = 3.0 * kij * mu / (s2 * d5) * (1.0 - 5.0 * dx * dx / (d * d));
      const double yy = 3.0 * kij * mu / (s2 * d5) * (1.0 - 5.0 * dy * dy / (d * d));
      const double xy = 15.0 * kij * mu * dx * dy / (s2 * d7);

      f(2 * i, 2 * i) += xx;
      f(2 * i + 1, 2 * i + 1) += yy;
      f(2 * i, 2 * i + 1) += -xy;
      f(2 * i + 1, 2 * i) += -xy;
      if (j < na) {  // neighbor is itself an unknown sensor
        f(2 * i, 2 * j) = -xx;
        f(2 * j, 2 * i) = -xx;
        f(2 * i + 1, 2 * j + 1) = -yy;
        f(2 * j + 1, 2 * i + 1) = -yy;
        f(2 * i, 2 * j + 1) = xy;
        f(2 * j + 1, 2 * i) = xy;
        f(2 * i + 1, 2 * j) = xy;
        f(2 * j, 2 * i + 1) = xy;
      }
    }
  }
  return fim;
}

double received_power_gradient(const ChannelParams& channel, double d,
                               double delta_coord) {
  const double p = received_power(channel, d);
  const double e = extinction_coefficient(channel);
  return p * (-e - 2.0 / d) * delta_coord / d;
}

FisherInfo fim_oracle(const NetworkGraph& graph, const ChannelParams& channel,
                      FimMode mode) {
  channel.validate();
  const int na = graph.active_sensors;
  const int k = graph.size();

  FisherInfo fim;
  fim.sensors = na;
  fim.matrix = Eigen::MatrixXd::Zero(2 * na, 2 * na);

  for (int i = 0; i < na; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (!counts_as_link(graph, i, j)) continue;
      const double s2 = link_sigma_sq(graph, i, j);
      const Eigen::RowVector2d pi = graph.positions.row(i);
      const Eigen::RowVector2d pj = graph.positions.row(j);
      const double d = (pi - pj).norm();
      if (d <= 0.0) throw std::runtime_error("fim_oracle: zero-length link");

      // Gradient of the link mean w.r.t. the stacked unknowns; only the
      // endpoints' coordinates are nonzero and they are opposite in sign.
      Eigen::RowVector2d grad_i;
      if (mode == FimMode::kDistance) {
        grad_i = (pi - pj) / d;
      } else {
        const double h = 1e-5 * d;
        for (int c = 0; c < 2; ++c) {
          Eigen::RowVector2d hi = pi, lo = pi;
          hi(c) += h;
          lo(c) -= h;
          grad_i(c) = (received_power(channel, (hi - pj).norm()) -
                       received_power(channel, (lo - pj).norm())) /
                      (2.0 * h);
        }
      }

      Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * na);
      g(2 * i) = grad_i(0);
      g(2 * i + 1) = grad_i(1);
      if (j < na) {
        g(2 * j) = -grad_i(0);
        g(2 * j + 1) = -grad_i(1);
      }
      fim.matrix.noalias() += (1.0 / s2) * g * g.transpose();
    }
  }
  return fim;
}

CrlbResult crlb_value(const FisherInfo& fim, const NetworkGraph& graph) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(fim.matrix);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    std::ostringstream msg;
    msg << "crlb_value: singular Fisher information; under-observed sensors:";
    for (int i = 0; i < fim.sensors; ++i) {
      int degree = 0;
      PointMatrix neighbors(graph.size(), 2);
      for (int j = 0; j < graph.size(); ++j) {
        if (j == i || !counts_as_link(graph, i, j)) continue;
        neighbors.row(degree++) = graph.positions.row(j);
      }
      bool weak = degree < 2;
      if (!weak) {
        // All rays from the sensor to its neighbors collinear => one
        // direction unobservable.
        PointMatrix rays(degree + 1, 2);
        rays.topRows(degree) = neighbors.topRows(degree);
        rays.row(degree) = graph.positions.row(i);
        weak = is_collinear(rays);
      }
      if (weak) msg << ' ' << i;
    }
    throw std::runtime_error(msg.str());
  }
  CrlbResult out;
  out.raw_trace = lu.inverse().trace();
  out.rmspe_bound = std::sqrt(std::max(out.raw_trace, 0.0) /
                              std::max(fim.sensors, 1));
  return out;
}

}  // namespace uowsn
