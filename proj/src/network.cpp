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

#include "uowsn/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace uowsn {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

int Deployment::active_count() const {
  return static_cast<int>(std::count(active.begin(), active.end(), 1));
}

bool is_collinear(const PointMatrix& points, double rel_tol) {
  if (points.rows() < 3) return true;
  PointMatrix centered = points.rowwise() - points.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  const auto& sv = svd.singularValues();
  return sv(1) <= rel_tol * std::max(1.0, sv(0));
}

Deployment deploy_network(const DeploySpec& spec, RngStream& rng) {
  if (spec.sensors < 1)
    throw std::invalid_argument("deploy: need at least one sensor");
  if (spec.anchors < 3)
    throw std::invalid_argument("deploy: need at least three anchors");
  if (spec.area[0] <= 0.0 || spec.area[1] <= 0.0)
    throw std::invalid_argument("deploy: area sides must be positive");
  if (spec.tx_range < 0.0)
    throw std::invalid_argument("deploy: negative tx_range");

  Deployment d;
  d.area = spec.area;
  d.sensors.resize(spec.sensors, 2);
  for (int i = 0; i < spec.sensors; ++i) {
    // Sensor i always consumes draws 2i, 2i+1 of the stream: deployments
    // sharing a seed share their sensor prefix regardless of N.
    d.sensors(i, 0) = rng.uniform(0.0, spec.area[0]);
    d.sensors(i, 1) = rng.uniform(0.0, spec.area[1]);
  }

  d.anchors.resize(spec.anchors, 2);
  if (spec.anchor_layout == AnchorLayout::kPerimeter) {
    const double perimeter = 2.0 * (spec.area[0] + spec.area[1]);
    for (int m = 0; m < spec.anchors; ++m) {
      double s = perimeter * m / spec.anchors;
      double x, y;
      if (s < spec.area[0]) {
        x = s; y = 0.0;
      } else if ((s -= spec.area[0]) < spec.area[1]) {
        x = spec.area[0]; y = s;
      } else if ((s -= spec.area[1]) < spec.area[0]) {
        x = spec.area[0] - s; y = spec.area[1];
      } else {
        x = 0.0; y = s - spec.area[0];
      }
      d.anchors(m, 0) = x;
      d.anchors(m, 1) = y;
    }
    if (is_collinear(d.anchors))
      throw std::runtime_error("deploy: perimeter anchor layout is collinear");
  } else {
    constexpr int kMaxRetries = 100;
    bool placed = false;
    for (int attempt = 0; attempt < kMaxRetries && !placed; ++attempt) {
      for (int m = 0; m < spec.anchors; ++m) {
        d.anchors(m, 0) = rng.uniform(0.0, spec.area[0]);
        d.anchors(m, 1) = rng.uniform(0.0, spec.area[1]);
      }
      placed = !is_collinear(d.anchors);
    }
    if (!placed)
      throw std::runtime_error(
          "deploy: could not draw non-collinear anchors after retries");
  }

  d.active.assign(spec.sensors, 1);
  d.sensor_range.assign(spec.sensors, spec.tx_range);
  d.anchor_range = spec.tx_range;
  return d;
}

double connectivity_threshold(int active_nodes, double c) {
  if (active_nodes < 2)
    throw std::invalid_argument("connectivity_threshold: need Na >= 2");
  if (c <= 0.0)
    throw std::invalid_argument("connectivity_threshold: c must be positive");
  return std::sqrt(c * std::log(static_cast<double>(active_nodes)) /
                   active_nodes);
}

NetworkGraph build_graph(const Deployment& deployment,
                         const ChannelParams& channel, const NoiseSpec& noise,
                         int samples_per_link, RngStream& rng) {
  channel.validate();
  if (samples_per_link < 1)
    throw std::invalid_argument("build_graph: samples_per_link must be >= 1");
  if (noise.variance < 0.0)
    throw std::invalid_argument("build_graph: negative noise variance");

  NetworkGraph g;
  g.anchor_count = deployment.anchor_count();
  for (int i = 0; i < deployment.sensor_count(); ++i)
    if (deployment.active[i]) g.sensor_ids.push_back(i);
  g.active_sensors = static_cast<int>(g.sensor_ids.size());

  const int k = g.size();
  g.positions.resize(k, 2);
  std::vector<double> range(k, deployment.anchor_range);
  for (int i = 0; i < g.active_sensors; ++i) {
    g.positions.row(i) = deployment.sensors.row(g.sensor_ids[i]);
    range[i] = deployment.sensor_range[g.sensor_ids[i]];
  }
  g.positions.bottomRows(g.anchor_count) = deployment.anchors;

  g.dist_est = Eigen::MatrixXd::Constant(k, k, kNan);
  g.weights = Eigen::MatrixXd::Zero(k, k);
  g.dist_est.diagonal().setZero();

  const double sigma = std::sqrt(noise.variance);
  double max_measured_weight = 0.0;

  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const double d_true = (g.positions.row(i) - g.positions.row(j)).norm();
      if (g.is_anchor(i) && g.is_anchor(j)) continue;  // handled below
      if (d_true > std::min(range[i], range[j]) || d_true <= 0.0) continue;

      // Per-link stream keyed on node ids: results do not depend on the
      // pair iteration order.
      RngStream link_rng = rng.fork(
          {0x11ce, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
      std::vector<RangeMeasurement> samples;
      samples.reserve(samples_per_link);
      const double truth = noise.mode == NoiseMode::kDistance
                               ? d_true
                               : received_power(channel, d_true);
      for (int s = 0; s < samples_per_link; ++s)
        samples.push_back(
            add_measurement_noise(i, j, truth, sigma, noise.mode, link_rng));
      const RangeEstimate est = estimate_range(samples, channel);
      if (!est.valid) continue;

      const double w = est.stddev > 0.0 ? 1.0 / (est.stddev * est.stddev) : 1.0;
      g.dist_est(i, j) = g.dist_est(j, i) = est.distance;
      g.weights(i, j) = g.weights(j, i) = w;
      max_measured_weight = std::max(max_measured_weight, w);
    }
  }

  // Anchors are surface-referenced: mutual distances known exactly. The
  // weight value is inert (anchors never move) but must be positive to keep
  // the presence invariant.
  const double anchor_w = max_measured_weight > 0.0 ? max_measured_weight : 1.0;
  for (int i = g.active_sensors; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      g.dist_est(i, j) = g.dist_est(j, i) =
          (g.positions.row(i) - g.positions.row(j)).norm();
      g.weights(i, j) = g.weights(j, i) = anchor_w;
    }
  }
  return g;
}

bool is_connected(const NetworkGraph& graph) {
  const int k = graph.size();
  if (k == 0) return true;
  std::vector<char> seen(k, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int count = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v = 0; v < k; ++v) {
      if (!seen[v] && graph.has_edge(u, v)) {
        seen[v] = 1;
        ++count;
        queue.push_back(v);
      }
    }
  }
  return count == k;
}

std::pair<double, double> measured_range_extremes(const NetworkGraph& graph) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const int k = graph.size();
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (graph.is_anchor(i) && graph.is_anchor(j)) continue;
      if (!graph.has_edge(i, j)) continue;
      lo = std::min(lo, graph.dist_est(i, j));
      hi = std::max(hi, graph.dist_est(i, j));
    }
  }
  if (!(lo <= hi))
    throw std::runtime_error("midrange completion: graph has no measured edge");
  return {lo, hi};
}

NetworkGraph complete_midrange(const NetworkGraph& graph,
                               double fill_weight_scale) {
  if (fill_weight_scale < 0.0)
    throw std::invalid_argument("complete_midrange: negative weight scale");
  const auto [lo, hi] = measured_range_extremes(graph);
  const double fill = 0.5 * (lo + hi);

  double min_w = std::numeric_limits<double>::infinity();
  const int k = graph.size();
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (graph.has_edge(i, j) && !(graph.is_anchor(i) && graph.is_anchor(j)))
        min_w = std::min(min_w, graph.weights(i, j));
  const double fill_w = fill_weight_scale * min_w;

  NetworkGraph out = graph;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (out.has_edge(i, j)) continue;
      out.dist_est(i, j) = out.dist_est(j, i) = fill;
      out.weights(i, j) = out.weights(j, i) = fill_w;
    }
  }
  return out;
}

Eigen::MatrixXd shortest_path_complete(const NetworkGraph& graph) {
  const int k = graph.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(k, k, kInf);
  d.diagonal().setZero();
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j && graph.has_edge(i, j)) d(i, j) = graph.dist_est(i, j);

  for (int m = 0; m < k; ++m)
    for (int i = 0; i < k; ++i) {
      if (d(i, m) == kInf) continue;
      for (int j = 0; j < k; ++j) {
        const double via = d(i, m) + d(m, j);
        if (via < d(i, j)) d(i, j) = via;
      }
    }

  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (d(i, j) == kInf)
        throw std::runtime_error("shortest_path_complete: nodes " +
                                 std::to_string(i) + " and " +
                                 std::to_string(j) +
                                 " are unreachable (graph disconnected)");
  return d;
}

std::string graph_to_csv(const NetworkGraph& graph) {
  std::ostringstream out;
  out << "i,j,d_true,d_est,lambda\n";
  out.precision(17);
  const int k = graph.size();
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (graph.has_edge(i, j))
        out << i << ',' << j << ','
            << (graph.positions.row(i) - graph.positions.row(j)).norm() << ','
            << graph.dist_est(i, j) << ',' << graph.weights(i, j) << '\n';
  return out.str();
}

}  // namespace uowsn
