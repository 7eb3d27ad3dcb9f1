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

#ifndef UOWSN_NETWORK_HPP
#define UOWSN_NETWORK_HPP

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "uowsn/channel.hpp"
#include "uowsn/rng.hpp"

namespace uowsn {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

enum class AnchorLayout {
  kRandom,     ///< uniform over the area, rejecting collinear draws
  kPerimeter,  ///< evenly spaced along the area boundary
};

struct DeploySpec {
  int sensors = 100;                      ///< N
  int anchors = 10;                       ///< M >= 3
  std::array<double, 2> area = {100.0, 100.0};
  AnchorLayout anchor_layout = AnchorLayout::kRandom;
  double tx_range = 20.0;                 ///< default per-node range, m
};

/// Node placement for one trial. Sensors may be active or passive; only
/// active sensors take part in ranging and localization.
struct Deployment {
  PointMatrix sensors;               ///< N x 2
  PointMatrix anchors;               ///< M x 2
  std::vector<char> active;          ///< N flags
  std::vector<double> sensor_range;  ///< per-sensor transmission range, m
  double anchor_range = 0.0;
  std::array<double, 2> area = {0.0, 0.0};

  int sensor_count() const { return static_cast<int>(sensors.rows()); }
  int anchor_count() const { return static_cast<int>(anchors.rows()); }
  int active_count() const;
};

/// True if the rows of `points` span less than two dimensions (within a
/// relative tolerance); localization demands non-collinear anchors.
bool is_collinear(const PointMatrix& points, double rel_tol = 1e-6);

/// Draws sensors i.i.d. uniform over the area (in index order, so a prefix
/// of the draws is shared between deployments of different N and the same
/// seed), then places anchors. Random anchor layouts are rejected until
/// non-collinear; a layout that stays collinear after bounded retries is an
/// error. All sensors start active with the default range.
Deployment deploy_network(const DeploySpec& spec, RngStream& rng);

/// Normalized critical range sqrt(c * log(Na) / Na) for asymptotic
/// connectivity on the unit square; scale by the area side for meters.
double connectivity_threshold(int active_nodes, double c);

/// Ranging graph over active sensors (first) and anchors (last M indices).
/// dist_est holds NaN and weights 0 where a pair was not measured.
struct NetworkGraph {
  int active_sensors = 0;  ///< N_a
  int anchor_count = 0;    ///< M
  Eigen::MatrixXd dist_est;   ///< K x K range estimates, NaN = missing
  Eigen::MatrixXd weights;    ///< K x K, Lambda_ij = 1/sigma_ij^2, 0 = missing
  PointMatrix positions;      ///< K x 2 ground truth (simulation bookkeeping)
  std::vector<int> sensor_ids;  ///< deployment index of each active sensor

  int size() const { return active_sensors + anchor_count; }
  bool is_anchor(int k) const { return k >= active_sensors; }
  bool has_edge(int i, int j) const { return weights(i, j) > 0.0; }
  PointMatrix anchor_positions() const {
    return positions.bottomRows(anchor_count);
  }
};

struct NoiseSpec {
  NoiseMode mode = NoiseMode::kDistance;
  double variance = 0.02;  ///< sigma^2 in the mode's units
};

/// Simulates ranging between every pair of active sensors and anchors whose
/// true distance is within both nodes' ranges: samples_per_link noisy
/// measurements per link, fused by estimate_range. Weights are 1/sigma_hat^2
/// (1.0 under zero noise). Anchors know each other's positions exactly, so
/// anchor-anchor entries carry the true distance; those entries are treated
/// as prior knowledge, not measurements, by downstream statistics.
NetworkGraph build_graph(const Deployment& deployment,
                         const ChannelParams& channel, const NoiseSpec& noise,
                         int samples_per_link, RngStream& rng);

/// Breadth-first connectivity over measured edges (anchor-anchor included).
bool is_connected(const NetworkGraph& graph);

/// Smallest and largest measured range estimate (anchor-anchor excluded).
/// Throws std::runtime_error on an edgeless graph.
std::pair<double, double> measured_range_extremes(const NetworkGraph& graph);

/// Fills every missing sensor-sensor and sensor-anchor entry with the
/// mid-range value (R_min + R_max)/2 of the measured edges; filled entries
/// get weight fill_weight_scale * min(measured weight). Present entries are
/// untouched. Throws std::runtime_error on an edgeless graph.
NetworkGraph complete_midrange(const NetworkGraph& graph,
                               double fill_weight_scale);

/// All-pairs shortest-path lengths over the measured edges (Floyd-Warshall).
/// Throws std::runtime_error naming an unreachable pair if disconnected.
Eigen::MatrixXd shortest_path_complete(const NetworkGraph& graph);

/// Edge-list dump, one line per measured link: i, j, d_true, d_est, lambda.
std::string graph_to_csv(const NetworkGraph& graph);

/// Sectioned CSV ("# nodes" id,x,y,is_anchor then "# edges"
/// i,j,d_true,d_est,lambda) carrying everything localize needs.
void save_graph(const NetworkGraph& graph, const std::string& path);
NetworkGraph load_graph(const std::string& path);

}  // namespace uowsn

#endif  // UOWSN_NETWORK_HPP
