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

#ifndef UOWSN_LOCALIZATION_HPP
#define UOWSN_LOCALIZATION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "uowsn/network.hpp"

namespace uowsn {

/// Which majorization matrices drive the update.
///
/// kSmacof builds the standard Guttman-transform matrices (negative
/// off-diagonal weights, zero row sums), under which the anchored update is
/// the exact minimizer of the quadratic majorizer and the stress decreases
/// monotonically. kPaperLiteral builds the matrices with column-sum entries
/// off the diagonal and a zero diagonal, solved through a pseudo-inverse;
/// it exists for side-by-side comparison and carries no descent guarantee.
enum class MatrixMode { kSmacof, kPaperLiteral };

/// Weighted squared mismatch sum_{i<j} Lambda_ij (D_ij - d_ij(Y))^2 over all
/// weighted pairs. Requires a completed graph (every weighted pair present).
double stress(const PointMatrix& config, const NetworkGraph& completed);

struct MajorizationState {
  Eigen::MatrixXd Z;  ///< K x K quadratic kernel
  Eigen::MatrixXd C;  ///< K x K linear kernel, depends on prev_config
  PointMatrix prev_config;
  int sensors = 0;  ///< N_a: leading block size
  int anchors = 0;  ///< M: trailing block size
  MatrixMode mode = MatrixMode::kSmacof;

  auto z11() const { return Z.topLeftCorner(sensors, sensors); }
  auto z12() const { return Z.topRightCorner(sensors, anchors); }
  auto c11() const { return C.topLeftCorner(sensors, sensors); }
  auto c12() const { return C.topRightCorner(sensors, anchors); }
};

/// Builds Z and C for one majorization step around prev_config. Pairs at
/// zero distance in prev_config contribute nothing to C.
MajorizationState build_majorization_matrices(const NetworkGraph& completed,
                                              const PointMatrix& prev_config,
                                              MatrixMode mode);

/// Solves the anchored stationarity system
///   Z11 * Y = C11 * Yprev_sensors + C12 * Y_M - Z12 * Y_M
/// for the sensor block. Throws std::runtime_error naming the sensors with
/// no weighted path to an anchor when Z11 is singular.
PointMatrix anchored_update(const MajorizationState& state,
                            const PointMatrix& anchor_positions);

enum class InitMode {
  kMdsShortestPath,  ///< classical MDS on shortest paths + Procrustes
  kTrilateration,    ///< anchor-seeded incremental multilateration
  kRandom,           ///< uniform in the anchor bounding box
  kMultiStart,       ///< MDS + salted trilaterations + jitter re-descents,
                     ///< best final stress wins (default)
};

struct LocalizeOptions {
  MatrixMode mode = MatrixMode::kSmacof;
  InitMode init = InitMode::kMultiStart;
  int max_iters = 500;
  double tol = 1e-6;                 ///< relative stress decrease cutoff
  double fill_weight_scale = 1e-6;   ///< weight scale for completed entries
  int restarts = 3;                  ///< jitter re-descents in kMultiStart
  std::uint64_t seed = 0x5eed;       ///< drives jitter/salts only
};

struct LocalizationResult {
  PointMatrix estimates;             ///< N_a x 2 sensor estimates
  PointMatrix full_config;           ///< K x 2, anchor rows = inputs, bit-exact
  std::vector<double> stress_trace;  ///< winning descent, iteration 0..n
  int iterations = 0;
  bool converged = false;
  double rmspe = 0.0;                ///< vs ground truth, sensors only
};

/// Anchored iterative-majorization localizer. Completes missing entries by
/// the mid-range rule (down-weighted), initializes per opts.init, and
/// majorizes until the relative stress decrease drops below tol or max_iters
/// is hit. Anchors are held fixed throughout; estimates come out in the
/// anchor frame with no post-hoc transformation.
///
/// Preconditions: connected graph, >= 3 non-collinear anchors
/// (std::runtime_error otherwise).
LocalizationResult localize(const NetworkGraph& graph,
                            const LocalizeOptions& opts = {});

/// Baseline: shortest-path completion, classical MDS, Procrustes onto the
/// anchors (with scale). Same preconditions as localize.
LocalizationResult localize_mds_baseline(const NetworkGraph& graph);

struct MdsResult {
  PointMatrix coords;            ///< K x dim
  Eigen::VectorXd eigenvalues;   ///< all K, descending
  bool non_euclidean = false;    ///< negative eigenvalues beyond tolerance
};

/// Classical (Torgerson) MDS: double-centers -D.^2/2 and embeds with the top
/// `dim` eigenpairs. Exact for Euclidean distance matrices of rank <= dim.
MdsResult classical_mds(const Eigen::MatrixXd& distances, int dim = 2);

struct ProcrustesResult {
  PointMatrix aligned;        ///< all input points, transformed
  Eigen::Matrix2d rotation;   ///< may be a reflection (det -1)
  double scale = 1.0;
  Eigen::RowVector2d translation;
};

/// Least-squares similarity transform (rotation/reflection + translation +
/// optional uniform scale) mapping coords[anchor_indices] onto anchor_truth,
/// applied to every row of coords. Throws on collinear anchors.
ProcrustesResult procrustes_align(const PointMatrix& coords,
                                  const PointMatrix& anchor_truth,
                                  std::span<const int> anchor_indices,
                                  bool with_scale = true);

/// Root mean squared positioning error between row-aligned point sets.
double rmspe(const PointMatrix& estimates, const PointMatrix& truth);

}  // namespace uowsn

#endif  // UOWSN_LOCALIZATION_HPP
