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

#include "uowsn/localization.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace uowsn {

namespace {

// Sensors with no weighted path to any anchor (cause of a singular Z11).
std::vector<int> anchorless_sensors(const NetworkGraph& g) {
  const int k = g.size();
  std::vector<char> seen(k, 0);
  std::deque<int> queue;
  for (int a = g.active_sensors; a < k; ++a) {
    seen[a] = 1;
    queue.push_back(a);
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v = 0; v < k; ++v)
      if (!seen[v] && g.has_edge(u, v)) {
        seen[v] = 1;
        queue.push_back(v);
      }
  }
  std::vector<int> missing;
  for (int i = 0; i < g.active_sensors; ++i)
    if (!seen[i]) missing.push_back(i);
  return missing;
}

[[noreturn]] void throw_singular(const NetworkGraph& g) {
  std::ostringstream msg;
  msg << "anchored_update: singular sensor block; sensors without an anchor "
         "path:";
  for (int i : anchorless_sensors(g)) msg << ' ' << i;
  throw std::runtime_error(msg.str());
}

// One full majorization descent from a given starting configuration.
// Returns the final configuration; fills trace/iterations/converged.
struct DescentOutput {
  PointMatrix config;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
  double final_stress = 0.0;
};

class Majorizer {
 public:
  Majorizer(const NetworkGraph& completed, MatrixMode mode)
      : graph_(completed),
        mode_(mode),
        na_(completed.active_sensors),
        m_(completed.anchor_count) {
    anchor_pos_ = completed.anchor_positions();
    MajorizationState st =
        build_majorization_matrices(completed, completed.positions, mode);
    z12_ym_ = st.z12() * anchor_pos_;
    if (mode_ == MatrixMode::kSmacof) {
      llt_.compute(st.z11());
      if (llt_.info() != Eigen::Success) throw_singular(completed);
    } else {
      cod_.compute(st.z11());
    }
  }

  DescentOutput descend(const PointMatrix& start, int max_iters,
                        double tol) const {
    DescentOutput out;
    out.config = start;
    out.config.bottomRows(m_) = anchor_pos_;
    out.trace.push_back(stress(out.config, graph_));
    for (int it = 0; it < max_iters; ++it) {
      const Eigen::MatrixXd c = build_c(out.config);
      const Eigen::MatrixXd rhs =
          c.topLeftCorner(na_, na_) * out.config.topRows(na_) +
          c.topRightCorner(na_, m_) * anchor_pos_ - z12_ym_;
      if (mode_ == MatrixMode::kSmacof)
        out.config.topRows(na_) = llt_.solve(rhs);
      else
        out.config.topRows(na_) = cod_.solve(rhs);
      out.iterations = it + 1;
      const double s = stress(out.config, graph_);
      const double prev = out.trace.back();
      out.trace.push_back(s);
      if (std::abs(prev - s) < tol * std::max(prev, 1e-300) && it >= 1) {
        out.converged = true;
        break;
      }
    }
    out.final_stress = out.trace.back();
    return out;
  }

 private:
  Eigen::MatrixXd build_c(const PointMatrix& y) const {
    MajorizationState st = build_majorization_matrices(graph_, y, mode_);
    return std::move(st.C);
  }

  const NetworkGraph& graph_;
  MatrixMode mode_;
  int na_, m_;
  PointMatrix anchor_pos_;
  Eigen::MatrixXd z12_ym_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_;
};

// MDS-on-shortest-paths starting point, aligned onto the anchors.
PointMatrix mds_shortest_path_init(const NetworkGraph& graph) {
  const Eigen::MatrixXd sp = shortest_path_complete(graph);
  MdsResult mds = classical_mds(sp, 2);
  std::vector<int> anchor_idx(graph.anchor_count);
  std::iota(anchor_idx.begin(), anchor_idx.end(), graph.active_sensors);
  ProcrustesResult pr = procrustes_align(mds.coords, graph.anchor_positions(),
                                         anchor_idx, /*with_scale=*/true);
  return pr.aligned;
}

// Least-squares point fix from >= 3 placed neighbors: linearized seed plus a
// few Gauss-Newton sweeps on the range residuals. Returns false when the
// geometry is too flat or the fix is inconsistent with its ranges.
bool multilaterate(const PointMatrix& neighbor_pos,
                   const Eigen::VectorXd& ranges, double cond_floor,
                   double residual_cap, Eigen::RowVector2d* out) {
  const int n = static_cast<int>(neighbor_pos.rows());
  Eigen::MatrixXd a(n - 1, 2);
  Eigen::VectorXd b(n - 1);
  for (int k = 1; k < n; ++k) {
    a.row(k - 1) = 2.0 * (neighbor_pos.row(k) - neighbor_pos.row(0));
    b(k - 1) = ranges(0) * ranges(0) - ranges(k) * ranges(k) +
               neighbor_pos.row(k).squaredNorm() -
               neighbor_pos.row(0).squaredNorm();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()(1) < cond_floor) return false;
  Eigen::RowVector2d x = svd.solve(b).transpose();

  for (int sweep = 0; sweep < 8; ++sweep) {
    Eigen::MatrixXd jac(n, 2);
    Eigen::VectorXd res(n);
    for (int k = 0; k < n; ++k) {
      Eigen::RowVector2d diff = x - neighbor_pos.row(k);
      const double d = std::max(diff.norm(), 1e-9);
      jac.row(k) = diff / d;
      res(k) = d - ranges(k);
    }
    const Eigen::RowVector2d step =
        jac.colPivHouseholderQr().solve(-res).transpose();
    x += step;
    if (step.norm() < 1e-10) break;
  }
  for (int k = 0; k < n; ++k)
    if (std::abs((x - neighbor_pos.row(k)).norm() - ranges(k)) > residual_cap)
      return false;
  *out = x;
  return true;
}

// Anchor-seeded incremental multilateration over measured edges. Nodes that
// never gather three well-conditioned placed neighbors keep their fallback
// coordinates. salt > 0 randomizes placement order for restart diversity.
PointMatrix trilateration_init(const NetworkGraph& graph,
                               const PointMatrix& fallback, std::uint64_t salt,
                               RngStream rng) {
  const int k = graph.size();
  const int na = graph.active_sensors;
  PointMatrix pos = fallback;
  pos.bottomRows(graph.anchor_count) = graph.anchor_positions();
  std::vector<char> placed(k, 0);
  for (int a = na; a < k; ++a) placed[a] = 1;

  // Scale-aware gates derived from the measured edge lengths.
  double mean_range = 0.0;
  int edges = 0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (graph.has_edge(i, j) &&
          !(graph.is_anchor(i) && graph.is_anchor(j))) {
        mean_range += graph.dist_est(i, j);
        ++edges;
      }
  if (edges == 0) return pos;
  mean_range /= edges;
  const double cond_floor = 0.1 * mean_range;
  const double residual_cap = 0.15 * mean_range;

  std::set<int> pending;
  for (int i = 0; i < na; ++i) pending.insert(i);

  while (true) {
    int best = -1;
    double best_score = -1.0;
    int best_count = -1;
    std::vector<int> best_nb;
    for (int i : pending) {
      std::vector<int> nb;
      for (int j = 0; j < k; ++j)
        if (placed[j] && graph.has_edge(i, j)) nb.push_back(j);
      if (static_cast<int>(nb.size()) < 3) continue;
      Eigen::MatrixXd a(nb.size() - 1, 2);
      for (std::size_t t = 1; t < nb.size(); ++t)
        a.row(t - 1) = 2.0 * (pos.row(nb[t]) - pos.row(nb[0]));
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
      double score = svd.singularValues()(1);
      if (salt != 0) score += mean_range * rng.uniform();
      if (static_cast<int>(nb.size()) > best_count ||
          (static_cast<int>(nb.size()) == best_count && score > best_score)) {
        best = i;
        best_count = static_cast<int>(nb.size());
        best_score = score;
        best_nb = std::move(nb);
      }
    }
    if (best < 0) break;
    pending.erase(best);

    PointMatrix npos(best_nb.size(), 2);
    Eigen::VectorXd ranges(best_nb.size());
    for (std::size_t t = 0; t < best_nb.size(); ++t) {
      npos.row(t) = pos.row(best_nb[t]);
      ranges(t) = graph.dist_est(best, best_nb[t]);
    }
    Eigen::RowVector2d fix;
    if (!multilaterate(npos, ranges, cond_floor, residual_cap, &fix)) continue;
    pos.row(best) = fix;
    placed[best] = 1;
  }
  return pos;
}

}  // namespace

double stress(const PointMatrix& config, const NetworkGraph& completed) {
  const int k = completed.size();
  if (config.rows() != k)
    throw std::invalid_argument("stress: configuration size mismatch");
  double s = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const double w = completed.weights(i, j);
      if (w <= 0.0) continue;
      const double target = completed.dist_est(i, j);
      if (std::isnan(target))
        throw std::invalid_argument("stress: weighted pair with missing range");
      const double d = (config.row(i) - config.row(j)).norm();
      const double r = target - d;
      s += w * r * r;
    }
  }
  return s;
}

MajorizationState build_majorization_matrices(const NetworkGraph& completed,
                                              const PointMatrix& prev_config,
                                              MatrixMode mode) {
  const int k = completed.size();
  if (prev_config.rows() != k)
    throw std::invalid_argument("majorization: prev_config size mismatch");

  MajorizationState st;
  st.prev_config = prev_config;
  st.sensors = completed.active_sensors;
  st.anchors = completed.anchor_count;
  st.mode = mode;
  st.Z = Eigen::MatrixXd::Zero(k, k);
  st.C = Eigen::MatrixXd::Zero(k, k);

  // b_ij ("C" numerator) per pair: Lambda * D / d(prev), zero at d(prev)=0.
  Eigen::MatrixXd ratio = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const double w = completed.weights(i, j);
      if (w <= 0.0) continue;
      const double d = (prev_config.row(i) - prev_config.row(j)).norm();
      const double r = d > 0.0 ? w * completed.dist_est(i, j) / d : 0.0;
      ratio(i, j) = ratio(j, i) = r;
    }
  }

  if (mode == MatrixMode::kSmacof) {
    for (int i = 0; i < k; ++i) {
      double zdiag = 0.0, cdiag = 0.0;
      for (int j = 0; j < k; ++j) {
        if (j == i) continue;
        const double w = completed.weights(i, j);
        if (w > 0.0) {
          st.Z(i, j) = -w;
          zdiag += w;
        }
        st.C(i, j) = -ratio(i, j);
        cdiag += ratio(i, j);
      }
      st.Z(i, i) = zdiag;
      st.C(i, i) = cdiag;
    }
  } else {
    // Literal form: every off-diagonal entry of column j holds the column
    // sum; the diagonal stays zero.
    Eigen::VectorXd wcol = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd rcol = Eigen::VectorXd::Zero(k);
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < k; ++i) {
        if (i == j) continue;
        if (completed.weights(i, j) > 0.0) wcol(j) += completed.weights(i, j);
        rcol(j) += ratio(i, j);
      }
    }
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (i != j) {
          st.Z(i, j) = wcol(j);
          st.C(i, j) = rcol(j);
        }
  }
  return st;
}

PointMatrix anchored_update(const MajorizationState& state,
                            const PointMatrix& anchor_positions) {
  if (anchor_positions.rows() != state.anchors)
    throw std::invalid_argument("anchored_update: anchor count mismatch");
  const Eigen::MatrixXd rhs =
      state.c11() * state.prev_config.topRows(state.sensors) +
      state.c12() * anchor_positions - state.z12() * anchor_positions;

  if (state.mode == MatrixMode::kSmacof) {
    Eigen::LLT<Eigen::MatrixXd> llt(state.z11());
    if (llt.info() != Eigen::Success) {
      // Reconstruct a graph view for diagnostics is not possible here;
      // report indices with zero diagonal as the disconnected set.
      std::ostringstream msg;
      msg << "anchored_update: singular sensor block; suspect sensors:";
      for (int i = 0; i < state.sensors; ++i)
        if (state.Z(i, i) <= 0.0) msg << ' ' << i;
      throw std::runtime_error(msg.str());
    }
    PointMatrix sol = llt.solve(rhs);
    const double resid = ((state.z11() * sol) - rhs).norm();
    if (resid > 1e-10 * std::max(1.0, rhs.norm()))
      throw std::runtime_error("anchored_update: solve residual too large");
    return sol;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(state.z11());
  return cod.solve(rhs);
}

LocalizationResult localize(const NetworkGraph& graph,
                            const LocalizeOptions& opts) {
  if (graph.anchor_count < 3)
    throw std::runtime_error("localize: need at least three anchors");
  if (is_collinear(graph.anchor_positions()))
    throw std::runtime_error("localize: anchors are collinear");
  if (!is_connected(graph))
    throw std::runtime_error(
        "localize: graph is disconnected and cannot be localized");

  const int na = graph.active_sensors;
  const NetworkGraph completed =
      complete_midrange(graph, opts.fill_weight_scale);
  Majorizer maj(completed, opts.mode);

  // Candidate starting configurations.
  RngStream rng({opts.seed, 0x10ca112e});
  std::vector<PointMatrix> starts;
  const PointMatrix mds_start = mds_shortest_path_init(graph);
  switch (opts.init) {
    case InitMode::kMdsShortestPath:
      starts.push_back(mds_start);
      break;
    case InitMode::kTrilateration:
      starts.push_back(trilateration_init(graph, mds_start, 0, rng.fork({1})));
      break;
    case InitMode::kRandom: {
      PointMatrix y = mds_start;
      const PointMatrix anchors = graph.anchor_positions();
      const double x0 = anchors.col(0).minCoeff(), x1 = anchors.col(0).maxCoeff();
      const double y0 = anchors.col(1).minCoeff(), y1 = anchors.col(1).maxCoeff();
      RngStream r = rng.fork({2});
      for (int i = 0; i < na; ++i) {
        y(i, 0) = r.uniform(x0, x1);
        y(i, 1) = r.uniform(y0, y1);
      }
      starts.push_back(std::move(y));
      break;
    }
    case InitMode::kMultiStart: {
      starts.push_back(mds_start);
      for (std::uint64_t salt = 0; salt < 3; ++salt)
        starts.push_back(
            trilateration_init(graph, mds_start, salt, rng.fork({3, salt})));
      break;
    }
  }

  DescentOutput best;
  best.final_stress = std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    DescentOutput out = maj.descend(start, opts.max_iters, opts.tol);
    if (out.final_stress < best.final_stress) best = std::move(out);
  }

  if (opts.init == InitMode::kMultiStart && opts.restarts > 0) {
    // Jitter the incumbent and re-descend; keep strictly better outcomes.
    const auto [lo, hi] = measured_range_extremes(graph);
    const double midrange = 0.5 * (lo + hi);
    RngStream jitter_rng = rng.fork({4});
    for (int round = 0; round < opts.restarts; ++round) {
      const double scale = (round == 0 ? 0.1 : 0.3) * midrange;
      PointMatrix start = best.config;
      for (int i = 0; i < na; ++i) {
        start(i, 0) += jitter_rng.gaussian(0.0, scale);
        start(i, 1) += jitter_rng.gaussian(0.0, scale);
      }
      DescentOutput out = maj.descend(start, opts.max_iters, opts.tol);
      if (out.final_stress < best.final_stress - 1e-12) best = std::move(out);
    }
  }

  LocalizationResult result;
  result.full_config = best.config;
  result.estimates = best.config.topRows(na);
  result.stress_trace = std::move(best.trace);
  result.iterations = best.iterations;
  result.converged = best.converged;
  result.rmspe = rmspe(result.estimates, graph.positions.topRows(na));
  return result;
}

LocalizationResult localize_mds_baseline(const NetworkGraph& graph) {
  if (graph.anchor_count < 3)
    throw std::runtime_error("localize: need at least three anchors");
  if (is_collinear(graph.anchor_positions()))
    throw std::runtime_error("localize: anchors are collinear");
  if (!is_connected(graph))
    throw std::runtime_error(
        "localize: graph is disconnected and cannot be localized");

  LocalizationResult result;
  result.full_config = mds_shortest_path_init(graph);
  result.estimates = result.full_config.topRows(graph.active_sensors);
  result.converged = true;
  result.rmspe = rmspe(result.estimates,
                       graph.positions.topRows(graph.active_sensors));
  return result;
}

MdsResult classical_mds(const Eigen::MatrixXd& distances, int dim) {
  const int k = static_cast<int>(distances.rows());
  if (distances.cols() != k)
    throw std::invalid_argument("classical_mds: matrix must be square");
  if (dim < 1 || dim > k) throw std::invalid_argument("classical_mds: bad dim");

  const Eigen::MatrixXd d2 = distances.array().square();
  Eigen::MatrixXd j = Eigen::MatrixXd::Identity(k, k) -
                      Eigen::MatrixXd::Constant(k, k, 1.0 / k);
  const Eigen::MatrixXd gram = -0.5 * j * d2 * j;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("classical_mds: eigendecomposition failed");

  MdsResult res;
  res.eigenvalues = eig.eigenvalues().reverse();  // descending
  res.coords.resize(k, dim);
  for (int c = 0; c < dim; ++c) {
    const int src = k - 1 - c;  // eigenvalues come out ascending
    const double lambda = std::max(eig.eigenvalues()(src), 0.0);
    res.coords.col(c) = eig.eigenvectors().col(src) * std::sqrt(lambda);
  }
  const double scale = std::max(std::abs(res.eigenvalues(0)), 1.0);
  res.non_euclidean = res.eigenvalues(k - 1) < -1e-9 * scale;
  return res;
}

ProcrustesResult procrustes_align(const PointMatrix& coords,
                                  const PointMatrix& anchor_truth,
                                  std::span<const int> anchor_indices,
                                  bool with_scale) {
  const int m = static_cast<int>(anchor_indices.size());
  if (m != anchor_truth.rows() || m < 3)
    throw std::invalid_argument("procrustes: need >= 3 matched anchors");
  if (is_collinear(anchor_truth))
    throw std::runtime_error("procrustes: collinear anchors");

  PointMatrix src(m, 2);
  for (int i = 0; i < m; ++i) src.row(i) = coords.row(anchor_indices[i]);

  const Eigen::RowVector2d src_mean = src.colwise().mean();
  const Eigen::RowVector2d dst_mean = anchor_truth.colwise().mean();
  const PointMatrix sc = src.rowwise() - src_mean;
  const PointMatrix dc = anchor_truth.rowwise() - dst_mean;

  // Unconstrained orthogonal Procrustes: reflection allowed by design, since
  // MDS output has arbitrary chirality.
  const Eigen::Matrix2d m2 = sc.transpose() * dc;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(
      m2, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ProcrustesResult out;
  out.rotation = svd.matrixU() * svd.matrixV().transpose();
  out.scale = with_scale
                  ? svd.singularValues().sum() / sc.array().square().sum()
                  : 1.0;
  out.translation = dst_mean - out.scale * src_mean * out.rotation;
  out.aligned = (out.scale * (coords * out.rotation)).rowwise() + out.translation;
  return out;
}

double rmspe(const PointMatrix& estimates, const PointMatrix& truth) {
  if (estimates.rows() != truth.rows())
    throw std::invalid_argument("rmspe: size mismatch");
  if (estimates.rows() == 0) return 0.0;
  return std::sqrt((estimates - truth).array().square().sum() /
                   static_cast<double>(estimates.rows()));
}

}  // namespace uowsn
