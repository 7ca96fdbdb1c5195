// Copyright 2026, the rlio project contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * \file window.hpp
 * \brief Fixed-lag factor-graph window: nodes, factors, Gauss-Newton /
 * Levenberg-Marquardt optimization and Schur-complement marginalization.
 *
 * The window owns time-ordered NavState nodes plus prior, IMU, bias
 * random-walk, LiDAR and radar factors. LiDAR and radar residuals are
 * robustified with the Huber weight; IMU terms are not. States removed by
 * the lag are folded into a dense Gaussian prior on their Markov blanket,
 * linearized once at marginalization time.
 */

#pragma once

#include <Eigen/Sparse>

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rlio/estimator/factors.hpp"
#include "rlio/estimator/state.hpp"
#include "rlio/imu/preintegration.hpp"

namespace rlio {

/// Outcome of one optimize() call.
struct OptimizeResult {
  int iterations = 0;
  bool converged = false;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  std::vector<double> accepted_costs;
  std::vector<double> step_norms;
};

namespace detail {

/// Lower-triangular whitener L^{-1} with cov = L L^T.
template <int N>
Eigen::Matrix<double, N, N> sqrt_information(
    const Eigen::Matrix<double, N, N>& covariance) {
  Eigen::Matrix<double, N, N> cov = covariance;
  cov.diagonal().array() += 1e-16;
  const Eigen::LLT<Eigen::Matrix<double, N, N>> llt(cov);
  return llt.matrixL().solve(Eigen::Matrix<double, N, N>::Identity());
}

}  // namespace detail

/// Gaussian information form over the retained variables after eliminating
/// the leading block.
struct MarginalizedGaussian {
  Eigen::MatrixXd information;  // H' on the retained variables
  Eigen::VectorXd gradient;     // g' such that cost = const + g'^T d + 1/2 d^T H' d
};

/// Schur complement of the linearized system (H, g) onto the trailing
/// variables, eliminating the first n_marginalized dimensions.
inline MarginalizedGaussian schur_marginalize(const Eigen::MatrixXd& H,
                                              const Eigen::VectorXd& g,
                                              int n_marginalized) {
  const int n = static_cast<int>(H.rows());
  const int nm = n_marginalized;
  const int nb = n - nm;
  if (nm <= 0 || nb < 0)
    throw std::invalid_argument("schur_marginalize: bad partition");
  Eigen::MatrixXd H_mm = H.topLeftCorner(nm, nm);
  H_mm.diagonal().array() += 1e-12;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(H_mm);
  const Eigen::MatrixXd H_mb = H.topRightCorner(nm, nb);
  const Eigen::MatrixXd H_mm_inv_mb = ldlt.solve(H_mb);
  MarginalizedGaussian out;
  out.information = H.bottomRightCorner(nb, nb) - H_mb.transpose() * H_mm_inv_mb;
  out.gradient = g.tail(nb) - H_mm_inv_mb.transpose() * g.head(nm);
  return out;
}

class FactorGraphWindow {
 public:
  struct Config {
    double lag = 1.5;                 // s
    double huber_delta = 1.345;       // on whitened residual norms
    Vec3 gravity = Vec3(0.0, 0.0, -9.80665);
    Extrinsics extrinsics;
    int max_iterations = 50;
    double step_tolerance = 1e-8;
    ImuNoise imu_noise;
  };

  struct Node {
    std::int64_t id = 0;
    NavState state;
  };

  explicit FactorGraphWindow(const Config& config) : config_(config) {}

  const Config& config() const { return config_; }
  Config& config() { return config_; }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const Node& node(std::size_t index) const { return nodes_[index]; }
  const Node& newest() const { return nodes_.back(); }
  const Node& oldest() const { return nodes_.front(); }

  const NavState& state_of(std::int64_t id) const {
    return nodes_[index_of(id)].state;
  }

  /// Appends a node; timestamps must be strictly increasing.
  std::int64_t add_node(const NavState& state) {
    if (!nodes_.empty() && state.timestamp <= nodes_.back().state.timestamp)
      throw std::invalid_argument("window: node timestamps must increase");
    const std::int64_t id = next_id_++;
    nodes_.push_back({id, state});
    return id;
  }

  bool has_node(std::int64_t id) const {
    return id >= first_id() && id < next_id_;
  }

  /// Node id nearest in time; ties break toward the earlier node.
  std::int64_t nearest_node(double t) const {
    if (nodes_.empty()) throw std::runtime_error("window: empty");
    std::size_t lo = 0, hi = nodes_.size();
    while (lo < hi) {  // first node with timestamp >= t
      const std::size_t mid = (lo + hi) / 2;
      if (nodes_[mid].state.timestamp < t)
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo == 0) return nodes_.front().id;
    if (lo == nodes_.size()) return nodes_.back().id;
    const double after = nodes_[lo].state.timestamp - t;
    const double before = t - nodes_[lo - 1].state.timestamp;
    return (before <= after) ? nodes_[lo - 1].id : nodes_[lo].id;
  }

  /// Diagonal Gaussian prior on a single node around its current state.
  void add_diagonal_prior(std::int64_t id, const Vec15& sigmas) {
    Factor f;
    f.type = Factor::Type::kPrior;
    f.ids = {id};
    f.prior_sqrt_info = sigmas.cwiseInverse().asDiagonal();
    f.prior_offset = Eigen::VectorXd::Zero(15);
    f.prior_lin = {state_of(id)};
    factors_.push_back(std::move(f));
  }

  /// Preintegrated IMU factor plus the companion bias random-walk factor
  /// between consecutive nodes.
  void add_imu_factor(std::int64_t id_i, std::int64_t id_j,
                      const PreintegratedImuDelta& delta) {
    Factor f;
    f.type = Factor::Type::kImu;
    f.ids = {id_i, id_j};
    f.delta = delta;
    f.imu_sqrt_info = detail::sqrt_information<9>(delta.covariance);
    factors_.push_back(std::move(f));

    Factor bw;
    bw.type = Factor::Type::kBiasWalk;
    bw.ids = {id_i, id_j};
    const double dt = delta.duration;
    Vec6 var;
    const double qa =
        config_.imu_noise.accel_bias_random_walk *
        config_.imu_noise.accel_bias_random_walk * dt;
    const double qg = config_.imu_noise.gyro_bias_random_walk *
                      config_.imu_noise.gyro_bias_random_walk * dt;
    var << qa, qa, qa, qg, qg, qg;
    bw.bias_walk_sqrt_info = var.cwiseSqrt().cwiseInverse().asDiagonal();
    factors_.push_back(std::move(bw));
  }

  void add_lidar_factor(std::int64_t id_prev, std::int64_t id_cur,
                        const LidarRelativePose& meas) {
    Factor f;
    f.type = Factor::Type::kLidar;
    f.robust = true;
    f.ids = {id_prev, id_cur};
    f.lidar = meas;
    f.lidar_sqrt_info = detail::sqrt_information<6>(meas.covariance);
    factors_.push_back(std::move(f));
  }

  void add_radar_factor(std::int64_t id, const RadarVelocityFactorInput& meas) {
    if (meas.variance <= 0.0)
      throw std::invalid_argument("radar factor: variance must be positive");
    Factor f;
    f.type = Factor::Type::kRadar;
    f.robust = true;
    f.ids = {id};
    f.radar = meas;
    f.radar_sqrt_info = 1.0 / std::sqrt(meas.variance);
    factors_.push_back(std::move(f));
  }

  /// Iterative on-manifold nonlinear least squares over the whole window.
  OptimizeResult optimize() {
    OptimizeResult result;
    if (nodes_.empty()) {
      result.converged = true;
      return result;
    }
    const int n = static_cast<int>(nodes_.size()) * NavState::kDof;

    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd b(n);
    double cost = linearize_all(&triplets, &b);
    result.initial_cost = cost;

    double lambda = 0.0;
    for (int iter = 0; iter < config_.max_iterations; ++iter) {
      Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
      for (const auto& t : triplets)
        if (t.row() == t.col()) diag[t.row()] += t.value();

      bool accepted = false;
      Eigen::VectorXd step;
      for (int attempt = 0; attempt < 10 && !accepted; ++attempt) {
        auto damped = triplets;
        if (lambda > 0.0) {
          for (int k = 0; k < n; ++k)
            damped.emplace_back(k, k, lambda * diag[k] + 1e-12);
        }
        Eigen::SparseMatrix<double> H(n, n);
        H.setFromTriplets(damped.begin(), damped.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(H);
        if (solver.info() == Eigen::Success) {
          step = solver.solve(-b);
          if (solver.info() == Eigen::Success && step.allFinite()) {
            if (step.norm() < config_.step_tolerance) {
              // numerically at the optimum already
              result.final_cost = cost;
              result.converged = true;
              return result;
            }
            std::vector<Node> candidate = apply_step(step);
            const double new_cost = evaluate_cost(candidate);
            // tiny slack tolerates floating-point plateaus near the optimum
            if (std::isfinite(new_cost) &&
                new_cost <= cost + 1e-13 * (1.0 + cost)) {
              nodes_.assign(candidate.begin(), candidate.end());
              cost = std::min(cost, new_cost);
              accepted = true;
              lambda *= 0.25;
              if (lambda < 1e-9) lambda = 0.0;
              break;
            }
          }
        }
        lambda = std::max(lambda * 10.0, 1e-6);
      }
      if (!accepted) {
        result.final_cost = cost;
        result.converged = false;
        return result;  // best iterate retained, flagged as not converged
      }
      ++result.iterations;
      result.accepted_costs.push_back(cost);
      result.step_norms.push_back(step.norm());
      if (step.norm() < config_.step_tolerance) {
        result.converged = true;
        break;
      }
      cost = linearize_all(&triplets, &b);
    }
    result.final_cost = cost;
    return result;
  }

  /// Removes nodes older than (newest - lag), folding the factors that touch
  /// them into a dense Gaussian prior on the affected retained states.
  void marginalize_old() { marginalize_older_than(newest().state.timestamp - config_.lag); }

  void marginalize_older_than(double tail_time) {
    if (nodes_.empty()) return;
    std::size_t n_remove = 0;
    while (n_remove + 1 < nodes_.size() &&
           nodes_[n_remove].state.timestamp < tail_time)
      ++n_remove;
    if (n_remove == 0) return;

    const std::int64_t last_removed_id = nodes_[n_remove - 1].id;

    // Partition factors and collect the Markov blanket.
    std::vector<std::size_t> touching;
    std::vector<std::int64_t> blanket;
    for (std::size_t fi = 0; fi < factors_.size(); ++fi) {
      bool touches = false;
      for (auto id : factors_[fi].ids)
        if (id <= last_removed_id) touches = true;
      if (!touches) continue;
      touching.push_back(fi);
      for (auto id : factors_[fi].ids)
        if (id > last_removed_id) blanket.push_back(id);
    }
    std::sort(blanket.begin(), blanket.end());
    blanket.erase(std::unique(blanket.begin(), blanket.end()), blanket.end());

    const int nm = static_cast<int>(n_remove) * NavState::kDof;
    const int nb = static_cast<int>(blanket.size()) * NavState::kDof;

    if (nb > 0 && !touching.empty()) {
      // Local variable order: removed nodes (by id), then blanket (by id).
      auto local_offset = [&](std::int64_t id) -> int {
        if (id <= last_removed_id)
          return static_cast<int>(id - first_id()) * NavState::kDof;
        const auto it = std::lower_bound(blanket.begin(), blanket.end(), id);
        return nm + static_cast<int>(it - blanket.begin()) * NavState::kDof;
      };

      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nm + nb, nm + nb);
      Eigen::VectorXd g = Eigen::VectorXd::Zero(nm + nb);

      Eigen::VectorXd r;
      std::vector<Eigen::MatrixXd> jacobians;
      for (auto fi : touching) {
        linearize_factor(factors_[fi], nodes_, &r, &jacobians);
        double w = 1.0;
        if (factors_[fi].robust)
          w = huber_weight(r.norm(), config_.huber_delta);
        const double sw = std::sqrt(w);
        r *= sw;
        for (std::size_t a = 0; a < factors_[fi].ids.size(); ++a) {
          const int oa = local_offset(factors_[fi].ids[a]);
          const Eigen::MatrixXd Ja = sw * jacobians[a];
          g.segment(oa, NavState::kDof) += Ja.transpose() * r;
          for (std::size_t c = 0; c < factors_[fi].ids.size(); ++c) {
            const int oc = local_offset(factors_[fi].ids[c]);
            H.block(oa, oc, NavState::kDof, NavState::kDof) +=
                Ja.transpose() * (sw * jacobians[c]);
          }
        }
      }

      // Schur complement onto the blanket block.
      const MarginalizedGaussian marginal = schur_marginalize(H, g, nm);
      const Eigen::MatrixXd& H_prior = marginal.information;
      const Eigen::VectorXd& g_prior = marginal.gradient;

      // Square root of the (possibly rank-deficient) prior information.
      // The spectrum spans many orders of magnitude (stiff bias-walk terms
      // against weak absolute anchoring), so the cutoff must stay absolute:
      // a relative cutoff would delete the anchor information entirely.
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
          0.5 * (H_prior + H_prior.transpose()));
      const double lambda_max =
          std::max(eig.eigenvalues().maxCoeff(), 0.0);
      const double cutoff = std::max(
          1e-8, 100.0 * std::numeric_limits<double>::epsilon() * lambda_max);
      std::vector<int> kept;
      for (int k = 0; k < nb; ++k)
        if (eig.eigenvalues()[k] > cutoff) kept.push_back(k);

      if (!kept.empty()) {
        Eigen::MatrixXd S(static_cast<int>(kept.size()), nb);
        Eigen::VectorXd c(static_cast<int>(kept.size()));
        for (std::size_t row = 0; row < kept.size(); ++row) {
          const double lam = eig.eigenvalues()[kept[row]];
          S.row(static_cast<int>(row)) =
              std::sqrt(lam) * eig.eigenvectors().col(kept[row]).transpose();
          c[static_cast<int>(row)] =
              -eig.eigenvectors().col(kept[row]).dot(g_prior) / std::sqrt(lam);
        }
        Factor prior;
        prior.type = Factor::Type::kPrior;
        prior.ids = blanket;
        prior.prior_sqrt_info = std::move(S);
        prior.prior_offset = std::move(c);
        prior.prior_lin.reserve(blanket.size());
        for (auto id : blanket) prior.prior_lin.push_back(state_of(id));
        factors_.push_back(std::move(prior));
      }
    }

    // Drop consumed factors and nodes.
    std::vector<Factor> retained;
    retained.reserve(factors_.size());
    for (std::size_t fi = 0; fi < factors_.size(); ++fi) {
      bool touches = false;
      for (auto id : factors_[fi].ids)
        if (id <= last_removed_id) touches = true;
      if (!touches) retained.push_back(std::move(factors_[fi]));
    }
    factors_ = std::move(retained);
    nodes_.erase(nodes_.begin(), nodes_.begin() + static_cast<long>(n_remove));
  }

  /// Total robust cost at the current estimates.
  double cost() const { return evaluate_cost(nodes_); }

  std::size_t factor_count() const { return factors_.size(); }

#ifdef RLIO_WINDOW_DEBUG_HOOKS
  std::vector<std::pair<int, double>> debug_factor_costs() const {
    std::vector<std::pair<int, double>> out;
    Eigen::VectorXd r;
    for (const auto& f : factors_) {
      linearize_factor(f, nodes_, &r, nullptr);
      out.emplace_back(static_cast<int>(f.type), factor_cost(f, r));
    }
    return out;
  }
  const std::deque<Node>& debug_nodes() const { return nodes_; }
#endif

 private:
  struct Factor {
    enum class Type { kPrior, kImu, kBiasWalk, kLidar, kRadar };
    Type type = Type::kPrior;
    std::vector<std::int64_t> ids;
    bool robust = false;

    PreintegratedImuDelta delta;
    Mat9 imu_sqrt_info = Mat9::Zero();
    Mat6 bias_walk_sqrt_info = Mat6::Zero();
    LidarRelativePose lidar;
    Mat6 lidar_sqrt_info = Mat6::Zero();
    RadarVelocityFactorInput radar;
    double radar_sqrt_info = 0.0;
    Eigen::MatrixXd prior_sqrt_info;
    Eigen::VectorXd prior_offset;
    std::vector<NavState> prior_lin;
  };

  std::int64_t first_id() const { return next_id_ - static_cast<std::int64_t>(nodes_.size()); }

  std::size_t index_of(std::int64_t id) const {
    const std::int64_t idx = id - first_id();
    if (idx < 0 || idx >= static_cast<std::int64_t>(nodes_.size()))
      throw std::out_of_range("window: unknown node id");
    return static_cast<std::size_t>(idx);
  }

  void linearize_factor(const Factor& f, const std::deque<Node>& nodes,
                        Eigen::VectorXd* r,
                        std::vector<Eigen::MatrixXd>* jacobians) const {
    const bool want_jac = jacobians != nullptr;
    if (want_jac) jacobians->clear();
    switch (f.type) {
      case Factor::Type::kImu: {
        const NavState& si = nodes[index_of(f.ids[0])].state;
        const NavState& sj = nodes[index_of(f.ids[1])].state;
        Mat915 ji, jj;
        const Vec9 res =
            imu_residual(f.delta, si, sj, config_.gravity,
                         want_jac ? &ji : nullptr, want_jac ? &jj : nullptr);
        *r = f.imu_sqrt_info * res;
        if (want_jac) {
          jacobians->push_back(f.imu_sqrt_info * ji);
          jacobians->push_back(f.imu_sqrt_info * jj);
        }
        break;
      }
      case Factor::Type::kBiasWalk: {
        const NavState& si = nodes[index_of(f.ids[0])].state;
        const NavState& sj = nodes[index_of(f.ids[1])].state;
        *r = f.bias_walk_sqrt_info * (sj.bias() - si.bias());
        if (want_jac) {
          Eigen::MatrixXd ji = Eigen::MatrixXd::Zero(6, 15);
          ji.rightCols<6>() = -f.bias_walk_sqrt_info;
          Eigen::MatrixXd jj = Eigen::MatrixXd::Zero(6, 15);
          jj.rightCols<6>() = f.bias_walk_sqrt_info;
          jacobians->push_back(std::move(ji));
          jacobians->push_back(std::move(jj));
        }
        break;
      }
      case Factor::Type::kLidar: {
        const NavState& si = nodes[index_of(f.ids[0])].state;
        const NavState& sj = nodes[index_of(f.ids[1])].state;
        Mat615 ji, jj;
        const Vec6 res = lidar_residual(f.lidar, si, sj,
                                        want_jac ? &ji : nullptr,
                                        want_jac ? &jj : nullptr);
        *r = f.lidar_sqrt_info * res;
        if (want_jac) {
          jacobians->push_back(f.lidar_sqrt_info * ji);
          jacobians->push_back(f.lidar_sqrt_info * jj);
        }
        break;
      }
      case Factor::Type::kRadar: {
        const NavState& s = nodes[index_of(f.ids[0])].state;
        Eigen::Matrix<double, 1, 15> j;
        const double res = radar_residual(f.radar, s, config_.extrinsics,
                                          want_jac ? &j : nullptr);
        *r = Eigen::VectorXd::Constant(1, f.radar_sqrt_info * res);
        if (want_jac) jacobians->push_back(f.radar_sqrt_info * j);
        break;
      }
      case Factor::Type::kPrior: {
        // Gaussian frozen at marginalization time; the Jacobian still has to
        // account for the pose-block retraction of local_minus, or the
        // quadratic model degrades once states move away from the
        // linearization point.
        const int blocks = static_cast<int>(f.ids.size());
        Eigen::VectorXd d(blocks * NavState::kDof);
        for (int k = 0; k < blocks; ++k)
          d.segment(k * NavState::kDof, NavState::kDof) =
              nodes[index_of(f.ids[k])].state.local_minus(f.prior_lin[k]);
        *r = f.prior_sqrt_info * d - f.prior_offset;
        if (want_jac) {
          for (int k = 0; k < blocks; ++k) {
            Eigen::MatrixXd J =
                f.prior_sqrt_info.middleCols(k * NavState::kDof,
                                             NavState::kDof);
            // d log(T_lin^{-1} T exp(dx)) / d dx = Jr^{-1}(pose difference)
            J.leftCols<6>() =
                J.leftCols<6>() *
                se3_right_jacobian_inv(d.segment<6>(k * NavState::kDof));
            jacobians->push_back(std::move(J));
          }
        }
        break;
      }
    }
  }

  double factor_cost(const Factor& f, const Eigen::VectorXd& r) const {
    if (f.robust) return huber_cost(r.norm(), config_.huber_delta);
    return 0.5 * r.squaredNorm();
  }

  double evaluate_cost(const std::deque<Node>& nodes) const {
    double cost = 0.0;
    Eigen::VectorXd r;
    for (const auto& f : factors_) {
      linearize_factor(f, nodes, &r, nullptr);
      cost += factor_cost(f, r);
    }
    return cost;
  }

  double evaluate_cost(const std::vector<Node>& nodes) const {
    std::deque<Node> tmp(nodes.begin(), nodes.end());
    return evaluate_cost(tmp);
  }

  double linearize_all(std::vector<Eigen::Triplet<double>>* triplets,
                       Eigen::VectorXd* b) const {
    triplets->clear();
    b->setZero();
    double cost = 0.0;
    Eigen::VectorXd r;
    std::vector<Eigen::MatrixXd> jacobians;
    for (const auto& f : factors_) {
      linearize_factor(f, nodes_, &r, &jacobians);
      cost += factor_cost(f, r);
      double w = 1.0;
      if (f.robust) w = huber_weight(r.norm(), config_.huber_delta);
      const double sw = std::sqrt(w);
      r *= sw;
      for (std::size_t a = 0; a < f.ids.size(); ++a) {
        const int oa = static_cast<int>(index_of(f.ids[a])) * NavState::kDof;
        const Eigen::MatrixXd Ja = sw * jacobians[a];
        b->segment(oa, NavState::kDof) += Ja.transpose() * r;
        for (std::size_t c = 0; c < f.ids.size(); ++c) {
          const int oc = static_cast<int>(index_of(f.ids[c])) * NavState::kDof;
          const Eigen::MatrixXd block =
              Ja.transpose() * (sw * jacobians[c]);
          for (int i = 0; i < NavState::kDof; ++i)
            for (int jcol = 0; jcol < NavState::kDof; ++jcol)
              if (block(i, jcol) != 0.0)
                triplets->emplace_back(oa + i, oc + jcol, block(i, jcol));
        }
      }
    }
    return cost;
  }

  std::vector<Node> apply_step(const Eigen::VectorXd& step) const {
    std::vector<Node> out(nodes_.begin(), nodes_.end());
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k].state = out[k].state.retract(
          step.segment<NavState::kDof>(static_cast<int>(k) * NavState::kDof));
    return out;
  }

  Config config_;
  std::deque<Node> nodes_;
  std::vector<Factor> factors_;
  std::int64_t next_id_ = 0;
};

}  // namespace rlio
