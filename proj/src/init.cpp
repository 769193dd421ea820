/*
 * Copyright 2026 The FACE Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "face/init.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "face/error.hpp"
#include "random.hpp"

namespace face {
namespace {

using ColMatrix = Eigen::MatrixXd;

void check_rank(Eigen::Index n, Eigen::Index p, Eigen::Index rank) {
  if (rank < 1 || rank > std::min(n, p)) {
    throw_config("rank " + std::to_string(rank) + " outside [1, " +
                 std::to_string(std::min(n, p)) + "]");
  }
}

// Replaces `col` by a unit vector orthogonal to the first `filled` columns of
// `basis`, trying canonical directions in order.
void complete_basis(ColMatrix& basis, Eigen::Index filled, Eigen::Index col) {
  for (Eigen::Index e = 0; e < basis.rows(); ++e) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(basis.rows(), e);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < filled; ++j) v -= basis.col(j).dot(v) * basis.col(j);
    }
    const double norm = v.norm();
    if (norm > 0.5) {
      basis.col(col) = v / norm;
      return;
    }
  }
}

}  // namespace

SvdResult truncated_svd(const Matrix& a, Eigen::Index rank, double tolerance, int max_sweeps) {
  check_rank(a.rows(), a.cols(), rank);
  if (!(tolerance > 0.0)) throw_config("svd tolerance must be positive");
  if (!a.allFinite()) throw_domain("matrix contains NaN or Inf");

  const bool transposed = a.rows() < a.cols();
  const ColMatrix tall = transposed ? ColMatrix(a.transpose()) : ColMatrix(a);
  const Eigen::Index m = tall.rows();
  const Eigen::Index k = tall.cols();

  Eigen::HouseholderQR<ColMatrix> qr(tall);
  ColMatrix b = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  ColMatrix v = ColMatrix::Identity(k, k);

  double residual = 0.0;
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    residual = 0.0;
    for (Eigen::Index i = 0; i + 1 < k; ++i) {
      for (Eigen::Index j = i + 1; j < k; ++j) {
        const double alpha = b.col(i).squaredNorm();
        const double beta = b.col(j).squaredNorm();
        const double gamma = b.col(i).dot(b.col(j));
        if (alpha == 0.0 || beta == 0.0) continue;
        const double cosine = std::abs(gamma) / std::sqrt(alpha * beta);
        residual = std::max(residual, cosine);
        if (cosine <= tolerance) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Eigen::VectorXd bi = b.col(i);
        b.col(i) = c * bi - s * b.col(j);
        b.col(j) = s * bi + c * b.col(j);
        const Eigen::VectorXd vi = v.col(i);
        v.col(i) = c * vi - s * v.col(j);
        v.col(j) = s * vi + c * v.col(j);
      }
    }
    if (residual <= tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::kConvergence,
                "Jacobi SVD did not converge after " + std::to_string(max_sweeps) +
                    " sweeps (residual cosine " + std::to_string(residual) + ")");
  }

  Eigen::VectorXd sigma = b.colwise().norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return sigma(x) > sigma(y); });

  const double sigma_max = sigma(order[0]);
  const double negligible = sigma_max * static_cast<double>(k) * 1e-15;
  ColMatrix small_left(k, rank);
  ColMatrix right(k, rank);
  Eigen::VectorXd values(rank);
  for (Eigen::Index c = 0; c < rank; ++c) {
    const Eigen::Index src = order[static_cast<std::size_t>(c)];
    values(c) = sigma(src);
    right.col(c) = v.col(src);
    if (sigma(src) > negligible) {
      small_left.col(c) = b.col(src) / sigma(src);
    } else {
      values(c) = 0.0;
      complete_basis(small_left, c, c);
    }
  }

  ColMatrix thin_q = qr.householderQ() * ColMatrix::Identity(m, k);
  ColMatrix left = thin_q * small_left;

  const auto orthonormality_error = [](const ColMatrix& x) {
    return (x.transpose() * x - ColMatrix::Identity(x.cols(), x.cols())).cwiseAbs().maxCoeff();
  };
  const double ortho = std::max(orthonormality_error(left), orthonormality_error(right));
  if (ortho > 1e-8) {
    throw Error(ErrorCode::kConvergence,
                "singular vectors lost orthonormality (error " + std::to_string(ortho) + ")");
  }

  SvdResult out;
  out.singular_values = values;
  if (transposed) {
    out.left = right;
    out.right = left;
  } else {
    out.left = left;
    out.right = right;
  }
  return out;
}

FactorPair nndsvd_init(const ActivationMatrix& a, Eigen::Index rank, const InitConfig& cfg) {
  const SvdResult svd = truncated_svd(a.data(), rank, cfg.svd_tolerance, cfg.svd_max_iterations);
  const Eigen::Index n = a.rows();
  const Eigen::Index p = a.cols();

  FactorPair out{Matrix::Zero(n, rank), Matrix::Zero(p, rank)};

  // Perron-Frobenius: the leading pair of a non-negative matrix can be taken
  // non-negative; fix the sign by the dominant mass.
  Eigen::VectorXd u0 = svd.left.col(0);
  Eigen::VectorXd v0 = svd.right.col(0);
  if (u0.sum() + v0.sum() < 0.0) {
    u0 = -u0;
    v0 = -v0;
  }
  const double root0 = std::sqrt(svd.singular_values(0));
  out.u.col(0) = root0 * u0.cwiseMax(0.0);
  out.w.col(0) = root0 * v0.cwiseMax(0.0);

  for (Eigen::Index k = 1; k < rank; ++k) {
    const Eigen::VectorXd u = svd.left.col(k);
    const Eigen::VectorXd v = svd.right.col(k);
    const Eigen::VectorXd up = u.cwiseMax(0.0);
    const Eigen::VectorXd un = (-u).cwiseMax(0.0);
    const Eigen::VectorXd vp = v.cwiseMax(0.0);
    const Eigen::VectorXd vn = (-v).cwiseMax(0.0);
    const double up_norm = up.norm(), un_norm = un.norm();
    const double vp_norm = vp.norm(), vn_norm = vn.norm();
    const double positive_mass = up_norm * vp_norm;
    const double negative_mass = un_norm * vn_norm;

    const bool take_positive = positive_mass >= negative_mass;
    const double mass = take_positive ? positive_mass : negative_mass;
    if (mass <= 0.0) continue;
    const Eigen::VectorXd& cu = take_positive ? up : un;
    const Eigen::VectorXd& cv = take_positive ? vp : vn;
    const double u_norm = take_positive ? up_norm : un_norm;
    const double v_norm = take_positive ? vp_norm : vn_norm;
    const double scale = std::sqrt(svd.singular_values(k) * mass);
    out.u.col(k) = scale * cu / u_norm;
    out.w.col(k) = scale * cv / v_norm;
  }

  for (Eigen::Index k = 0; k < rank; ++k) {
    if (out.u.col(k).maxCoeff() <= 0.0) out.u.col(k).setConstant(kNndsvdZeroFill);
    if (out.w.col(k).maxCoeff() <= 0.0) out.w.col(k).setConstant(kNndsvdZeroFill);
  }
  return out;
}

FactorPair random_init(Eigen::Index n, Eigen::Index p, Eigen::Index rank, std::uint64_t seed,
                       double mean_value) {
  check_rank(n, p, rank);
  if (!(mean_value > 0.0) || !std::isfinite(mean_value)) {
    throw_domain("random init scale requires a positive mean");
  }
  const double scale = std::sqrt(mean_value / static_cast<double>(rank));
  detail::Rng rng(seed);
  FactorPair out{Matrix(n, rank), Matrix(p, rank)};
  for (Eigen::Index i = 0; i < out.u.size(); ++i) out.u.data()[i] = scale * rng.uniform();
  for (Eigen::Index i = 0; i < out.w.size(); ++i) out.w.data()[i] = scale * rng.uniform();
  return out;
}

FactorPair initialize(const ActivationMatrix& a, Eigen::Index rank, const InitConfig& cfg) {
  if (cfg.method == InitMethod::kNndsvd) return nndsvd_init(a, rank, cfg);
  const double mean = a.data().mean();
  return random_init(a.rows(), a.cols(), rank, cfg.seed, mean > 0.0 ? mean : 1.0);
}

}  // namespace face
