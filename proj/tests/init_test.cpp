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

#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/SVD>

#include "face/init.hpp"
#include "face/metrics.hpp"
#include "test_support.hpp"

namespace face {
namespace {

using testing::uniform_matrix;

double orthonormality_error(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

double init_mse(const ActivationMatrix& a, const FactorPair& f) { return reconstruction_mse(a, f); }

TEST(TruncatedSvd, Diagonal) {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 3, 2, 1;
  const SvdResult svd = truncated_svd(a, 2);
  EXPECT_NEAR(svd.singular_values(0), 3.0, 1e-12);
  EXPECT_NEAR(svd.singular_values(1), 2.0, 1e-12);
  for (int k = 0; k < 2; ++k) {
    EXPECT_NEAR(std::abs(svd.left(k, k)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(svd.right(k, k)), 1.0, 1e-12);
    EXPECT_NEAR(svd.left.col(k).norm(), 1.0, 1e-12);
  }
}

TEST(TruncatedSvd, RankOne) {
  Vector u(4), v(3);
  u << 1, 2, 3, 4;
  v << 0.5, 1.5, 2.5;
  const Matrix a = u * v.transpose();
  const SvdResult svd = truncated_svd(a, 2);
  EXPECT_NEAR(svd.singular_values(0), u.norm() * v.norm(), 1e-12);
  EXPECT_NEAR(svd.singular_values(1), 0.0, 1e-12);
}

TEST(TruncatedSvd, MatchesFullDecompositionOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix a = uniform_matrix(8, 5, seed, -1.0, 1.0);
    const SvdResult svd = truncated_svd(a, 3);
    const Eigen::JacobiSVD<Eigen::MatrixXd> oracle(Eigen::MatrixXd(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sigma = oracle.singularValues();
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(svd.singular_values(k), sigma(k), 1e-10);

    const Matrix approx = svd.left * svd.singular_values.asDiagonal() * svd.right.transpose();
    const double residual = (a - approx).norm();
    const double optimal = sigma.tail(2).norm();
    EXPECT_NEAR(residual, optimal, 1e-8);
    EXPECT_LE(orthonormality_error(svd.left), 1e-8);
    EXPECT_LE(orthonormality_error(svd.right), 1e-8);
    for (int k = 0; k + 1 < 3; ++k) EXPECT_GE(svd.singular_values(k), svd.singular_values(k + 1));
  }
}

TEST(TruncatedSvd, WideAndTallAgree) {
  const Matrix a = uniform_matrix(6, 11, 42);
  const SvdResult wide = truncated_svd(a, 4);
  const SvdResult tall = truncated_svd(Matrix(a.transpose()), 4);
  EXPECT_LE((wide.singular_values - tall.singular_values).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(TruncatedSvd, Errors) {
  const Matrix a = uniform_matrix(5, 4, 1);
  EXPECT_THROW(truncated_svd(a, 5), Error);
  EXPECT_THROW(truncated_svd(a, 0), Error);
  EXPECT_FACE_ERROR(truncated_svd(uniform_matrix(30, 20, 2), 5, 1e-15, 1), ErrorCode::kConvergence);
}

TEST(Nndsvd, RankOneExact) {
  Vector u(5), v(4);
  u << 0.2, 1.0, 3.0, 0.7, 2.2;
  v << 1.5, 0.1, 0.9, 2.0;
  const ActivationMatrix a(u * v.transpose());
  const FactorPair f = nndsvd_init(a, 1);
  EXPECT_LE((f.reconstruct() - a.data()).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_GE(f.u.minCoeff(), 0.0);
  EXPECT_GE(f.w.minCoeff(), 0.0);
}

TEST(Nndsvd, DiagonalExact) {
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 4, 1;
  const FactorPair f = nndsvd_init(ActivationMatrix(d), 2);
  EXPECT_LE((f.reconstruct() - d).cwiseAbs().maxCoeff(), 1e-8);
  // Each concept lives on one axis.
  EXPECT_NEAR(f.u(1, 0) * f.w(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(f.u(0, 1) * f.w(0, 1), 0.0, 1e-12);
}

TEST(Nndsvd, BeatsRandomInitOnRandomMatrix) {
  const ActivationMatrix a(uniform_matrix(20, 10, 3));
  const double nndsvd = init_mse(a, nndsvd_init(a, 4));
  double random = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    random += init_mse(a, random_init(20, 10, 4, seed, a.data().mean()));
  }
  EXPECT_LE(nndsvd, random / 10.0);
}

TEST(Nndsvd, NonNegativeOnArbitraryInput) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Matrix m = uniform_matrix(12, 9, seed);
    // Sparse inputs exercise the zero-column fill.
    if (seed % 2 == 0) m = (m.array() > 0.7).select(m, 0.0);
    const Eigen::Index rank = 1 + static_cast<Eigen::Index>(seed % 8);
    const FactorPair f = nndsvd_init(ActivationMatrix(m), rank);
    EXPECT_NO_THROW(validate_factors(f, 12, 9));
    for (Eigen::Index k = 0; k < rank; ++k) {
      EXPECT_GT(f.u.col(k).maxCoeff(), 0.0);
      EXPECT_GT(f.w.col(k).maxCoeff(), 0.0);
    }
  }
}

TEST(Nndsvd, ZeroColumnsAreFilled) {
  // Rank one input: every concept beyond the first has nothing to carry.
  const Matrix a = Matrix::Ones(4, 3);
  const FactorPair f = nndsvd_init(ActivationMatrix(a), 3);
  for (Eigen::Index k = 1; k < 3; ++k) {
    EXPECT_TRUE(f.u.col(k).isConstant(kNndsvdZeroFill) || f.u.col(k).maxCoeff() > kNndsvdZeroFill);
    EXPECT_GT(f.u.col(k).minCoeff() + f.w.col(k).minCoeff(), 0.0);
  }
}

TEST(Nndsvd, BeatsRandomOnRankStructuredFixtures) {
  int wins = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const auto seed = static_cast<std::uint64_t>(t);
    const ActivationMatrix a(Matrix(uniform_matrix(30, 4, seed) * uniform_matrix(12, 4, seed + 500).transpose()));
    const double nndsvd = init_mse(a, nndsvd_init(a, 4));
    const double random = init_mse(a, random_init(30, 12, 4, seed + 900, a.data().mean()));
    if (nndsvd < random) ++wins;
  }
  EXPECT_GE(wins, 95);
}

TEST(Nndsvd, RankValidation) {
  const ActivationMatrix a(uniform_matrix(5, 4, 1));
  EXPECT_THROW(nndsvd_init(a, 5), Error);
}

TEST(RandomInit, DeterministicPositiveAndSeedSensitive) {
  const FactorPair a = random_init(40, 30, 5, 17, 2.0);
  const FactorPair b = random_init(40, 30, 5, 17, 2.0);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.w, b.w);
  EXPECT_GT(a.u.minCoeff(), 0.0);
  EXPECT_GT(a.w.minCoeff(), 0.0);
  const double cap = std::sqrt(2.0 / 5.0);
  EXPECT_LE(a.u.maxCoeff(), cap);
  EXPECT_LE(a.w.maxCoeff(), cap);

  const FactorPair c = random_init(40, 30, 5, 18, 2.0);
  const Eigen::Index differ = (a.u.array() != c.u.array()).count() + (a.w.array() != c.w.array()).count();
  EXPECT_GE(static_cast<double>(differ), 0.99 * static_cast<double>(a.u.size() + a.w.size()));
}

TEST(Initialize, Dispatch) {
  const ActivationMatrix a(uniform_matrix(10, 6, 9, 0.0, 4.0));
  InitConfig cfg;
  const FactorPair n = initialize(a, 3, cfg);
  const FactorPair direct = nndsvd_init(a, 3, cfg);
  EXPECT_EQ(n.u, direct.u);
  cfg.method = InitMethod::kRandom;
  cfg.seed = 4;
  const FactorPair r = initialize(a, 3, cfg);
  const FactorPair expected = random_init(10, 6, 3, 4, a.data().mean());
  EXPECT_EQ(r.u, expected.u);
  EXPECT_EQ(r.w, expected.w);
}

}  // namespace
}  // namespace face
