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

#ifndef FACE_SOLVER_HPP_
#define FACE_SOLVER_HPP_

#include <optional>
#include <string>
#include <vector>

#include "face/core.hpp"
#include "face/error.hpp"

namespace face {

enum class Optimizer { kPgd, kAdam };
enum class LossVariant { kForwardKl, kReverseKl, kLogitMse };

struct SolverConfig {
  double lambda = 0.0;
  Optimizer optimizer = Optimizer::kAdam;
  double learning_rate = 5e-4;
  // When set (pgd only), the step is re-estimated every iteration as this
  // fraction of estimate_step_bound(...).joint and learning_rate is ignored.
  std::optional<double> auto_step_fraction;
  int max_iterations = 20000;
  double stop_epsilon = 1e-3;
  LossVariant loss_variant = LossVariant::kForwardKl;
  bool record_trace = false;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

void validate(const SolverConfig& cfg);

struct TracePoint {
  int iteration = 0;
  double mse = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

struct SolveResult {
  FactorPair factors;
  double final_mse = 0.0;
  double final_kl = 0.0;
  double final_total_loss = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<TracePoint> loss_trace;
};

// Raised when the loss becomes NaN/Inf; carries the trace up to the last
// finite iterate.
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, std::vector<TracePoint> trace)
      : Error(ErrorCode::kDiverged, what), trace_(std::move(trace)) {}
  const std::vector<TracePoint>& trace() const noexcept { return trace_; }

 private:
  std::vector<TracePoint> trace_;
};

struct FaceLoss {
  double total = 0.0;
  double recon = 0.0;  // 0.5 * ||A - U W^T||_F^2
  double align = 0.0;  // per-variant alignment term, mean over rows
};

struct FaceGradients {
  Matrix grad_u;
  Matrix grad_w;
};

// Objective bound to one (A, head) pair; the target predictions on A are
// computed once.
class FaceObjective {
 public:
  FaceObjective(const ActivationMatrix& a, const LinearHead& head, double lambda,
                LossVariant variant = LossVariant::kForwardKl);

  FaceLoss loss(const FactorPair& factors) const;
  FaceGradients gradients(const FactorPair& factors) const;

  // Gradient with respect to the reconstruction U W^T.
  Matrix reconstruction_gradient(const Matrix& reconstruction) const;

  const ActivationMatrix& activations() const noexcept { return *a_; }
  const LinearHead& head() const noexcept { return *head_; }
  const Matrix& target_probs() const noexcept { return target_probs_; }
  const Matrix& target_logits() const noexcept { return target_logits_; }
  double lambda() const noexcept { return lambda_; }
  LossVariant variant() const noexcept { return variant_; }

 private:
  double alignment(const Matrix& reconstruction) const;

  const ActivationMatrix* a_;
  const LinearHead* head_;
  double lambda_;
  LossVariant variant_;
  Matrix target_logits_;
  Matrix target_probs_;
};

FaceLoss face_loss(const ActivationMatrix& a, const FactorPair& factors, const LinearHead& head,
                   double lambda, LossVariant variant = LossVariant::kForwardKl);
FaceGradients face_gradients(const ActivationMatrix& a, const FactorPair& factors,
                             const LinearHead& head, double lambda,
                             LossVariant variant = LossVariant::kForwardKl);

// Step sizes 2 / L for curvature bounds L of the objective around `factors`:
// `u_only` with W held fixed, `w_only` with U held fixed, and `joint` for a
// simultaneous update of both.
struct StepBound {
  double u_only = 0.0;
  double w_only = 0.0;
  double joint = 0.0;
};

StepBound estimate_step_bound(const FaceObjective& objective, const FactorPair& factors);
StepBound estimate_step_bound(const ActivationMatrix& a, const LinearHead& head,
                              const FactorPair& factors, double lambda,
                              LossVariant variant = LossVariant::kForwardKl);

// Largest singular value of m.
double spectral_norm(const Matrix& m, int iterations = 100);

SolveResult solve_face(const ActivationMatrix& a, const LinearHead& head, const FactorPair& init,
                       const SolverConfig& cfg);

inline constexpr double kMultiplicativeGuard = 1e-12;

// Lee-Seung Frobenius updates. `head`, when given, is only used to report
// final_kl. The stop test is on the absolute change of 0.5 * ||A - U W^T||^2.
SolveResult solve_multiplicative(const ActivationMatrix& a, const FactorPair& init,
                                 int max_iterations, double stop_epsilon,
                                 const LinearHead* head = nullptr, bool record_trace = false);

}  // namespace face

#endif  // FACE_SOLVER_HPP_
