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

#include "face/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

namespace face {
namespace {

void check_finite_factors(const FactorPair& f, int iteration, std::vector<TracePoint>& trace) {
  if (!f.u.allFinite() || !f.w.allFinite()) {
    throw DivergedError("factors became non-finite at iteration " + std::to_string(iteration),
                        std::move(trace));
  }
}

double max_gram_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::MatrixXd gram = m.cols() <= m.rows() ? Eigen::MatrixXd(m.transpose() * m)
                                                     : Eigen::MatrixXd(m * m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  return std::max(eig.eigenvalues().maxCoeff(), 0.0);
}

}  // namespace

void validate(const SolverConfig& cfg) {
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) throw_config("lambda must be >= 0");
  if (!(cfg.learning_rate > 0.0)) throw_config("learning_rate must be > 0");
  if (!(cfg.stop_epsilon > 0.0)) throw_config("stop_epsilon must be > 0");
  if (cfg.max_iterations < 0) throw_config("max_iterations must be >= 0");
  if (cfg.auto_step_fraction) {
    if (cfg.optimizer != Optimizer::kPgd) throw_config("automatic step requires the pgd optimizer");
    if (!(*cfg.auto_step_fraction > 0.0 && *cfg.auto_step_fraction < 1.0)) {
      throw_config("auto step fraction must lie in (0, 1)");
    }
  }
}

double spectral_norm(const Matrix& m, int iterations) {
  if (std::min(m.rows(), m.cols()) <= 256) return std::sqrt(max_gram_eigenvalue(m));
  Eigen::VectorXd x(m.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = 1.0 + 0.01 * static_cast<double>(i % 7);
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd y = m.transpose() * (m * x);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    estimate = std::sqrt(norm);
    x = y / norm;
  }
  // Power iteration approaches from below.
  return estimate * 1.01;
}

FaceObjective::FaceObjective(const ActivationMatrix& a, const LinearHead& head, double lambda,
                             LossVariant variant)
    : a_(&a), head_(&head), lambda_(lambda), variant_(variant) {
  if (head.num_features() != a.cols()) {
    throw_shape("head expects " + std::to_string(head.num_features()) +
                " features, activations have " + std::to_string(a.cols()));
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw_config("lambda must be >= 0");
  target_logits_ = head.logits(a.data());
  target_probs_ = softmax_rows(target_logits_).probs();
}

double FaceObjective::alignment(const Matrix& reconstruction) const {
  const Matrix logits = head_->logits(reconstruction);
  switch (variant_) {
    case LossVariant::kForwardKl:
      return kl_rows(target_probs_, softmax_rows(logits).probs()).mean();
    case LossVariant::kReverseKl:
      return kl_rows(softmax_rows(logits).probs(), target_probs_).mean();
    case LossVariant::kLogitMse:
      return (logits - target_logits_).rowwise().squaredNorm().mean();
  }
  return 0.0;
}

FaceLoss FaceObjective::loss(const FactorPair& factors) const {
  validate_factors(factors, a_->rows(), a_->cols());
  const Matrix recon = factors.reconstruct();
  FaceLoss out;
  out.recon = 0.5 * (a_->data() - recon).squaredNorm();
  out.align = alignment(recon);
  out.total = out.recon + lambda_ * out.align;
  return out;
}

Matrix FaceObjective::reconstruction_gradient(const Matrix& reconstruction) const {
  const double n = static_cast<double>(a_->rows());
  Matrix grad = reconstruction - a_->data();
  if (lambda_ == 0.0) return grad;

  const Matrix logits = head_->logits(reconstruction);
  Matrix grad_logits;
  switch (variant_) {
    case LossVariant::kForwardKl: {
      grad_logits = (softmax_rows(logits).probs() - target_probs_) / n;
      break;
    }
    case LossVariant::kReverseKl: {
      const Matrix q = softmax_rows(logits).probs();
      const Vector kl = kl_rows(q, target_probs_);
      Matrix log_ratio = (q.array().log() - target_probs_.array().log()).matrix();
      log_ratio.colwise() -= kl;
      grad_logits = q.cwiseProduct(log_ratio) / n;
      break;
    }
    case LossVariant::kLogitMse: {
      grad_logits = 2.0 * (logits - target_logits_) / n;
      break;
    }
  }
  grad.noalias() += lambda_ * grad_logits * head_->weights();
  return grad;
}

FaceGradients FaceObjective::gradients(const FactorPair& factors) const {
  validate_factors(factors, a_->rows(), a_->cols());
  const Matrix g = reconstruction_gradient(factors.reconstruct());
  return {g * factors.w, g.transpose() * factors.u};
}

FaceLoss face_loss(const ActivationMatrix& a, const FactorPair& factors, const LinearHead& head,
                   double lambda, LossVariant variant) {
  return FaceObjective(a, head, lambda, variant).loss(factors);
}

FaceGradients face_gradients(const ActivationMatrix& a, const FactorPair& factors,
                             const LinearHead& head, double lambda, LossVariant variant) {
  return FaceObjective(a, head, lambda, variant).gradients(factors);
}

StepBound estimate_step_bound(const FaceObjective& objective, const FactorPair& factors) {
  const double n = static_cast<double>(objective.activations().rows());
  const double lambda = objective.lambda();
  const Matrix recon = factors.reconstruct();

  // Bound on the per-row Hessian of the alignment term with respect to logits.
  double logit_curvature = 0.0;
  if (lambda > 0.0) {
    switch (objective.variant()) {
      case LossVariant::kForwardKl:
        logit_curvature = 1.0;
        break;
      case LossVariant::kLogitMse:
        logit_curvature = 2.0;
        break;
      case LossVariant::kReverseKl: {
        const Matrix q = predict(objective.head(), recon).probs();
        const Vector kl = kl_rows(q, objective.target_probs());
        Matrix deviation = (q.array().log() - objective.target_probs().array().log()).matrix();
        deviation.colwise() -= kl;
        logit_curvature = 1.0 + 3.0 * deviation.cwiseAbs().maxCoeff();
        break;
      }
    }
  }
  const double head_sq = lambda > 0.0 ? max_gram_eigenvalue(objective.head().weights()) : 0.0;
  const double quad = 1.0 + lambda * logit_curvature * head_sq / n;

  const double u_sq = max_gram_eigenvalue(factors.u);
  const double w_sq = max_gram_eigenvalue(factors.w);

  StepBound out;
  out.u_only = 2.0 / (quad * w_sq);
  out.w_only = 2.0 / (quad * u_sq);

  // Joint update: d^2 L <= quad * ||dU W^T + U dW^T||^2 + 2 <G, dU dW^T>.
  const Matrix g = objective.reconstruction_gradient(recon);
  const double g_norm = spectral_norm(g);
  const double u_norm = std::sqrt(u_sq);
  const double w_norm = std::sqrt(w_sq);
  const double curvature0 = quad * (u_sq + w_sq) + g_norm;

  // Re-evaluate the bound on the ball reachable by one step of size 2 / L0.
  const double grad_norm = std::sqrt((g * factors.w).squaredNorm() +
                                     (g.transpose() * factors.u).squaredNorm());
  const double reach = 2.0 / curvature0 * grad_norm;
  const double u_far = u_norm + reach;
  const double w_far = w_norm + reach;
  const double g_far = g_norm + quad * (u_far + w_norm) * reach;
  const double curvature1 = quad * (u_far * u_far + w_far * w_far) + g_far;
  out.joint = 2.0 / std::max(curvature0, curvature1);
  return out;
}

StepBound estimate_step_bound(const ActivationMatrix& a, const LinearHead& head,
                              const FactorPair& factors, double lambda, LossVariant variant) {
  return estimate_step_bound(FaceObjective(a, head, lambda, variant), factors);
}

SolveResult solve_face(const ActivationMatrix& a, const LinearHead& head, const FactorPair& init,
                       const SolverConfig& cfg) {
  validate(cfg);
  validate_factors(init, a.rows(), a.cols());
  const FaceObjective objective(a, head, cfg.lambda, cfg.loss_variant);
  const double cells = static_cast<double>(a.rows() * a.cols());

  SolveResult result;
  result.factors = init;
  FactorPair& f = result.factors;

  const auto point_of = [&](int it, const FaceLoss& l) {
    return TracePoint{it, 2.0 * l.recon / cells, l.align, l.total};
  };
  std::vector<TracePoint> trace;
  FaceLoss current = objective.loss(f);
  if (!std::isfinite(current.total)) throw DivergedError("initial loss is non-finite", {});
  trace.push_back(point_of(0, current));

  Matrix m_u, v_u, m_w, v_w;
  if (cfg.optimizer == Optimizer::kAdam) {
    m_u = Matrix::Zero(f.u.rows(), f.u.cols());
    v_u = m_u;
    m_w = Matrix::Zero(f.w.rows(), f.w.cols());
    v_w = m_w;
  }

  int it = 0;
  while (it < cfg.max_iterations) {
    ++it;
    const Matrix g = objective.reconstruction_gradient(f.reconstruct());
    const Matrix grad_u = g * f.w;
    const Matrix grad_w = g.transpose() * f.u;
    if (!grad_u.allFinite() || !grad_w.allFinite()) {
      throw DivergedError("gradient became non-finite at iteration " + std::to_string(it),
                          std::move(trace));
    }

    if (cfg.optimizer == Optimizer::kPgd) {
      double step = cfg.learning_rate;
      if (cfg.auto_step_fraction) step = *cfg.auto_step_fraction * estimate_step_bound(objective, f).joint;
      f.u = (f.u - step * grad_u).cwiseMax(0.0);
      f.w = (f.w - step * grad_w).cwiseMax(0.0);
    } else {
      const double b1 = cfg.adam_beta1;
      const double b2 = cfg.adam_beta2;
      const double c1 = 1.0 - std::pow(b1, it);
      const double c2 = 1.0 - std::pow(b2, it);
      const auto adam_step = [&](Matrix& x, Matrix& m, Matrix& v, const Matrix& grad) {
        m = b1 * m + (1.0 - b1) * grad;
        v = b2 * v + (1.0 - b2) * grad.cwiseAbs2();
        if (!v.allFinite()) {
          throw DivergedError("Adam second moment overflowed at iteration " + std::to_string(it),
                              std::move(trace));
        }
        const auto denom = (v.array() / c2).sqrt() + cfg.adam_epsilon;
        x = (x.array() - cfg.learning_rate * (m.array() / c1) / denom).cwiseMax(0.0).matrix();
      };
      adam_step(f.u, m_u, v_u, grad_u);
      adam_step(f.w, m_w, v_w, grad_w);
    }
    assert(f.u.minCoeff() >= 0.0 && f.w.minCoeff() >= 0.0);
    check_finite_factors(f, it, trace);

    FaceLoss next;
    try {
      next = objective.loss(f);
    } catch (const Error& e) {
      throw DivergedError("loss evaluation failed at iteration " + std::to_string(it) + ": " +
                              e.what(),
                          std::move(trace));
    }
    if (!std::isfinite(next.total)) {
      throw DivergedError("loss became non-finite at iteration " + std::to_string(it),
                          std::move(trace));
    }
    trace.push_back(point_of(it, next));
    const double change = std::abs(next.total - current.total);
    current = next;
    if (change < cfg.stop_epsilon) {
      result.converged = true;
      break;
    }
  }

  result.iterations = it;
  result.final_mse = 2.0 * current.recon / cells;
  result.final_total_loss = current.total;
  result.final_kl = cfg.loss_variant == LossVariant::kForwardKl
                        ? current.align
                        : kl_rows(objective.target_probs(), predict(head, f.reconstruct()).probs())
                              .mean();
  if (cfg.record_trace) result.loss_trace = std::move(trace);
  return result;
}

SolveResult solve_multiplicative(const ActivationMatrix& a, const FactorPair& init,
                                 int max_iterations, double stop_epsilon, const LinearHead* head,
                                 bool record_trace) {
  validate_factors(init, a.rows(), a.cols());
  if (!(stop_epsilon > 0.0)) throw_config("stop_epsilon must be > 0");
  if (max_iterations < 0) throw_config("max_iterations must be >= 0");

  const Matrix& data = a.data();
  const double cells = static_cast<double>(a.rows() * a.cols());
  SolveResult result;
  result.factors = init;
  Matrix& u = result.factors.u;
  Matrix& w = result.factors.w;

  const auto recon_loss = [&] { return 0.5 * (data - u * w.transpose()).squaredNorm(); };
  std::vector<TracePoint> trace;
  double current = recon_loss();
  trace.push_back({0, 2.0 * current / cells, 0.0, current});

  int it = 0;
  while (it < max_iterations) {
    ++it;
    const Matrix wtw = w.transpose() * w;
    u = u.cwiseProduct((data * w).cwiseQuotient((u * wtw).array().matrix() +
                                                Matrix::Constant(u.rows(), u.cols(),
                                                                 kMultiplicativeGuard)));
    const Matrix utu = u.transpose() * u;
    w = w.cwiseProduct((data.transpose() * u)
                           .cwiseQuotient(w * utu + Matrix::Constant(w.rows(), w.cols(),
                                                                     kMultiplicativeGuard)));
    const double next = recon_loss();
    trace.push_back({it, 2.0 * next / cells, 0.0, next});
    const double change = std::abs(next - current);
    current = next;
    if (change < stop_epsilon) {
      result.converged = true;
      break;
    }
  }

  result.iterations = it;
  result.final_mse = 2.0 * current / cells;
  result.final_total_loss = current;
  if (head != nullptr) {
    result.final_kl = kl_divergence(predict(*head, data), predict(*head, u * w.transpose()));
  }
  if (record_trace) result.loss_trace = std::move(trace);
  return result;
}

}  // namespace face
