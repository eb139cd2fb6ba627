#pragma once

// Weight fitting: batch least squares over a whole demonstration, the
// recursive (RLS) form with a joint gain matrix, the per-kernel recursive form
// used for rhythmic movements, and feedback-driven weight adaptation.

#include <optional>

#include "dmp/basis.hpp"
#include "dmp/errors.hpp"

namespace dmp {

/// Stacked regressor rows, one per sample. `elapsed_fracs` is required for
/// time-indexed kernels; `amplitude` scales VonMises rows by r.
inline MatrixXd design_matrix(const KernelLayout& layout, const VectorXd& phases,
                              const std::optional<VectorXd>& elapsed_fracs = {}, double amplitude = 1.0) {
  if (elapsed_fracs && elapsed_fracs->size() != phases.size()) throw DimensionMismatch("phase and time grids differ");
  MatrixXd phi(phases.size(), layout.size());
  for (Eigen::Index t = 0; t < phases.size(); ++t) {
    std::optional<double> frac;
    if (elapsed_fracs) frac = (*elapsed_fracs)[t];
    phi.row(t) = regressor(layout, phases[t], frac).transpose();
  }
  if (layout.kind == KernelKind::VonMises) phi *= amplitude;
  return phi;
}

struct FitOptions {
  std::optional<VectorXd> elapsed_fracs;
  /// Tikhonov term added to the normal equations; unset means the minimum-norm least-squares solution.
  std::optional<double> ridge;
  double amplitude = 1.0;
  /// Per-sample weights applied to both sides of the system (weighted least squares).
  std::optional<VectorXd> row_weights;
};

struct BatchFit {
  ForcingModel model;
  VectorXd residual_rms;  ///< per DoF
};

/// Solves Phi w = F column-wise.
inline BatchFit batch_fit(const KernelLayout& layout, const VectorXd& phases, const MatrixXd& targets,
                          const FitOptions& options = {}) {
  layout.validate();
  if (targets.rows() != phases.size()) throw DimensionMismatch("targets and phases differ in length");
  if (targets.cols() < 1) throw DimensionMismatch("targets need at least one column");
  if (phases.size() < layout.size()) throw InvalidArgument("fewer samples than kernels");
  if (!targets.allFinite() || !phases.allFinite()) throw InvalidArgument("non-finite fit data");

  MatrixXd phi = design_matrix(layout, phases, options.elapsed_fracs, options.amplitude);
  MatrixXd rhs = targets;
  if (options.row_weights) {
    if (options.row_weights->size() != phases.size()) throw DimensionMismatch("row weights differ in length");
    phi = options.row_weights->asDiagonal() * phi;
    rhs = options.row_weights->asDiagonal() * rhs;
  }
  if (phi.cwiseAbs().maxCoeff() == 0.0) throw RankDeficient("every kernel row is zero");

  MatrixXd w;
  if (options.ridge) {
    if (!(*options.ridge >= 0.0)) throw InvalidArgument("ridge must be >= 0");
    MatrixXd a = phi.transpose() * phi;
    a.diagonal().array() += *options.ridge;
    Eigen::LDLT<MatrixXd> ldlt(a);
    if (ldlt.info() != Eigen::Success) throw RankDeficient("regularized normal equations are singular");
    w = ldlt.solve(phi.transpose() * rhs);
  } else {
    w = phi.completeOrthogonalDecomposition().solve(rhs);
  }
  if (!w.allFinite()) throw RankDeficient("least-squares solution is not finite");

  BatchFit fit;
  fit.model.layout = layout;
  fit.model.weights = std::move(w);
  fit.model.amplitude = options.amplitude;
  const MatrixXd residual = phi * fit.model.weights - rhs;
  fit.residual_rms = (residual.colwise().squaredNorm() / static_cast<double>(targets.rows())).cwiseSqrt().transpose();
  return fit;
}

// ---------------------------------------------------------------------------
// Recursive least squares over the full regressor row
// ---------------------------------------------------------------------------

struct RecursiveLearner {
  MatrixXd P;  ///< N x N gain
  MatrixXd w;  ///< N x J weights
  double lambda = 1.0;

  /// P0 = p0 I, w0 = 0.
  static RecursiveLearner make(Eigen::Index kernels, Eigen::Index dofs, double lambda = 1.0, double p0 = 1.0) {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidArgument("forgetting factor must lie in (0, 1]");
    if (!(p0 > 0.0)) throw InvalidArgument("initial gain must be positive");
    if (kernels < 1 || dofs < 1) throw InvalidArgument("learner needs kernels and DoFs");
    return {p0 * MatrixXd::Identity(kernels, kernels), MatrixXd::Zero(kernels, dofs), lambda};
  }
};

/// P <- (P - P phi phi^T P / (lambda + phi^T P phi)) / lambda; w <- w + P phi (f - phi^T w).
inline RecursiveLearner recursive_fit_step(const RecursiveLearner& s, const VectorXd& phi, const VectorXd& target) {
  if (phi.size() != s.P.rows()) throw DimensionMismatch("basis row length differs from kernel count");
  if (target.size() != s.w.cols()) throw DimensionMismatch("target length differs from DoF count");
  RecursiveLearner n = s;
  const VectorXd pphi = s.P * phi;
  const double denom = s.lambda + phi.dot(pphi);
  n.P = (s.P - pphi * pphi.transpose() / denom) / s.lambda;
  n.P = 0.5 * (n.P + n.P.transpose());
  const VectorXd err = target - s.w.transpose() * phi;
  n.w = s.w + (n.P * phi) * err.transpose();
  return n;
}

// ---------------------------------------------------------------------------
// Per-kernel recursive regression (rhythmic movements)
// ---------------------------------------------------------------------------

struct KernelwiseLearner {
  VectorXd P;  ///< one scalar gain per kernel
  MatrixXd w;  ///< N x J
  double lambda = 1.0;
  double amplitude = 1.0;  ///< r

  static KernelwiseLearner make(Eigen::Index kernels, Eigen::Index dofs, double lambda = 1.0, double amplitude = 1.0,
                                double p0 = 1.0) {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidArgument("forgetting factor must lie in (0, 1]");
    if (!(p0 > 0.0)) throw InvalidArgument("initial gain must be positive");
    if (kernels < 1 || dofs < 1) throw InvalidArgument("learner needs kernels and DoFs");
    return {VectorXd::Constant(kernels, p0), MatrixXd::Zero(kernels, dofs), lambda, amplitude};
  }
};

namespace detail {

// P <- (P - P^2 r^2 / (lambda/Psi + P r^2)) / lambda, written to stay finite as Psi -> 0.
inline double kernel_gain_update(double p, double psi, double r, double lambda) {
  return (p - p * p * r * r * psi / (lambda + p * r * r * psi)) / lambda;
}

inline void check_kernelwise(const KernelwiseLearner& s, const VectorXd& psi, const VectorXd& v) {
  if (psi.size() != s.P.size()) throw DimensionMismatch("activation count differs from kernel count");
  if (v.size() != s.w.cols()) throw DimensionMismatch("signal length differs from DoF count");
  if (!v.allFinite() || !psi.allFinite()) throw InvalidArgument("non-finite learner input");
}

}  // namespace detail

/// w_i <- w_i + Psi_i P_i r (f - w_i r) per kernel, with raw activations Psi.
inline KernelwiseLearner kernelwise_fit_step(const KernelwiseLearner& s, const VectorXd& psi, const VectorXd& target) {
  detail::check_kernelwise(s, psi, target);
  KernelwiseLearner n = s;
  const double r = s.amplitude;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    n.P[i] = detail::kernel_gain_update(s.P[i], psi[i], r, s.lambda);
    const VectorXd err = target - r * s.w.row(i).transpose();
    n.w.row(i) += (psi[i] * n.P[i] * r) * err.transpose();
  }
  return n;
}

/// w_i <- w_i + Psi_i P_i U for a caller-supplied feedback signal U (one value per DoF).
inline KernelwiseLearner feedback_adapt_step(const KernelwiseLearner& s, const VectorXd& psi, const VectorXd& feedback) {
  detail::check_kernelwise(s, psi, feedback);
  KernelwiseLearner n = s;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    n.P[i] = detail::kernel_gain_update(s.P[i], psi[i], s.amplitude, s.lambda);
    n.w.row(i) += (psi[i] * n.P[i]) * feedback.transpose();
  }
  return n;
}

inline KernelwiseLearner feedback_adapt_step(const KernelwiseLearner& s, const VectorXd& psi, double feedback) {
  return feedback_adapt_step(s, psi, VectorXd::Constant(s.w.cols(), feedback));
}

}  // namespace dmp
