#pragma once

#include <cmath>
#include <optional>

#include "dmp/errors.hpp"
#include "dmp/manifold.hpp"

namespace dmp {

enum class KernelKind {
  GaussianPhase,  ///< exp(-h (x - c)^2) over the decaying phase x
  GaussianTime,   ///< exp(-(t - c)^2 / (2 sigma^2)) over normalized time t
  VonMises,       ///< exp(h (cos(phi - c) - 1)) over the periodic phase phi
};

/// Kernel centers and widths. `widths` holds h_i for GaussianPhase/VonMises
/// and sigma_i for GaussianTime.
struct KernelLayout {
  KernelKind kind = KernelKind::GaussianPhase;
  VectorXd centers;
  VectorXd widths;

  Eigen::Index size() const { return centers.size(); }

  void validate() const {
    const Eigen::Index n = centers.size();
    if (n < 2) throw InvalidArgument("kernel layout needs at least 2 kernels");
    if (widths.size() != n) throw DimensionMismatch("centers and widths differ in length");
    if (!centers.allFinite() || !widths.allFinite()) throw InvalidArgument("non-finite kernel parameters");
    if ((widths.array() <= 0.0).any()) throw InvalidArgument("kernel widths must be positive");
    for (Eigen::Index i = 1; i < n; ++i) {
      const double d = centers[i] - centers[i - 1];
      // Joined time layouts repeat the junction center, so GaussianTime only needs to be non-decreasing.
      const bool ok = kind == KernelKind::GaussianPhase ? d < 0.0 : kind == KernelKind::VonMises ? d > 0.0 : d >= 0.0;
      if (!ok) throw InvalidArgument("kernel centers are not monotone");
    }
  }

  bool operator==(const KernelLayout&) const = default;
};

/// Default layouts. GaussianPhase: c_i = exp(-alpha_x (i-1)/(N-1)), h_i = 1/(c_{i+1}-c_i)^2, h_N = h_{N-1}.
/// GaussianTime: centers on [0,1], sigma = 1/(2(N-1)). VonMises: centers on [0, 2 pi), h = 2.5 N^2/(2 pi)^2.
inline KernelLayout default_layout(KernelKind kind, int n, double alpha_x = std::log(1000.0)) {
  if (n < 2) throw InvalidArgument("kernel layout needs at least 2 kernels");
  KernelLayout layout;
  layout.kind = kind;
  layout.centers.resize(n);
  layout.widths.resize(n);
  switch (kind) {
    case KernelKind::GaussianPhase:
      for (int i = 0; i < n; ++i) layout.centers[i] = std::exp(-alpha_x * i / (n - 1.0));
      for (int i = 0; i + 1 < n; ++i) {
        const double d = layout.centers[i + 1] - layout.centers[i];
        layout.widths[i] = 1.0 / (d * d);
      }
      layout.widths[n - 1] = layout.widths[n - 2];
      break;
    case KernelKind::GaussianTime:
      for (int i = 0; i < n; ++i) layout.centers[i] = i / (n - 1.0);
      layout.widths.setConstant(1.0 / (2.0 * (n - 1.0)));
      break;
    case KernelKind::VonMises:
      for (int i = 0; i < n; ++i) layout.centers[i] = 2.0 * kPi * i / n;
      layout.widths.setConstant(2.5 * n * n / (4.0 * kPi * kPi));
      break;
  }
  return layout;
}

/// Raw kernel activations at `arg` (x, normalized time, or phi depending on kind).
inline VectorXd activations(const KernelLayout& layout, double arg) {
  const Eigen::Index n = layout.size();
  VectorXd psi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = layout.centers[i];
    const double w = layout.widths[i];
    switch (layout.kind) {
      case KernelKind::GaussianPhase:
        psi[i] = std::exp(-w * (arg - c) * (arg - c));
        break;
      case KernelKind::GaussianTime:
        psi[i] = std::exp(-(arg - c) * (arg - c) / (2.0 * w * w));
        break;
      case KernelKind::VonMises:
        psi[i] = std::exp(w * (std::cos(arg - c) - 1.0));
        break;
    }
  }
  return psi;
}

/// Normalized kernel row times the phase multiplier: x for GaussianPhase, s for
/// GaussianTime (kernels indexed by `elapsed_frac`), 1 for VonMises (kernels
/// indexed by phi = phase_value). Zero when the kernel sum underflows.
inline VectorXd regressor(const KernelLayout& layout, double phase_value, std::optional<double> elapsed_frac = {}) {
  double arg = phase_value;
  double mult = phase_value;
  if (layout.kind == KernelKind::GaussianTime) {
    if (!elapsed_frac) throw InvalidArgument("time-indexed kernels need the elapsed fraction");
    arg = *elapsed_frac;
  } else if (layout.kind == KernelKind::VonMises) {
    mult = 1.0;
  }
  VectorXd psi = activations(layout, arg);
  const double sum = psi.sum();
  if (!(sum > 1e-300)) return VectorXd::Zero(layout.size());
  return psi * (mult / sum);
}

/// Learned forcing term: kernels, an N x J weight matrix, and the periodic amplitude r.
struct ForcingModel {
  KernelLayout layout;
  MatrixXd weights;
  double amplitude = 1.0;

  Eigen::Index kernels() const { return layout.size(); }
  Eigen::Index dofs() const { return weights.cols(); }

  static ForcingModel zeros(KernelLayout layout, Eigen::Index dofs) {
    ForcingModel m;
    m.weights = MatrixXd::Zero(layout.size(), dofs);
    m.layout = std::move(layout);
    return m;
  }

  void validate() const {
    layout.validate();
    if (weights.rows() != layout.size()) throw DimensionMismatch("weights rows must equal kernel count");
    if (weights.cols() < 1) throw DimensionMismatch("forcing model needs at least one DoF");
    if (!weights.allFinite()) throw InvalidArgument("non-finite weights");
  }

  bool operator==(const ForcingModel&) const = default;
};

/// f = sum(w_i Psi_i) / sum(Psi_i) times x, s, or r depending on the kernel kind.
inline VectorXd eval_forcing(const ForcingModel& model, double phase_value, std::optional<double> elapsed_frac = {}) {
  VectorXd row = regressor(model.layout, phase_value, elapsed_frac);
  VectorXd f = model.weights.transpose() * row;
  if (model.layout.kind == KernelKind::VonMises) f *= model.amplitude;
  return f;
}

}  // namespace dmp
