#pragma once

// A collection of trained primitives: new weights for an unseen task parameter
// by inverse-distance interpolation, and recognition of a demonstration by the
// correlation of its fitted weights with the stored ones.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dmp/discrete.hpp"
#include "dmp/errors.hpp"
#include "dmp/model.hpp"

namespace dmp {

struct ModelLibrary {
  std::vector<DmpModel> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  /// Same formulation and kernel count everywhere.
  void validate() const {
    if (entries.empty()) return;
    const DmpModel& first = entries.front();
    for (const DmpModel& e : entries) {
      e.validate();
      if (e.dmp.index() != first.dmp.index()) throw LayoutMismatch("library mixes formulations");
      if (e.forcing().kernels() != first.forcing().kernels() || e.forcing().dofs() != first.forcing().dofs()) {
        throw LayoutMismatch("library entries differ in kernel or DoF count");
      }
    }
  }
};

/// sum_o w_o / d_o over entries with d_o < d_max, divided by sum_o 1 / d_o.
/// A query at distance 0 returns that entry's weights (lowest index on ties).
inline ForcingModel interpolate_weights(const ModelLibrary& lib, const VectorXd& query, double d_max) {
  lib.validate();
  if (!(d_max > 0.0)) throw InvalidArgument("d_max must be positive");
  if (!query.allFinite()) throw InvalidArgument("query must be finite");
  MatrixXd acc;
  double norm = 0.0;
  const ForcingModel* base = nullptr;
  for (const DmpModel& e : lib.entries) {
    if (e.query.size() != query.size()) throw DimensionMismatch("query dimension differs from the library");
    const double d = (e.query - query).norm();
    if (d == 0.0) return e.forcing();
    if (!(d < d_max)) continue;
    if (!base) {
      base = &e.forcing();
      acc = MatrixXd::Zero(base->weights.rows(), base->weights.cols());
    }
    acc += e.forcing().weights / d;
    norm += 1.0 / d;
  }
  if (!base) throw NoNeighbors("no library entry lies within d_max of the query");
  ForcingModel out = *base;
  out.weights = acc / norm;
  return out;
}

/// Pearson correlation of the flattened weight matrices.
inline double similarity(const ForcingModel& a, const ForcingModel& b) {
  if (a.weights.rows() != b.weights.rows() || a.weights.cols() != b.weights.cols()) {
    throw DimensionMismatch("weight matrices differ in shape");
  }
  const auto n = static_cast<double>(a.weights.size());
  const Eigen::ArrayXd u = a.weights.reshaped().array() - a.weights.mean();
  const Eigen::ArrayXd v = b.weights.reshaped().array() - b.weights.mean();
  const double su = std::sqrt((u * u).sum() / n);
  const double sv = std::sqrt((v * v).sum() / n);
  if (!(su > 0.0) || !(sv > 0.0)) throw ZeroVariance("constant weight vector");
  return std::clamp((u * v).sum() / (n * su * sv), -1.0, 1.0);
}

struct Classification {
  std::string label;
  double score = 0.0;
  std::size_t index = 0;
};

/// Label of the stored entry whose weights correlate best with `model`.
inline Classification classify(const ModelLibrary& lib, const ForcingModel& model) {
  if (lib.empty()) throw InvalidArgument("library is empty");
  Classification best{"", -std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < lib.entries.size(); ++i) {
    const double s = similarity(lib.entries[i].forcing(), model);
    if (s > best.score) best = {lib.entries[i].label, s, i};
  }
  return best;
}

/// Fits the query with the first entry's settings, then classifies the fitted weights.
inline Classification classify(const ModelLibrary& lib, const Demonstration<VectorXd>& query) {
  if (lib.empty()) throw InvalidArgument("library is empty");
  lib.validate();
  const auto* ref = std::get_if<DiscreteDmp>(&lib.entries.front().dmp);
  if (!ref) throw InvalidArgument("demonstration queries need a library of discrete models");
  TrainOptions o;
  o.kernels = static_cast<int>(ref->forcing.kernels());
  o.variant = ref->variant;
  o.phase = ref->phase;
  o.kernel_kind = ref->forcing.layout.kind;
  o.alpha_z = ref->gains.alpha_z;
  o.beta_z = ref->gains.beta_z;
  return classify(lib, train_discrete(query, o).forcing);
}

}  // namespace dmp
