#pragma once

// A trained primitive of any formulation, plus optional library metadata.

#include <optional>
#include <string>
#include <variant>

#include "dmp/discrete.hpp"
#include "dmp/geometric.hpp"
#include "dmp/periodic.hpp"

namespace dmp {

using DmpVariant = std::variant<DiscreteDmp, PeriodicDmp, QuaternionDmp, RotationDmp, SpdDmp>;

struct DmpModel {
  DmpVariant dmp;
  std::string label;
  VectorXd query;  ///< task parameters for weight interpolation; may be empty

  const ForcingModel& forcing() const {
    return std::visit([](const auto& d) -> const ForcingModel& { return d.forcing; }, dmp);
  }
  ForcingModel& forcing() {
    return std::visit([](auto& d) -> ForcingModel& { return d.forcing; }, dmp);
  }

  void validate() const {
    std::visit([](const auto& d) { d.validate(); }, dmp);
    if (!query.allFinite()) throw InvalidArgument("query point must be finite");
  }

  bool operator==(const DmpModel&) const = default;
};

inline const char* formulation_name(const DmpVariant& v) {
  static constexpr const char* names[] = {"discrete", "periodic", "quaternion", "rotation", "spd"};
  return names[v.index()];
}

}  // namespace dmp
