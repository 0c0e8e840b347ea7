#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "bodykit/mesh.hpp"
#include "bodykit/procgen.hpp"

namespace bodykit {

inline constexpr int kMeasureCount = 36;

enum class MeasureKind { kCircumference, kLength, kHeight };

// One tape-measure definition over the template topology.
struct MeasurementDef {
  std::string name;
  MeasureKind kind = MeasureKind::kLength;
  std::vector<int> loop;                // circumference: ordered closed vertex loop
  std::array<int, 2> landmarks = {0, 0};  // length/height: vertex pair
  std::vector<std::string> segments;    // body parts the measure belongs to; empty = whole body

  std::vector<int> defining_vertices() const;
};

struct Registry {
  std::vector<MeasurementDef> entries;
  std::uint64_t template_hash = 0;

  int size() const { return static_cast<int>(entries.size()); }
  int index_of(const std::string& name) const;  // -1 if absent
  std::uint64_t hash() const;

  std::string to_json() const;
  static Registry from_json(const std::string& text);
};

// The 36-entry registry over the procedural template: 12 unilateral
// measures plus 12 limb measures instantiated left and right.
Registry default_registry(const BodyTemplate& tpl = body_template());

// 36 measurements + sex flag; the 37-dim conditioning vector.
struct AnthroVector {
  Eigen::VectorXd a;  // 36, meters
  int sex = 0;        // 0 female, 1 male

  Eigen::VectorXd conditioning() const {
    Eigen::VectorXd c(a.size() + 1);
    c.head(a.size()) = a;
    c[a.size()] = static_cast<double>(sex);
    return c;
  }
};

// Polyline circumference over loops, Euclidean distance for landmark
// pairs. Throws if the mesh does not match the registry's topology.
Eigen::VectorXd measure(const Points& vertices, const Registry& registry);
inline Eigen::VectorXd measure(const Mesh& mesh, const Registry& registry) {
  return measure(mesh.vertices, registry);
}

enum class MaskMode { kSoft, kBinary, kNone };

// Per-vertex input masks for the measurement regressors. Within the
// entry's body-part segment the weight is exp(-d_min) to the defining
// vertices (binarized at 0.5 in binary mode); vertices outside the
// segment get zero. Mode kNone returns all ones.
Eigen::VectorXd vertex_mask(const MeasurementDef& entry, const BodyTemplate& tpl, MaskMode mode);

}  // namespace bodykit
