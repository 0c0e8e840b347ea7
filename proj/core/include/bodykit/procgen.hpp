#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bodykit/mesh.hpp"
#include "bodykit/rng.hpp"

namespace bodykit {

// Shape space of the procedural humanoid. All axes live in [0,1] with
// 0.5 at the canonical template.
inline constexpr int kShapeParamCount = 12;

enum ShapeAxis : int {
  kAxisSex = 0,
  kAxisStature,
  kAxisBulk,
  kAxisArmLength,
  kAxisLegLength,
  kAxisUpperArmGirth,
  kAxisForearmGirth,
  kAxisThighGirth,
  kAxisCalfGirth,
  kAxisWaist,
  kAxisShoulderWidth,
  kAxisHeadScale,
};

struct ShapeParams {
  Eigen::Matrix<double, kShapeParamCount, 1> p;

  static ShapeParams canonical() {
    ShapeParams s;
    s.p.setConstant(0.5);
    return s;
  }
  static ShapeParams sample(Rng& rng) {
    ShapeParams s;
    for (int i = 0; i < kShapeParamCount; ++i) s.p[i] = rng.uniform();
    return s;
  }
  int sex_flag() const { return p[kAxisSex] > 0.5 ? 1 : 0; }
  void validate() const;
};

// Skeleton with per-vertex skinning weights. Joint locations for any
// morphed mesh come from the joint regressor (a fixed linear map over
// vertices), which keeps bind joints consistent with the surface.
struct SkinBinding {
  std::vector<int> parents;          // -1 for the root (hip)
  Points bind_joints;                // J x 3, canonical template
  Eigen::MatrixXd weights;           // V x J, row-stochastic, <= 4 nonzero per row
  Eigen::MatrixXd joint_regressor;   // J x V
  std::vector<std::string> joint_names;

  int joint_count() const { return static_cast<int>(parents.size()); }
  Points joints_of(const Points& vertices) const { return joint_regressor * vertices; }
};

// Global posed joint locations.
struct Pose {
  Points joints;  // J x 3
};

// Per-joint Euler rotation limits in degrees (zero rows lock an axis).
struct JointLimits {
  Eigen::Vector3d max_abs_deg;
};

struct BodyTemplate {
  Mesh mesh;  // canonical bind mesh (all shape params at 0.5)
  SkinBinding binding;
  std::map<std::string, std::vector<int>> loops;  // named closed edge rings
  std::map<std::string, int> landmarks;           // named vertices
  std::vector<std::string> vertex_part;           // body-part label per vertex
  std::vector<JointLimits> limits;                // per joint
  std::uint64_t hash = 0;                         // over canonical geometry
};

// The deterministic generalized-cylinder humanoid; built once and cached.
const BodyTemplate& body_template();

// Bind-pose mesh for shape parameters p (template topology preserved).
Mesh morph(const ShapeParams& params);

// Conservative per-parameter bound on |d vertex / d p_i| in meters,
// recorded for the morph continuity sweep.
Eigen::Matrix<double, kShapeParamCount, 1> morph_lipschitz_bounds();

// Per-joint intrinsic XYZ Euler angles in degrees.
using JointRotations = std::vector<Eigen::Vector3d>;

JointRotations identity_rotations();
JointRotations sample_rotations(Rng& rng, double scale = 1.0);
void check_rotation_limits(const JointRotations& rotations);

// Ground-truth rotational skinning through the kinematic tree. This is
// the oracle poser, distinct from the learned translation-offset path.
std::pair<Mesh, Pose> oracle_pose(const Mesh& bind, const SkinBinding& binding,
                                  const JointRotations& rotations);

}  // namespace bodykit
