#pragma once

#include <Eigen/Core>
#include <filesystem>

#include "bodykit/anthro.hpp"
#include "bodykit/procgen.hpp"

namespace bodykit {

struct DatasetConfig {
  int n = 2000;
  std::uint64_t seed = 7;
  double pose_scale = 0.5;  // fraction of the joint limits used when sampling
};

// Subjects are stored column-flattened per record: shape params, the 36
// measurements, bind vertices, posed vertices and posed joint locations,
// all float32. Vertices are xyz-interleaved.
class Dataset {
 public:
  DatasetConfig config;
  std::uint64_t template_hash = 0;
  Registry registry;

  std::vector<int> train_idx, val_idx, test_idx;

  double norm_scale = 1.0;            // RMS of train-split bind coordinates
  Eigen::VectorXd anthro_mean;        // train-split statistics, meters
  Eigen::VectorXd anthro_std;

  Eigen::MatrixXf shape_params;  // n x P
  Eigen::MatrixXf anthro;        // n x 36
  Eigen::MatrixXf bind;          // n x 3V
  Eigen::MatrixXf posed;         // n x 3V
  Eigen::MatrixXf joints;        // n x 3J

  int size() const { return static_cast<int>(shape_params.rows()); }
  int vertex_count() const { return static_cast<int>(bind.cols()) / 3; }
  int joint_count() const { return static_cast<int>(joints.cols()) / 3; }

  int sex_of(int i) const { return shape_params(i, kAxisSex) > 0.5f ? 1 : 0; }
  AnthroVector anthro_of(int i) const;
  Mesh bind_mesh(int i) const;
  Mesh posed_mesh(int i) const;
  Pose pose_of(int i) const;

  void save(const std::filesystem::path& dir) const;
  static Dataset load(const std::filesystem::path& dir);
};

// Seeded procedural dataset: uniform shape parameters, one sampled pose
// per subject, measurements taken on the bind mesh, 80/10/10 split.
Dataset generate_dataset(const DatasetConfig& config);

// Points row-matrix of one flattened record (helper shared with training).
Points unflatten_points(const Eigen::VectorXf& row);
Eigen::VectorXf flatten_points(const Points& pts);

}  // namespace bodykit
