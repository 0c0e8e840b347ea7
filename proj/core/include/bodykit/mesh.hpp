#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

namespace bodykit {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3>;

// Fixed-topology triangle mesh, vertex positions in meters.
struct Mesh {
  Points vertices;  // V x 3
  Faces faces;      // F x 3

  int vertex_count() const { return static_cast<int>(vertices.rows()); }
  int face_count() const { return static_cast<int>(faces.rows()); }

  // Checks index bounds, face non-degeneracy (by indices) and that no
  // edge is shared by more than two faces. Throws on violation.
  void validate() const;
};

// Cotangent edge weights with the symmetric one-ring adjacency.
// Directed edges are stored CSR-style per vertex; weights satisfy
// w(v,n) == w(n,v).
struct LaplacianWeights {
  std::vector<int> ring_offsets;   // V + 1
  std::vector<int> ring_vertices;  // neighbor indices, grouped by vertex
  std::vector<double> weights;     // one per directed edge

  int vertex_count() const { return static_cast<int>(ring_offsets.size()) - 1; }
  int degree(int v) const { return ring_offsets[v + 1] - ring_offsets[v]; }
  double weight_between(int v, int n) const;  // 0 if not adjacent
};

// Half the sum of the two cotangents opposite each edge; boundary edges
// use the single available angle. Rejects degenerate (zero-area) faces,
// naming the face in the diagnostic.
LaplacianWeights build_adjacency(const Mesh& mesh);

// Sum over directed edges of || w(v,n) * (x_v - x_n) ||^2.
double laplacian_loss(const Points& vertices, const LaplacianWeights& weights);
inline double laplacian_loss(const Mesh& mesh, const LaplacianWeights& weights) {
  return laplacian_loss(mesh.vertices, weights);
}

// Symmetric mean nearest-neighbor distance between two point sets,
// unsquared, in meters. Sets with at least 64 points are queried through
// a kd-tree; smaller sets fall back to exhaustive search.
double chamfer(const Points& a, const Points& b);

// Mean per-vertex Euclidean distance between same-topology meshes.
double p2p(const Mesh& a, const Mesh& b);
double p2p(const Points& a, const Points& b);

// ASCII OBJ. Only `v` and triangular `f` records are honored; anything
// else is skipped (counted in *skipped_records when provided). Vertex
// coordinates round-trip to 6 decimal digits.
Mesh read_obj(const std::filesystem::path& path, int* skipped_records = nullptr);
void write_obj(const Mesh& mesh, const std::filesystem::path& path);

}  // namespace bodykit
