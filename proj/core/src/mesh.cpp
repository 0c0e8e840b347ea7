#include "bodykit/mesh.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "bodykit/kdtree.hpp"
#include "bodykit/util.hpp"

namespace bodykit {

namespace {

// Directed-edge key for adjacency maps.
inline std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

double cotangent(const Eigen::Vector3d& apex, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d u = a - apex;
  const Eigen::Vector3d v = b - apex;
  const double cross = u.cross(v).norm();
  return u.dot(v) / cross;
}

}  // namespace

void Mesh::validate() const {
  const int v = vertex_count();
  std::map<std::pair<int, int>, int> edge_count;
  for (int f = 0; f < face_count(); ++f) {
    const int i = faces(f, 0), j = faces(f, 1), k = faces(f, 2);
    require(i >= 0 && j >= 0 && k >= 0 && i < v && j < v && k < v,
            "mesh: face " + std::to_string(f) + " references a vertex out of range");
    require(i != j && j != k && i != k,
            "mesh: face " + std::to_string(f) + " repeats a vertex index");
    for (const auto& e : {edge_key(i, j), edge_key(j, k), edge_key(k, i)}) {
      const int c = ++edge_count[e];
      require(c <= 2, "mesh: edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                          ") shared by more than two faces");
    }
  }
}

double LaplacianWeights::weight_between(int v, int n) const {
  for (int e = ring_offsets[v]; e < ring_offsets[v + 1]; ++e) {
    if (ring_vertices[e] == n) return weights[e];
  }
  return 0.0;
}

LaplacianWeights build_adjacency(const Mesh& mesh) {
  mesh.validate();
  const int v_count = mesh.vertex_count();
  std::map<std::pair<int, int>, double> edge_weight;
  for (int f = 0; f < mesh.face_count(); ++f) {
    const int idx[3] = {mesh.faces(f, 0), mesh.faces(f, 1), mesh.faces(f, 2)};
    Eigen::Vector3d p[3];
    for (int c = 0; c < 3; ++c) p[c] = mesh.vertices.row(idx[c]).transpose();
    const double area2 = (p[1] - p[0]).cross(p[2] - p[0]).norm();
    require(area2 > 1e-14, "mesh: face " + std::to_string(f) + " is degenerate (zero area)");
    // Each corner contributes half its cotangent to the opposite edge.
    for (int c = 0; c < 3; ++c) {
      const int a = idx[(c + 1) % 3], b = idx[(c + 2) % 3];
      edge_weight[edge_key(a, b)] += 0.5 * cotangent(p[c], p[(c + 1) % 3], p[(c + 2) % 3]);
    }
  }

  std::vector<std::vector<std::pair<int, double>>> rings(static_cast<std::size_t>(v_count));
  for (const auto& [e, w] : edge_weight) {
    rings[static_cast<std::size_t>(e.first)].push_back({e.second, w});
    rings[static_cast<std::size_t>(e.second)].push_back({e.first, w});
  }

  LaplacianWeights out;
  out.ring_offsets.resize(static_cast<std::size_t>(v_count) + 1, 0);
  for (int v = 0; v < v_count; ++v) {
    std::sort(rings[static_cast<std::size_t>(v)].begin(), rings[static_cast<std::size_t>(v)].end());
    out.ring_offsets[static_cast<std::size_t>(v) + 1] =
        out.ring_offsets[static_cast<std::size_t>(v)] +
        static_cast<int>(rings[static_cast<std::size_t>(v)].size());
    for (const auto& [n, w] : rings[static_cast<std::size_t>(v)]) {
      out.ring_vertices.push_back(n);
      out.weights.push_back(w);
    }
  }
  return out;
}

double laplacian_loss(const Points& vertices, const LaplacianWeights& weights) {
  require(static_cast<int>(vertices.rows()) == weights.vertex_count(),
          "laplacian_loss: vertex count does not match adjacency");
  double loss = 0.0;
  for (int v = 0; v < weights.vertex_count(); ++v) {
    for (int e = weights.ring_offsets[v]; e < weights.ring_offsets[v + 1]; ++e) {
      const int n = weights.ring_vertices[e];
      const double w = weights.weights[e];
      loss += w * w * (vertices.row(v) - vertices.row(n)).squaredNorm();
    }
  }
  return loss;
}

namespace {

double directed_mean_nn(const Points& from, const Points& to) {
  double total = 0.0;
  if (to.rows() >= 64) {
    const KdTree3 tree(to);
    for (int i = 0; i < from.rows(); ++i)
      total += tree.nearest(from.row(i).transpose()).second;
  } else {
    for (int i = 0; i < from.rows(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < to.rows(); ++j)
        best = std::min(best, (from.row(i) - to.row(j)).norm());
      total += best;
    }
  }
  return total / static_cast<double>(from.rows());
}

}  // namespace

double chamfer(const Points& a, const Points& b) {
  require(a.rows() > 0 && b.rows() > 0, "chamfer: empty point set");
  return 0.5 * (directed_mean_nn(a, b) + directed_mean_nn(b, a));
}

double p2p(const Points& a, const Points& b) {
  require(a.rows() == b.rows(), "p2p: vertex counts differ (" + std::to_string(a.rows()) + " vs " +
                                    std::to_string(b.rows()) + ")");
  require(a.rows() > 0, "p2p: empty mesh");
  return (a - b).rowwise().norm().mean();
}

double p2p(const Mesh& a, const Mesh& b) { return p2p(a.vertices, b.vertices); }

Mesh read_obj(const std::filesystem::path& path, int* skipped_records) {
  std::ifstream in(path);
  require(in.good(), "cannot open: " + path.string());
  std::vector<Eigen::Vector3d> verts;
  std::vector<Eigen::Vector3i> faces;
  int skipped = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag.empty() || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      require(static_cast<bool>(ss >> x >> y >> z),
              path.string() + ":" + std::to_string(line_no) + ": malformed vertex record");
      verts.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string token;
      while (ss >> token) {
        // "i", "i/t", "i/t/n" and "i//n" all start with the vertex index.
        const long v = std::strtol(token.c_str(), nullptr, 10);
        require(v >= 1 && v <= static_cast<long>(verts.size()),
                path.string() + ":" + std::to_string(line_no) + ": face index out of range");
        idx.push_back(static_cast<int>(v) - 1);
      }
      require(idx.size() == 3, path.string() + ":" + std::to_string(line_no) +
                                   ": only triangular faces are supported (got " +
                                   std::to_string(idx.size()) + " vertices)");
      faces.emplace_back(idx[0], idx[1], idx[2]);
    } else {
      ++skipped;
    }
  }
  require(!verts.empty(), path.string() + ": no vertices");
  if (skipped_records) *skipped_records = skipped;
  if (skipped > 0 && !skipped_records)
    std::fprintf(stderr, "warning: %s: skipped %d unsupported record(s)\n", path.string().c_str(),
                 skipped);

  Mesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(static_cast<Eigen::Index>(i)) = verts[i];
  mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (std::size_t i = 0; i < faces.size(); ++i) mesh.faces.row(static_cast<Eigen::Index>(i)) = faces[i];
  return mesh;
}

void write_obj(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(out.good(), "cannot open for write: " + path.string());
  char buf[128];
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    std::snprintf(buf, sizeof(buf), "v %.6f %.6f %.6f\n", mesh.vertices(v, 0), mesh.vertices(v, 1),
                  mesh.vertices(v, 2));
    out << buf;
  }
  for (int f = 0; f < mesh.face_count(); ++f) {
    out << "f " << mesh.faces(f, 0) + 1 << ' ' << mesh.faces(f, 1) + 1 << ' ' << mesh.faces(f, 2) + 1
        << '\n';
  }
  require(out.good(), "write failed: " + path.string());
}

}  // namespace bodykit
