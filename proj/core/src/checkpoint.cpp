#include <cstring>
#include <fstream>

#include "bodykit/params.hpp"
#include "bodykit/util.hpp"
#include "json.hpp"

namespace bodykit::ad {

using nlohmann::json;

void save_checkpoint(const std::filesystem::path& dir, const ParamStore<float>& params,
                     const std::string& meta_json) {
  std::filesystem::create_directories(dir);

  json manifest;
  manifest["format"] = "bodykit-checkpoint-v1";
  manifest["layout"] = "col-major";
  manifest["meta"] = meta_json.empty() ? json::object() : json::parse(meta_json);
  json tensors = json::array();

  std::vector<char> blob;
  for (const auto& [name, p] : params) {
    json t;
    t["name"] = name;
    t["rows"] = p.value.rows();
    t["cols"] = p.value.cols();
    t["dtype"] = "f32";
    t["trainable"] = p.trainable;
    t["offset"] = blob.size();
    tensors.push_back(t);
    const std::size_t bytes = sizeof(float) * static_cast<std::size_t>(p.value.size());
    const std::size_t at = blob.size();
    blob.resize(at + bytes);
    std::memcpy(blob.data() + at, p.value.data(), bytes);
  }
  manifest["tensors"] = tensors;
  manifest["weights_bytes"] = blob.size();

  write_binary(dir / "weights.bin", blob.data(), blob.size());
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& dir) {
  const json manifest = json::parse(read_file(dir / "manifest.json"));
  require(manifest.at("format") == "bodykit-checkpoint-v1",
          "unsupported checkpoint format in " + dir.string());
  const std::vector<char> blob = read_binary(dir / "weights.bin");

  LoadedCheckpoint out;
  out.meta_json = manifest.at("meta").dump();
  out.weights_hash = fnv1a(blob.data(), blob.size());
  for (const auto& t : manifest.at("tensors")) {
    const std::string name = t.at("name").get<std::string>();
    const Eigen::Index rows = t.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = t.at("cols").get<Eigen::Index>();
    const std::size_t offset = t.at("offset").get<std::size_t>();
    const std::size_t bytes = sizeof(float) * static_cast<std::size_t>(rows * cols);
    require(offset + bytes <= blob.size(), "checkpoint weights.bin truncated: " + name);
    auto& p = out.params.create(name, rows, cols, t.at("trainable").get<bool>());
    std::memcpy(p.value.data(), blob.data() + offset, bytes);
  }
  return out;
}

std::uint64_t checkpoint_hash(const std::filesystem::path& dir) {
  std::uint64_t h = fnv1a_file(dir / "manifest.json");
  const std::vector<char> blob = read_binary(dir / "weights.bin");
  return fnv1a(blob.data(), blob.size(), h);
}

}  // namespace bodykit::ad
