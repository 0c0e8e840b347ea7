#include "bodykit/anthro.hpp"

#include <cmath>
#include <set>

#include "bodykit/util.hpp"
#include "json.hpp"

namespace bodykit {

using nlohmann::json;

std::vector<int> MeasurementDef::defining_vertices() const {
  if (kind == MeasureKind::kCircumference) return loop;
  return {landmarks[0], landmarks[1]};
}

int Registry::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (entries[static_cast<std::size_t>(i)].name == name) return i;
  return -1;
}

std::uint64_t Registry::hash() const {
  std::uint64_t h = template_hash;
  for (const auto& e : entries) {
    h = fnv1a(e.name.data(), e.name.size(), h);
    const int kind = static_cast<int>(e.kind);
    h = fnv1a(&kind, sizeof(kind), h);
    if (!e.loop.empty())
      h = fnv1a(e.loop.data(), e.loop.size() * sizeof(int), h);
    h = fnv1a(e.landmarks.data(), sizeof(e.landmarks), h);
  }
  return h;
}

std::string Registry::to_json() const {
  json out;
  out["template_hash"] = hex64(template_hash);
  out["entries"] = json::array();
  for (const auto& e : entries) {
    json je;
    je["name"] = e.name;
    je["kind"] = e.kind == MeasureKind::kCircumference ? "circumference"
                 : e.kind == MeasureKind::kLength      ? "length"
                                                       : "height";
    if (!e.loop.empty()) je["loop"] = e.loop;
    je["landmarks"] = e.landmarks;
    je["segments"] = e.segments;
    out["entries"].push_back(je);
  }
  return out.dump(2);
}

Registry Registry::from_json(const std::string& text) {
  const json in = json::parse(text);
  Registry reg;
  reg.template_hash = std::stoull(in.at("template_hash").get<std::string>(), nullptr, 16);
  for (const auto& je : in.at("entries")) {
    MeasurementDef e;
    e.name = je.at("name").get<std::string>();
    const std::string kind = je.at("kind").get<std::string>();
    e.kind = kind == "circumference" ? MeasureKind::kCircumference
             : kind == "length"      ? MeasureKind::kLength
                                     : MeasureKind::kHeight;
    if (je.contains("loop")) e.loop = je.at("loop").get<std::vector<int>>();
    const auto lm = je.at("landmarks").get<std::vector<int>>();
    e.landmarks = {lm[0], lm[1]};
    e.segments = je.at("segments").get<std::vector<std::string>>();
    reg.entries.push_back(std::move(e));
  }
  return reg;
}

namespace {

MeasurementDef circumference(const BodyTemplate& tpl, const std::string& name,
                             const std::string& loop, std::vector<std::string> segments) {
  MeasurementDef e;
  e.name = name;
  e.kind = MeasureKind::kCircumference;
  e.loop = tpl.loops.at(loop);
  e.segments = std::move(segments);
  return e;
}

MeasurementDef pair_measure(const BodyTemplate& tpl, const std::string& name, MeasureKind kind,
                            const std::string& a, const std::string& b,
                            std::vector<std::string> segments) {
  MeasurementDef e;
  e.name = name;
  e.kind = kind;
  e.landmarks = {tpl.landmarks.at(a), tpl.landmarks.at(b)};
  e.segments = std::move(segments);
  return e;
}

}  // namespace

Registry default_registry(const BodyTemplate& tpl) {
  Registry reg;
  reg.template_hash = tpl.hash;
  auto& e = reg.entries;
  const auto L = MeasureKind::kLength;
  const auto H = MeasureKind::kHeight;

  // Unilateral measures.
  e.push_back(circumference(tpl, "waist circumference", "waist", {"torso"}));
  e.push_back(circumference(tpl, "chest circumference", "chest", {"torso"}));
  e.push_back(circumference(tpl, "hip circumference", "hip", {"torso"}));
  e.push_back(pair_measure(tpl, "height", H, "crown", "heel_l", {}));
  e.push_back(pair_measure(tpl, "shoulder width", L, "shoulder_l", "shoulder_r", {"torso"}));
  e.push_back(pair_measure(tpl, "torso height from back", H, "back_hip", "back_top", {"torso"}));
  e.push_back(
      pair_measure(tpl, "torso height from front", H, "front_waist", "front_chest_top", {"torso"}));
  e.push_back(circumference(tpl, "head circumference", "head", {"head"}));
  e.push_back(circumference(tpl, "neck circumference", "neck", {"neck"}));
  e.push_back(pair_measure(tpl, "head height", H, "chin", "crown", {"head"}));
  e.push_back(pair_measure(tpl, "midline neck length", L, "neck_front_bottom", "neck_front_top",
                           {"neck"}));
  e.push_back(
      pair_measure(tpl, "lateral neck length", L, "neck_side_bottom", "jaw_l", {"neck", "head"}));

  // Limb measures, instantiated bilaterally.
  for (const std::string side : {"left", "right"}) {
    const std::string s = side == "left" ? "_l" : "_r";
    const std::string pre = side + " ";
    e.push_back(pair_measure(tpl, pre + "hand size", L, "hand_base" + s, "fingertip" + s,
                             {"hand" + s}));
    e.push_back(circumference(tpl, pre + "arm circumference", "arm" + s, {"upper_arm" + s}));
    e.push_back(
        pair_measure(tpl, pre + "arm length", L, "shoulder" + s, "elbow" + s, {"upper_arm" + s}));
    e.push_back(circumference(tpl, pre + "forearm circumference", "forearm" + s, {"forearm" + s}));
    e.push_back(
        pair_measure(tpl, pre + "forearm length", L, "elbow" + s, "wrist" + s, {"forearm" + s}));
    e.push_back(circumference(tpl, pre + "thigh circumference", "thigh" + s, {"thigh" + s}));
    e.push_back(
        pair_measure(tpl, pre + "thigh length", L, "thigh_top" + s, "knee" + s, {"thigh" + s}));
    e.push_back(circumference(tpl, pre + "calf circumference", "calf" + s, {"calf" + s}));
    e.push_back(pair_measure(tpl, pre + "calf length", L, "knee" + s, "ankle" + s, {"calf" + s}));
    e.push_back(
        pair_measure(tpl, pre + "foot width", L, "ball_in" + s, "ball_out" + s, {"foot" + s}));
    e.push_back(
        pair_measure(tpl, pre + "heel to ball length", L, "heel" + s, "ball_out" + s, {"foot" + s}));
    e.push_back(pair_measure(tpl, pre + "heel to toe length", L, "heel" + s, "toe" + s, {"foot" + s}));
  }

  require(reg.size() == kMeasureCount, "internal: registry size != 36");
  return reg;
}

Eigen::VectorXd measure(const Points& vertices, const Registry& registry) {
  const int v_count = static_cast<int>(vertices.rows());
  Eigen::VectorXd out(registry.size());
  for (int i = 0; i < registry.size(); ++i) {
    const MeasurementDef& e = registry.entries[static_cast<std::size_t>(i)];
    if (e.kind == MeasureKind::kCircumference) {
      double len = 0.0;
      const int n = static_cast<int>(e.loop.size());
      for (int k = 0; k < n; ++k) {
        const int a = e.loop[static_cast<std::size_t>(k)];
        const int b = e.loop[static_cast<std::size_t>((k + 1) % n)];
        require(a < v_count && b < v_count,
                "measure: mesh does not match registry topology (entry '" + e.name + "')");
        len += (vertices.row(a) - vertices.row(b)).norm();
      }
      out[i] = len;
    } else {
      require(e.landmarks[0] < v_count && e.landmarks[1] < v_count,
              "measure: mesh does not match registry topology (entry '" + e.name + "')");
      out[i] = (vertices.row(e.landmarks[0]) - vertices.row(e.landmarks[1])).norm();
    }
  }
  return out;
}

Eigen::VectorXd vertex_mask(const MeasurementDef& entry, const BodyTemplate& tpl, MaskMode mode) {
  const int v_count = tpl.mesh.vertex_count();
  Eigen::VectorXd mask(v_count);
  if (mode == MaskMode::kNone) {
    mask.setOnes();
    return mask;
  }
  mask.setZero();
  const std::set<std::string> segments(entry.segments.begin(), entry.segments.end());
  const auto& defs = entry.defining_vertices();
  for (int v = 0; v < v_count; ++v) {
    if (!segments.empty() && !segments.count(tpl.vertex_part[static_cast<std::size_t>(v)])) continue;
    double d_min = std::numeric_limits<double>::infinity();
    for (int d : defs)
      d_min = std::min(d_min, (tpl.mesh.vertices.row(v) - tpl.mesh.vertices.row(d)).norm());
    const double soft = std::exp(-d_min);
    mask[v] = mode == MaskMode::kSoft ? soft : (soft > 0.5 ? 1.0 : 0.0);
  }
  return mask;
}

}  // namespace bodykit
