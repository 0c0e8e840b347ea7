#include "bodykit/procgen.hpp"

#include <Eigen/Geometry>
#include <array>
#include <cmath>
#include <numbers>

#include "bodykit/util.hpp"

namespace bodykit {

namespace {

// Joint indexing. Parents precede children so kinematic sweeps can run
// in index order.
enum Joint : int {
  kHip = 0,
  kSpine,
  kChest,
  kNeck,
  kHead,
  kShoulderL,
  kElbowL,
  kWristL,
  kShoulderR,
  kElbowR,
  kWristR,
  kHipL,
  kKneeL,
  kAnkleL,
  kHipR,
  kKneeR,
  kAnkleR,
  kJointCount
};

const std::array<int, kJointCount> kParents = {-1, kHip,      kSpine,  kChest,  kNeck, kChest,
                                               kShoulderL, kElbowL, kChest,  kShoulderR, kElbowR,
                                               kHip,       kHipL,   kKneeL,  kHip,  kHipR,
                                               kKneeR};

const std::array<const char*, kJointCount> kJointNames = {
    "hip",        "spine",      "chest",     "neck",    "head",       "shoulder_l",
    "elbow_l",    "wrist_l",    "shoulder_r", "elbow_r", "wrist_r",    "hip_l",
    "knee_l",     "ankle_l",    "hip_r",      "knee_r",  "ankle_r"};

// Derived morphology factors. Each is affine in one or two parameters,
// with all factors equal to 1 at the canonical point (p = 0.5).
struct Morphology {
  double h;         // longitudinal (stature) scale
  double g;         // global girth scale
  double g_soft;    // damped girth scale for head/neck/extremities
  double arm_len;   // arm segment length scale
  double leg_len;   // leg segment length scale
  double ua, fa;    // upper-arm / forearm girth
  double th, ca;    // thigh / calf girth
  double waist_f;   // waist girth factor
  double sw;        // shoulder half-width factor
  double head_f;    // head size factor
  double hip_f;     // pelvis width factor
  double chest_f;   // chest girth factor
  double neck_f;    // neck girth factor
  double hand_len;  // hand length scale
  double hip_x;     // leg stance half-width
};

Morphology derive(const ShapeParams& sp) {
  Eigen::Matrix<double, kShapeParamCount, 1> d = 2.0 * (sp.p.array() - 0.5).matrix();
  const double s = d[kAxisSex];  // -1 female ... +1 male
  Morphology m;
  m.h = 1.0 + 0.12 * d[kAxisStature] + 0.03 * s;
  m.g = 1.0 + 0.22 * d[kAxisBulk];
  m.g_soft = 1.0 + 0.5 * (m.g - 1.0);
  m.arm_len = (1.0 + 0.15 * d[kAxisArmLength]) * m.h;
  m.leg_len = (1.0 + 0.12 * d[kAxisLegLength]) * m.h;
  m.ua = (1.0 + 0.30 * d[kAxisUpperArmGirth]) * m.g * (1.0 + 0.05 * s);
  m.fa = (1.0 + 0.30 * d[kAxisForearmGirth]) * m.g;
  m.th = (1.0 + 0.28 * d[kAxisThighGirth]) * m.g * (1.0 - 0.04 * s);
  m.ca = (1.0 + 0.28 * d[kAxisCalfGirth]) * m.g;
  m.waist_f = (1.0 + 0.20 * d[kAxisWaist]) * (1.0 + 0.06 * s);
  m.sw = (1.0 + 0.12 * d[kAxisShoulderWidth]) * (1.0 + 0.10 * s);
  m.head_f = (1.0 + 0.10 * d[kAxisHeadScale]) * (1.0 + 0.02 * s);
  m.hip_f = 1.0 - 0.06 * s;
  m.chest_f = 1.0 + 0.05 * s;
  m.neck_f = 1.0 + 0.08 * s;
  m.hand_len = (1.0 + 0.10 * d[kAxisArmLength]) * m.h;
  m.hip_x = 0.092 * (1.0 - 0.05 * s) * (1.0 + 0.3 * (m.g - 1.0));
  return m;
}

struct SkinRef {
  int ja = 0, jb = 0;
  double t = 0.0;  // weight t on jb, 1-t on ja
};

struct Builder {
  std::vector<Eigen::Vector3d> verts;
  std::vector<Eigen::Vector3i> faces;
  std::vector<std::string> part;
  std::vector<SkinRef> skin;
  std::map<std::string, std::vector<int>> loops;
  std::map<std::string, int> landmarks;
  std::array<std::vector<int>, kJointCount> regressor_sets;

  int add_vertex(const Eigen::Vector3d& p, const std::string& label, const SkinRef& w) {
    verts.push_back(p);
    part.push_back(label);
    skin.push_back(w);
    return static_cast<int>(verts.size()) - 1;
  }

  // Elliptical ring of `segs` vertices around `center` in the (u, v)
  // plane; returns the index of the first vertex.
  int add_ring(const Eigen::Vector3d& center, double ru, double rv, const Eigen::Vector3d& u,
               const Eigen::Vector3d& v, int segs, const std::string& label, const SkinRef& w) {
    const int first = static_cast<int>(verts.size());
    for (int k = 0; k < segs; ++k) {
      const double a = 2.0 * std::numbers::pi * k / segs;
      add_vertex(center + std::cos(a) * ru * u + std::sin(a) * rv * v, label, w);
    }
    return first;
  }

  void connect(int ring_a, int ring_b, int segs) {
    for (int k = 0; k < segs; ++k) {
      const int k1 = (k + 1) % segs;
      faces.emplace_back(ring_a + k, ring_a + k1, ring_b + k);
      faces.emplace_back(ring_b + k, ring_a + k1, ring_b + k1);
    }
  }

  int add_cap(int ring, int segs, const Eigen::Vector3d& apex, const std::string& label,
              const SkinRef& w) {
    const int tip = add_vertex(apex, label, w);
    for (int k = 0; k < segs; ++k) faces.emplace_back(tip, ring + k, ring + (k + 1) % segs);
    return tip;
  }

  void register_loop(const std::string& name, int ring, int segs) {
    std::vector<int> ids(static_cast<std::size_t>(segs));
    for (int k = 0; k < segs; ++k) ids[static_cast<std::size_t>(k)] = ring + k;
    loops[name] = std::move(ids);
  }
};

struct TubeRing {
  Eigen::Vector3d center;
  double ru, rv;
  SkinRef w;
  const char* loop = nullptr;  // registered loop name, if any
};

// Builds one generalized cylinder; returns first-vertex index per ring.
std::vector<int> add_tube(Builder& b, const std::string& label, const std::vector<TubeRing>& rings,
                          const Eigen::Vector3d& u, const Eigen::Vector3d& v, int segs) {
  std::vector<int> starts;
  starts.reserve(rings.size());
  for (const auto& r : rings) {
    const int start = b.add_ring(r.center, r.ru, r.rv, u, v, segs, label, r.w);
    if (r.loop) b.register_loop(r.loop, start, segs);
    starts.push_back(start);
  }
  for (std::size_t i = 0; i + 1 < rings.size(); ++i)
    b.connect(starts[i], starts[i + 1], segs);
  return starts;
}

SkinRef rigid(int j) { return SkinRef{j, j, 0.0}; }
SkinRef blend(int a, int bj, double t) { return SkinRef{a, bj, t}; }

// Assembles the full body for one set of shape parameters.
BodyTemplate build_body(const ShapeParams& sp) {
  sp.validate();
  const Morphology m = derive(sp);
  Builder b;

  const Eigen::Vector3d ex(1, 0, 0), ey(0, 1, 0), ez(0, 0, 1);

  // ---- torso ----
  {
    struct Row {
      double y, rx, rz, extra;
      SkinRef w;
      const char* loop;
    };
    const double swx = 0.185 * m.sw;
    const std::vector<Row> rows = {
        {-0.12, 0.150, 0.108, m.hip_f, rigid(kHip), nullptr},
        {0.00, 0.163, 0.118, m.hip_f, rigid(kHip), "hip"},
        {0.10, 0.132, 0.102, m.waist_f, rigid(kSpine), "waist"},
        {0.22, 0.142, 0.106, 1.0, blend(kSpine, kChest, 0.5), nullptr},
        {0.32, 0.151, 0.111, m.chest_f, rigid(kChest), "chest"},
        {0.42, 0.158, 0.106, m.chest_f, rigid(kChest), nullptr},
        {0.47, 0.0, 0.100, 1.0, rigid(kChest), nullptr},   // rx patched below
        {0.50, 0.0, 0.092, 1.0, blend(kChest, kNeck, 0.3), nullptr},
    };
    std::vector<TubeRing> rings;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Row& r = rows[i];
      double rx = r.rx * m.g * r.extra;
      if (i == 6) rx = 0.170 * m.sw;
      if (i == 7) rx = 0.180 * m.sw;
      rings.push_back({Eigen::Vector3d(0, r.y * m.h, 0), rx, r.rz * m.g * (i >= 6 ? 1.0 : r.extra),
                       r.w, r.loop});
    }
    const auto starts = add_tube(b, "torso", rings, ex, ez, 16);
    b.add_cap(starts.front(), 16, Eigen::Vector3d(0, -0.155 * m.h, 0), "torso", rigid(kHip));
    b.add_cap(starts.back(), 16, Eigen::Vector3d(0, 0.52 * m.h, 0), "torso",
              blend(kChest, kNeck, 0.3));
    b.regressor_sets[kHip] = b.loops["hip"];
    b.regressor_sets[kSpine] = b.loops["waist"];
    b.regressor_sets[kChest] = b.loops["chest"];
    // torso landmarks: 16 segments, k=4 faces +z (front), k=12 faces -z
    b.landmarks["back_hip"] = starts[1] + 12;
    b.landmarks["back_top"] = starts[7] + 12;
    b.landmarks["front_waist"] = starts[2] + 4;
    b.landmarks["front_chest_top"] = starts[6] + 4;
  }

  // ---- neck ----
  {
    const double r = m.g_soft * m.neck_f;
    const std::vector<TubeRing> rings = {
        {Eigen::Vector3d(0, 0.50 * m.h, 0), 0.054 * r, 0.054 * r, blend(kChest, kNeck, 0.5), nullptr},
        {Eigen::Vector3d(0, 0.55 * m.h, 0), 0.050 * r, 0.050 * r, rigid(kNeck), "neck"},
        {Eigen::Vector3d(0, 0.60 * m.h, 0), 0.048 * r, 0.048 * r, blend(kNeck, kHead, 0.3), nullptr},
    };
    const auto starts = add_tube(b, "neck", rings, ex, ez, 8);
    b.regressor_sets[kNeck] = [&] {
      std::vector<int> ids;
      for (int k = 0; k < 8; ++k) ids.push_back(starts[0] + k);
      return ids;
    }();
    b.landmarks["neck_front_bottom"] = starts[0] + 2;  // 8 segments, k=2 faces +z
    b.landmarks["neck_front_top"] = starts[2] + 2;
    b.landmarks["neck_side_bottom"] = starts[0] + 0;
  }

  // ---- head ----
  {
    const double hf = m.head_f * (1.0 + 0.2 * (m.g - 1.0));
    const double y0 = 0.60 * m.h;
    const std::array<double, 7> y_rel = {0.0, 0.04, 0.09, 0.145, 0.19, 0.225, 0.245};
    const std::array<double, 7> radii = {0.050, 0.070, 0.086, 0.092, 0.088, 0.070, 0.045};
    std::vector<TubeRing> rings;
    for (int i = 0; i < 7; ++i) {
      SkinRef w = i == 0 ? blend(kNeck, kHead, 0.6) : rigid(kHead);
      rings.push_back({Eigen::Vector3d(0, y0 + y_rel[static_cast<std::size_t>(i)] * m.head_f * m.h, 0),
                       radii[static_cast<std::size_t>(i)] * hf, radii[static_cast<std::size_t>(i)] * hf, w,
                       i == 3 ? "head" : nullptr});
    }
    const auto starts = add_tube(b, "head", rings, ex, ez, 12);
    b.landmarks["chin"] =
        b.add_cap(starts.front(), 12, Eigen::Vector3d(0, y0 - 0.012 * m.h, 0), "head",
                  blend(kNeck, kHead, 0.6));
    b.landmarks["crown"] =
        b.add_cap(starts.back(), 12, Eigen::Vector3d(0, y0 + 0.256 * m.head_f * m.h, 0), "head",
                  rigid(kHead));
    b.landmarks["jaw_l"] = starts[0] + 0;
    b.regressor_sets[kHead] = [&] {
      std::vector<int> ids;
      for (int k = 0; k < 12; ++k) ids.push_back(starts[0] + k);
      return ids;
    }();
  }

  // ---- arms ----
  for (const auto& [suffix, sign, js, je, jw] :
       {std::tuple{"_l", 1.0, static_cast<int>(kShoulderL), static_cast<int>(kElbowL),
                   static_cast<int>(kWristL)},
        std::tuple{"_r", -1.0, static_cast<int>(kShoulderR), static_cast<int>(kElbowR),
                   static_cast<int>(kWristR)}}) {
    const std::string sfx(suffix);
    const double x0 = 0.185 * m.sw;
    const double y_arm = 0.455 * m.h;
    const double len_ua = 0.285 * m.arm_len;
    const double len_fa = 0.250 * m.arm_len;
    const double len_hand = 0.175 * m.hand_len;

    // upper arm
    {
      const std::array<double, 5> t = {0.0, 0.3, 0.55, 0.8, 1.0};
      const std::array<double, 5> r = {0.052, 0.050, 0.047, 0.043, 0.040};
      const std::array<SkinRef, 5> w = {rigid(js), rigid(js), blend(js, je, 0.3),
                                        blend(js, je, 0.7), blend(js, je, 0.95)};
      std::vector<TubeRing> rings;
      for (int i = 0; i < 5; ++i)
        rings.push_back({Eigen::Vector3d(sign * (x0 + t[static_cast<std::size_t>(i)] * len_ua), y_arm, 0),
                         r[static_cast<std::size_t>(i)] * m.ua, r[static_cast<std::size_t>(i)] * m.ua,
                         w[static_cast<std::size_t>(i)], nullptr});
      const auto starts = add_tube(b, "upper_arm" + sfx, rings, ey, ez, 8);
      b.register_loop("arm" + sfx, starts[1], 8);
      b.add_cap(starts.front(), 8, Eigen::Vector3d(sign * (x0 - 0.02), y_arm, 0), "upper_arm" + sfx,
                rigid(js));
      b.landmarks["shoulder" + sfx] = starts[0] + 0;  // 8 segments around (y,z): k=0 is +y
      b.landmarks["elbow" + sfx] = starts[4] + 0;
      b.regressor_sets[static_cast<std::size_t>(js)] = [&] {
        std::vector<int> ids;
        for (int k = 0; k < 8; ++k) ids.push_back(starts[0] + k);
        return ids;
      }();
    }
    // forearm
    const double x_elbow = x0 + len_ua;
    {
      const std::array<double, 5> t = {0.0, 0.3, 0.55, 0.8, 1.0};
      const std::array<double, 5> r = {0.040, 0.041, 0.037, 0.032, 0.028};
      const std::array<SkinRef, 5> w = {rigid(je), rigid(je), blend(je, jw, 0.3),
                                        blend(je, jw, 0.7), blend(je, jw, 0.95)};
      std::vector<TubeRing> rings;
      for (int i = 0; i < 5; ++i)
        rings.push_back(
            {Eigen::Vector3d(sign * (x_elbow + t[static_cast<std::size_t>(i)] * len_fa), y_arm, 0),
             r[static_cast<std::size_t>(i)] * m.fa, r[static_cast<std::size_t>(i)] * m.fa,
             w[static_cast<std::size_t>(i)], nullptr});
      const auto starts = add_tube(b, "forearm" + sfx, rings, ey, ez, 8);
      b.register_loop("forearm" + sfx, starts[1], 8);
      b.landmarks["wrist" + sfx] = starts[4] + 0;
      b.regressor_sets[static_cast<std::size_t>(je)] = [&] {
        std::vector<int> ids;
        for (int k = 0; k < 8; ++k) ids.push_back(starts[0] + k);
        return ids;
      }();
    }
    // hand
    const double x_wrist = x_elbow + len_fa;
    {
      const double fs = 1.0 + 0.5 * (m.fa - 1.0);
      const std::array<double, 3> t = {0.0, 0.5, 0.85};
      const std::array<double, 3> ru = {0.036, 0.034, 0.024};
      const std::array<double, 3> rv = {0.017, 0.016, 0.012};
      std::vector<TubeRing> rings;
      for (int i = 0; i < 3; ++i)
        rings.push_back(
            {Eigen::Vector3d(sign * (x_wrist + t[static_cast<std::size_t>(i)] * len_hand), y_arm, 0),
             ru[static_cast<std::size_t>(i)] * fs, rv[static_cast<std::size_t>(i)] * fs, rigid(jw),
             nullptr});
      const auto starts = add_tube(b, "hand" + sfx, rings, ey, ez, 8);
      b.landmarks["hand_base" + sfx] = starts[0] + 0;
      b.landmarks["fingertip" + sfx] =
          b.add_cap(starts.back(), 8,
                    Eigen::Vector3d(sign * (x_wrist + len_hand + 0.008), y_arm, 0), "hand" + sfx,
                    rigid(jw));
      b.regressor_sets[static_cast<std::size_t>(jw)] = [&] {
        std::vector<int> ids;
        for (int k = 0; k < 8; ++k) ids.push_back(starts[0] + k);
        return ids;
      }();
    }
  }

  // ---- legs ----
  for (const auto& [suffix, sign, jh, jk, ja] :
       {std::tuple{"_l", 1.0, static_cast<int>(kHipL), static_cast<int>(kKneeL),
                   static_cast<int>(kAnkleL)},
        std::tuple{"_r", -1.0, static_cast<int>(kHipR), static_cast<int>(kKneeR),
                   static_cast<int>(kAnkleR)}}) {
    const std::string sfx(suffix);
    const double y_hip = -0.04 * m.h;
    const double len_th = 0.455 * m.leg_len;
    const double len_ca = 0.385 * m.leg_len;
    const Eigen::Vector3d u = sign * ex;

    // thigh
    {
      const std::array<double, 6> t = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
      const std::array<double, 6> r = {0.088, 0.085, 0.079, 0.070, 0.062, 0.057};
      const std::array<SkinRef, 6> w = {rigid(jh),          rigid(jh),           rigid(jh),
                                        blend(jh, jk, 0.35), blend(jh, jk, 0.7), blend(jh, jk, 0.95)};
      std::vector<TubeRing> rings;
      for (int i = 0; i < 6; ++i)
        rings.push_back(
            {Eigen::Vector3d(sign * m.hip_x, y_hip - t[static_cast<std::size_t>(i)] * len_th, 0),
             r[static_cast<std::size_t>(i)] * m.th, r[static_cast<std::size_t>(i)] * m.th,
             w[static_cast<std::size_t>(i)], nullptr});
      const auto starts = add_tube(b, "thigh" + sfx, rings, u, ez, 12);
      b.register_loop("thigh" + sfx, starts[1], 12);
      b.landmarks["thigh_top" + sfx] = starts[0] + 0;
      b.landmarks["knee" + sfx] = starts[5] + 0;
      b.regressor_sets[static_cast<std::size_t>(jh)] = [&] {
        std::vector<int> ids;
        for (int k = 0; k < 12; ++k) ids.push_back(starts[0] + k);
        return ids;
      }();
    }
    const double y_knee = y_hip - len_th;
    // calf
    {
      const std::array<double, 6> t = {0.0, 0.15, 0.35, 0.6, 0.8, 1.0};
      const std::array<double, 6> r = {0.056, 0.061, 0.055, 0.044, 0.036, 0.032};
      const std::array<SkinRef, 6> w = {rigid(jk),          rigid(jk),           rigid(jk),
                                        blend(jk, ja, 0.35), blend(jk, ja, 0.7), blend(jk, ja, 0.95)};
      std::vector<TubeRing> rings;
      for (int i = 0; i < 6; ++i)
        rings.push_back(
            {Eigen::Vector3d(sign * m.hip_x, y_knee - t[static_cast<std::size_t>(i)] * len_ca, 0),
             r[static_cast<std::size_t>(i)] * m.ca, r[static_cast<std::size_t>(i)] * m.ca,
             w[static_cast<std::size_t>(i)], nullptr});
      const auto starts = add_tube(b, "calf" + sfx, rings, u, ez, 12);
      b.register_loop("calf" + sfx, starts[1], 12);
      b.landmarks["ankle" + sfx] = starts[5] + 0;
      b.regressor_sets[static_cast<std::size_t>(jk)] = [&] {
        std::vector<int> ids;
        for (int k = 0; k < 12; ++k) ids.push_back(starts[0] + k);
        return ids;
      }();
      // ankle regressor uses the bottom calf ring
      b.regressor_sets[static_cast<std::size_t>(ja)] = [&] {
        std::vector<int> ids;
        for (int k = 0; k < 12; ++k) ids.push_back(starts[5] + k);
        return ids;
      }();
    }
    const double y_ankle = y_knee - len_ca;
    // foot, built along +z
    {
      const double fg = 1.0 + 0.3 * (m.g - 1.0);
      const double y_f = y_ankle - 0.038 * m.h;
      const std::array<double, 4> z = {-0.055, 0.02, 0.115, 0.17};
      const std::array<double, 4> ru = {0.040, 0.046, 0.044, 0.028};
      const std::array<double, 4> rv = {0.026, 0.030, 0.026, 0.014};
      std::vector<TubeRing> rings;
      for (int i = 0; i < 4; ++i)
        rings.push_back({Eigen::Vector3d(sign * m.hip_x, y_f, z[static_cast<std::size_t>(i)] * m.h),
                         ru[static_cast<std::size_t>(i)] * fg, rv[static_cast<std::size_t>(i)] * fg,
                         rigid(ja), nullptr});
      const auto starts = add_tube(b, "foot" + sfx, rings, u, ey, 8);
      b.landmarks["heel" + sfx] =
          b.add_cap(starts.front(), 8,
                    Eigen::Vector3d(sign * m.hip_x, y_f - 0.004 * m.h, -0.073 * m.h), "foot" + sfx,
                    rigid(ja));
      b.landmarks["toe" + sfx] =
          b.add_cap(starts.back(), 8,
                    Eigen::Vector3d(sign * m.hip_x, y_f - 0.004 * m.h, 0.192 * m.h), "foot" + sfx,
                    rigid(ja));
      b.landmarks["ball_out" + sfx] = starts[2] + 0;
      b.landmarks["ball_in" + sfx] = starts[2] + 4;
    }
  }

  // ---- assemble ----
  BodyTemplate out;
  const int v_count = static_cast<int>(b.verts.size());
  out.mesh.vertices.resize(v_count, 3);
  for (int i = 0; i < v_count; ++i) out.mesh.vertices.row(i) = b.verts[static_cast<std::size_t>(i)];
  out.mesh.faces.resize(static_cast<Eigen::Index>(b.faces.size()), 3);
  for (std::size_t i = 0; i < b.faces.size(); ++i)
    out.mesh.faces.row(static_cast<Eigen::Index>(i)) = b.faces[i];
  out.loops = std::move(b.loops);
  out.landmarks = std::move(b.landmarks);
  out.vertex_part = std::move(b.part);

  SkinBinding& bind = out.binding;
  bind.parents.assign(kParents.begin(), kParents.end());
  bind.joint_names.assign(kJointNames.begin(), kJointNames.end());
  bind.weights = Eigen::MatrixXd::Zero(v_count, kJointCount);
  for (int i = 0; i < v_count; ++i) {
    const SkinRef& w = b.skin[static_cast<std::size_t>(i)];
    bind.weights(i, w.ja) += 1.0 - w.t;
    bind.weights(i, w.jb) += w.t;
  }
  bind.joint_regressor = Eigen::MatrixXd::Zero(kJointCount, v_count);
  for (int j = 0; j < kJointCount; ++j) {
    const auto& ids = b.regressor_sets[static_cast<std::size_t>(j)];
    require(!ids.empty(), "internal: joint regressor set missing");
    for (int v : ids) bind.joint_regressor(j, v) = 1.0 / static_cast<double>(ids.size());
  }
  bind.bind_joints = bind.joints_of(out.mesh.vertices);

  // Rotation limits: +-90 deg hinges at elbows and knees, +-45 deg per
  // axis elsewhere.
  out.limits.resize(kJointCount, JointLimits{Eigen::Vector3d(45, 45, 45)});
  out.limits[kElbowL] = JointLimits{Eigen::Vector3d(0, 90, 0)};
  out.limits[kElbowR] = JointLimits{Eigen::Vector3d(0, 90, 0)};
  out.limits[kKneeL] = JointLimits{Eigen::Vector3d(90, 0, 0)};
  out.limits[kKneeR] = JointLimits{Eigen::Vector3d(90, 0, 0)};

  out.hash = fnv1a(out.mesh.vertices.data(),
                   sizeof(double) * static_cast<std::size_t>(out.mesh.vertices.size()));
  out.hash = fnv1a(out.mesh.faces.data(),
                   sizeof(int) * static_cast<std::size_t>(out.mesh.faces.size()), out.hash);
  return out;
}

}  // namespace

void ShapeParams::validate() const {
  for (int i = 0; i < kShapeParamCount; ++i)
    require(p[i] >= 0.0 && p[i] <= 1.0, "shape parameter " + std::to_string(i) +
                                            " out of [0,1]: " + std::to_string(p[i]));
}

const BodyTemplate& body_template() {
  static const BodyTemplate tpl = build_body(ShapeParams::canonical());
  return tpl;
}

Mesh morph(const ShapeParams& params) { return build_body(params).mesh; }

Eigen::Matrix<double, kShapeParamCount, 1> morph_lipschitz_bounds() {
  Eigen::Matrix<double, kShapeParamCount, 1> b;
  b << 0.8, 0.8, 0.4, 0.6, 0.6, 0.3, 0.3, 0.3, 0.3, 0.4, 0.5, 0.4;
  return b;
}

JointRotations identity_rotations() {
  return JointRotations(kJointCount, Eigen::Vector3d::Zero());
}

JointRotations sample_rotations(Rng& rng, double scale) {
  const auto& limits = body_template().limits;
  JointRotations rot(kJointCount);
  for (int j = 0; j < kJointCount; ++j)
    for (int a = 0; a < 3; ++a)
      rot[static_cast<std::size_t>(j)][a] =
          rng.uniform(-1.0, 1.0) * limits[static_cast<std::size_t>(j)].max_abs_deg[a] * scale;
  return rot;
}

void check_rotation_limits(const JointRotations& rotations) {
  const auto& tpl = body_template();
  require(rotations.size() == static_cast<std::size_t>(tpl.binding.joint_count()),
          "rotations: expected " + std::to_string(tpl.binding.joint_count()) + " joints, got " +
              std::to_string(rotations.size()));
  for (std::size_t j = 0; j < rotations.size(); ++j)
    for (int a = 0; a < 3; ++a)
      require(std::abs(rotations[j][a]) <= tpl.limits[j].max_abs_deg[a] + 1e-9,
              "rotation limit exceeded at joint '" + tpl.binding.joint_names[j] + "' axis " +
                  std::to_string(a) + ": " + std::to_string(rotations[j][a]) + " deg");
}

std::pair<Mesh, Pose> oracle_pose(const Mesh& bind, const SkinBinding& binding,
                                  const JointRotations& rotations) {
  check_rotation_limits(rotations);
  const int joints = binding.joint_count();
  require(bind.vertex_count() == static_cast<int>(binding.weights.rows()),
          "oracle_pose: mesh does not match binding");

  const Points bind_joints = binding.joints_of(bind.vertices);
  const double deg = std::numbers::pi / 180.0;

  std::vector<Eigen::Matrix3d> rot(static_cast<std::size_t>(joints));
  for (int j = 0; j < joints; ++j) {
    const Eigen::Vector3d a = rotations[static_cast<std::size_t>(j)] * deg;
    rot[static_cast<std::size_t>(j)] =
        (Eigen::AngleAxisd(a.z(), Eigen::Vector3d::UnitZ()) *
         Eigen::AngleAxisd(a.y(), Eigen::Vector3d::UnitY()) *
         Eigen::AngleAxisd(a.x(), Eigen::Vector3d::UnitX()))
            .toRotationMatrix();
  }

  std::vector<Eigen::Matrix3d> lin(static_cast<std::size_t>(joints));
  std::vector<Eigen::Vector3d> trans(static_cast<std::size_t>(joints));
  for (int j = 0; j < joints; ++j) {
    const int p = binding.parents[static_cast<std::size_t>(j)];
    const Eigen::Vector3d bj = bind_joints.row(j).transpose();
    if (p < 0) {
      lin[static_cast<std::size_t>(j)] = rot[static_cast<std::size_t>(j)];
      trans[static_cast<std::size_t>(j)] = bj;
    } else {
      const Eigen::Vector3d offset = bj - bind_joints.row(p).transpose();
      lin[static_cast<std::size_t>(j)] =
          lin[static_cast<std::size_t>(p)] * rot[static_cast<std::size_t>(j)];
      trans[static_cast<std::size_t>(j)] =
          lin[static_cast<std::size_t>(p)] * offset + trans[static_cast<std::size_t>(p)];
    }
  }

  Mesh posed = bind;
  posed.vertices.setZero();
  for (int j = 0; j < joints; ++j) {
    const auto w = binding.weights.col(j);
    if ((w.array() == 0.0).all()) continue;
    const Eigen::Vector3d bj = bind_joints.row(j).transpose();
    const Points moved =
        (bind.vertices.rowwise() - bj.transpose()) * lin[static_cast<std::size_t>(j)].transpose();
    posed.vertices += w.asDiagonal() * (moved.rowwise() + trans[static_cast<std::size_t>(j)].transpose());
  }

  Pose pose;
  pose.joints.resize(joints, 3);
  for (int j = 0; j < joints; ++j) pose.joints.row(j) = trans[static_cast<std::size_t>(j)].transpose();
  return {std::move(posed), std::move(pose)};
}

}  // namespace bodykit
