#include "dpm/hand_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "dpm/error.hpp"

namespace dpm {

// ---------------------------------------------------------------------------
// Skeleton

Skeleton::Skeleton(std::vector<Joint> joints) : joints_(std::move(joints)) {
  const int n = static_cast<int>(joints_.size());
  if (n == 0) throw ConstructionError("skeleton has no joints");
  children_.assign(joints_.size(), {});
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const Joint& j = joints_[static_cast<std::size_t>(i)];
    if (j.id != i) throw ConstructionError(fmt::format("joint {} stored at index {}", j.id, i));
    if (!j.parent) {
      ++roots;
      root_ = i;
      continue;
    }
    const int p = *j.parent;
    if (p < 0 || p >= n || p == i) {
      throw ConstructionError(fmt::format("joint {} has invalid parent {}", i, p));
    }
    children_[static_cast<std::size_t>(p)].push_back(i);
  }
  if (roots != 1) throw ConstructionError(fmt::format("skeleton has {} roots", roots));

  // Breadth-first from the root; anything unreached sits on a cycle.
  order_.push_back(root_);
  for (std::size_t k = 0; k < order_.size(); ++k) {
    for (int c : children_[static_cast<std::size_t>(order_[k])]) order_.push_back(c);
  }
  if (static_cast<int>(order_.size()) != n) {
    throw ConstructionError("joint parent links contain a cycle");
  }

  std::vector<RigidTransform> local;
  local.reserve(joints_.size());
  for (const auto& j : joints_) local.push_back(j.rest_local);
  rest_world_ = forward_kinematics(local);
}

std::vector<RigidTransform> Skeleton::forward_kinematics(
    std::span<const RigidTransform> local) const {
  if (local.size() != joints_.size()) {
    throw InvalidArgument("forward_kinematics: transform count does not match skeleton");
  }
  std::vector<RigidTransform> world(joints_.size());
  for (int id : order_) {
    const auto i = static_cast<std::size_t>(id);
    const auto& parent = joints_[i].parent;
    world[i] = parent ? world[static_cast<std::size_t>(*parent)] * local[i] : local[i];
  }
  return world;
}

std::vector<RigidTransform> Skeleton::rest_local() const {
  std::vector<RigidTransform> local;
  local.reserve(joints_.size());
  for (const auto& j : joints_) local.push_back(j.rest_local);
  return local;
}

namespace {

// Rotation about +z that carries the bone axis (0,-1,0) onto `dir`.
Quat bone_rotation(const Vec3& dir) {
  const double angle = std::atan2(dir.x(), -dir.y());
  return axis_angle(Vec3::UnitZ(), -angle);
}

// Builds joints from world rest positions; each joint's frame points its
// local -y axis at its first child (tips inherit the parent frame).
Skeleton skeleton_from_world(const std::vector<Vec3>& positions,
                             const std::vector<std::optional<int>>& parents,
                             const std::vector<double>& radii) {
  const std::size_t n = positions.size();
  std::vector<int> first_child(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (parents[i] && first_child[static_cast<std::size_t>(*parents[i])] < 0) {
      first_child[static_cast<std::size_t>(*parents[i])] = static_cast<int>(i);
    }
  }
  std::vector<Quat> world_rot(n, Quat::Identity());
  for (std::size_t i = 0; i < n; ++i) {
    if (first_child[i] >= 0) {
      const Vec3 d = positions[static_cast<std::size_t>(first_child[i])] - positions[i];
      world_rot[i] = bone_rotation(d.normalized());
    } else if (parents[i]) {
      world_rot[i] = world_rot[static_cast<std::size_t>(*parents[i])];
    }
  }
  std::vector<Joint> joints(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RigidTransform world{world_rot[i], positions[i]};
    joints[i].id = static_cast<int>(i);
    joints[i].parent = parents[i];
    joints[i].radius_mm = radii[i];
    if (parents[i]) {
      const auto p = static_cast<std::size_t>(*parents[i]);
      joints[i].rest_local = RigidTransform{world_rot[p], positions[p]}.inverse() * world;
    } else {
      joints[i].rest_local = world;
    }
  }
  return Skeleton(std::move(joints));
}

}  // namespace

Skeleton Skeleton::hand(const Vec3& wrist_position) {
  // Offsets from the wrist in mm: x towards the pinky, y towards the wrist.
  static const std::array<Vec3, kHandJointCount> kOffsets = {{
      {0, 0, 0},
      {-25, -15, 0}, {-45, -35, 0}, {-58, -55, 0}, {-68, -72, 0},
      {-22, -85, 0}, {-25, -125, 0}, {-27, -150, 0}, {-28, -170, 0},
      {-3, -88, 0}, {-3, -132, 0}, {-3, -160, 0}, {-3, -182, 0},
      {16, -84, 0}, {18, -124, 0}, {20, -150, 0}, {21, -170, 0},
      {33, -76, 0}, {37, -106, 0}, {40, -125, 0}, {42, -142, 0},
  }};
  static const std::array<double, kHandJointCount> kRadii = {
      12.0,
      11.0, 10.0, 9.0, 8.0,
      9.0, 9.0, 8.0, 7.0,
      9.0, 9.0, 8.0, 7.0,
      8.5, 8.5, 7.5, 6.5,
      7.5, 7.5, 6.5, 6.0,
  };
  std::vector<Vec3> positions;
  std::vector<std::optional<int>> parents;
  for (int i = 0; i < kHandJointCount; ++i) {
    positions.push_back(wrist_position + kOffsets[static_cast<std::size_t>(i)]);
    if (i == 0) {
      parents.emplace_back(std::nullopt);
    } else if ((i - 1) % hand_joint::kJointsPerFinger == 0) {
      parents.emplace_back(hand_joint::kWrist);
    } else {
      parents.emplace_back(i - 1);
    }
  }
  return skeleton_from_world(positions, parents,
                             std::vector<double>(kRadii.begin(), kRadii.end()));
}

Skeleton Skeleton::single_bone(double length_mm, double radius_mm, const Vec3& root_position) {
  return skeleton_from_world({root_position, root_position + Vec3(0, -length_mm, 0)},
                             {std::nullopt, 0}, {radius_mm, radius_mm});
}

std::vector<Vec3> Pose::positions() const {
  std::vector<Vec3> out;
  out.reserve(joints.size());
  for (const auto& j : joints) out.push_back(j.translation);
  return out;
}

Pose rest_pose(const Skeleton& skeleton, double timestamp) {
  return Pose{timestamp, skeleton.rest_world()};
}

// ---------------------------------------------------------------------------
// Mesh generation

void HandMesh::validate(std::size_t joint_count) const {
  const auto n = static_cast<int>(vertices.size());
  if (uvs.size() != vertices.size() || weights.size() != vertices.size()) {
    throw ConstructionError("mesh attribute arrays differ in length");
  }
  for (const auto& t : triangles) {
    for (int i : t) {
      if (i < 0 || i >= n) throw ConstructionError("triangle index out of range");
    }
  }
  for (const auto& uv : uvs) {
    if (!(uv.x() >= 0.0 && uv.x() <= 1.0 && uv.y() >= 0.0 && uv.y() <= 1.0)) {
      throw ConstructionError("uv outside [0,1]");
    }
  }
  for (const auto& w : weights) {
    double sum = 0.0;
    for (int k = 0; k < w.count; ++k) {
      const auto& e = w.entries[static_cast<std::size_t>(k)];
      if (e.weight < 0.0) throw ConstructionError("negative skin weight");
      if (e.joint < 0 || static_cast<std::size_t>(e.joint) >= joint_count) {
        throw ConstructionError("skin weight references a missing joint");
      }
      sum += e.weight;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw ConstructionError("skin weights do not sum to one");
  }
  for (const auto& s : seams) {
    if (s.a < 0 || s.a >= n || s.b < 0 || s.b >= n) {
      throw ConstructionError("seam edge index out of range");
    }
  }
}

namespace {

struct Bone {
  Vec3 a, b;
  int joint;   // the parent joint that drives the bone
  int child;
};

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Signed power used for the superellipsoid palm.
double spow(double v, double e) { return std::copysign(std::pow(std::abs(v), e), v); }

struct Tessellation {
  int around = 4;  // subdivisions around a capsule (even)
  int rows = 3;    // rows along a capsule, poles included
};

int columns(int around, UvAtlas atlas) {
  return atlas == UvAtlas::kSideSeams ? around + 2 : around + 1;
}

int palm_rows(const Tessellation& t) { return 2 * t.rows - 1; }

int vertex_count(const Tessellation& t, int capsules, bool palm, UvAtlas atlas) {
  int count = capsules * t.rows * columns(t.around, atlas);
  if (palm) count += palm_rows(t) * columns(2 * t.around, atlas);
  return count;
}

Tessellation choose_tessellation(int target, int capsules, bool palm, UvAtlas atlas) {
  Tessellation best;
  long best_err = std::numeric_limits<long>::max();
  double best_shape = std::numeric_limits<double>::max();
  for (int around = 4; around <= 64; around += 2) {
    for (int rows = 3; rows <= 64; ++rows) {
      const Tessellation t{around, rows};
      const long err = std::labs(static_cast<long>(vertex_count(t, capsules, palm, atlas)) - target);
      const double shape = std::abs(rows - 0.75 * around);
      if (err < best_err || (err == best_err && shape < best_shape)) {
        best = t;
        best_err = err;
        best_shape = shape;
      }
    }
  }
  return best;
}

class MeshBuilder {
 public:
  MeshBuilder(HandMesh& mesh, UvAtlas atlas, int total_islands)
      : mesh_(mesh), atlas_(atlas),
        grid_(static_cast<int>(std::ceil(std::sqrt(static_cast<double>(total_islands))))) {}

  // `surface(row_fraction, theta)` returns the vertex position; theta = pi/2
  // faces the camera. Rows 0 and rows-1 are poles.
  template <typename Surface>
  std::vector<int> add_part(int rows, int around, const Surface& surface) {
    const int first = static_cast<int>(mesh_.vertices.size());
    struct Island {
      int col0, col1;
      double theta0, theta_span;
    };
    std::vector<Island> islands;
    const double two_pi = 2.0 * std::numbers::pi;
    if (atlas_ == UvAtlas::kSideSeams) {
      const int half = around / 2;
      islands.push_back({0, half, 0.0, std::numbers::pi});
      islands.push_back({half + 1, 2 * half + 1, std::numbers::pi, std::numbers::pi});
    } else {
      islands.push_back({0, around, -0.5 * std::numbers::pi, two_pi});
    }
    const int cols = columns(around, atlas_);
    for (int k = 0; k < rows; ++k) {
      const double rf = static_cast<double>(k) / static_cast<double>(rows - 1);
      for (const auto& isl : islands) {
        const auto [u0, v0, size] = island_rect(next_island_ + (&isl - islands.data()));
        const int span = isl.col1 - isl.col0;
        for (int c = 0; c <= span; ++c) {
          const double cf = static_cast<double>(c) / static_cast<double>(span);
          mesh_.vertices.push_back(surface(rf, isl.theta0 + cf * isl.theta_span));
          mesh_.uvs.emplace_back(u0 + cf * size, v0 + rf * size);
        }
      }
    }
    auto idx = [&](int k, int c) { return first + k * cols + c; };
    for (const auto& isl : islands) {
      for (int k = 0; k + 1 < rows; ++k) {
        for (int c = isl.col0; c < isl.col1; ++c) {
          const int v00 = idx(k, c), v10 = idx(k, c + 1);
          const int v01 = idx(k + 1, c), v11 = idx(k + 1, c + 1);
          if (k != 0) mesh_.triangles.push_back({v00, v10, v11});
          if (k + 1 != rows - 1) mesh_.triangles.push_back({v00, v11, v01});
        }
        mesh_.seams.push_back({idx(k, isl.col0), idx(k + 1, isl.col0)});
        mesh_.seams.push_back({idx(k, isl.col1), idx(k + 1, isl.col1)});
      }
    }
    next_island_ += static_cast<int>(islands.size());
    mesh_.island_count = next_island_;
    std::vector<int> ids(static_cast<std::size_t>(rows * cols));
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = first + static_cast<int>(i);
    return ids;
  }

 private:
  struct Rect {
    double u0, v0, size;
  };
  Rect island_rect(long island) const {
    const double cell = 1.0 / grid_;
    const double pad = 0.05 * cell;
    const auto gx = static_cast<double>(island % grid_);
    const auto gy = static_cast<double>(island / grid_);
    return {gx * cell + pad, gy * cell + pad, cell - 2.0 * pad};
  }

  HandMesh& mesh_;
  UvAtlas atlas_;
  int grid_;
  int next_island_ = 0;
};

VertexWeights weights_from_bones(const Vec3& v, const std::vector<const Bone*>& candidates) {
  struct Near {
    double d;
    int joint;
  };
  std::vector<Near> near;
  near.reserve(candidates.size());
  for (const Bone* b : candidates) near.push_back({segment_distance(v, b->a, b->b), b->joint});
  std::stable_sort(near.begin(), near.end(), [](const Near& l, const Near& r) { return l.d < r.d; });

  VertexWeights w;
  const std::size_t take = std::min<std::size_t>(2, near.size());
  double total = 0.0;
  std::array<double, 2> raw{};
  for (std::size_t i = 0; i < take; ++i) {
    raw[i] = 1.0 / std::pow(near[i].d + 1e-3, 4.0);
    total += raw[i];
  }
  for (std::size_t i = 0; i < take; ++i) {
    const double weight = raw[i] / total;
    bool merged = false;
    for (int k = 0; k < w.count; ++k) {
      auto& e = w.entries[static_cast<std::size_t>(k)];
      if (e.joint == near[i].joint) {
        e.weight += weight;
        merged = true;
      }
    }
    if (!merged) w.entries[static_cast<std::size_t>(w.count++)] = {near[i].joint, weight};
  }
  // Renormalise so the sum is 1 to rounding.
  double sum = 0.0;
  for (int k = 0; k < w.count; ++k) sum += w.entries[static_cast<std::size_t>(k)].weight;
  for (int k = 0; k < w.count; ++k) w.entries[static_cast<std::size_t>(k)].weight /= sum;
  return w;
}

}  // namespace

HandMesh generate_hand_mesh(const Skeleton& skeleton, int target_vertex_count, UvAtlas atlas) {
  if (target_vertex_count < 100) throw InvalidArgument("target vertex count must be >= 100");
  const auto& world = skeleton.rest_world();
  const int root = skeleton.root();
  const bool has_palm = skeleton.children(root).size() >= 3;

  std::vector<Bone> bones;
  for (const auto& j : skeleton.joints()) {
    if (!j.parent) continue;
    const auto p = static_cast<std::size_t>(*j.parent);
    bones.push_back({world[p].translation, world[static_cast<std::size_t>(j.id)].translation,
                     *j.parent, j.id});
  }
  auto bone_ending_at = [&](int joint) -> const Bone* {
    for (const auto& b : bones) {
      if (b.child == joint) return &b;
    }
    return nullptr;
  };
  std::vector<const Bone*> capsule_bones;
  std::vector<const Bone*> palm_bones;
  for (const auto& b : bones) {
    const bool palm_bone = has_palm && b.joint == root;
    (palm_bone ? palm_bones : capsule_bones).push_back(&b);
  }

  const int capsule_count = static_cast<int>(capsule_bones.size());
  const Tessellation tess = choose_tessellation(target_vertex_count, capsule_count, has_palm, atlas);
  const int islands_per_part = atlas == UvAtlas::kSideSeams ? 2 : 1;
  const int total_islands = islands_per_part * (capsule_count + (has_palm ? 1 : 0));

  HandMesh mesh;
  MeshBuilder builder(mesh, atlas, total_islands);
  const Vec3 toward_camera(0.0, 0.0, -1.0);

  if (has_palm) {
    const RigidTransform& root_world = world[static_cast<std::size_t>(root)];
    const RigidTransform to_local = root_world.inverse();
    Vec3 lo = Vec3::Zero(), hi = Vec3::Zero();
    double margin = 0.0;
    for (const Bone* b : palm_bones) {
      const Vec3 q = to_local.apply(b->b);
      lo = lo.cwiseMin(q);
      hi = hi.cwiseMax(q);
      margin = std::max(margin, skeleton.joint(b->child).radius_mm);
    }
    const Vec3 center = 0.5 * (lo + hi);
    const double ax = 0.5 * (hi.x() - lo.x()) + margin;
    const double ay = 0.5 * (hi.y() - lo.y()) + 0.5 * margin;
    const double az = skeleton.joint(root).radius_mm;
    constexpr double kBoxiness = 0.6;
    auto surface = [&](double rf, double theta) {
      const double phi = rf * std::numbers::pi;
      const double s = (rf == 0.0 || rf == 1.0) ? 0.0 : std::sin(phi);
      const Vec3 local(ax * spow(s, kBoxiness) * spow(std::cos(theta), kBoxiness),
                       ay * spow(std::cos(phi), kBoxiness),
                       -az * spow(s, kBoxiness) * spow(std::sin(theta), kBoxiness));
      return root_world.apply(center + local);
    };
    const auto ids = builder.add_part(palm_rows(tess), 2 * tess.around, surface);
    std::vector<const Bone*> candidates = palm_bones;
    for (const Bone* b : palm_bones) {
      for (int c : skeleton.children(b->child)) candidates.push_back(bone_ending_at(c));
    }
    for (int id : ids) mesh.weights.push_back(weights_from_bones(mesh.vertices[static_cast<std::size_t>(id)], candidates));
  }

  for (const Bone* bone : capsule_bones) {
    const double r = skeleton.joint(bone->child).radius_mm;
    const Vec3 axis_vec = bone->b - bone->a;
    const double length = axis_vec.norm();
    const Vec3 axis = axis_vec / length;
    Vec3 front = toward_camera - toward_camera.dot(axis) * axis;
    if (front.norm() < 1e-9) front = Vec3::UnitX() - Vec3::UnitX().dot(axis) * axis;
    front.normalize();
    const Vec3 side = axis.cross(front);
    const double arc = 0.5 * std::numbers::pi * r;
    const double total = 2.0 * arc + length;
    auto surface = [&](double rf, double theta) {
      const double s = rf * total;
      double axial, radius;
      if (rf == 0.0) {
        axial = -r;
        radius = 0.0;
      } else if (rf == 1.0) {
        axial = length + r;
        radius = 0.0;
      } else if (s < arc) {
        const double psi = s / r;
        axial = -r * std::cos(psi);
        radius = r * std::sin(psi);
      } else if (s < arc + length) {
        axial = s - arc;
        radius = r;
      } else {
        const double psi = (s - arc - length) / r;
        axial = length + r * std::sin(psi);
        radius = r * std::cos(psi);
      }
      return Vec3(bone->a + axial * axis +
                  radius * (std::cos(theta) * side + std::sin(theta) * front));
    };
    const auto ids = builder.add_part(tess.rows, tess.around, surface);
    std::vector<const Bone*> candidates{bone};
    if (const Bone* up = bone_ending_at(bone->joint); up != nullptr) candidates.push_back(up);
    for (int c : skeleton.children(bone->child)) candidates.push_back(bone_ending_at(c));
    for (int id : ids) mesh.weights.push_back(weights_from_bones(mesh.vertices[static_cast<std::size_t>(id)], candidates));
  }

  mesh.validate(skeleton.size());
  return mesh;
}

std::vector<Vec3> skin(const HandMesh& mesh, const Pose& pose, const Pose& rest) {
  if (pose.joints.size() != rest.joints.size()) {
    throw InvalidArgument("skin: pose and rest pose have different joint counts");
  }
  const std::size_t n = pose.joints.size();
  std::vector<Eigen::Matrix3d> rot(n);
  std::vector<Vec3> trans(n);
  for (std::size_t j = 0; j < n; ++j) {
    const RigidTransform m = pose.joints[j] * rest.joints[j].inverse();
    rot[j] = m.rotation.toRotationMatrix();
    trans[j] = m.translation;
  }
  std::vector<Vec3> out(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    const VertexWeights& w = mesh.weights[i];
    Vec3 acc = Vec3::Zero();
    for (int k = 0; k < w.count; ++k) {
      const auto& e = w.entries[static_cast<std::size_t>(k)];
      if (e.joint < 0 || static_cast<std::size_t>(e.joint) >= n) {
        throw InvalidArgument(fmt::format("skin: vertex {} weights missing joint {}", i, e.joint));
      }
      const auto j = static_cast<std::size_t>(e.joint);
      acc += e.weight * (rot[j] * v + trans[j]);
    }
    out[i] = acc;
  }
  return out;
}

void write_obj(const std::filesystem::path& path, const HandMesh& mesh,
               std::span<const Vec3> positions) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  const auto& verts = positions.empty() ? std::span<const Vec3>(mesh.vertices) : positions;
  out << fmt::format("# {} vertices, {} triangles\n", verts.size(), mesh.triangles.size());
  for (const auto& v : verts) out << fmt::format("v {:.6f} {:.6f} {:.6f}\n", v.x(), v.y(), v.z());
  for (const auto& uv : mesh.uvs) out << fmt::format("vt {:.6f} {:.6f}\n", uv.x(), uv.y());
  for (const auto& t : mesh.triangles) {
    out << fmt::format("f {0}/{0} {1}/{1} {2}/{2}\n", t[0] + 1, t[1] + 1, t[2] + 1);
  }
}

// ---------------------------------------------------------------------------
// Motion

std::string to_string(MotionKind kind) {
  switch (kind) {
    case MotionKind::kTranslate: return "translate";
    case MotionKind::kRotate: return "rotate";
    case MotionKind::kArticulate: return "articulate";
    case MotionKind::kCombined: return "combined";
  }
  return "unknown";
}

MotionKind parse_motion_kind(const std::string& name) {
  if (name == "translate") return MotionKind::kTranslate;
  if (name == "rotate") return MotionKind::kRotate;
  if (name == "articulate") return MotionKind::kArticulate;
  if (name == "combined") return MotionKind::kCombined;
  throw InvalidArgument("unknown motion kind '" + name +
                        "' (expected translate, rotate, articulate, combined)");
}

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Per-finger flexion gains in [0.6, 1.0], fixed by the script seed.
std::array<double, 5> finger_gains(unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::array<double, 5> g{};
  for (auto& v : g) v = 0.6 + 0.4 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return g;
}

}  // namespace

Pose sample_ground_truth(const Skeleton& skeleton, const MotionScript& script, double t) {
  if (!(t >= 0.0 && t <= script.duration_s)) {
    throw InvalidArgument(fmt::format("ground truth requested at t={} outside [0, {}]", t,
                                      script.duration_s));
  }
  const double w = 2.0 * std::numbers::pi * script.frequency_hz;
  double shift_x = 0.0;
  double roll = 0.0;
  double flex = 0.0;
  double flex_w = w;
  switch (script.kind) {
    case MotionKind::kTranslate:
      shift_x = script.amplitude * std::sin(w * t);
      break;
    case MotionKind::kRotate:
      roll = script.amplitude * kDegToRad * std::sin(w * t);
      break;
    case MotionKind::kArticulate:
      flex = script.amplitude * kDegToRad;
      break;
    case MotionKind::kCombined:
      shift_x = script.amplitude * std::sin(w * t);
      roll = 15.0 * kDegToRad * std::sin(0.7 * w * t);
      flex = 40.0 * kDegToRad;
      flex_w = 1.3 * w;
      break;
  }

  std::vector<RigidTransform> local = skeleton.rest_local();
  const int root = skeleton.root();
  auto& root_local = local[static_cast<std::size_t>(root)];
  root_local.rotation = axis_angle(Vec3::UnitZ(), roll) * root_local.rotation;
  root_local.translation.x() += shift_x;

  if (flex != 0.0) {
    const auto gains = finger_gains(script.seed);
    const double envelope = 0.5 * (1.0 - std::cos(flex_w * t));
    int finger = 0;
    for (int base : skeleton.children(root)) {
      const double angle = flex * envelope * gains[static_cast<std::size_t>(finger % 5)];
      // Flex every joint of the chain that has a child bone.
      for (int j = base; !skeleton.children(j).empty(); j = skeleton.children(j).front()) {
        auto& l = local[static_cast<std::size_t>(j)];
        l.rotation = l.rotation * axis_angle(Vec3::UnitX(), angle);
      }
      ++finger;
    }
  }
  return Pose{t, skeleton.forward_kinematics(local)};
}

Pose extrapolate_pose(std::span<const Pose> history, double target_t) {
  if (history.empty()) throw InvalidArgument("extrapolate_pose: empty history");
  const Pose& b = history.back();
  if (history.size() < 2) return b;
  const Pose& a = history[history.size() - 2];
  const double dt = b.timestamp - a.timestamp;
  if (!(dt > 0.0) || a.joints.size() != b.joints.size()) return b;
  const double s = (target_t - b.timestamp) / dt;
  Pose out;
  out.timestamp = target_t;
  out.joints.resize(b.joints.size());
  for (std::size_t j = 0; j < b.joints.size(); ++j) {
    const auto& ja = a.joints[j];
    const auto& jb = b.joints[j];
    out.joints[j].translation = jb.translation + s * (jb.translation - ja.translation);
    const Quat delta = jb.rotation * ja.rotation.conjugate();
    out.joints[j].rotation = (quat_pow(delta, s) * jb.rotation).normalized();
  }
  return out;
}

}  // namespace dpm
