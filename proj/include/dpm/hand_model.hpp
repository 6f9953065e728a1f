#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpm/geometry.hpp"

namespace dpm {

inline constexpr int kHandJointCount = 21;

/// Joint indices of the 21-joint hand: wrist, then four joints per finger
/// from the base outwards.
namespace hand_joint {
inline constexpr int kWrist = 0;
inline constexpr int kThumbBase = 1;
inline constexpr int kIndexBase = 5;
inline constexpr int kMiddleBase = 9;
inline constexpr int kRingBase = 13;
inline constexpr int kPinkyBase = 17;
inline constexpr int kJointsPerFinger = 4;
}  // namespace hand_joint

struct Joint {
  int id = 0;
  std::optional<int> parent;
  RigidTransform rest_local;
  /// Radius of the bone that ends at this joint; used by the mesh generator.
  double radius_mm = 8.0;
};

/// A rooted tree of joints with a cached rest pose.
class Skeleton {
 public:
  /// Throws ConstructionError unless ids are 0..n-1 and the parent links
  /// form a single tree.
  explicit Skeleton(std::vector<Joint> joints);

  /// Right hand, palm towards a camera looking down +z, fingers towards -y.
  static Skeleton hand(const Vec3& wrist_position = Vec3(0.0, 85.0, 500.0));

  /// Two joints joined by one bone along -y.
  static Skeleton single_bone(double length_mm, double radius_mm,
                              const Vec3& root_position = Vec3(0.0, 0.0, 500.0));

  std::size_t size() const { return joints_.size(); }
  std::span<const Joint> joints() const { return joints_; }
  const Joint& joint(int id) const { return joints_.at(static_cast<std::size_t>(id)); }
  int root() const { return root_; }
  const std::vector<int>& children(int id) const {
    return children_.at(static_cast<std::size_t>(id));
  }
  bool is_hand() const { return joints_.size() == kHandJointCount; }

  /// World transforms from local ones, parents before children.
  std::vector<RigidTransform> forward_kinematics(std::span<const RigidTransform> local) const;

  const std::vector<RigidTransform>& rest_world() const { return rest_world_; }
  std::vector<RigidTransform> rest_local() const;

 private:
  std::vector<Joint> joints_;
  std::vector<std::vector<int>> children_;
  std::vector<int> order_;
  int root_ = 0;
  std::vector<RigidTransform> rest_world_;
};

/// World transform per joint at one instant.
struct Pose {
  double timestamp = 0.0;
  std::vector<RigidTransform> joints;

  std::vector<Vec3> positions() const;
};

Pose rest_pose(const Skeleton& skeleton, double timestamp = 0.0);

struct JointWeight {
  int joint = 0;
  double weight = 0.0;
};

struct VertexWeights {
  std::array<JointWeight, 4> entries{};
  int count = 0;
};

struct SeamEdge {
  int a = 0, b = 0;
};

enum class UvAtlas {
  kSideSeams,  // front and back islands per part, seams on the lateral edges
  kBackSeam,   // one island per part, seam down the back
};

struct HandMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec2> uvs;
  std::vector<VertexWeights> weights;
  std::vector<SeamEdge> seams;
  int island_count = 0;

  /// Throws ConstructionError on out-of-range indices, bad UVs or weights
  /// that do not partition unity.
  void validate(std::size_t joint_count) const;
};

/// Capsule per bone plus a palm slab when the root has three or more
/// children. The tessellation is chosen to land as close to
/// `target_vertex_count` as the part layout allows.
HandMesh generate_hand_mesh(const Skeleton& skeleton, int target_vertex_count,
                            UvAtlas atlas = UvAtlas::kSideSeams);

/// Linear blend skinning: v' = sum_b w_b * M_b * inverse(M_b,rest) * v.
std::vector<Vec3> skin(const HandMesh& mesh, const Pose& pose, const Pose& rest);

void write_obj(const std::filesystem::path& path, const HandMesh& mesh,
               std::span<const Vec3> positions = {});

enum class MotionKind { kTranslate, kRotate, kArticulate, kCombined };

std::string to_string(MotionKind kind);
MotionKind parse_motion_kind(const std::string& name);

/// Smooth scripted ground-truth motion. `amplitude` is millimetres for
/// translation and degrees for rotation and articulation.
struct MotionScript {
  MotionKind kind = MotionKind::kTranslate;
  double amplitude = 50.0;
  double frequency_hz = 0.5;
  double duration_s = 3.0;
  unsigned long long seed = 0;
};

/// Throws InvalidArgument when t is outside [0, duration].
Pose sample_ground_truth(const Skeleton& skeleton, const MotionScript& script, double t);

/// Two-sample constant-velocity extrapolation of translations and
/// rotations to `target_t`. With fewer than two samples (or coincident
/// timestamps) the latest pose is returned unchanged.
Pose extrapolate_pose(std::span<const Pose> history, double target_t);

}  // namespace dpm
