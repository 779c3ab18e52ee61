// Posed scene objects as the losses and metrics consume them: object-frame
// geometry with its BVH, a rigid world transform, the surface sample set for
// the collision loss and cached world-frame bounds.
#pragma once

#include "graspgen/mesh_queries.hpp"
#include "graspgen/trimesh.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace graspgen {

class SceneObject {
public:
    SceneObject(std::string id, MeshPtr mesh, const RigidTransform& world_T_obj,
                std::size_t sample_count, std::uint64_t sample_seed)
        : id_(std::move(id)),
          geometry_(std::move(mesh)),
          world_T_obj_(world_T_obj),
          obj_T_world_(world_T_obj.inverse()),
          samples_(sample_surface(geometry_.mesh(), sample_count, sample_seed, id_)),
          sample_tree_(samples_.points) {
        if (!is_rigid(world_T_obj))
            throw std::invalid_argument("scene object transform must be rigid: " + id_);
        center_world_ = world_T_obj_ * geometry_.mesh().vertex_mean();
        bounding_radius_ = geometry_.mesh().bounding_sphere_radius();
        world_bounds_ = Aabb{};
        const Aabb& local = geometry_.mesh().bounds();
        for (int i = 0; i < 8; ++i) {
            world_bounds_.extend(world_T_obj_ * Vec3(i & 1 ? local.max.x() : local.min.x(),
                                                     i & 2 ? local.max.y() : local.min.y(),
                                                     i & 4 ? local.max.z() : local.min.z()));
        }
    }

    const std::string& id() const { return id_; }
    const AccelMesh& geometry() const { return geometry_; }
    const RigidTransform& world_transform() const { return world_T_obj_; }
    const RigidTransform& inverse_transform() const { return obj_T_world_; }
    const SurfaceSamples& samples() const { return samples_; }
    const PointKdTree& sample_tree() const { return sample_tree_; }
    const Vec3& center_world() const { return center_world_; }
    double bounding_radius() const { return bounding_radius_; }
    const Aabb& world_bounds() const { return world_bounds_; }

    /// Distance from a world point to the object's exact surface.
    double surface_distance(const Vec3& world_point) const {
        return geometry_.bvh().nearest(obj_T_world_ * world_point).distance;
    }

    /// Distance from a world point to the nearest surface sample.
    double sample_distance(const Vec3& world_point) const {
        return sample_tree_.nearest(obj_T_world_ * world_point).second;
    }

    bool contains(const Vec3& world_point) const {
        if (!world_bounds_.contains(world_point)) return false;
        return geometry_.bvh().contains(obj_T_world_ * world_point);
    }

private:
    std::string id_;
    AccelMesh geometry_;       // object frame
    RigidTransform world_T_obj_;
    RigidTransform obj_T_world_;
    SurfaceSamples samples_;   // object frame
    PointKdTree sample_tree_;
    Vec3 center_world_ = Vec3::Zero();
    double bounding_radius_ = 0.0;
    Aabb world_bounds_;
};

using SceneObjectPtr = std::shared_ptr<const SceneObject>;

/// What a grasp is evaluated against: the posed objects, which one is the
/// target, and the supporting plane.
struct GraspSceneView {
    std::vector<SceneObjectPtr> objects;
    int target_index = 0;
    Plane table;

    const SceneObject& target() const { return *objects[std::size_t(target_index)]; }
};

}  // namespace graspgen
