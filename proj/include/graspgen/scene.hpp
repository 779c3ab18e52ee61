// Cluttered-scene construction: an object library with precomputed resting
// poses, rejection-sampled collision-free placement on a table rectangle,
// and the bridge from a persisted scene to the evaluation view.
#pragma once

#include "graspgen/mesh_io.hpp"
#include "graspgen/mesh_queries.hpp"
#include "graspgen/scene_context.hpp"
#include "graspgen/stable_pose.hpp"

#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace graspgen {

/// One loadable object: geometry, content hash and resting poses.
struct LibraryObject {
    std::string id;
    AccelMesh geometry;
    std::vector<StablePose> poses;
    std::string content_hash;  // fnv1a64 of the canonical OBJ bytes
};

class ObjectLibrary {
public:
    void add(const std::string& id, TriMesh mesh) {
        if (index_.count(id)) throw std::invalid_argument("duplicate object id: " + id);
        LibraryObject entry;
        entry.id = id;
        std::ostringstream obj_text;
        save_obj_stream(mesh, obj_text);
        const std::string bytes = obj_text.str();
        entry.content_hash = hex64(fnv1a64(bytes.data(), bytes.size()));
        entry.poses = stable_poses(mesh);
        entry.geometry = AccelMesh(std::move(mesh));
        index_[id] = objects_.size();
        objects_.push_back(std::move(entry));
    }

    const LibraryObject& at(const std::string& id) const {
        const auto it = index_.find(id);
        if (it == index_.end()) throw std::invalid_argument("unknown object id: " + id);
        return objects_[it->second];
    }

    const LibraryObject& at(std::size_t i) const { return objects_[i]; }
    bool contains(const std::string& id) const { return index_.count(id) > 0; }
    std::size_t size() const { return objects_.size(); }
    const std::vector<LibraryObject>& objects() const { return objects_; }

private:
    std::vector<LibraryObject> objects_;
    std::map<std::string, std::size_t> index_;
};

struct ScenePlacement {
    std::string object_id;
    std::string mesh_hash;
    RigidTransform transform = RigidTransform::Identity();
    int stable_pose_id = -1;
};

struct TableSpec {
    Plane plane;                       // z=0, +z up by default
    Vec2 extent_min = Vec2(-0.3, -0.3);
    Vec2 extent_max = Vec2(0.3, 0.3);
};

struct Scene {
    int format_version = 1;
    std::uint64_t seed = 0;
    TableSpec table;
    std::vector<ScenePlacement> objects;
};

/// Places `count` objects (drawn with replacement) in collision-free resting
/// poses on the table. Deterministic per seed; throws "scene saturated" when
/// an object cannot be placed within 200 attempts.
inline Scene generate_scene(const ObjectLibrary& pool, int count, const TableSpec& table,
                            std::uint64_t seed, int max_attempts = 200) {
    if (count < 1 || count > 4)
        throw std::invalid_argument("generate_scene: count must be in [1, 4]");
    if (pool.size() == 0) throw std::invalid_argument("generate_scene: empty object pool");

    Scene scene;
    scene.seed = seed;
    scene.table = table;
    Rng rng(seed);

    std::vector<const LibraryObject*> placed_objects;
    for (int slot = 0; slot < count; ++slot) {
        const auto& obj = pool.at(rng.uniform_index(pool.size()));
        bool placed = false;
        for (int attempt = 0; attempt < max_attempts && !placed; ++attempt) {
            // probability-weighted stable pose
            const double pick = rng.uniform();
            double acc = 0.0;
            int pose_id = int(obj.poses.size()) - 1;
            for (int i = 0; i < int(obj.poses.size()); ++i) {
                acc += obj.poses[std::size_t(i)].probability;
                if (pick < acc) {
                    pose_id = i;
                    break;
                }
            }
            const double x = rng.uniform(table.extent_min.x(), table.extent_max.x());
            const double y = rng.uniform(table.extent_min.y(), table.extent_max.y());
            const double yaw = rng.uniform(0.0, 2.0 * kPi);
            RigidTransform t = RigidTransform::Identity();
            t.linear() = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
            t.translation() = Vec3(x, y, 0.0);
            const RigidTransform world = t * obj.poses[std::size_t(pose_id)].transform;

            bool collides = false;
            for (std::size_t other = 0; other < scene.objects.size() && !collides; ++other) {
                collides = meshes_intersect(obj.geometry, world,
                                            placed_objects[other]->geometry,
                                            scene.objects[other].transform);
            }
            if (collides) continue;
            scene.objects.push_back({obj.id, obj.content_hash, world, pose_id});
            placed_objects.push_back(&obj);
            placed = true;
        }
        if (!placed) throw std::runtime_error("scene saturated");
    }
    return scene;
}

/// Builds the evaluation view of a scene: posed SceneObjects with surface
/// samples (seeded per object id for reproducibility).
inline GraspSceneView scene_view(const Scene& scene, const ObjectLibrary& library,
                                 int target_index, std::size_t sample_count = 2000) {
    if (target_index < 0 || target_index >= int(scene.objects.size()))
        throw std::invalid_argument("scene_view: target index out of range");
    GraspSceneView view;
    view.table = scene.table.plane;
    view.target_index = target_index;
    for (const auto& placement : scene.objects) {
        const auto& obj = library.at(placement.object_id);
        const std::uint64_t sample_seed =
            fnv1a64(placement.object_id.data(), placement.object_id.size());
        view.objects.push_back(std::make_shared<SceneObject>(
            placement.object_id, obj.geometry.mesh_ptr(), placement.transform, sample_count,
            sample_seed));
    }
    return view;
}

}  // namespace graspgen
