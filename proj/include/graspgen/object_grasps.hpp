// Object-centric grasp set generation (the dataset protocol) and grasp
// transfer into cluttered scenes with collision-free / quality labeling.
#pragma once

#include "graspgen/quality.hpp"
#include "graspgen/refinement.hpp"
#include "graspgen/scene.hpp"

#include <map>
#include <string>
#include <vector>

namespace graspgen {

inline constexpr double kSpreadClasses[3] = {0.0, kPi / 4.0, kPi / 2.0};
inline constexpr double kStandoffs[2] = {0.02, 0.08};

/// Deterministic unit directions covering the sphere: golden-angle spiral
/// rotated by a seed-derived rotation.
inline std::vector<Vec3> sphere_covering(int count, std::uint64_t seed) {
    Rng rng(seed);
    const Mat3 tumble =
        Eigen::AngleAxisd(rng.uniform(0.0, 2.0 * kPi), rng.unit_vec3()).toRotationMatrix();
    std::vector<Vec3> dirs;
    dirs.reserve(std::size_t(count));
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = golden * i;
        dirs.push_back(tumble * Vec3(r * std::cos(a), r * std::sin(a), z));
    }
    return dirs;
}

/// One object-centric grasp with its per-scene labels.
struct GraspRecord {
    std::string object_id;
    GraspPose pose;          // object frame
    JointConfig config;      // after finger refinement
    int spread_class = 0;    // index into kSpreadClasses
    int standoff_class = 0;  // index into kStandoffs
    int direction_index = 0;
    bool refine_error = false;
    std::array<bool, 3> finger_unreached{};

    struct SceneLabel {
        std::string scene_id;
        int instance_index = 0;  // which placement of this object in the scene
        bool collision_free = false;
        double epsilon = 0.0;
        double interpenetration_cm3 = 0.0;
    };
    std::vector<SceneLabel> labels;
};

/// Generates directions x standoffs x spreads object-centric grasps: the
/// wrist sits on the outward ray through the object center at `standoff`
/// from the surface, facing the object, fingers refined to the clearance
/// threshold. Refinement failures are recorded per grasp, never fatal.
inline std::vector<GraspRecord> generate_object_grasps(const HandModel& model,
                                                       const LibraryObject& object,
                                                       int directions, std::uint64_t seed,
                                                       double clearance = 0.01) {
    if (directions < 1) throw std::invalid_argument("generate_object_grasps: directions >= 1");
    const auto dirs = sphere_covering(directions, seed);
    const Vec3 center = object.geometry.mesh().vertex_mean();

    std::vector<GraspRecord> records;
    records.reserve(std::size_t(directions) * 6);
    for (int di = 0; di < directions; ++di) {
        const Vec3 d = dirs[std::size_t(di)];
        // surface distance along the ray from the center outward
        const auto hits = object.geometry.bvh().ray_hits(center, d);
        const double surface_t = hits.empty() ? 0.0 : hits.back();
        for (int si = 0; si < 2; ++si) {
            for (int ci = 0; ci < 3; ++ci) {
                GraspRecord rec;
                rec.object_id = object.id;
                rec.direction_index = di;
                rec.standoff_class = si;
                rec.spread_class = ci;
                rec.pose.t = center + d * (surface_t + kStandoffs[si]);
                rec.pose.r = axis_angle_from_rotation(
                    rotation_between(model.approach_axis, -d));
                JointConfig q = JointConfig::zeros();
                q[model.spread_dof] = kSpreadClasses[ci];
                try {
                    const auto refined =
                        finger_refinement(model, rec.pose, q, object.geometry, clearance);
                    rec.config = refined.refined;
                    for (int f = 0; f < 3; ++f)
                        rec.finger_unreached[std::size_t(f)] = !refined.fingers[std::size_t(f)].reached;
                } catch (const std::exception&) {
                    rec.config = q;
                    rec.refine_error = true;
                }
                records.push_back(std::move(rec));
            }
        }
    }
    return records;
}

/// A grasp transferred into a scene: full rigid composition of the object's
/// scene transform with the object-centric pose.
struct TransferredGrasp {
    std::size_t record_index = 0;
    int instance_index = 0;  // index into scene.objects
    GraspPose world_pose;
    GraspRecord::SceneLabel label;
};

/// Transfers records onto every matching object instance in the scene and
/// labels them (collision-free, epsilon, interpenetration). Appends the
/// labels to the records and returns the flat transferred list.
inline std::vector<TransferredGrasp> transfer_grasps(
    std::vector<GraspRecord>& records, const Scene& scene, const std::string& scene_id,
    const ObjectLibrary& library, const QualityParams& params, const HandModel& model,
    const LossWeights& weights, std::size_t sample_count = 2000, int jobs = 0) {
    // check all referenced objects exist in the scene
    for (const auto& rec : records) {
        bool found = false;
        for (const auto& placement : scene.objects)
            if (placement.object_id == rec.object_id) found = true;
        if (!found)
            throw std::invalid_argument("transfer_grasps: object not in scene: " + rec.object_id);
    }

    struct Job {
        std::size_t record_index;
        int instance_index;
    };
    std::vector<Job> work;
    for (std::size_t ri = 0; ri < records.size(); ++ri)
        for (int ii = 0; ii < int(scene.objects.size()); ++ii)
            if (scene.objects[std::size_t(ii)].object_id == records[ri].object_id)
                work.push_back({ri, ii});

    std::vector<TransferredGrasp> out(work.size());
    // per-instance scene views, shared by the parallel jobs
    std::vector<GraspSceneView> views;
    for (int ii = 0; ii < int(scene.objects.size()); ++ii)
        views.push_back(scene_view(scene, library, ii, sample_count));

    parallel_for(work.size(), [&](std::size_t w) {
        const auto& job = work[w];
        const GraspRecord& rec = records[job.record_index];
        const auto& placement = scene.objects[std::size_t(job.instance_index)];

        TransferredGrasp tg;
        tg.record_index = job.record_index;
        tg.instance_index = job.instance_index;
        tg.world_pose = GraspPose::from_transform(placement.transform * rec.pose.transform());

        const GraspSceneView& view = views[std::size_t(job.instance_index)];
        const GraspEvaluation eval =
            evaluate_grasp(model, tg.world_pose, rec.config, view, weights, params);
        tg.label.scene_id = scene_id;
        tg.label.instance_index = job.instance_index;
        tg.label.collision_free = eval.collision_free;
        tg.label.epsilon = eval.epsilon;
        tg.label.interpenetration_cm3 = eval.interpenetration_cm3;
        out[w] = std::move(tg);
    }, jobs);

    for (const auto& tg : out) records[tg.record_index].labels.push_back(tg.label);
    return out;
}

}  // namespace graspgen
