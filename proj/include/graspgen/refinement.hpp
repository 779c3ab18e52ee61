// Pose composition into global coordinates, the finger-closing refinement
// sweep, and the empirical contact-vertex derivation.
#pragma once

#include "graspgen/hand.hpp"
#include "graspgen/mesh_queries.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace graspgen {

/// How refine_to_global combines the coarse rotation with the input rotation.
/// Additive treats axis-angle vectors as plain 3-vectors (r_c + r_0);
/// Compose performs proper rotation composition R(r_c) * R(r_0).
enum class RotationComposition { Additive, Compose };

/// Lifts an object-centric coarse pose into global coordinates:
/// t = t_c + t_0, r = canonicalize(r_c + r_0).
inline GraspPose refine_to_global(const Vec3& coarse_t, const Vec3& coarse_r,
                                  const Vec3& object_center, const Vec3& input_rotation,
                                  RotationComposition mode = RotationComposition::Additive) {
    if (!coarse_t.allFinite() || !coarse_r.allFinite() || !object_center.allFinite() ||
        !input_rotation.allFinite())
        throw std::invalid_argument("refine_to_global: inputs must be finite");
    GraspPose pose;
    pose.t = coarse_t + object_center;
    if (mode == RotationComposition::Additive) {
        pose.r = canonicalize_axis_angle(coarse_r + input_rotation);
    } else {
        pose.r = axis_angle_from_rotation(rotation_from_axis_angle(coarse_r) *
                                          rotation_from_axis_angle(input_rotation));
    }
    return pose;
}

struct FingerRefineResult {
    double delta = 0.0;   // proximal closing angle added (radians)
    bool reached = true;  // false when the joint limit stopped the sweep
};

struct FingerRefinement {
    JointConfig refined;
    std::array<FingerRefineResult, 3> fingers;
};

namespace refine_detail {

/// Minimum distance from one finger's link vertices to the target surface.
inline double finger_distance(const HandModel& model, const GraspPose& pose,
                              const JointConfig& q, std::size_t finger_idx,
                              const AccelMesh& target, const RigidTransform& target_inv) {
    const PosedHand hand = forward_kinematics(model, pose, q);
    double best = std::numeric_limits<double>::infinity();
    for (const int link : model.fingers[finger_idx].links) {
        const auto [begin, end] = hand.link_vertex_range(link);
        for (int v = begin; v < end; ++v) {
            const double d =
                target.bvh().nearest(target_inv * hand.vertices[std::size_t(v)]).distance;
            best = std::min(best, d);
        }
    }
    return best;
}

inline bool finger_inside(const HandModel& model, const GraspPose& pose, const JointConfig& q,
                          std::size_t finger_idx, const AccelMesh& target,
                          const RigidTransform& target_inv) {
    const PosedHand hand = forward_kinematics(model, pose, q);
    for (const int link : model.fingers[finger_idx].links) {
        const auto [begin, end] = hand.link_vertex_range(link);
        for (int v = begin; v < end; ++v) {
            if (target.bvh().contains(target_inv * hand.vertices[std::size_t(v)])) return true;
        }
    }
    return false;
}

}  // namespace refine_detail

/// Closes each finger independently: the proximal angle grows (distal coupled
/// at the model's coupling ratio) until the finger surface comes within
/// `threshold` of the target, or the joint limit is hit. Bracketed bisection
/// at 1e-4 rad; a containment guard backs off if a vertex ended up inside.
inline FingerRefinement finger_refinement(const HandModel& model, const GraspPose& pose,
                                          const JointConfig& coarse, const AccelMesh& target,
                                          double threshold,
                                          const RigidTransform& target_pose =
                                              RigidTransform::Identity()) {
    if (threshold <= 0.0) throw std::invalid_argument("finger_refinement: threshold must be > 0");
    if (!target.valid() || target.mesh().empty())
        throw std::invalid_argument("finger_refinement: empty target mesh");
    model.check_limits(coarse);

    constexpr double kAngleTol = 1e-4;
    const RigidTransform target_inv = target_pose.inverse();
    const double ratio = model.coupling_ratio;

    FingerRefinement out;
    out.refined = coarse;
    for (std::size_t fi = 0; fi < model.fingers.size(); ++fi) {
        const auto& finger = model.fingers[fi];
        const auto& pj = model.joints[std::size_t(finger.proximal_joint)];
        const auto& dj = model.joints[std::size_t(finger.distal_joint)];
        double delta_max = pj.hi - coarse[pj.dof];
        if (ratio > 0.0) delta_max = std::min(delta_max, (dj.hi - coarse[dj.dof]) / ratio);
        delta_max = std::max(delta_max, 0.0);

        auto config_at = [&](double delta) {
            JointConfig q = coarse;
            q[pj.dof] = std::min(coarse[pj.dof] + delta, pj.hi);
            q[dj.dof] = std::min(coarse[dj.dof] + ratio * delta, dj.hi);
            return q;
        };
        auto distance_at = [&](double delta) {
            return refine_detail::finger_distance(model, pose, config_at(delta), fi, target,
                                                  target_inv);
        };

        double delta = 0.0;
        bool reached = true;
        if (distance_at(0.0) >= threshold) {
            // The sweep distance is not monotone (a finger can curl past a
            // small target), so bracket the first crossing with a coarse
            // forward scan before bisecting.
            constexpr int kScanSteps = 128;
            double lo = 0.0, hi = -1.0;
            if (delta_max > 0.0) {
                const double step = delta_max / kScanSteps;
                for (int s = 1; s <= kScanSteps; ++s) {
                    const double d = s == kScanSteps ? delta_max : s * step;
                    if (distance_at(d) < threshold) {
                        hi = d;
                        break;
                    }
                    lo = d;
                }
            }
            if (hi < 0.0) {
                delta = delta_max;  // cannot reach: close to the limit
                reached = false;
            } else {
                while (hi - lo > kAngleTol) {
                    const double mid = 0.5 * (lo + hi);
                    if (distance_at(mid) < threshold) hi = mid;
                    else lo = mid;
                }
                delta = hi;
            }
        }
        // never end with finger vertices inside the target
        while (delta > 0.0 &&
               refine_detail::finger_inside(model, pose, config_at(delta), fi, target,
                                            target_inv)) {
            delta = std::max(0.0, delta - kAngleTol);
        }
        const JointConfig q = config_at(delta);
        out.refined[pj.dof] = q[pj.dof];
        out.refined[dj.dof] = q[dj.dof];
        out.fingers[fi] = {delta, reached};
    }
    return out;
}

/// One grasp of a contact-derivation dataset.
struct ContactDatasetEntry {
    GraspPose pose;
    JointConfig config;
    const AccelMesh* object = nullptr;             // object geometry
    RigidTransform object_pose = RigidTransform::Identity();
};

/// Hand vertices closer than `distance_threshold` to the object in at least
/// `frequency_threshold` of the dataset's grasps.
inline std::vector<int> derive_contact_vertices(const HandModel& model,
                                                const std::vector<ContactDatasetEntry>& dataset,
                                                double distance_threshold = 0.005,
                                                double frequency_threshold = 0.08) {
    if (dataset.empty()) throw std::invalid_argument("derive_contact_vertices: empty dataset");
    std::vector<int> counts(model.total_vertices, 0);
    for (const auto& entry : dataset) {
        const PosedHand hand = forward_kinematics(model, entry.pose, entry.config);
        const RigidTransform inv = entry.object_pose.inverse();
        for (std::size_t v = 0; v < hand.vertices.size(); ++v) {
            const double d = entry.object->bvh().nearest(inv * hand.vertices[v]).distance;
            if (d < distance_threshold) counts[v] += 1;
        }
    }
    std::vector<int> ids;
    const double n = double(dataset.size());
    for (std::size_t v = 0; v < counts.size(); ++v) {
        if (double(counts[v]) / n >= frequency_threshold) ids.push_back(int(v));
    }
    return ids;
}

}  // namespace graspgen
