// Force-closure quality: contact extraction, linearized friction cones,
// the epsilon metric (largest origin-centered ball inside the wrench hull),
// the collision-free predicate and grasp ranking.
#pragma once

#include "graspgen/hand.hpp"
#include "graspgen/hull.hpp"
#include "graspgen/losses.hpp"
#include "graspgen/scene_context.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace graspgen {

/// A hard point contact: position, inward object normal, friction coefficient.
/// `tangent` anchors the friction-cone discretization; it comes from the
/// contacted geometry so the cone edges rotate with the scene (zero means
/// "derive a basis from the normal by convention").
struct Contact {
    Vec3 position = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();  // unit, pointing into the object
    Vec3 tangent = Vec3::Zero();
    double friction_mu = 0.8;
};

/// Parameters stamped into every evaluation record for reproducibility.
struct QualityParams {
    double friction_mu = 0.8;
    int cone_edges = 8;
    double contact_tolerance = 0.01;         // meters
    double target_penetration_cm3 = 0.5;     // collision-free target budget
    double voxel_size = 0.002;               // meters, interpenetration grid
};

/// One contact per hand link whose nearest vertex comes within `tolerance`
/// of the object; placed at the nearest surface point with the object's
/// inward normal there.
inline std::vector<Contact> extract_contacts(const PosedHand& hand, const SceneObject& object,
                                             double tolerance, double friction_mu = 0.8) {
    if (tolerance <= 0.0) throw std::invalid_argument("extract_contacts: tolerance must be > 0");
    std::vector<Contact> contacts;
    const auto& model = *hand.model;
    for (std::size_t link = 0; link < model.links.size(); ++link) {
        const auto [begin, end] = hand.link_vertex_range(int(link));
        double best = std::numeric_limits<double>::infinity();
        NearestHit best_hit;
        for (int v = begin; v < end; ++v) {
            const Vec3 local = object.inverse_transform() * hand.vertices[std::size_t(v)];
            const NearestHit hit = object.geometry().bvh().nearest(local);
            if (hit.distance < best) {
                best = hit.distance;
                best_hit = hit;
            }
        }
        if (best < tolerance) {
            Contact c;
            c.position = object.world_transform() * best_hit.point;
            const Vec3 outward = object.geometry().mesh().face_normal(std::size_t(best_hit.face));
            c.normal = -(object.world_transform().linear() * outward);
            // anchor the cone basis to the contacted face so it moves with
            // the object
            const auto tri = object.geometry().mesh().triangle(std::size_t(best_hit.face));
            c.tangent = (object.world_transform().linear() * (tri[1] - tri[0])).normalized();
            c.friction_mu = friction_mu;
            contacts.push_back(c);
        }
    }
    return contacts;
}

/// Unit-force edge vectors of the linearized friction cone, lifted to 6D
/// wrenches [f; torque_scale * ((p - torque_origin) x f)].
inline std::vector<Vec6> friction_cone_wrenches(const Contact& contact, int cone_edges,
                                                double torque_scale,
                                                const Vec3& torque_origin = Vec3::Zero()) {
    if (cone_edges < 3) throw std::invalid_argument("friction cone needs >= 3 edges");
    const double n_len = contact.normal.norm();
    if (n_len < 1e-12) throw std::invalid_argument("friction cone: zero contact normal");
    const Vec3 n = contact.normal / n_len;

    // tangent basis: anchored to the contact's own frame when provided,
    // otherwise a deterministic convention from the normal
    Vec3 u;
    const Vec3 t_raw = contact.tangent - contact.tangent.dot(n) * n;
    if (t_raw.norm() > 1e-9) {
        u = t_raw.normalized();
    } else {
        int min_axis = 0;
        n.cwiseAbs().minCoeff(&min_axis);
        u = n.cross(Vec3::Unit(min_axis)).normalized();
    }
    const Vec3 v = n.cross(u);

    const double mu = contact.friction_mu;
    const double inv_len = 1.0 / std::sqrt(1.0 + mu * mu);
    const Vec3 arm = contact.position - torque_origin;
    std::vector<Vec6> wrenches;
    wrenches.reserve(std::size_t(cone_edges));
    for (int i = 0; i < cone_edges; ++i) {
        const double phi = 2.0 * kPi * i / cone_edges;
        const Vec3 f = (n + mu * (std::cos(phi) * u + std::sin(phi) * v)) * inv_len;
        Vec6 w;
        w.head<3>() = f;
        w.tail<3>() = torque_scale * arm.cross(f);
        wrenches.push_back(w);
    }
    return wrenches;
}

struct EpsilonHullError : std::runtime_error {
    std::vector<Vec6> wrenches;
    std::string replay_path;
    EpsilonHullError(const std::string& msg, std::vector<Vec6> w, std::string path)
        : std::runtime_error(msg), wrenches(std::move(w)), replay_path(std::move(path)) {}
};

namespace quality_detail {

inline std::string write_hull_replay(const std::vector<Vec6>& wrenches) {
    const std::uint64_t h = fnv1a64(wrenches.data(), wrenches.size() * sizeof(Vec6));
    const std::string path = "graspgen_hull_replay_" + hex64(h) + ".txt";
    std::ofstream out(path);
    if (!out) return "";
    for (const auto& w : wrenches) {
        for (int i = 0; i < 6; ++i) out << w[i] << (i == 5 ? '\n' : ' ');
    }
    return path;
}

}  // namespace quality_detail

/// Radius of the largest 6D ball centered at the wrench-space origin that the
/// convex hull of the wrench set encloses; 0 when the origin is not interior
/// (including all degenerate spans).
inline double epsilon_from_wrenches(const std::vector<Vec6>& wrenches,
                                    std::uint64_t joggle_seed = 0x9e3779b9ULL) {
    if (wrenches.size() < 7) return 0.0;  // cannot be full-dimensional in 6D
    ConvexHull<6>::Result hull;
    try {
        hull = ConvexHull<6>::build_with_joggle(wrenches, joggle_seed);
    } catch (const HullDegenerate& e) {
        const std::string path = quality_detail::write_hull_replay(wrenches);
        throw EpsilonHullError(std::string("epsilon hull failed: ") + e.what() +
                                   (path.empty() ? "" : " (replay: " + path + ")"),
                               wrenches, path);
    }
    if (!hull.full_dimensional) return 0.0;
    double eps = std::numeric_limits<double>::infinity();
    for (const auto& f : hull.facets) {
        if (f.offset <= 0.0) return 0.0;  // origin on or outside a facet plane
        eps = std::min(eps, f.offset);
    }
    return std::isfinite(eps) ? eps : 0.0;
}

/// Builds the union wrench set of all contacts and measures epsilon.
/// Torques are taken about `torque_origin` and scaled by `torque_scale`
/// (1 / object characteristic length makes epsilon dimensionless).
inline double epsilon_quality(const std::vector<Contact>& contacts, int cone_edges,
                              double torque_scale, const Vec3& torque_origin = Vec3::Zero()) {
    std::vector<Vec6> wrenches;
    for (const auto& c : contacts) {
        const auto w = friction_cone_wrenches(c, cone_edges, torque_scale, torque_origin);
        wrenches.insert(wrenches.end(), w.begin(), w.end());
    }
    return epsilon_from_wrenches(wrenches);
}

/// Force-part-only 3D variant: inscribed-sphere radius of the hull of the
/// cone edge forces alone. Has a closed form for simple contact sets, which
/// makes it the analytic cross-check for the 6D machinery.
inline double epsilon_force_only_3d(const std::vector<Contact>& contacts, int cone_edges,
                                    std::uint64_t joggle_seed = 0x51ed2701ULL) {
    std::vector<Vec3> forces;
    for (const auto& c : contacts) {
        const auto w = friction_cone_wrenches(c, cone_edges, 0.0);
        for (const auto& wi : w) forces.push_back(wi.head<3>());
    }
    if (forces.size() < 4) return 0.0;
    const auto hull = ConvexHull<3>::build_with_joggle(forces, joggle_seed);
    if (!hull.full_dimensional) return 0.0;
    double eps = std::numeric_limits<double>::infinity();
    for (const auto& f : hull.facets) {
        if (f.offset <= 0.0) return 0.0;
        eps = std::min(eps, f.offset);
    }
    return std::isfinite(eps) ? eps : 0.0;
}

// ---------------------------------------------------------------------------
// Collision-free predicate.

/// True iff (a) no hand vertex lies below the table plane, (b) the hand
/// touches no non-target object at all, and (c) the interpenetration volume
/// with the target stays within `target_tolerance_cm3` (<= 0 demands no
/// contact with the target either).
inline bool is_collision_free(const PosedHand& hand, const GraspSceneView& scene,
                              double target_tolerance_cm3, double voxel_size,
                              const AccelMesh* hand_mesh = nullptr) {
    for (const auto& v : hand.vertices)
        if (scene.table.signed_distance(v) < -1e-9) return false;

    AccelMesh local;
    if (!hand_mesh) {
        local = AccelMesh(hand.to_mesh());
        hand_mesh = &local;
    }
    const RigidTransform identity = RigidTransform::Identity();
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const auto& obj = *scene.objects[i];
        const bool is_target = int(i) == scene.target_index;
        if (!is_target || target_tolerance_cm3 <= 0.0) {
            if (meshes_intersect(*hand_mesh, identity, obj.geometry(), obj.world_transform()))
                return false;
        } else {
            if (interpenetration_volume_cm3(*hand_mesh, identity, obj.geometry(),
                                            obj.world_transform(),
                                            voxel_size) > target_tolerance_cm3)
                return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Per-grasp evaluation record and ranking.

struct GraspEvaluation {
    double epsilon = 0.0;
    double interpenetration_cm3 = 0.0;  // summed over all scene objects
    bool collision_free = false;
    bool below_table = false;
    int contact_count = 0;
    LossBreakdown losses;
    QualityParams params;
    double torque_scale = 0.0;
};

/// Full evaluation of one posed grasp against a scene.
inline GraspEvaluation evaluate_grasp(const HandModel& model, const GraspPose& pose,
                                      const JointConfig& config, const GraspSceneView& scene,
                                      const LossWeights& weights, const QualityParams& params,
                                      const LossOptions& loss_options = {}) {
    GraspEvaluation out;
    out.params = params;
    const PosedHand hand = forward_kinematics(model, pose, config);
    const AccelMesh hand_mesh(hand.to_mesh());

    for (const auto& v : hand.vertices) {
        if (scene.table.signed_distance(v) < -1e-9) {
            out.below_table = true;
            break;
        }
    }
    const RigidTransform identity = RigidTransform::Identity();
    bool obstacle_hit = false;
    bool target_ok = true;
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const auto& obj = *scene.objects[i];
        if (!obj.world_bounds().overlaps(hand_mesh.mesh().bounds())) continue;
        const bool touching =
            meshes_intersect(hand_mesh, identity, obj.geometry(), obj.world_transform());
        if (!touching) continue;
        const double volume = interpenetration_volume_cm3(
            hand_mesh, identity, obj.geometry(), obj.world_transform(), params.voxel_size);
        out.interpenetration_cm3 += volume;
        if (int(i) == scene.target_index) {
            target_ok = params.target_penetration_cm3 > 0.0
                            ? volume <= params.target_penetration_cm3
                            : false;
        } else {
            obstacle_hit = true;
        }
    }
    out.collision_free = !out.below_table && !obstacle_hit && target_ok;

    const SceneObject& target = scene.target();
    const auto contacts =
        extract_contacts(hand, target, params.contact_tolerance, params.friction_mu);
    out.contact_count = int(contacts.size());
    out.torque_scale = target.bounding_radius() > 1e-9 ? 1.0 / target.bounding_radius() : 1.0;
    out.epsilon = epsilon_quality(contacts, params.cone_edges, out.torque_scale,
                                  target.center_world());
    out.losses = total_loss(model, pose, config, scene, weights, loss_options);
    return out;
}

/// Descending by epsilon; ties by lower interpenetration, then lower total
/// loss, then stable input order. Returns indices into `evaluations`.
inline std::vector<int> rank_grasps(const std::vector<GraspEvaluation>& evaluations, int top_n) {
    if (top_n < 1) throw std::invalid_argument("rank_grasps: top_n must be >= 1");
    if (evaluations.empty()) throw std::invalid_argument("rank_grasps: empty evaluation list");
    std::vector<int> order(evaluations.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& ea = evaluations[std::size_t(a)];
        const auto& eb = evaluations[std::size_t(b)];
        if (ea.epsilon != eb.epsilon) return ea.epsilon > eb.epsilon;
        if (ea.interpenetration_cm3 != eb.interpenetration_cm3)
            return ea.interpenetration_cm3 < eb.interpenetration_cm3;
        return ea.losses.total < eb.losses.total;
    });
    order.resize(std::min<std::size_t>(std::size_t(top_n), order.size()));
    return order;
}

}  // namespace graspgen
