// The four geometric grasp losses, their weighted combination, and the
// finite-difference gradient over (t, r, q).
//
// Conventions fixed here:
//  - plane loss is returned as a nonnegative penalty (the sum of below-plane
//    depths); raising the hand reduces it.
//  - the collision loss normalizes by the number of distinct hand vertices
//    inside any object (single normalization over the union), and a vertex
//    contributes a distance term only to objects it is actually inside, which
//    keeps the loss continuous as vertices cross surfaces.
#pragma once

#include "graspgen/hand.hpp"
#include "graspgen/scene_context.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace graspgen {

struct LossWeights {
    double w_cont = 10.0;
    double w_coll = 100.0;
    double w_orient = 1.0;
    double w_plane = 1.0;
    // schema slots for the adversarial terms; no discriminator runs here
    double w_disc = 0.0;
    double w_gp = 0.0;

    void validate() const {
        for (const double w : {w_cont, w_coll, w_orient, w_plane, w_disc, w_gp}) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw std::invalid_argument("loss weights must be finite and >= 0");
        }
    }
};

enum class ContactDistanceMode { Exact, Sampled };

inline const char* to_string(ContactDistanceMode m) {
    return m == ContactDistanceMode::Exact ? "exact" : "k-sample";
}

struct LossBreakdown {
    double cont = 0.0;
    double coll = 0.0;
    double orient = 0.0;
    double plane = 0.0;
    double total = 0.0;
    ContactDistanceMode contact_mode = ContactDistanceMode::Exact;
};

/// Options shared by the loss evaluations of one grasp problem.
struct LossOptions {
    ContactDistanceMode contact_mode = ContactDistanceMode::Exact;
    bool include_target_in_collision = true;
};

/// Mean distance from the hand's contact vertex set to the target surface.
inline double contact_loss(const PosedHand& hand, std::span<const int> contact_ids,
                           const SceneObject& target,
                           ContactDistanceMode mode = ContactDistanceMode::Exact) {
    if (contact_ids.empty()) throw std::invalid_argument("contact_loss: empty contact set");
    double sum = 0.0;
    for (const int id : contact_ids) {
        const Vec3& v = hand.vertices[std::size_t(id)];
        sum += mode == ContactDistanceMode::Exact ? target.surface_distance(v)
                                                  : target.sample_distance(v);
    }
    return sum / double(contact_ids.size());
}

/// 1 - a.o where a is the approach vector and o points from the wrist origin
/// to the object center. In [0, 2].
inline double orientation_loss(const PosedHand& hand, const Vec3& object_center) {
    const Vec3 d = object_center - hand.origin;
    const double len = d.norm();
    if (len < 1e-12)
        throw std::invalid_argument("orientation_loss: undefined direction (origin at center)");
    return 1.0 - hand.approach_dir.dot(d / len);
}

/// Area-weighted mean sample distance of hand vertices that lie inside scene
/// objects. Zero when no vertex is inside anything.
inline double collision_loss(const PosedHand& hand, std::span<const SceneObjectPtr> obstacles) {
    const auto& areas = hand.model->vertex_area;
    double sum = 0.0;
    std::size_t union_count = 0;
    for (std::size_t v = 0; v < hand.vertices.size(); ++v) {
        const Vec3& p = hand.vertices[v];
        bool inside_any = false;
        for (const auto& obj : obstacles) {
            if (!obj->contains(p)) continue;
            inside_any = true;
            sum += areas[v] * obj->sample_distance(p);
        }
        if (inside_any) ++union_count;
    }
    if (union_count == 0) return 0.0;
    return sum / double(union_count);
}

/// Sum of below-plane depths over every hand vertex (nonnegative penalty).
inline double plane_loss(const PosedHand& hand, const Plane& table) {
    double sum = 0.0;
    for (const auto& v : hand.vertices) {
        const double d = table.signed_distance(v);
        if (d < 0.0) sum -= d;
    }
    return sum;
}

/// Runs FK once and evaluates the weighted combination of all four losses.
inline LossBreakdown total_loss(const HandModel& model, const GraspPose& pose,
                                const JointConfig& config, const GraspSceneView& scene,
                                const LossWeights& weights, const LossOptions& options = {}) {
    weights.validate();
    if (scene.objects.empty()) throw std::invalid_argument("total_loss: scene has no objects");
    const PosedHand hand = forward_kinematics(model, pose, config);

    LossBreakdown out;
    out.contact_mode = options.contact_mode;
    out.cont = contact_loss(hand, model.contact_vertex_ids, scene.target(), options.contact_mode);
    out.orient = orientation_loss(hand, scene.target().center_world());
    std::vector<SceneObjectPtr> obstacles;
    obstacles.reserve(scene.objects.size());
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        if (!options.include_target_in_collision && int(i) == scene.target_index) continue;
        obstacles.push_back(scene.objects[i]);
    }
    out.coll = collision_loss(hand, obstacles);
    out.plane = plane_loss(hand, scene.table);
    out.total = weights.w_cont * out.cont + weights.w_coll * out.coll +
                weights.w_orient * out.orient + weights.w_plane * out.plane;
    return out;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient over the 13 grasp coordinates
// [t0 t1 t2 | r0 r1 r2 | q0..q6].

inline constexpr int kGradDim = 13;

struct GradientOptions {
    double step_translation = 1e-5;  // meters
    double step_rotation = 1e-5;     // radians
    double step_joint = 1e-5;        // radians
    std::array<bool, kGradDim> mask = [] {
        std::array<bool, kGradDim> m{};
        m.fill(true);
        return m;
    }();
};

struct GradientResult {
    Eigen::Matrix<double, kGradDim, 1> gradient = Eigen::Matrix<double, kGradDim, 1>::Zero();
    std::array<bool, kGradDim> clamped{};  // one-sided difference at a joint limit
};

namespace loss_detail {

inline const char* coordinate_name(int i) {
    static const char* names[kGradDim] = {"t[0]", "t[1]", "t[2]", "r[0]", "r[1]", "r[2]",
                                          "q[0]", "q[1]", "q[2]", "q[3]", "q[4]", "q[5]",
                                          "q[6]"};
    return names[i];
}

}  // namespace loss_detail

/// Central differences; joint coordinates at their limits fall back to a
/// one-sided difference and are flagged. Probe failures are rethrown naming
/// the offending coordinate.
inline GradientResult loss_gradient(const HandModel& model, const GraspPose& pose,
                                    const JointConfig& config, const GraspSceneView& scene,
                                    const LossWeights& weights, const LossOptions& options = {},
                                    const GradientOptions& grad = {}) {
    auto evaluate = [&](const GraspPose& p, const JointConfig& q, int coord,
                        const char* side) -> double {
        try {
            return total_loss(model, p, q, scene, weights, options).total;
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("loss_gradient: evaluation failed at probe ") +
                                     loss_detail::coordinate_name(coord) + side + ": " + e.what());
        }
    };

    GradientResult out;
    for (int i = 0; i < kGradDim; ++i) {
        if (!grad.mask[std::size_t(i)]) continue;
        double h;
        if (i < 3) h = grad.step_translation;
        else if (i < 6) h = grad.step_rotation;
        else h = grad.step_joint;

        auto probe = [&](double offset) {
            GraspPose p = pose;
            JointConfig q = config;
            if (i < 3) p.t[i] += offset;
            else if (i < 6) p.r[i - 3] += offset;
            else q[i - 6] += offset;
            return std::make_pair(p, q);
        };

        double lo_off = -h, hi_off = +h;
        bool clamped = false;
        if (i >= 6) {
            const int dof = i - 6;
            const auto& [lo, hi] = model.dof_limits[std::size_t(dof)];
            if (config[dof] + hi_off > hi) { hi_off = 0.0; clamped = true; }
            if (config[dof] + lo_off < lo) { lo_off = 0.0; clamped = true; }
        }
        if (hi_off == 0.0 && lo_off == 0.0) {
            // degenerate limits: no room to probe at all
            out.clamped[std::size_t(i)] = true;
            continue;
        }
        const auto [p_hi, q_hi] = probe(hi_off);
        const auto [p_lo, q_lo] = probe(lo_off);
        const double f_hi = evaluate(p_hi, q_hi, i, "+h");
        const double f_lo = evaluate(p_lo, q_lo, i, "-h");
        out.gradient[i] = (f_hi - f_lo) / (hi_off - lo_off);
        out.clamped[std::size_t(i)] = clamped;
    }
    return out;
}

}  // namespace graspgen
