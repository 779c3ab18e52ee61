// Coarse-to-fine grasp synthesis for a target in a cluttered scene:
// table-aware input rotations, coarse wrist placement on the approach ray,
// gradient descent on the total loss over (t, r, spread), finger refinement,
// and full evaluation. Replaces the learned generator with a deterministic,
// verifiable pipeline of the same shape.
#pragma once

#include "graspgen/config.hpp"
#include "graspgen/losses.hpp"
#include "graspgen/quality.hpp"
#include "graspgen/refinement.hpp"
#include "graspgen/scene_context.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace graspgen {

struct SamplerConfig {
    int n_grasps = 100;
    bool rotation_filter = true;
    double max_polar_deg = 72.0;  // cap half-angle of the approach hemisphere
    std::array<double, 2> standoffs = {0.02, 0.08};
    DescentConfig descent;
    LossWeights weights;
    QualityParams metric;
    LossOptions loss_options;
    double clearance = 0.01;  // finger refinement threshold t_d
    std::uint64_t seed = 0;
    int jobs = 0;
};

inline SamplerConfig sampler_from_engine(const EngineConfig& cfg) {
    SamplerConfig s;
    s.n_grasps = cfg.sampler.n_grasps;
    s.rotation_filter = cfg.sampler.rotation_filter;
    s.max_polar_deg = cfg.sampler.max_polar_deg;
    s.descent = cfg.sampler.descent;
    s.weights = cfg.weights;
    s.metric = cfg.metric;
    s.loss_options.contact_mode = cfg.contact_mode;
    s.clearance = cfg.metric.contact_tolerance;
    s.seed = cfg.seed;
    return s;
}

namespace sampler_detail {

/// Palm-frame azimuth at which the hand has the widest angular gap between
/// finger chains; rolling the world "downhill" direction into this gap keeps
/// fingers away from the table on shallow approaches.
inline double widest_finger_gap_azimuth(const HandModel& model) {
    std::vector<double> azimuths;
    for (const auto& finger : model.fingers) {
        const auto& first_joint = model.joints[std::size_t(finger.proximal_joint)];
        // walk up to the joint attached to the palm to find the base offset
        Vec3 base = first_joint.origin.translation();
        int parent = first_joint.parent_link;
        for (const auto& j : model.joints) {
            if (j.child_link == parent) {
                base = j.origin.translation() + base;
                parent = j.parent_link;
            }
        }
        if (base.head<2>().norm() > 1e-9) azimuths.push_back(std::atan2(base.y(), base.x()));
    }
    if (azimuths.empty()) return 0.0;
    std::sort(azimuths.begin(), azimuths.end());
    double best_gap = -1.0, best_center = 0.0;
    for (std::size_t i = 0; i < azimuths.size(); ++i) {
        const double a = azimuths[i];
        const double b = i + 1 < azimuths.size() ? azimuths[i + 1] : azimuths[0] + 2.0 * kPi;
        if (b - a > best_gap) {
            best_gap = b - a;
            best_center = 0.5 * (a + b);
        }
    }
    return best_center;
}

}  // namespace sampler_detail

/// Input rotations whose induced approach direction points toward the table
/// (negative dot with the table normal), spread over the hemisphere cap of
/// half-angle `max_polar_deg` and rolled so the finger gap faces downhill.
inline std::vector<Vec3> sample_input_rotations(const HandModel& model, const Plane& table,
                                                int n, std::uint64_t seed,
                                                double max_polar_deg = 72.0) {
    if (n < 1) throw std::invalid_argument("sample_input_rotations: n must be >= 1");
    Rng rng(seed);
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    const Vec3 pole = -table.normal;  // approaches point down toward the table
    // orthonormal frame around the pole
    int min_axis = 0;
    pole.cwiseAbs().minCoeff(&min_axis);
    const Vec3 u = pole.cross(Vec3::Unit(min_axis)).normalized();
    const Vec3 v = pole.cross(u);

    const double cos_max = std::cos(max_polar_deg * kPi / 180.0);
    const double gap_azimuth = sampler_detail::widest_finger_gap_azimuth(model);
    const double golden = kPi * (3.0 - std::sqrt(5.0));

    std::vector<Vec3> rotations;
    rotations.reserve(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        // equal-area spiral over the spherical cap
        const double c = 1.0 - (1.0 - cos_max) * (i + 0.5) / n;
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        const double a = phase + golden * i;
        const Vec3 d = c * pole + s * (std::cos(a) * u + std::sin(a) * v);

        const Mat3 base = rotation_between(model.approach_axis, d);
        // roll the widest finger gap toward the downhill direction
        Mat3 rot = base;
        const Vec3 local_down = base.transpose() * (-table.normal);
        if (local_down.head<2>().norm() > 1e-6) {
            const double down_azimuth = std::atan2(local_down.y(), local_down.x());
            rot = base * Eigen::AngleAxisd(down_azimuth - gap_azimuth,
                                           model.approach_axis).toRotationMatrix();
        }
        rotations.push_back(axis_angle_from_rotation(rot));
    }
    return rotations;
}

struct CoarseGrasp {
    GraspPose pose;
    JointConfig config;
    bool ray_fallback = false;  // ray through the center missed the surface
};

/// Places the wrist along the approach ray through the target center at
/// `standoff` from the surface, spread preset, flexion zero.
inline CoarseGrasp coarse_pose(const HandModel& model, const SceneObject& target,
                               const Vec3& input_rotation, double standoff, double spread) {
    if (standoff <= 0.0) throw std::invalid_argument("coarse_pose: standoff must be > 0");
    CoarseGrasp out;
    const Mat3 rot = rotation_from_axis_angle(input_rotation);
    const Vec3 approach = rot * model.approach_axis;
    const Vec3 center = target.center_world();
    // cast from the center toward the hand side (-approach) in object frame
    const Vec3 origin_local = target.inverse_transform() * center;
    const Vec3 dir_local = target.inverse_transform().linear() * (-approach);
    const auto hits = target.geometry().bvh().ray_hits(origin_local, dir_local);
    double surface_t = 0.0;
    if (hits.empty()) {
        out.ray_fallback = true;  // grazing: fall back to center-relative standoff
    } else {
        surface_t = hits.back();
    }
    out.pose.t = center - approach * (surface_t + standoff);
    out.pose.r = canonicalize_axis_angle(input_rotation);
    out.config = JointConfig::zeros();
    out.config[model.spread_dof] =
        std::clamp(spread, model.dof_limits[std::size_t(model.spread_dof)].first,
                   model.dof_limits[std::size_t(model.spread_dof)].second);
    return out;
}

struct SampledGrasp {
    GraspPose pose;          // world frame, after descent
    JointConfig config;      // after finger refinement
    GraspEvaluation evaluation;
    bool kept = false;       // collision-free survivors
    // provenance
    Vec3 input_rotation = Vec3::Zero();
    GraspPose coarse_pose;
    JointConfig coarse_config;
    int descent_iterations = 0;
    bool descent_stalled = false;
    bool ray_fallback = false;
    int standoff_class = 0;
    int spread_class = 0;
    double plane_lift = 0.0;         // hard-filter translation along the table normal
    std::vector<double> loss_trace;  // accepted total-loss values
};

/// Gradient descent on the total loss over (t, r, spread) with backtracking,
/// then finger refinement against the target, then full evaluation.
inline SampledGrasp refine_grasp(const HandModel& model, const CoarseGrasp& coarse,
                                 const GraspSceneView& scene, const SamplerConfig& cfg) {
    SampledGrasp out;
    out.coarse_pose = coarse.pose;
    out.coarse_config = coarse.config;
    out.ray_fallback = coarse.ray_fallback;

    GraspPose pose = coarse.pose;
    JointConfig config = coarse.config;
    const int spread_dof = model.spread_dof;

    GradientOptions grad;
    grad.mask.fill(false);
    for (int i = 0; i < 6; ++i) grad.mask[std::size_t(i)] = true;
    grad.mask[std::size_t(6 + spread_dof)] = true;

    // per-coordinate trust-region scales
    Eigen::Matrix<double, kGradDim, 1> scales = Eigen::Matrix<double, kGradDim, 1>::Zero();
    for (int i = 0; i < 3; ++i) scales[i] = cfg.descent.step_translation;
    for (int i = 3; i < 6; ++i) scales[i] = cfg.descent.step_rotation;
    scales[6 + spread_dof] = cfg.descent.step_rotation;

    double current = total_loss(model, pose, config, scene, cfg.weights, cfg.loss_options).total;
    out.loss_trace.push_back(current);
    int quiet_iterations = 0;
    for (int iter = 0; iter < cfg.descent.max_iterations; ++iter) {
        const auto g =
            loss_gradient(model, pose, config, scene, cfg.weights, cfg.loss_options, grad);
        Eigen::Matrix<double, kGradDim, 1> scaled = Eigen::Matrix<double, kGradDim, 1>::Zero();
        for (int i = 0; i < kGradDim; ++i) scaled[i] = g.gradient[i] * scales[i];
        const double norm = scaled.norm();
        if (norm < 1e-14) break;  // flat

        bool accepted = false;
        double alpha = 1.0;
        for (int halving = 0; halving <= cfg.descent.max_halvings; ++halving) {
            GraspPose cand_pose = pose;
            JointConfig cand_config = config;
            for (int i = 0; i < 3; ++i)
                cand_pose.t[i] -= alpha * scales[i] * scaled[i] / norm;
            for (int i = 3; i < 6; ++i)
                cand_pose.r[i - 3] -= alpha * scales[i] * scaled[i] / norm;
            const int sc = 6 + spread_dof;
            cand_config[spread_dof] -= alpha * scales[sc] * scaled[sc] / norm;
            cand_config = model.clamp_to_limits(cand_config);
            const double cand =
                total_loss(model, cand_pose, cand_config, scene, cfg.weights, cfg.loss_options)
                    .total;
            if (cand < current) {
                const double improvement = current - cand;
                pose = cand_pose;
                config = cand_config;
                current = cand;
                out.loss_trace.push_back(current);
                accepted = true;
                quiet_iterations = improvement < cfg.descent.tolerance ? quiet_iterations + 1 : 0;
                break;
            }
            alpha *= 0.5;
        }
        ++out.descent_iterations;
        if (!accepted) {
            out.descent_stalled = out.descent_iterations <= 1;
            break;
        }
        if (quiet_iterations >= cfg.descent.patience) break;
    }

    pose.r = canonicalize_axis_angle(pose.r);

    // The hard table filter: the descent equilibrium can leave a few
    // vertices millimeters under the plane (the contact pull outweighs the
    // linear plane penalty), so project the hand clear of the support
    // halfspace, and again after the fingers close.
    auto lift_above_table = [&](const JointConfig& q) {
        const PosedHand posed = forward_kinematics(model, pose, q);
        double deficit = 0.0;
        for (const auto& v : posed.vertices)
            deficit = std::max(deficit, -scene.table.signed_distance(v));
        if (deficit > 0.0) {
            pose.t += (deficit + 1e-6) * scene.table.normal;
            out.plane_lift += deficit + 1e-6;
        }
    };
    lift_above_table(config);

    const SceneObject& target = scene.target();
    const auto refined = finger_refinement(model, pose, config, target.geometry(), cfg.clearance,
                                           target.world_transform());
    lift_above_table(refined.refined);

    out.pose = pose;
    out.config = refined.refined;
    out.evaluation = evaluate_grasp(model, pose, out.config, scene, cfg.weights, cfg.metric,
                                    cfg.loss_options);
    out.kept = out.evaluation.collision_free;
    return out;
}

struct SampleRun {
    std::vector<SampledGrasp> grasps;  // all sampled, including removed
    std::vector<int> ranked_kept;      // indices of kept grasps, best first
    double elapsed_seconds = 0.0;
};

/// Full pipeline: rotations -> coarse -> descend -> refine -> evaluate,
/// parallel over grasps with per-index derived seeds, then rank the kept set.
inline SampleRun sample_grasps(const HandModel& model, const GraspSceneView& scene,
                               const SamplerConfig& cfg) {
    if (scene.objects.empty()) throw std::invalid_argument("sample_grasps: empty scene");
    SampleRun run;
    const auto t0 = std::chrono::steady_clock::now();

    const double polar = cfg.rotation_filter ? cfg.max_polar_deg : 179.0;
    const auto rotations =
        sample_input_rotations(model, scene.table, cfg.n_grasps, cfg.seed, polar);

    run.grasps.resize(std::size_t(cfg.n_grasps));
    parallel_for(std::size_t(cfg.n_grasps), [&](std::size_t i) {
        const int standoff_class = int(i) % 2;
        const int spread_class = (int(i) / 2) % 3;
        const double spread = kPi / 4.0 * spread_class;  // 0, 45, 90 degrees
        const CoarseGrasp coarse =
            coarse_pose(model, scene.target(), rotations[i], cfg.standoffs[std::size_t(standoff_class)],
                        spread);
        SampledGrasp g = refine_grasp(model, coarse, scene, cfg);
        g.input_rotation = rotations[i];
        g.standoff_class = standoff_class;
        g.spread_class = spread_class;
        run.grasps[i] = std::move(g);
    }, cfg.jobs);

    std::vector<GraspEvaluation> kept_evals;
    std::vector<int> kept_indices;
    for (int i = 0; i < int(run.grasps.size()); ++i) {
        if (run.grasps[std::size_t(i)].kept) {
            kept_evals.push_back(run.grasps[std::size_t(i)].evaluation);
            kept_indices.push_back(i);
        }
    }
    if (!kept_evals.empty()) {
        for (const int local : rank_grasps(kept_evals, int(kept_evals.size())))
            run.ranked_kept.push_back(kept_indices[std::size_t(local)]);
    }
    run.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

/// Histogram of finger spreads over configurable bins.
struct SpreadHistogram {
    std::vector<int> counts;
    double lo = 0.0, hi = kPi;

    int total() const {
        int t = 0;
        for (const int c : counts) t += c;
        return t;
    }
};

inline SpreadHistogram spread_histogram(const std::vector<SampledGrasp>& grasps, int bins = 10,
                                        double lo = 0.0, double hi = kPi) {
    if (grasps.empty()) throw std::invalid_argument("spread_histogram: empty grasp list");
    if (bins < 1) throw std::invalid_argument("spread_histogram: bins must be >= 1");
    SpreadHistogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(std::size_t(bins), 0);
    for (const auto& g : grasps) {
        const double s = std::clamp(g.config.spread(), lo, hi);
        int bin = int((s - lo) / (hi - lo) * bins);
        bin = std::clamp(bin, 0, bins - 1);
        h.counts[std::size_t(bin)] += 1;
    }
    return h;
}

}  // namespace graspgen
