// The embedded property suite behind `check`: gradient fidelity, epsilon
// oracles, volume convergence, winding agreement and weight recombination,
// each printed as one pass/fail line. The checks re-derive expected values
// through routes independent of the code paths they exercise.
#pragma once

#include "graspgen/config.hpp"
#include "graspgen/sampler.hpp"

#include <chrono>
#include <functional>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

namespace graspgen {

namespace selftest_detail {

/// Nearest-point-in-polytope distance (Wolfe's algorithm); the membership
/// primitive of the epsilon Monte-Carlo estimate.
inline double distance_to_hull6(const Vec6& p, const std::vector<Vec6>& w) {
    double scale = 1e-12;
    for (const auto& wi : w) scale = std::max(scale, (wi - p).norm());
    std::vector<int> corral;
    std::vector<double> lambda;
    {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < int(w.size()); ++i) {
            const double d = (w[std::size_t(i)] - p).squaredNorm();
            if (d < best_d) { best_d = d; best = i; }
        }
        corral = {best};
        lambda = {1.0};
    }
    for (int iter = 0; iter < 200; ++iter) {
        Vec6 x = Vec6::Zero();
        for (std::size_t i = 0; i < corral.size(); ++i)
            x += lambda[i] * w[std::size_t(corral[i])];
        const Vec6 d = x - p;
        if (d.norm() <= 1e-13 * scale) return 0.0;
        int j = -1;
        double best = d.dot(x) - 1e-12 * scale * scale;
        for (int i = 0; i < int(w.size()); ++i) {
            const double v = d.dot(w[std::size_t(i)]);
            if (v < best) { best = v; j = i; }
        }
        if (j < 0) return d.norm();
        bool already = false;
        for (const int c : corral)
            if (c == j) already = true;
        if (already) return d.norm();
        corral.push_back(j);
        lambda.push_back(0.0);
        for (int inner = 0; inner < 64; ++inner) {
            const int k = int(corral.size());
            Eigen::MatrixXd kkt(k + 1, k + 1);
            Eigen::VectorXd rhs(k + 1);
            for (int a = 0; a < k; ++a) {
                for (int b = 0; b < k; ++b)
                    kkt(a, b) = w[std::size_t(corral[std::size_t(a)])].dot(
                        w[std::size_t(corral[std::size_t(b)])]);
                kkt(a, k) = 1.0;
                kkt(k, a) = 1.0;
                rhs(a) = w[std::size_t(corral[std::size_t(a)])].dot(p);
            }
            kkt(k, k) = 0.0;
            rhs(k) = 1.0;
            const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
            bool feasible = true;
            for (int a = 0; a < k; ++a)
                if (sol(a) < 1e-12) feasible = false;
            if (feasible) {
                for (int a = 0; a < k; ++a) lambda[std::size_t(a)] = sol(a);
                break;
            }
            double theta = 1.0;
            for (int a = 0; a < k; ++a)
                if (sol(a) < 1e-12 && lambda[std::size_t(a)] - sol(a) > 1e-300)
                    theta = std::min(theta,
                                     lambda[std::size_t(a)] / (lambda[std::size_t(a)] - sol(a)));
            std::vector<int> nc;
            std::vector<double> nl;
            for (int a = 0; a < k; ++a) {
                const double v = (1.0 - theta) * lambda[std::size_t(a)] + theta * sol(a);
                if (v > 1e-12) {
                    nc.push_back(corral[std::size_t(a)]);
                    nl.push_back(v);
                }
            }
            if (nc.empty()) {
                nc = {corral[0]};
                nl = {1.0};
            }
            corral = std::move(nc);
            lambda = std::move(nl);
        }
        double sum = 0.0;
        for (const double l : lambda) sum += l;
        for (auto& l : lambda) l /= sum;
    }
    Vec6 x = Vec6::Zero();
    for (std::size_t i = 0; i < corral.size(); ++i)
        x += lambda[i] * w[std::size_t(corral[i])];
    return (x - p).norm();
}

inline double mc_inscribed_radius(const std::vector<Vec6>& wrenches, std::uint64_t seed,
                                  std::size_t total_samples, int rounds) {
    if (wrenches.empty()) return 0.0;
    double scale = 1e-12;
    for (const auto& w : wrenches) scale = std::max(scale, w.norm());
    const double tol = 1e-7 * scale;
    if (distance_to_hull6(Vec6::Zero(), wrenches) > tol) return 0.0;
    Rng rng(seed);
    const std::size_t per_round = std::max<std::size_t>(1, total_samples / std::size_t(rounds));
    double lo = 0.0, hi = scale;
    for (int round = 0; round < rounds; ++round) {
        const double mid = 0.5 * (lo + hi);
        bool all_inside = true;
        for (std::size_t s = 0; s < per_round; ++s) {
            Vec6 u;
            for (int i = 0; i < 6; ++i) u[i] = rng.gaussian();
            const double n = u.norm();
            if (n < 1e-9) continue;
            u *= mid / n;
            if (distance_to_hull6(u, wrenches) > tol) {
                all_inside = false;
                break;
            }
        }
        if (all_inside) lo = mid;
        else hi = mid;
    }
    return lo;
}

/// Convex polygon intersection area (clip + shoelace) for the volume oracle.
inline double convex_clip_area(std::vector<std::array<double, 2>> subject,
                               const std::vector<std::array<double, 2>>& clip) {
    auto side = [](const std::array<double, 2>& a, const std::array<double, 2>& b,
                   const std::array<double, 2>& p) {
        return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    };
    for (std::size_t i = 0; i < clip.size(); ++i) {
        const auto& ca = clip[i];
        const auto& cb = clip[(i + 1) % clip.size()];
        std::vector<std::array<double, 2>> out;
        for (std::size_t j = 0; j < subject.size(); ++j) {
            const auto& p = subject[j];
            const auto& q = subject[(j + 1) % subject.size()];
            const double sp = side(ca, cb, p), sq = side(ca, cb, q);
            if (sp >= 0) out.push_back(p);
            if ((sp >= 0) != (sq >= 0)) {
                const double t = sp / (sp - sq);
                out.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
            }
        }
        subject = std::move(out);
        if (subject.empty()) return 0.0;
    }
    double area = 0.0;
    for (std::size_t i = 0; i < subject.size(); ++i) {
        const auto& p = subject[i];
        const auto& q = subject[(i + 1) % subject.size()];
        area += p[0] * q[1] - q[0] * p[1];
    }
    return std::abs(area) * 0.5;
}

inline GraspSceneView canned_fixture() {
    RigidTransform lift = RigidTransform::Identity();
    lift.translation() = Vec3(0, 0, 0.025);
    const TriMesh ball = make_icosphere(0.025, Vec3::Zero(), 2);
    GraspSceneView view;
    view.objects = {std::make_shared<SceneObject>(
        "selftest-sphere", TriMesh::build_shared(ball.vertices(), ball.faces()), lift, 2000, 5)};
    view.target_index = 0;
    view.table = Plane(Vec3::Zero(), Vec3::UnitZ());
    return view;
}

inline GraspPose canned_pose() {
    GraspPose pose;
    pose.t = Vec3(0.03, 0.02, 0.16);
    pose.r = Vec3(2.9, 0.3, 0.1);
    return pose;
}

/// Canned loss breakdown the weight checks recompute against.
inline LossBreakdown canned_breakdown(const LossWeights& weights) {
    static const HandModel hand = make_test_hand();
    const GraspSceneView view = canned_fixture();
    JointConfig q = JointConfig::zeros();
    q[0] = 0.5; q[1] = 0.4; q[3] = 0.3; q[5] = 0.6;
    return total_loss(hand, canned_pose(), q, view, weights);
}

}  // namespace selftest_detail

struct SelftestOptions {
    std::size_t mc_samples = 200000;
    int gradient_states = 8;
    bool quick = false;  // trims budgets for smoke runs
};

/// Runs every embedded property, printing one pass/fail line each; returns
/// true when all pass. Failed property names are listed at the end by main.
inline bool run_selftest(const EngineConfig& config, std::ostream& out,
                         std::vector<std::string>* failed_names = nullptr,
                         const SelftestOptions& options = {}) {
    using clock = std::chrono::steady_clock;
    static const HandModel hand = make_test_hand();
    const GraspSceneView fixture = selftest_detail::canned_fixture();
    bool all_passed = true;
    const auto t_suite = clock::now();

    auto property = [&](const std::string& name,
                        const std::function<std::pair<bool, std::string>()>& body) {
        const auto t0 = clock::now();
        bool pass = false;
        std::string message;
        try {
            const auto [ok, msg] = body();
            pass = ok;
            message = msg;
        } catch (const std::exception& e) {
            message = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        out << (pass ? "[PASS] " : "[FAIL] ") << name << " (" << std::fixed
            << std::setprecision(2) << secs << " s)";
        if (!pass && !message.empty()) out << ": " << message;
        out << "\n";
        if (!pass) {
            all_passed = false;
            if (failed_names) failed_names->push_back(name);
        }
    };

    property("winding-vs-parity", [&]() -> std::pair<bool, std::string> {
        const AccelMesh shapes[] = {AccelMesh(make_icosphere(0.4, Vec3::Zero(), 2)),
                                    AccelMesh(make_box(Vec3(-0.3, -0.2, -0.1), Vec3(0.3, 0.2, 0.1)))};
        Rng rng(100);
        for (const auto& shape : shapes) {
            for (int i = 0; i < (options.quick ? 50 : 200); ++i) {
                const Vec3 q(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                             rng.uniform(-0.5, 0.5));
                const bool fast = shape.bvh().contains(q);
                const bool exact = std::abs(winding_number(shape.mesh(), q)) > 0.5;
                if (fast != exact) return {false, "fast/exact winding disagreement"};
            }
        }
        return {true, ""};
    });

    property("gradient-richardson", [&]() -> std::pair<bool, std::string> {
        Rng rng(4242);
        const int states = options.quick ? 3 : options.gradient_states;
        for (int s = 0; s < states; ++s) {
            GraspPose pose;
            pose.t = Vec3(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05),
                          rng.uniform(0.12, 0.25));
            pose.r = Vec3(2.9, 0, 0) + 0.2 * rng.gaussian_vec3();
            JointConfig q = JointConfig::zeros();
            q[0] = rng.uniform(0.1, 1.4);
            q[1] = q[3] = q[5] = rng.uniform(0.1, 1.0);
            for (int shift = 0; shift < 3; ++shift) {
                GradientOptions h1, h2, h4;
                h1.step_translation = h1.step_rotation = h1.step_joint = 1e-5;
                h2.step_translation = h2.step_rotation = h2.step_joint = 5e-6;
                h4.step_translation = h4.step_rotation = h4.step_joint = 2.5e-6;
                const auto g1 = loss_gradient(hand, pose, q, fixture, config.weights, {}, h1);
                const auto g2 = loss_gradient(hand, pose, q, fixture, config.weights, {}, h2);
                const auto g4 = loss_gradient(hand, pose, q, fixture, config.weights, {}, h4);
                bool ok = true;
                for (int i = 0; i < kGradDim && ok; ++i) {
                    if (g1.clamped[std::size_t(i)]) continue;
                    const double d1 = g1.gradient[i] - g2.gradient[i];
                    const double d2 = g2.gradient[i] - g4.gradient[i];
                    const double floor = 1e-6 * (1.0 + std::abs(g1.gradient[i]));
                    if (std::abs(d1) < floor) continue;
                    if (d1 / d2 < 3.6 || d1 / d2 > 4.4) ok = false;
                }
                if (ok) goto state_passed;
                // the stencil probably straddled a distance-field kink; probe
                // a nearby state instead
                pose.t += 1e-4 * rng.gaussian_vec3();
            }
            return {false, "Richardson ratio out of range after retries"};
        state_passed:;
        }
        return {true, ""};
    });

    property("gradient-analytic", [&]() -> std::pair<bool, std::string> {
        // orientation lateral derivative
        GraspPose pose;
        pose.t = Vec3(0.08, -0.05, 0.35);
        pose.r = Vec3(kPi, 0, 0);
        LossWeights w_orient;
        w_orient.w_cont = w_orient.w_coll = w_orient.w_plane = 0.0;
        w_orient.w_orient = 1.0;
        const auto g = loss_gradient(hand, pose, JointConfig::zeros(), fixture, w_orient);
        const PosedHand posed = forward_kinematics(hand, pose, JointConfig::zeros());
        const Vec3 diff = fixture.target().center_world() - pose.t;
        const Vec3 o = diff.normalized();
        const Vec3 analytic = (posed.approach_dir - posed.approach_dir.dot(o) * o) / diff.norm();
        for (int i = 0; i < 3; ++i)
            if (std::abs(g.gradient[i] - analytic[i]) > 1e-5)
                return {false, "orientation gradient mismatch"};

        // plane loss slope: -1 per below-plane vertex along the normal
        GraspPose low;
        low.t = Vec3(0.3, 0.0, 0.0123);
        const PosedHand posed_low = forward_kinematics(hand, low, JointConfig::zeros());
        int below = 0;
        for (const auto& v : posed_low.vertices)
            if (v.z() < 0.0) ++below;
        LossWeights w_plane;
        w_plane.w_cont = w_plane.w_coll = w_plane.w_orient = 0.0;
        w_plane.w_plane = 1.0;
        const auto gp = loss_gradient(hand, low, JointConfig::zeros(), fixture, w_plane);
        if (std::abs(gp.gradient[2] + double(below)) > 1e-5)
            return {false, "plane gradient mismatch"};
        return {true, ""};
    });

    property("epsilon-mc-oracle", [&]() -> std::pair<bool, std::string> {
        std::vector<Contact> cage;
        const Vec3 dirs[3] = {Vec3(1, 0.2, 0.1).normalized(), Vec3(-0.5, 0.9, 0.2).normalized(),
                              Vec3(-0.4, -0.8, 0.45).normalized()};
        for (const auto& d : dirs) {
            Contact c;
            c.position = d;
            c.normal = -d;
            c.friction_mu = 0.9;
            cage.push_back(c);
        }
        const double eps = epsilon_quality(cage, 8, 1.0);
        std::vector<Vec6> wrenches;
        for (const auto& c : cage) {
            const auto w = friction_cone_wrenches(c, 8, 1.0);
            wrenches.insert(wrenches.end(), w.begin(), w.end());
        }
        const double mc = selftest_detail::mc_inscribed_radius(
            wrenches, 99, options.quick ? 50000 : options.mc_samples, 18);
        if (eps <= 0.0) return {false, "caging epsilon not positive"};
        if (std::abs(eps - mc) > 0.05 * mc) return {false, "epsilon vs Monte-Carlo > 5%"};

        Contact single;
        single.position = Vec3(1, 0, 0);
        single.normal = Vec3(-1, 0, 0);
        if (epsilon_quality({single}, 8, 1.0) != 0.0) return {false, "single contact not 0"};
        std::vector<Contact> flat;
        for (int i = 0; i < 4; ++i) {
            Contact c;
            c.position = Vec3(std::cos(i * kPi / 2), std::sin(i * kPi / 2), 0);
            c.normal = Vec3(0, 0, 1);
            c.friction_mu = 0.5;
            flat.push_back(c);
        }
        if (epsilon_quality(flat, 8, 1.0) != 0.0) return {false, "coplanar set not 0"};
        return {true, ""};
    });

    property("epsilon-monotonic", [&]() -> std::pair<bool, std::string> {
        Rng rng(2718);
        for (int trial = 0; trial < (options.quick ? 5 : 20); ++trial) {
            std::vector<Contact> contacts;
            const int n = 3 + int(rng.uniform_index(3));
            for (int i = 0; i < n; ++i) {
                Contact c;
                c.position = rng.unit_vec3();
                c.normal = (-c.position + 0.25 * rng.gaussian_vec3()).normalized();
                c.friction_mu = 0.2;
                contacts.push_back(c);
            }
            const double lo = epsilon_quality(contacts, 8, 1.0);
            auto hi_set = contacts;
            for (auto& c : hi_set) c.friction_mu = 0.8;
            if (epsilon_quality(hi_set, 8, 1.0) < lo - 1e-9)
                return {false, "epsilon decreased with friction"};
            auto extra = contacts;
            Contact c;
            c.position = rng.unit_vec3();
            c.normal = (-c.position + 0.25 * rng.gaussian_vec3()).normalized();
            c.friction_mu = 0.2;
            extra.push_back(c);
            if (epsilon_quality(extra, 8, 1.0) < lo - 1e-9)
                return {false, "epsilon decreased when adding a contact"};
        }
        return {true, ""};
    });

    property("volume-convergence", [&]() -> std::pair<bool, std::string> {
        const AccelMesh a(make_box(Vec3::Zero(), Vec3::Ones()));
        RigidTransform tb = RigidTransform::Identity();
        tb.linear() =
            Eigen::AngleAxisd(20.0 * kPi / 180.0, Vec3::UnitZ()).toRotationMatrix();
        tb.translation() = Vec3(0.93, 0.41, 0.0);
        const AccelMesh b(transform_mesh(make_box(Vec3(-0.5, -0.5, 0.0), Vec3(0.5, 0.5, 1.0)), tb));
        std::vector<std::array<double, 2>> sq_a = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        std::vector<std::array<double, 2>> sq_b;
        for (const auto& corner : {Vec3(-0.5, -0.5, 0), Vec3(0.5, -0.5, 0), Vec3(0.5, 0.5, 0),
                                   Vec3(-0.5, 0.5, 0)}) {
            const Vec3 w = tb * corner;
            sq_b.push_back({w.x(), w.y()});
        }
        const double analytic = selftest_detail::convex_clip_area(sq_a, sq_b) * 1e6;
        const double v2 = interpenetration_volume_cm3(a, b, 0.02);
        const double v1 = interpenetration_volume_cm3(a, b, 0.01);
        if (std::abs(v1 - analytic) > 0.02 * analytic) return {false, "1 cm voxels off by > 2%"};
        if (std::abs(v1 - analytic) >= std::abs(v2 - analytic))
            return {false, "error did not decrease with voxel size"};
        return {true, ""};
    });

    property("weights-recombination", [&]() -> std::pair<bool, std::string> {
        const LossBreakdown b = selftest_detail::canned_breakdown(config.weights);
        const double recombined = config.weights.w_cont * b.cont + config.weights.w_coll * b.coll +
                                  config.weights.w_orient * b.orient +
                                  config.weights.w_plane * b.plane;
        if (std::abs(b.total - recombined) > 1e-12 * (1.0 + std::abs(b.total)))
            return {false, "total != weights . components"};
        LossWeights doubled = config.weights;
        doubled.w_cont *= 2;
        doubled.w_coll *= 2;
        doubled.w_orient *= 2;
        doubled.w_plane *= 2;
        const LossBreakdown b2 = selftest_detail::canned_breakdown(doubled);
        if (std::abs(b2.total - 2.0 * b.total) > 1e-12 * (1.0 + std::abs(b.total)))
            return {false, "doubling weights did not double the total"};
        if (config.selftest.present) {
            const LossBreakdown ref = selftest_detail::canned_breakdown(config.selftest.weights);
            const auto& e = config.selftest.expected;
            const double tol = 1e-9;
            if (std::abs(ref.cont - e.cont) > tol || std::abs(ref.coll - e.coll) > tol ||
                std::abs(ref.orient - e.orient) > tol || std::abs(ref.plane - e.plane) > tol)
                return {false, "reference components do not match this build"};
            const double expect_total =
                config.selftest.weights.w_cont * e.cont + config.selftest.weights.w_coll * e.coll +
                config.selftest.weights.w_orient * e.orient +
                config.selftest.weights.w_plane * e.plane;
            if (std::abs(e.total - expect_total) > tol)
                return {false, "reference total inconsistent with reference weights"};
        }
        return {true, ""};
    });

    const double total = std::chrono::duration<double>(clock::now() - t_suite).count();
    out << (all_passed ? "all properties passed" : "some properties FAILED") << " in "
        << std::fixed << std::setprecision(2) << total << " s\n";
    return all_passed;
}

/// Default config with a freshly computed self-test reference block.
inline EngineConfig default_config_with_reference() {
    EngineConfig cfg;
    cfg.selftest.present = true;
    cfg.selftest.weights = cfg.weights;
    cfg.selftest.expected = selftest_detail::canned_breakdown(cfg.weights);
    return cfg;
}

}  // namespace graspgen
