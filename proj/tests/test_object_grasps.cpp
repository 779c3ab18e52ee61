#include "graspgen/object_grasps.hpp"

#include "oracles.hpp"

#include <catch2/catch.hpp>

using namespace graspgen;

namespace {

const HandModel& fixture_hand() {
    static const HandModel hand = make_test_hand();
    return hand;
}

ObjectLibrary fixture_pool() {
    ObjectLibrary pool;
    pool.add("sphere", make_icosphere(0.035, Vec3::Zero(), 2));
    pool.add("box", make_box(Vec3(-0.03, -0.02, -0.04), Vec3(0.03, 0.02, 0.04)));
    return pool;
}

}  // namespace

TEST_CASE("sphere_covering: spacing close to the uniform-coverage ideal") {
    const auto dirs = sphere_covering(64, 3);
    REQUIRE(dirs.size() == 64);
    // ideal spacing for 64 equal caps
    const double ideal = std::acos(1.0 - 2.0 / 64.0);
    for (const auto& d : dirs) {
        REQUIRE(d.norm() == Approx(1.0).margin(1e-12));
        double nearest = kPi;
        for (const auto& e : dirs) {
            if (&d == &e) continue;
            nearest = std::min(nearest, std::acos(std::clamp(d.dot(e), -1.0, 1.0)));
        }
        REQUIRE(std::abs(nearest - ideal) < 15.0 * kPi / 180.0);
    }
    // coverage: no probe direction farther than 25 degrees from a sample
    Rng rng(9);
    for (int i = 0; i < 2000; ++i) {
        const Vec3 p = rng.unit_vec3();
        double best = kPi;
        for (const auto& d : dirs) best = std::min(best, std::acos(std::clamp(p.dot(d), -1.0, 1.0)));
        REQUIRE(best < 25.0 * kPi / 180.0);
    }
}

TEST_CASE("generate_object_grasps: exact record counts") {
    const HandModel& hand = fixture_hand();
    const ObjectLibrary pool = fixture_pool();
    const auto one = generate_object_grasps(hand, pool.at("sphere"), 1, 5);
    REQUIRE(one.size() == 6);  // 1 direction x 2 standoffs x 3 spreads
    const auto many = generate_object_grasps(hand, pool.at("sphere"), 64, 5);
    REQUIRE(many.size() == 384);
}

TEST_CASE("generate_object_grasps: deterministic per seed") {
    const HandModel& hand = fixture_hand();
    const ObjectLibrary pool = fixture_pool();
    const auto a = generate_object_grasps(hand, pool.at("box"), 8, 123);
    const auto b = generate_object_grasps(hand, pool.at("box"), 8, 123);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE((a[i].pose.t - b[i].pose.t).norm() == 0.0);
        REQUIRE((a[i].pose.r - b[i].pose.r).norm() == 0.0);
        for (int d = 0; d < kHandDof; ++d) REQUIRE(a[i].config[d] == b[i].config[d]);
    }
}

TEST_CASE("generate_object_grasps: orientation loss is near zero by construction") {
    const HandModel& hand = fixture_hand();
    const ObjectLibrary pool = fixture_pool();
    const auto& obj = pool.at("sphere");
    const auto records = generate_object_grasps(hand, obj, 16, 77);
    auto view_obj = std::make_shared<SceneObject>("sphere", obj.geometry.mesh_ptr(),
                                                  RigidTransform::Identity(), 100, 1);
    for (const auto& rec : records) {
        const PosedHand posed = forward_kinematics(hand, rec.pose, JointConfig::zeros());
        REQUIRE(orientation_loss(posed, view_obj->center_world()) < 0.05);
    }
}

TEST_CASE("generate_object_grasps: wrist sits at standoff from a sphere surface") {
    const HandModel& hand = fixture_hand();
    ObjectLibrary pool;
    pool.add("ball", make_icosphere(0.04, Vec3::Zero(), 3));
    const auto records = generate_object_grasps(hand, pool.at("ball"), 4, 9);
    for (const auto& rec : records) {
        const double dist_from_center = rec.pose.t.norm();
        // faceted sphere: radius within facet sag of 0.04
        const double expected = 0.04 + kStandoffs[std::size_t(rec.standoff_class)];
        REQUIRE(dist_from_center == Approx(expected).margin(2e-3));
    }
}

TEST_CASE("transfer_grasps: identity placement reproduces object-centric poses") {
    const HandModel& hand = fixture_hand();
    const ObjectLibrary pool = fixture_pool();
    Scene scene;
    scene.table.plane = Plane(Vec3(0, 0, -10.0), Vec3::UnitZ());  // table far below
    scene.objects.push_back(
        {"sphere", pool.at("sphere").content_hash, RigidTransform::Identity(), 0});
    auto records = generate_object_grasps(hand, pool.at("sphere"), 2, 3);
    const auto transferred = transfer_grasps(records, scene, "s0", pool, QualityParams{}, hand,
                                             LossWeights{}, 500);
    REQUIRE(transferred.size() == records.size());
    for (const auto& tg : transferred) {
        REQUIRE((tg.world_pose.t - records[tg.record_index].pose.t).norm() < 1e-12);
        REQUIRE(rotation_from_axis_angle(tg.world_pose.r)
                    .isApprox(rotation_from_axis_angle(records[tg.record_index].pose.r), 1e-9));
    }
}

TEST_CASE("transfer_grasps: translated object shifts grasps exactly") {
    const HandModel& hand = fixture_hand();
    const ObjectLibrary pool = fixture_pool();
    RigidTransform shift = RigidTransform::Identity();
    shift.translation() = Vec3(0.3, 0, 0);
    Scene scene;
    scene.table.plane = Plane(Vec3(0, 0, -10.0), Vec3::UnitZ());
    scene.objects.push_back({"sphere", pool.at("sphere").content_hash, shift, 0});
    auto records = generate_object_grasps(hand, pool.at("sphere"), 2, 3);
    const auto transferred = transfer_grasps(records, scene, "s0", pool, QualityParams{}, hand,
                                             LossWeights{}, 500);
    for (const auto& tg : transferred)
        REQUIRE((tg.world_pose.t - records[tg.record_index].pose.t - Vec3(0.3, 0, 0)).norm() <
                1e-12);
}

TEST_CASE("transfer_grasps: grasp through an obstacle is labeled in collision") {
    const HandModel& hand = fixture_hand();
    ObjectLibrary pool;
    // ball small enough that the open finger cage closes around it cleanly
    pool.add("ball", make_icosphere(0.02, Vec3::Zero(), 2));
    pool.add("wall", make_box(Vec3(-0.01, -0.2, -0.1), Vec3(0.01, 0.2, 0.1)));

    // grasp approaching from +x; a wall placed across that approach collides
    auto records = generate_object_grasps(hand, pool.at("ball"), 32, 4);
    Scene scene;
    scene.table.plane = Plane(Vec3(0, 0, -10.0), Vec3::UnitZ());
    scene.objects.push_back({"ball", pool.at("ball").content_hash, RigidTransform::Identity(), 0});
    RigidTransform wall_pose = RigidTransform::Identity();
    wall_pose.translation() = Vec3(0.08, 0, 0);
    scene.objects.push_back({"wall", pool.at("wall").content_hash, wall_pose, 0});

    const auto transferred = transfer_grasps(records, scene, "s0", pool, QualityParams{}, hand,
                                             LossWeights{}, 500);
    bool found_blocked = false, found_free = false;
    for (const auto& tg : transferred) {
        if (tg.instance_index != 0) continue;  // only ball-targeted grasps
        const auto& rec = records[tg.record_index];
        const Vec3 approach_from = rec.pose.t.normalized();
        if (approach_from.x() > 0.8) {
            // hand sits in the +x corridor straddling the wall
            found_blocked = found_blocked || !tg.label.collision_free;
        } else if (approach_from.x() < -0.8) {
            found_free = found_free || tg.label.collision_free;
        }
    }
    REQUIRE(found_blocked);
    REQUIRE(found_free);
}

TEST_CASE("transfer labels are invariant under a whole-scene rigid transform") {
    const HandModel& hand = fixture_hand();
    const ObjectLibrary pool = fixture_pool();
    auto records_a = generate_object_grasps(hand, pool.at("sphere"), 4, 21);
    auto records_b = records_a;

    Scene base;
    base.table.plane = Plane(Vec3::Zero(), Vec3::UnitZ());
    RigidTransform lift = RigidTransform::Identity();
    lift.translation() = Vec3(0, 0, 0.035);
    base.objects.push_back({"sphere", pool.at("sphere").content_hash, lift, 0});

    RigidTransform world = RigidTransform::Identity();
    world.linear() = Eigen::AngleAxisd(0.7, Vec3(0.2, 0.1, 1).normalized()).toRotationMatrix();
    world.translation() = Vec3(0.5, -0.2, 0.3);
    Scene moved = base;
    moved.objects[0].transform = world * base.objects[0].transform;
    moved.table.plane = Plane(world * base.table.plane.point,
                              world.linear() * base.table.plane.normal);

    const auto ta = transfer_grasps(records_a, base, "s0", pool, QualityParams{}, hand,
                                    LossWeights{}, 500);
    const auto tb = transfer_grasps(records_b, moved, "s0", pool, QualityParams{}, hand,
                                    LossWeights{}, 500);
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
        REQUIRE(ta[i].label.collision_free == tb[i].label.collision_free);
        REQUIRE(ta[i].label.epsilon == Approx(tb[i].label.epsilon).margin(1e-9));
    }
}

TEST_CASE("transfer_grasps rejects records for objects not in the scene") {
    const HandModel& hand = fixture_hand();
    const ObjectLibrary pool = fixture_pool();
    auto records = generate_object_grasps(hand, pool.at("sphere"), 1, 1);
    Scene scene;
    scene.objects.push_back({"box", pool.at("box").content_hash, RigidTransform::Identity(), 0});
    REQUIRE_THROWS(transfer_grasps(records, scene, "s0", pool, QualityParams{}, hand,
                                   LossWeights{}, 500));
}
