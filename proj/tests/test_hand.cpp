#include "graspgen/hand.hpp"
#include "graspgen/hand_io.hpp"

#include <catch2/catch.hpp>

#include <filesystem>

using namespace graspgen;

namespace {
const HandModel& fixture_hand() {
    static const HandModel hand = make_test_hand();
    return hand;
}
}  // namespace

TEST_CASE("fixture hand: structure sanity") {
    const HandModel& hand = fixture_hand();
    REQUIRE(hand.fingers.size() == 3);
    REQUIRE(hand.joints.size() == 8);  // 2 spread + 3x(prox+dist)
    REQUIRE(hand.total_vertices > 0);
    REQUIRE_FALSE(hand.contact_vertex_ids.empty());
    const TriMesh rest = hand.rest_mesh();
    REQUIRE(rest.watertight());
    // palm ~8 cm across
    REQUIRE(rest.bounds().max.x() - rest.bounds().min.x() >= 0.08);
}

TEST_CASE("FK: identity pose, zero config leaves the palm unmoved") {
    const HandModel& hand = fixture_hand();
    const PosedHand posed = forward_kinematics(hand, GraspPose{}, JointConfig::zeros());
    const auto& palm_mesh = hand.links[0].mesh;
    for (std::size_t v = 0; v < palm_mesh.vertex_count(); ++v)
        REQUIRE((posed.vertices[v] - palm_mesh.vertices()[v]).norm() < 1e-15);
    REQUIRE(posed.approach_dir.isApprox(Vec3::UnitZ(), 1e-12));
    // fingers at rest: every finger vertex at or above the palm face
    for (const auto& finger : hand.fingers)
        for (const int link : finger.links) {
            const auto [begin, end] = posed.link_vertex_range(link);
            for (int v = begin; v < end; ++v) REQUIRE(posed.vertices[std::size_t(v)].z() >= -1e-12);
        }
}

TEST_CASE("FK: pure translation shifts every vertex exactly") {
    const HandModel& hand = fixture_hand();
    const PosedHand rest = forward_kinematics(hand, GraspPose{}, JointConfig::zeros());
    GraspPose pose;
    pose.t = Vec3(0.1, 0, 0);
    const PosedHand moved = forward_kinematics(hand, pose, JointConfig::zeros());
    for (std::size_t v = 0; v < rest.vertices.size(); ++v)
        REQUIRE((moved.vertices[v] - rest.vertices[v] - Vec3(0.1, 0, 0)).norm() < 1e-15);
}

TEST_CASE("FK: 90-degree spread poses F1 and F2 as mirror images") {
    const HandModel& hand = fixture_hand();
    JointConfig q = JointConfig::zeros();
    q[0] = kPi / 2;
    const PosedHand posed = forward_kinematics(hand, GraspPose{}, q);
    // vertex sets must correspond under reflection across the palm plane y=0
    for (std::size_t li = 0; li < hand.fingers[0].links.size(); ++li) {
        const auto [b1, e1] = posed.link_vertex_range(hand.fingers[0].links[li]);
        const auto [b2, e2] = posed.link_vertex_range(hand.fingers[1].links[li]);
        REQUIRE(e1 - b1 == e2 - b2);
        for (int i = 0; i < e1 - b1; ++i) {
            const Vec3 v1 = posed.vertices[std::size_t(b1 + i)];
            const Vec3 mirrored(v1.x(), -v1.y(), v1.z());
            double best = 1e9;
            for (int j = 0; j < e2 - b2; ++j)
                best = std::min(best, (posed.vertices[std::size_t(b2 + j)] - mirrored).norm());
            REQUIRE(best < 1e-9);
        }
    }
}

TEST_CASE("FK rejects out-of-limit configurations, naming joints") {
    const HandModel& hand = fixture_hand();
    JointConfig q = JointConfig::zeros();
    q[1] = 3.5;   // beyond proximal limit
    q[0] = -0.2;  // below spread limit
    try {
        forward_kinematics(hand, GraspPose{}, q);
        FAIL("expected limit violation");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find("f1_prox") != std::string::npos);
        REQUIRE(msg.find("spread") != std::string::npos);
    }
}

TEST_CASE("FK is rigid per link: edge lengths preserved") {
    const HandModel& hand = fixture_hand();
    GraspPose pose;
    pose.t = Vec3(0.3, -0.2, 0.5);
    pose.r = Vec3(0.4, 1.1, -0.3);
    JointConfig q = JointConfig::zeros();
    q[0] = 1.0; q[1] = 0.7; q[2] = 0.3; q[3] = 1.2; q[4] = 0.1; q[5] = 2.0; q[6] = 0.5;
    const PosedHand posed = forward_kinematics(hand, pose, q);
    for (std::size_t l = 0; l < hand.links.size(); ++l) {
        const auto& mesh = hand.links[l].mesh;
        const int off = hand.vertex_offset[l];
        for (const auto& f : mesh.faces()) {
            for (int k = 0; k < 3; ++k) {
                const int a = f[std::size_t(k)], b = f[std::size_t((k + 1) % 3)];
                const double before =
                    (mesh.vertices()[std::size_t(a)] - mesh.vertices()[std::size_t(b)]).norm();
                const double after = (posed.vertices[std::size_t(off + a)] -
                                      posed.vertices[std::size_t(off + b)]).norm();
                REQUIRE(std::abs(before - after) < 1e-9);
            }
        }
    }
}

TEST_CASE("FK equivariance under rigid transforms") {
    const HandModel& hand = fixture_hand();
    GraspPose pose;
    pose.t = Vec3(0.1, 0.2, 0.3);
    pose.r = Vec3(0.2, -0.4, 0.9);
    JointConfig q = JointConfig::zeros();
    q[0] = 0.8; q[1] = 1.1; q[2] = 0.4; q[3] = 0.2; q[5] = 1.7; q[6] = 0.8;

    RigidTransform world = RigidTransform::Identity();
    world.linear() = Eigen::AngleAxisd(1.3, Vec3(2, -1, 4).normalized()).toRotationMatrix();
    world.translation() = Vec3(-0.5, 0.8, 0.25);

    const PosedHand base = forward_kinematics(hand, pose, q);
    const GraspPose composed = GraspPose::from_transform(world * pose.transform());
    const PosedHand moved = forward_kinematics(hand, composed, q);
    for (std::size_t v = 0; v < base.vertices.size(); ++v)
        REQUIRE((moved.vertices[v] - world * base.vertices[v]).norm() < 1e-9);
    REQUIRE(moved.approach_dir.isApprox(world.linear() * base.approach_dir, 1e-9));
}

TEST_CASE("posed hand mesh has per-link vertex bookkeeping") {
    const HandModel& hand = fixture_hand();
    const PosedHand posed = forward_kinematics(hand, GraspPose{}, JointConfig::zeros());
    REQUIRE(posed.vertices.size() == hand.total_vertices);
    REQUIRE(hand.per_vertex_link.size() == hand.total_vertices);
    const TriMesh mesh = posed.to_mesh();
    REQUIRE(mesh.vertex_count() == hand.total_vertices);
    REQUIRE(mesh.watertight());
    std::size_t link_sum = 0;
    for (const auto& l : hand.links) link_sum += l.mesh.vertex_count();
    REQUIRE(mesh.vertex_count() == link_sum);
}

TEST_CASE("hand description round trip through disk") {
    namespace fs = std::filesystem;
    const HandModel& hand = fixture_hand();
    const auto dir = fs::temp_directory_path() / "graspgen_hand_io";
    fs::remove_all(dir);
    save_hand_description(hand, dir.string());
    const HandModel loaded = load_hand_description((dir / "hand.json").string());
    fs::remove_all(dir);

    REQUIRE(loaded.links.size() == hand.links.size());
    REQUIRE(loaded.joints.size() == hand.joints.size());
    REQUIRE(loaded.contact_vertex_ids == hand.contact_vertex_ids);
    REQUIRE(loaded.coupling_ratio == hand.coupling_ratio);

    // FK of a posed config must agree exactly in structure, closely in values
    GraspPose pose;
    pose.t = Vec3(0.05, -0.02, 0.3);
    pose.r = Vec3(0.3, 0.3, -0.1);
    JointConfig q = JointConfig::zeros();
    q[0] = 0.7; q[1] = 0.9; q[2] = 0.2; q[3] = 0.5; q[4] = 0.1; q[5] = 1.1; q[6] = 0.4;
    const PosedHand a = forward_kinematics(hand, pose, q);
    const PosedHand b = forward_kinematics(loaded, pose, q);
    REQUIRE(a.vertices.size() == b.vertices.size());
    for (std::size_t v = 0; v < a.vertices.size(); ++v)
        REQUIRE((a.vertices[v] - b.vertices[v]).norm() < 1e-12);
}
