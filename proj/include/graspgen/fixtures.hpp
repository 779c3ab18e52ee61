// The standard desk-scale fixtures: a small object pool and the three
// benchmark scenes (sphere, box, two-object clutter) used by the self test,
// the CLI's builtin mode and the acceptance suite.
#pragma once

#include "graspgen/scene.hpp"

#include <memory>
#include <string>

namespace graspgen {

inline ObjectLibrary fixture_library() {
    ObjectLibrary pool;
    pool.add("sphere", make_icosphere(0.025, Vec3::Zero(), 2));
    pool.add("box", make_box(Vec3(-0.02, -0.02, -0.04), Vec3(0.02, 0.02, 0.04)));
    pool.add("cylinder", make_cylinder(0.022, -0.045, 0.045, 20));
    pool.add("ball_large", make_icosphere(0.035, Vec3::Zero(), 2));
    return pool;
}

namespace fixture_detail {

inline SceneObjectPtr posed(const std::string& id, TriMesh mesh, const Vec3& translation,
                            std::size_t samples = 2000) {
    RigidTransform t = RigidTransform::Identity();
    t.translation() = translation;
    return std::make_shared<SceneObject>(
        id, TriMesh::build_shared(mesh.vertices(), mesh.faces()), t, samples,
        fnv1a64(id.data(), id.size()));
}

}  // namespace fixture_detail

/// Single sphere resting at the table center. Sized so the hand's open
/// finger cage clears it by more than the 1 cm contact tolerance: an
/// unrefined coarse grasp registers no contacts, a refined one does.
inline GraspSceneView sphere_fixture() {
    GraspSceneView view;
    view.objects = {fixture_detail::posed("sphere", make_icosphere(0.015, Vec3::Zero(), 2),
                                          Vec3(0, 0, 0.015))};
    view.target_index = 0;
    view.table = Plane(Vec3::Zero(), Vec3::UnitZ());
    return view;
}

/// Single standing box (slim for the same clearance reason).
inline GraspSceneView box_fixture() {
    GraspSceneView view;
    view.objects = {fixture_detail::posed(
        "box", make_box(Vec3(-0.01, -0.01, -0.04), Vec3(0.01, 0.01, 0.04)), Vec3(0, 0, 0.04))};
    view.target_index = 0;
    view.table = Plane(Vec3::Zero(), Vec3::UnitZ());
    return view;
}

/// Sphere target with a box obstacle beside it.
inline GraspSceneView clutter_fixture() {
    GraspSceneView view;
    view.objects = {
        fixture_detail::posed("sphere", make_icosphere(0.015, Vec3::Zero(), 2),
                              Vec3(0, 0, 0.015)),
        fixture_detail::posed("box", make_box(Vec3(-0.02, -0.02, -0.04), Vec3(0.02, 0.02, 0.04)),
                              Vec3(0.09, 0.02, 0.04)),
    };
    view.target_index = 0;
    view.table = Plane(Vec3::Zero(), Vec3::UnitZ());
    return view;
}

/// Four objects packed on the table; the throughput benchmark scene.
inline GraspSceneView four_object_fixture() {
    GraspSceneView view;
    view.objects = {
        fixture_detail::posed("sphere", make_icosphere(0.025, Vec3::Zero(), 2),
                              Vec3(0, 0, 0.025)),
        fixture_detail::posed("box", make_box(Vec3(-0.02, -0.02, -0.04), Vec3(0.02, 0.02, 0.04)),
                              Vec3(0.09, 0.03, 0.04)),
        fixture_detail::posed("cylinder", make_cylinder(0.022, 0.0, 0.09, 20),
                              Vec3(-0.085, -0.02, 0.0)),
        fixture_detail::posed("ball_large", make_icosphere(0.035, Vec3::Zero(), 3),
                              Vec3(0.01, -0.095, 0.035)),
    };
    view.target_index = 0;
    view.table = Plane(Vec3::Zero(), Vec3::UnitZ());
    return view;
}

}  // namespace graspgen
