#include "graspgen/mesh_queries.hpp"

#include "oracles.hpp"

#include <catch2/catch.hpp>

using namespace graspgen;

TEST_CASE("nearest_surface_point: query at a vertex returns that vertex") {
    const AccelMesh sphere(make_icosphere(1.0, Vec3::Zero(), 2));
    const Vec3 v = sphere.mesh().vertices()[7];
    const auto hit = nearest_surface_point(sphere, v);
    REQUIRE(hit.distance == Approx(0.0).margin(1e-12));
    REQUIRE((hit.point - v).norm() < 1e-12);
}

TEST_CASE("nearest_surface_point: above a unit icosphere") {
    // frozen from the exhaustive per-triangle scan: the facet chord makes the
    // surface sit slightly inside the unit sphere, so distance is ~1 + facet sag
    const AccelMesh sphere(make_icosphere(1.0, Vec3::Zero(), 3));
    const auto hit = nearest_surface_point(sphere, Vec3(0, 0, 2));
    const auto oracle = oracles::brute_force_nearest(sphere.mesh(), Vec3(0, 0, 2));
    REQUIRE(hit.distance == Approx(oracle.second).epsilon(1e-12));
    REQUIRE(hit.distance == Approx(1.0).margin(5e-3));  // within facet tolerance
}

TEST_CASE("nearest_surface_point: center of a unit cube") {
    const AccelMesh cube(make_box(Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5)));
    const auto hit = nearest_surface_point(cube, Vec3::Zero());
    REQUIRE(hit.distance == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("nearest_surface_point rejects an empty mesh") {
    AccelMesh empty{};
    REQUIRE_FALSE(empty.valid());
    const TriMesh tri = TriMesh::build({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {});
    REQUIRE_THROWS_WITH(nearest_surface_point(AccelMesh(tri), Vec3::Zero()),
                        "degenerate mesh");
}

TEST_CASE("nearest matches the exhaustive per-triangle oracle") {
    const AccelMesh sphere(make_icosphere(0.7, Vec3(0.2, -0.1, 0.4), 2));  // 320 faces
    REQUIRE(sphere.mesh().face_count() <= 500);
    Rng rng(42);
    for (int i = 0; i < 300; ++i) {
        const Vec3 q(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
        const auto hit = nearest_surface_point(sphere, q);
        const auto oracle = oracles::brute_force_nearest(sphere.mesh(), q);
        REQUIRE(hit.distance == Approx(oracle.second).margin(1e-12));
        REQUIRE(std::abs((hit.point - q).norm() - hit.distance) < 1e-12);
    }
}

TEST_CASE("nearest distance is invariant under a common rigid transform") {
    const TriMesh base = make_icosphere(0.5, Vec3::Zero(), 2);
    const AccelMesh accel(base);
    RigidTransform t = RigidTransform::Identity();
    t.linear() = Eigen::AngleAxisd(0.83, Vec3(1, 2, 3).normalized()).toRotationMatrix();
    t.translation() = Vec3(0.4, -1.2, 2.2);
    const AccelMesh moved(transform_mesh(base, t));
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const Vec3 q(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
        const double d0 = nearest_surface_point(accel, q).distance;
        const double d1 = nearest_surface_point(moved, t * q).distance;
        REQUIRE(d1 == Approx(d0).margin(1e-9));
    }
}
