#include "graspgen/mesh_io.hpp"
#include "graspgen/mesh_queries.hpp"
#include "graspgen/trimesh.hpp"

#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <sstream>

using namespace graspgen;

TEST_CASE("face areas match cross-product areas") {
    const TriMesh cube = make_box(Vec3(0, 0, 0), Vec3(1, 2, 3));
    REQUIRE(cube.face_count() == 12);
    for (std::size_t f = 0; f < cube.face_count(); ++f) {
        const auto t = cube.triangle(f);
        const double expect = 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).norm();
        REQUIRE(cube.face_areas()[f] == Approx(expect).epsilon(1e-12));
    }
    REQUIRE(cube.total_area() == Approx(2 * (1 * 2 + 2 * 3 + 1 * 3)).epsilon(1e-12));
}

TEST_CASE("vertex incident area is the mean of incident face areas") {
    const TriMesh mesh = make_box(Vec3::Zero(), Vec3(1, 1, 1));
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        double sum = 0.0;
        int count = 0;
        for (std::size_t f = 0; f < mesh.face_count(); ++f) {
            const auto& fc = mesh.faces()[f];
            if (fc[0] == int(v) || fc[1] == int(v) || fc[2] == int(v)) {
                sum += mesh.face_areas()[f];
                ++count;
            }
        }
        REQUIRE(count > 0);
        REQUIRE(mesh.vertex_incident_area()[v] == Approx(sum / count).epsilon(1e-12));
    }
}

TEST_CASE("watertight detection") {
    const TriMesh cube = make_box(Vec3::Zero(), Vec3::Ones());
    REQUIRE(cube.watertight());
    const TriMesh sphere = make_icosphere(1.0, Vec3::Zero(), 2);
    REQUIRE(sphere.watertight());

    // drop one face: an open mesh
    auto faces = cube.faces();
    faces.pop_back();
    const TriMesh open = TriMesh::build(cube.vertices(), faces);
    REQUIRE_FALSE(open.watertight());
}

TEST_CASE("face index out of range is rejected") {
    REQUIRE_THROWS(TriMesh::build({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)},
                                  {{0, 1, 3}}));
}

TEST_CASE("box grid is watertight and has the right extent") {
    const TriMesh grid = make_box_grid(Vec3(-0.01, -0.02, 0.0), Vec3(0.01, 0.02, 0.07), 1, 2, 3);
    REQUIRE(grid.watertight());
    REQUIRE(grid.bounds().min.isApprox(Vec3(-0.01, -0.02, 0.0), 1e-12));
    REQUIRE(grid.bounds().max.isApprox(Vec3(0.01, 0.02, 0.07), 1e-12));
    REQUIRE(grid.signed_volume() == Approx(0.02 * 0.04 * 0.07).epsilon(1e-9));
}

TEST_CASE("cylinder is watertight with the expected volume") {
    const TriMesh cyl = make_cylinder(0.05, 0.0, 0.1, 32);
    REQUIRE(cyl.watertight());
    const double ngon_area = 0.5 * 32 * 0.05 * 0.05 * std::sin(2 * kPi / 32);
    REQUIRE(cyl.signed_volume() == Approx(ngon_area * 0.1).epsilon(1e-9));
}

TEST_CASE("transform_mesh: identity is bitwise equal") {
    const TriMesh cube = make_box(Vec3::Zero(), Vec3::Ones());
    const TriMesh moved = transform_mesh(cube, RigidTransform::Identity());
    for (std::size_t v = 0; v < cube.vertex_count(); ++v)
        REQUIRE(moved.vertices()[v] == cube.vertices()[v]);
}

TEST_CASE("transform_mesh: translation shifts vertices, preserves areas") {
    const TriMesh cube = make_box(Vec3::Zero(), Vec3::Ones());
    RigidTransform t = RigidTransform::Identity();
    t.translation() = Vec3(1, 0, 0);
    const TriMesh moved = transform_mesh(cube, t);
    for (std::size_t v = 0; v < cube.vertex_count(); ++v)
        REQUIRE((moved.vertices()[v] - cube.vertices()[v] - Vec3(1, 0, 0)).norm() == 0.0);
    for (std::size_t f = 0; f < cube.face_count(); ++f)
        REQUIRE(moved.face_areas()[f] == Approx(cube.face_areas()[f]).epsilon(1e-9));
}

TEST_CASE("transform_mesh: rotation preserves volume") {
    const TriMesh cube = make_box(Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5));
    RigidTransform t = RigidTransform::Identity();
    t.linear() = Eigen::AngleAxisd(kPi / 2, Vec3::UnitZ()).toRotationMatrix();
    const TriMesh moved = transform_mesh(cube, t);
    REQUIRE(moved.signed_volume() == Approx(cube.signed_volume()).epsilon(1e-9));
    REQUIRE(moved.bounds().min.isApprox(cube.bounds().min, 1e-9));
}

TEST_CASE("transform_mesh rejects non-rigid transforms") {
    const TriMesh cube = make_box(Vec3::Zero(), Vec3::Ones());
    RigidTransform t = RigidTransform::Identity();
    t.linear() *= 2.0;  // scaling
    REQUIRE_THROWS_AS(transform_mesh(cube, t), std::invalid_argument);
}

TEST_CASE("component representatives: one per disjoint part") {
    const TriMesh a = make_box(Vec3::Zero(), Vec3::Ones());
    const TriMesh b = make_box(Vec3(3, 0, 0), Vec3(4, 1, 1));
    const TriMesh both = concatenate_meshes({&a, &b});
    REQUIRE(both.component_representatives().size() == 2);
    REQUIRE(both.watertight());
}

TEST_CASE("OBJ round trip preserves geometry") {
    const TriMesh mesh = make_icosphere(0.35, Vec3(0.1, -0.2, 0.3), 1);
    std::ostringstream out;
    save_obj_stream(mesh, out);
    std::istringstream in(out.str());
    const TriMesh back = load_obj_stream(in, "roundtrip");
    REQUIRE(back.vertex_count() == mesh.vertex_count());
    REQUIRE(back.face_count() == mesh.face_count());
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
        REQUIRE((back.vertices()[v] - mesh.vertices()[v]).norm() == 0.0);
}

TEST_CASE("OBJ loader fan-triangulates polygons and handles v//vn") {
    std::istringstream in(
        "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
        "vn 0 0 1\n"
        "f 1//1 2//1 3//1 4//1\n");
    const TriMesh quad = load_obj_stream(in, "quad");
    REQUIRE(quad.face_count() == 2);
    REQUIRE(quad.total_area() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("OBJ loader rejects NaN coordinates") {
    std::istringstream in("v 0 0 nan\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    REQUIRE_THROWS(load_obj_stream(in, "nan"));
}

TEST_CASE("binary STL round trip (float precision)") {
    namespace fs = std::filesystem;
    const TriMesh mesh = make_box(Vec3::Zero(), Vec3(0.25, 0.5, 1.0));
    const auto path = (fs::temp_directory_path() / "graspgen_io_test.stl").string();
    save_stl_binary(mesh, path);
    const TriMesh back = load_stl_binary(path);
    fs::remove(path);
    REQUIRE(back.face_count() == mesh.face_count());
    REQUIRE(back.vertex_count() == mesh.vertex_count());  // welding restores sharing
    REQUIRE(back.watertight());
    REQUIRE(back.signed_volume() == Approx(mesh.signed_volume()).epsilon(1e-6));
}
