// Geometric queries over accelerated meshes: nearest surface point, inside
// test, area-uniform surface sampling, interpenetration volume, mesh/mesh
// intersection.
#pragma once

#include "graspgen/bvh.hpp"
#include "graspgen/trimesh.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace graspgen {

/// A mesh bundled with its BVH. Heap-pinned so the BVH back-pointer stays
/// valid across copies and moves; build once, query from any thread.
class AccelMesh {
public:
    AccelMesh() = default;
    explicit AccelMesh(TriMesh m)
        : mesh_(std::make_shared<const TriMesh>(std::move(m))), bvh_(*mesh_) {}
    explicit AccelMesh(MeshPtr m) : mesh_(std::move(m)), bvh_(*mesh_) {}

    const TriMesh& mesh() const { return *mesh_; }
    MeshPtr mesh_ptr() const { return mesh_; }
    const MeshBvh& bvh() const { return bvh_; }
    bool valid() const { return mesh_ != nullptr; }

private:
    MeshPtr mesh_;
    MeshBvh bvh_;
};

/// Exact generalized winding number: solid angles summed over every face.
/// O(faces) per query; the BVH fast path approximates this to high accuracy.
inline double winding_number(const TriMesh& mesh, const Vec3& query) {
    double omega = 0.0;
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const auto t = mesh.triangle(f);
        omega += triangle_solid_angle(query, t[0], t[1], t[2]);
    }
    return omega / (4.0 * kPi);
}

/// Globally nearest point on the mesh surface and its distance.
inline NearestHit nearest_surface_point(const AccelMesh& mesh, const Vec3& query) {
    if (mesh.mesh().empty()) throw std::invalid_argument("degenerate mesh");
    return mesh.bvh().nearest(query);
}

/// True when the query point is inside the (watertight) mesh: the winding
/// number rounds to a nonzero integer.
inline bool contains_point(const AccelMesh& mesh, const Vec3& query) {
    if (!mesh.mesh().watertight())
        throw std::invalid_argument("inside test requires watertight mesh");
    return mesh.bvh().contains(query);
}

/// Points sampled area-uniformly from a mesh surface.
struct SurfaceSamples {
    std::vector<Vec3> points;
    std::string source_mesh;
    std::size_t count = 0;
};

/// Deterministic area-weighted surface sampling: faces picked by cumulative
/// area, positions by uniform barycentric placement.
inline SurfaceSamples sample_surface(const TriMesh& mesh, std::size_t k, std::uint64_t seed,
                                     std::string source_id = {}) {
    if (k < 1) throw std::invalid_argument("sample_surface: k must be >= 1");
    if (mesh.empty() || mesh.total_area() <= 0.0)
        throw std::invalid_argument("sample_surface: zero-area mesh");
    std::vector<double> cumulative(mesh.face_count());
    double acc = 0.0;
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        acc += mesh.face_areas()[f];
        cumulative[f] = acc;
    }
    Rng rng(seed);
    SurfaceSamples out;
    out.source_mesh = std::move(source_id);
    out.count = k;
    out.points.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double u = rng.uniform() * acc;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t f = std::size_t(it - cumulative.begin());
        const auto t = mesh.triangle(std::min(f, mesh.face_count() - 1));
        const double r1 = std::sqrt(rng.uniform());
        const double r2 = rng.uniform();
        out.points.push_back((1.0 - r1) * t[0] + r1 * (1.0 - r2) * t[1] + r1 * r2 * t[2]);
    }
    return out;
}

/// True when the two posed meshes touch: surface triangles intersect or one
/// mesh has a connected component fully inside the other.
inline bool meshes_intersect(const AccelMesh& a, const RigidTransform& ta, const AccelMesh& b,
                             const RigidTransform& tb) {
    if (a.mesh().empty() || b.mesh().empty()) return false;
    if (MeshBvh::surfaces_intersect(a.bvh(), ta, b.bvh(), tb)) return true;
    // No surface crossing: containment is all-or-nothing per component.
    const RigidTransform b_from_a = tb.inverse() * ta;
    for (const int rep : a.mesh().component_representatives()) {
        if (b.bvh().contains(b_from_a * a.mesh().vertices()[std::size_t(rep)])) return true;
    }
    const RigidTransform a_from_b = ta.inverse() * tb;
    for (const int rep : b.mesh().component_representatives()) {
        if (a.bvh().contains(a_from_b * b.mesh().vertices()[std::size_t(rep)])) return true;
    }
    return false;
}

inline bool meshes_intersect(const AccelMesh& a, const AccelMesh& b) {
    return meshes_intersect(a, RigidTransform::Identity(), b, RigidTransform::Identity());
}

namespace volume_detail {

inline Aabb world_bounds(const Aabb& local, const RigidTransform& t) {
    Aabb out;
    for (int i = 0; i < 8; ++i) {
        out.extend(t * Vec3(i & 1 ? local.max.x() : local.min.x(),
                            i & 2 ? local.max.y() : local.min.y(),
                            i & 4 ? local.max.z() : local.min.z()));
    }
    return out;
}

}  // namespace volume_detail

/// Overlap volume of two posed watertight meshes in cm^3: voxel centers on a
/// grid over the shared bounding region, counted when inside both. The grid
/// depends only on the unordered pair, so the result is exactly symmetric.
inline double interpenetration_volume_cm3(const AccelMesh& a, const RigidTransform& ta,
                                          const AccelMesh& b, const RigidTransform& tb,
                                          double voxel_size_m) {
    if (voxel_size_m <= 0.0) throw std::invalid_argument("voxel size must be > 0");
    if (!a.mesh().watertight() || !b.mesh().watertight())
        throw std::invalid_argument("interpenetration requires watertight meshes");
    const Aabb wa = volume_detail::world_bounds(a.mesh().bounds(), ta);
    const Aabb wb = volume_detail::world_bounds(b.mesh().bounds(), tb);
    Aabb region;
    region.min = wa.min.cwiseMax(wb.min);
    region.max = wa.max.cwiseMin(wb.max);
    if (region.empty()) return 0.0;
    // disjoint watertight meshes have zero overlap: skip the voxel scan
    // whenever the surfaces do not cross and neither contains the other
    if (!meshes_intersect(a, ta, b, tb)) return 0.0;

    const RigidTransform inv_a = ta.inverse(), inv_b = tb.inverse();
    const Vec3 extent = region.max - region.min;
    const Eigen::Vector3i cells = (extent / voxel_size_m).array().ceil().cast<int>().max(1);
    std::size_t inside = 0;
    Vec3 center;
    for (int ix = 0; ix < cells.x(); ++ix) {
        center.x() = region.min.x() + (ix + 0.5) * voxel_size_m;
        for (int iy = 0; iy < cells.y(); ++iy) {
            center.y() = region.min.y() + (iy + 0.5) * voxel_size_m;
            for (int iz = 0; iz < cells.z(); ++iz) {
                center.z() = region.min.z() + (iz + 0.5) * voxel_size_m;
                if (!a.bvh().contains(inv_a * center)) continue;
                if (b.bvh().contains(inv_b * center)) ++inside;
            }
        }
    }
    const double m3 = double(inside) * voxel_size_m * voxel_size_m * voxel_size_m;
    return m3 * 1e6;  // m^3 -> cm^3
}

inline double interpenetration_volume_cm3(const AccelMesh& a, const AccelMesh& b,
                                          double voxel_size_m) {
    return interpenetration_volume_cm3(a, RigidTransform::Identity(), b,
                                       RigidTransform::Identity(), voxel_size_m);
}

}  // namespace graspgen
