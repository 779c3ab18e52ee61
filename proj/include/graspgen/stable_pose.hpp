// Stable resting poses from convex-hull support analysis: a hull face is a
// candidate resting orientation when its support polygon contains the
// projected center of mass; its probability is proportional to the solid
// angle the face subtends from the center of mass.
#pragma once

#include "graspgen/bvh.hpp"
#include "graspgen/hull.hpp"
#include "graspgen/trimesh.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace graspgen {

struct StablePose {
    RigidTransform transform = RigidTransform::Identity();  // rests the mesh on z=0
    double probability = 0.0;
    Vec3 face_normal = Vec3::UnitZ();  // outward hull-face normal, mesh frame
};

namespace stable_detail {

struct FaceCluster {
    Vec3 normal = Vec3::Zero();
    double offset = 0.0;
    std::vector<int> facets;
};

/// 2D convex hull (monotone chain) and strict containment with margin.
inline bool point_strictly_inside_2d_hull(std::vector<Vec2> pts, const Vec2& q, double margin) {
    if (pts.size() < 3) return false;
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = pts.size() - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k > 0 ? k - 1 : 0);
    if (hull.size() < 3) return false;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec2& a = hull[i];
        const Vec2& b = hull[(i + 1) % hull.size()];
        const Vec2 edge = b - a;
        const double len = edge.norm();
        if (len < 1e-15) continue;
        // inward distance of q from edge (hull is counter-clockwise)
        const double d = (edge.x() * (q.y() - a.y()) - edge.y() * (q.x() - a.x())) / len;
        if (d < margin) return false;
    }
    return true;
}

}  // namespace stable_detail

/// Candidate resting poses, normalized probabilities, sorted by probability
/// (descending, ties in cluster order). Requires a watertight mesh.
inline std::vector<StablePose> stable_poses(const TriMesh& mesh) {
    if (!mesh.watertight())
        throw std::invalid_argument("stable_poses requires a watertight mesh");
    const Vec3 com = mesh.volume_centroid();

    const auto hull = ConvexHull<3>::build_with_joggle(mesh.vertices(), 0xfeedULL);
    if (!hull.full_dimensional) throw std::runtime_error("stable_poses: degenerate convex hull");

    // cluster hull facets into planar faces
    std::vector<stable_detail::FaceCluster> clusters;
    for (int fi = 0; fi < int(hull.facets.size()); ++fi) {
        const auto& f = hull.facets[std::size_t(fi)];
        bool merged = false;
        for (auto& c : clusters) {
            if (c.normal.dot(f.normal) > 1.0 - 1e-8 &&
                std::abs(c.offset - f.offset) < 1e-6 * (1.0 + std::abs(c.offset))) {
                c.facets.push_back(fi);
                merged = true;
                break;
            }
        }
        if (!merged) clusters.push_back({f.normal, f.offset, {fi}});
    }

    std::vector<StablePose> poses;
    for (const auto& c : clusters) {
        // support polygon: cluster vertices projected into the face plane
        Vec3 u, v;
        {
            int min_axis = 0;
            c.normal.cwiseAbs().minCoeff(&min_axis);
            u = c.normal.cross(Vec3::Unit(min_axis)).normalized();
            v = c.normal.cross(u);
        }
        std::vector<Vec2> poly;
        for (const int fi : c.facets)
            for (const int vi : hull.facets[std::size_t(fi)].vertices) {
                const Vec3& p = hull.points[std::size_t(vi)];
                poly.emplace_back(u.dot(p), v.dot(p));
            }
        const Vec2 com2(u.dot(com), v.dot(com));
        if (!stable_detail::point_strictly_inside_2d_hull(poly, com2, 1e-9)) continue;

        // tipping probability ~ solid angle of the face seen from the COM
        double omega = 0.0;
        for (const int fi : c.facets) {
            const auto& f = hull.facets[std::size_t(fi)];
            omega += std::abs(triangle_solid_angle(com, hull.points[std::size_t(f.vertices[0])],
                                                   hull.points[std::size_t(f.vertices[1])],
                                                   hull.points[std::size_t(f.vertices[2])]));
        }

        StablePose pose;
        pose.probability = omega;
        pose.face_normal = c.normal;
        // rotation taking the face normal to -z (face down), then translate:
        // COM over the origin, lowest vertex on z=0
        RigidTransform t = RigidTransform::Identity();
        t.linear() = rotation_between(c.normal, -Vec3::UnitZ());
        double min_z = std::numeric_limits<double>::infinity();
        for (const auto& p : mesh.vertices()) min_z = std::min(min_z, (t.linear() * p).z());
        const Vec3 com_rot = t.linear() * com;
        t.translation() = Vec3(-com_rot.x(), -com_rot.y(), -min_z);
        pose.transform = t;
        poses.push_back(pose);
    }
    if (poses.empty()) throw std::runtime_error("stable_poses: no stable face found");

    double total = 0.0;
    for (const auto& p : poses) total += p.probability;
    for (auto& p : poses) p.probability /= total;
    std::stable_sort(poses.begin(), poses.end(),
                     [](const StablePose& a, const StablePose& b) {
                         return a.probability > b.probability;
                     });
    return poses;
}

}  // namespace graspgen
