// Triangle mesh container: the unit of all geometry in the engine.
//
// A TriMesh is immutable after build(): vertices, faces, per-face areas,
// per-vertex mean incident face area, watertightness flag and an AABB are
// all computed up front. Queries (see bvh.hpp / mesh_queries.hpp) are
// read-only and safe to run concurrently.
#pragma once

#include "graspgen/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace graspgen {

struct Aabb {
    Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

    void extend(const Vec3& p) {
        min = min.cwiseMin(p);
        max = max.cwiseMax(p);
    }
    void extend(const Aabb& b) {
        min = min.cwiseMin(b.min);
        max = max.cwiseMax(b.max);
    }
    bool empty() const { return (min.array() > max.array()).any(); }
    bool overlaps(const Aabb& b) const {
        return (min.array() <= b.max.array()).all() && (max.array() >= b.min.array()).all();
    }
    bool contains(const Vec3& p) const {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }
    Vec3 center() const { return 0.5 * (min + max); }
    /// Squared distance from p to the box (0 when inside).
    double squared_exterior_distance(const Vec3& p) const {
        const Vec3 d = (min - p).cwiseMax(p - max).cwiseMax(0.0);
        return d.squaredNorm();
    }
};

/// Table plane (or any oriented plane): a point on it plus a unit normal.
struct Plane {
    Vec3 point = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();

    Plane() = default;
    Plane(const Vec3& p, const Vec3& n) : point(p), normal(n) {
        const double len = normal.norm();
        if (std::abs(len - 1.0) > 1e-9) {
            if (len < 1e-12) throw std::invalid_argument("plane normal must be nonzero");
            normal /= len;
        }
    }

    /// Signed distance, positive on the normal side.
    double signed_distance(const Vec3& p) const { return (p - point).dot(normal); }
};

class TriMesh;
using MeshPtr = std::shared_ptr<const TriMesh>;

class TriMesh {
public:
    /// Builds a mesh and all derived data. Face indices must be in range;
    /// vertices must be finite.
    static TriMesh build(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces) {
        TriMesh m;
        m.vertices_ = std::move(vertices);
        m.faces_ = std::move(faces);
        m.finish();
        return m;
    }

    static MeshPtr build_shared(std::vector<Vec3> vertices,
                                std::vector<std::array<int, 3>> faces) {
        return std::make_shared<TriMesh>(build(std::move(vertices), std::move(faces)));
    }

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& faces() const { return faces_; }
    const std::vector<double>& face_areas() const { return face_areas_; }
    const std::vector<double>& vertex_incident_area() const { return vertex_incident_area_; }

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t face_count() const { return faces_.size(); }
    /// One vertex index per connected component (components = vertex-sharing).
    const std::vector<int>& component_representatives() const {
        return component_representatives_;
    }
    bool empty() const { return faces_.empty(); }
    bool watertight() const { return watertight_; }
    double total_area() const { return total_area_; }
    const Aabb& bounds() const { return bounds_; }

    std::array<Vec3, 3> triangle(std::size_t f) const {
        const auto& fc = faces_[f];
        return {vertices_[std::size_t(fc[0])], vertices_[std::size_t(fc[1])],
                vertices_[std::size_t(fc[2])]};
    }

    /// Unnormalized face normal (cross product; norm = 2 * area).
    Vec3 face_cross(std::size_t f) const {
        const auto t = triangle(f);
        return (t[1] - t[0]).cross(t[2] - t[0]);
    }

    Vec3 face_normal(std::size_t f) const {
        const Vec3 c = face_cross(f);
        const double n = c.norm();
        return n < 1e-300 ? Vec3::UnitZ() : Vec3(c / n);
    }

    /// Arithmetic mean of vertex positions. Used as the object "center".
    Vec3 vertex_mean() const {
        Vec3 s = Vec3::Zero();
        for (const auto& v : vertices_) s += v;
        return vertices_.empty() ? s : Vec3(s / double(vertices_.size()));
    }

    /// Radius of the vertex-mean-centered bounding sphere.
    double bounding_sphere_radius() const {
        const Vec3 c = vertex_mean();
        double r2 = 0.0;
        for (const auto& v : vertices_) r2 = std::max(r2, (v - c).squaredNorm());
        return std::sqrt(r2);
    }

    /// Signed volume via the divergence theorem. Meaningful for watertight
    /// meshes with outward-oriented faces.
    double signed_volume() const {
        double v = 0.0;
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            const auto t = triangle(f);
            v += t[0].dot(t[1].cross(t[2]));
        }
        return v / 6.0;
    }

    /// Volume centroid (center of mass for uniform density). Watertight only.
    Vec3 volume_centroid() const {
        double vol = 0.0;
        Vec3 c = Vec3::Zero();
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            const auto t = triangle(f);
            const double dv = t[0].dot(t[1].cross(t[2])) / 6.0;
            vol += dv;
            c += dv * (t[0] + t[1] + t[2]) / 4.0;
        }
        if (std::abs(vol) < 1e-300) throw std::runtime_error("volume centroid of a flat mesh");
        return c / vol;
    }

private:
    friend TriMesh transform_mesh(const TriMesh&, const RigidTransform&);
    friend TriMesh concatenate_meshes(const std::vector<const TriMesh*>&);

    void finish() {
        const int nv = int(vertices_.size());
        for (const auto& v : vertices_) {
            if (!v.allFinite()) throw std::invalid_argument("mesh vertex is not finite");
        }
        for (const auto& f : faces_) {
            for (int k = 0; k < 3; ++k) {
                if (f[std::size_t(k)] < 0 || f[std::size_t(k)] >= nv)
                    throw std::invalid_argument("face index out of range");
            }
        }
        face_areas_.resize(faces_.size());
        total_area_ = 0.0;
        std::vector<double> area_sum(vertices_.size(), 0.0);
        std::vector<int> incident(vertices_.size(), 0);
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            const double a = 0.5 * face_cross(f).norm();
            face_areas_[f] = a;
            total_area_ += a;
            for (int k = 0; k < 3; ++k) {
                const auto v = std::size_t(faces_[f][std::size_t(k)]);
                area_sum[v] += a;
                incident[v] += 1;
            }
        }
        vertex_incident_area_.resize(vertices_.size());
        for (std::size_t v = 0; v < vertices_.size(); ++v)
            vertex_incident_area_[v] = incident[v] ? area_sum[v] / incident[v] : 0.0;

        // Watertight: every directed edge pairs exactly once with its reverse.
        std::map<std::pair<int, int>, int> edges;
        bool ok = !faces_.empty();
        for (const auto& f : faces_) {
            for (int k = 0; k < 3; ++k) {
                const int a = f[std::size_t(k)], b = f[std::size_t((k + 1) % 3)];
                if (a == b) ok = false;
                edges[{a, b}] += 1;
            }
        }
        if (ok) {
            for (const auto& [e, count] : edges) {
                if (count != 1) { ok = false; break; }
                auto rev = edges.find({e.second, e.first});
                if (rev == edges.end() || rev->second != 1) { ok = false; break; }
            }
        }
        watertight_ = ok;

        bounds_ = Aabb{};
        for (const auto& v : vertices_) bounds_.extend(v);

        // Connected components (by shared vertices); one representative vertex
        // per component lets containment tests handle multi-part meshes.
        std::vector<int> parent(vertices_.size());
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (parent[std::size_t(x)] != x) {
                parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
                x = parent[std::size_t(x)];
            }
            return x;
        };
        for (const auto& f : faces_) {
            const int a = find(f[0]);
            parent[std::size_t(find(f[1]))] = a;
            parent[std::size_t(find(f[2]))] = a;
        }
        std::map<int, int> roots;
        for (const auto& f : faces_) {
            const int root = find(f[0]);
            if (!roots.count(root)) roots[root] = f[0];
        }
        component_representatives_.clear();
        for (const auto& [root, rep] : roots) component_representatives_.push_back(rep);
    }

    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 3>> faces_;
    std::vector<double> face_areas_;
    std::vector<double> vertex_incident_area_;
    std::vector<int> component_representatives_;
    double total_area_ = 0.0;
    bool watertight_ = false;
    Aabb bounds_;
};

/// Applies a rigid transform to a mesh. Rejects non-rigid transforms.
inline TriMesh transform_mesh(const TriMesh& mesh, const RigidTransform& transform) {
    if (!is_rigid(transform)) throw std::invalid_argument("transform_mesh requires a rigid transform");
    std::vector<Vec3> verts;
    verts.reserve(mesh.vertices().size());
    for (const auto& v : mesh.vertices()) verts.push_back(transform * v);
    return TriMesh::build(std::move(verts), mesh.faces());
}

inline TriMesh concatenate_meshes(const std::vector<const TriMesh*>& parts) {
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> faces;
    int offset = 0;
    for (const auto* part : parts) {
        for (const auto& v : part->vertices()) verts.push_back(v);
        for (const auto& f : part->faces())
            faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
        offset += int(part->vertices().size());
    }
    return TriMesh::build(std::move(verts), std::move(faces));
}

// ---------------------------------------------------------------------------
// Procedural primitives for fixtures and tests.

/// Axis-aligned closed box spanning [lo, hi], 12 triangles, outward faces.
inline TriMesh make_box(const Vec3& lo, const Vec3& hi) {
    const std::vector<Vec3> v = {
        {lo.x(), lo.y(), lo.z()}, {hi.x(), lo.y(), lo.z()},
        {hi.x(), hi.y(), lo.z()}, {lo.x(), hi.y(), lo.z()},
        {lo.x(), lo.y(), hi.z()}, {hi.x(), lo.y(), hi.z()},
        {hi.x(), hi.y(), hi.z()}, {lo.x(), hi.y(), hi.z()}};
    const std::vector<std::array<int, 3>> f = {
        {0, 2, 1}, {0, 3, 2},  // bottom (-z)
        {4, 5, 6}, {4, 6, 7},  // top (+z)
        {0, 1, 5}, {0, 5, 4},  // -y
        {2, 3, 7}, {2, 7, 6},  // +y
        {1, 2, 6}, {1, 6, 5},  // +x
        {3, 0, 4}, {3, 4, 7}}; // -x
    return TriMesh::build(v, f);
}

/// Box subdivided nx*ny*nz along each axis; denser vertex sampling for links.
inline TriMesh make_box_grid(const Vec3& lo, const Vec3& hi, int nx, int ny, int nz) {
    nx = std::max(nx, 1); ny = std::max(ny, 1); nz = std::max(nz, 1);
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> faces;
    std::map<std::array<long long, 3>, int> index;
    const Vec3 d = hi - lo;
    auto vertex = [&](int i, int j, int k) {
        std::array<long long, 3> key = {i, j, k};
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        const Vec3 p = lo + Vec3(d.x() * i / nx, d.y() * j / ny, d.z() * k / nz);
        verts.push_back(p);
        const int id = int(verts.size()) - 1;
        index.emplace(key, id);
        return id;
    };
    // quad emitted with (a,b,c,d) counter-clockwise seen from outside
    auto quad = [&](int a, int b, int c, int dd) {
        faces.push_back({a, b, c});
        faces.push_back({a, c, dd});
    };
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            quad(vertex(i, j, 0), vertex(i, j + 1, 0), vertex(i + 1, j + 1, 0), vertex(i + 1, j, 0));
            quad(vertex(i, j, nz), vertex(i + 1, j, nz), vertex(i + 1, j + 1, nz), vertex(i, j + 1, nz));
        }
    for (int i = 0; i < nx; ++i)
        for (int k = 0; k < nz; ++k) {
            quad(vertex(i, 0, k), vertex(i + 1, 0, k), vertex(i + 1, 0, k + 1), vertex(i, 0, k + 1));
            quad(vertex(i, ny, k), vertex(i, ny, k + 1), vertex(i + 1, ny, k + 1), vertex(i + 1, ny, k));
        }
    for (int j = 0; j < ny; ++j)
        for (int k = 0; k < nz; ++k) {
            quad(vertex(0, j, k), vertex(0, j, k + 1), vertex(0, j + 1, k + 1), vertex(0, j + 1, k));
            quad(vertex(nx, j, k), vertex(nx, j + 1, k), vertex(nx, j + 1, k + 1), vertex(nx, j, k + 1));
        }
    return TriMesh::build(std::move(verts), std::move(faces));
}

/// Icosphere: subdivided icosahedron scaled to `radius` around `center`.
/// subdivisions=0 gives the raw icosahedron (20 faces).
inline TriMesh make_icosphere(double radius, const Vec3& center, int subdivisions) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
        {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
        {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : verts) v.normalize();
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            verts.push_back((verts[std::size_t(a)] + verts[std::size_t(b)]).normalized());
            const int id = int(verts.size()) - 1;
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    for (auto& v : verts) v = center + radius * v;
    return TriMesh::build(std::move(verts), std::move(faces));
}

/// Closed cylinder along +z from z0 to z1, n-gon cross-section.
inline TriMesh make_cylinder(double radius, double z0, double z1, int n) {
    n = std::max(n, 3);
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> faces;
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * kPi * i / n;
        verts.emplace_back(radius * std::cos(a), radius * std::sin(a), z0);
        verts.emplace_back(radius * std::cos(a), radius * std::sin(a), z1);
    }
    const int bottom_center = int(verts.size());
    verts.emplace_back(0, 0, z0);
    const int top_center = int(verts.size());
    verts.emplace_back(0, 0, z1);
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        const int b0 = 2 * i, t0 = 2 * i + 1, b1 = 2 * j, t1 = 2 * j + 1;
        faces.push_back({b0, b1, t1});
        faces.push_back({b0, t1, t0});
        faces.push_back({bottom_center, b1, b0});
        faces.push_back({top_center, t0, t1});
    }
    return TriMesh::build(std::move(verts), std::move(faces));
}

}  // namespace graspgen
