// Bounding-volume hierarchy over mesh triangles.
//
// One structure serves the four hot queries: nearest surface point, ray
// casting, winding number (Barnes-Hut dipole far field, exact solid angles
// near field) and mesh/mesh triangle intersection. Distance queries were
// measured as the dominant cost of grasp evaluation, so nearest() is the
// path to keep tight.
#pragma once

#include "graspgen/trimesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

namespace graspgen {

/// Closest point on triangle (a,b,c) to p. Ericson, Real-Time Collision
/// Detection, 5.1.5.
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                      const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);

    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

/// Solid angle of triangle (a,b,c) as seen from q (van Oosterom-Strackee).
inline double triangle_solid_angle(const Vec3& q, const Vec3& a, const Vec3& b,
                                   const Vec3& c) {
    const Vec3 ra = a - q, rb = b - q, rc = c - q;
    const double la = ra.norm(), lb = rb.norm(), lc = rc.norm();
    const double num = ra.dot(rb.cross(rc));
    const double den = la * lb * lc + ra.dot(rb) * lc + rb.dot(rc) * la + rc.dot(ra) * lb;
    return 2.0 * std::atan2(num, den);
}

/// Watertight-ish segment/triangle and triangle/triangle predicates used by
/// collision rejection. Moller's interval overlap method.
namespace tritri_detail {

inline bool coplanar_tri_tri(const Vec3& n, const Vec3& v0, const Vec3& v1, const Vec3& v2,
                             const Vec3& u0, const Vec3& u1, const Vec3& u2) {
    // project onto the dominant axis plane and run 2D tests
    int i0, i1;
    const Vec3 an = n.cwiseAbs();
    if (an.x() > an.y() && an.x() > an.z()) { i0 = 1; i1 = 2; }
    else if (an.y() > an.z()) { i0 = 0; i1 = 2; }
    else { i0 = 0; i1 = 1; }

    auto edge_edge = [&](const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
        const double ax = b[i0] - a[i0], ay = b[i1] - a[i1];
        const double bx = c[i0] - d[i0], by = c[i1] - d[i1];
        const double cx = a[i0] - c[i0], cy = a[i1] - c[i1];
        const double f = ay * bx - ax * by;
        const double dd = by * cx - bx * cy;
        if ((f > 0 && dd >= 0 && dd <= f) || (f < 0 && dd <= 0 && dd >= f)) {
            const double e = ax * cy - ay * cx;
            if (f > 0) { if (e >= 0 && e <= f) return true; }
            else { if (e <= 0 && e >= f) return true; }
        }
        return false;
    };
    auto edge_tri = [&](const Vec3& a, const Vec3& b) {
        return edge_edge(a, b, u0, u1) || edge_edge(a, b, u1, u2) || edge_edge(a, b, u2, u0);
    };
    if (edge_tri(v0, v1) || edge_tri(v1, v2) || edge_tri(v2, v0)) return true;

    auto point_in_tri = [&](const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
        const double e0 = (b[i0] - a[i0]) * (p[i1] - a[i1]) - (b[i1] - a[i1]) * (p[i0] - a[i0]);
        const double e1 = (c[i0] - b[i0]) * (p[i1] - b[i1]) - (c[i1] - b[i1]) * (p[i0] - b[i0]);
        const double e2 = (a[i0] - c[i0]) * (p[i1] - c[i1]) - (a[i1] - c[i1]) * (p[i0] - c[i0]);
        return (e0 >= 0 && e1 >= 0 && e2 >= 0) || (e0 <= 0 && e1 <= 0 && e2 <= 0);
    };
    return point_in_tri(v0, u0, u1, u2) || point_in_tri(u0, v0, v1, v2);
}

}  // namespace tritri_detail

/// True when triangles (v0,v1,v2) and (u0,u1,u2) intersect (shared boundary
/// counts as intersection).
inline bool triangles_intersect(const Vec3& v0, const Vec3& v1, const Vec3& v2,
                                const Vec3& u0, const Vec3& u1, const Vec3& u2) {
    const Vec3 n1 = (v1 - v0).cross(v2 - v0);
    const double d1 = -n1.dot(v0);
    double du0 = n1.dot(u0) + d1, du1 = n1.dot(u1) + d1, du2 = n1.dot(u2) + d1;
    const double eps1 = 1e-12 * n1.norm() * std::max({u0.norm(), u1.norm(), u2.norm(), 1.0});
    if (std::abs(du0) < eps1) du0 = 0.0;
    if (std::abs(du1) < eps1) du1 = 0.0;
    if (std::abs(du2) < eps1) du2 = 0.0;
    if (du0 * du1 > 0.0 && du0 * du2 > 0.0) return false;

    const Vec3 n2 = (u1 - u0).cross(u2 - u0);
    const double d2 = -n2.dot(u0);
    double dv0 = n2.dot(v0) + d2, dv1 = n2.dot(v1) + d2, dv2 = n2.dot(v2) + d2;
    const double eps2 = 1e-12 * n2.norm() * std::max({v0.norm(), v1.norm(), v2.norm(), 1.0});
    if (std::abs(dv0) < eps2) dv0 = 0.0;
    if (std::abs(dv1) < eps2) dv1 = 0.0;
    if (std::abs(dv2) < eps2) dv2 = 0.0;
    if (dv0 * dv1 > 0.0 && dv0 * dv2 > 0.0) return false;

    const Vec3 dir = n1.cross(n2);
    if (dir.norm() < 1e-14 * n1.norm() * n2.norm())
        return tritri_detail::coplanar_tri_tri(n1, v0, v1, v2, u0, u1, u2);

    int axis;
    dir.cwiseAbs().maxCoeff(&axis);
    auto interval = [&](const Vec3& a, const Vec3& b, const Vec3& c, double da, double db,
                        double dc, double& t0, double& t1) -> bool {
        const double pa = a[axis], pb = b[axis], pc = c[axis];
        // order so that `a` is alone on one side
        auto compute = [&](double p0, double p1, double p2, double e0, double e1, double e2) {
            t0 = p0 + (p1 - p0) * e0 / (e0 - e1);
            t1 = p0 + (p2 - p0) * e0 / (e0 - e2);
        };
        if (da * db > 0.0) compute(pc, pa, pb, dc, da, db);
        else if (da * dc > 0.0) compute(pb, pa, pc, db, da, dc);
        else if (db * dc > 0.0 || da != 0.0) compute(pa, pb, pc, da, db, dc);
        else if (db != 0.0) compute(pb, pa, pc, db, da, dc);
        else if (dc != 0.0) compute(pc, pa, pb, dc, da, db);
        else return false;  // coplanar, handled elsewhere
        if (t0 > t1) std::swap(t0, t1);
        return true;
    };
    double a0, a1, b0, b1;
    if (!interval(v0, v1, v2, dv0, dv1, dv2, a0, a1))
        return tritri_detail::coplanar_tri_tri(n1, v0, v1, v2, u0, u1, u2);
    if (!interval(u0, u1, u2, du0, du1, du2, b0, b1))
        return tritri_detail::coplanar_tri_tri(n1, v0, v1, v2, u0, u1, u2);
    return a1 >= b0 && b1 >= a0;
}

struct NearestHit {
    Vec3 point = Vec3::Zero();
    double distance = std::numeric_limits<double>::infinity();
    int face = -1;
};

class MeshBvh {
public:
    MeshBvh() = default;

    explicit MeshBvh(const TriMesh& mesh) : mesh_(&mesh) {
        const std::size_t n = mesh.face_count();
        if (n == 0) return;
        face_order_.resize(n);
        std::iota(face_order_.begin(), face_order_.end(), 0);
        centroids_.reserve(n);
        for (std::size_t f = 0; f < n; ++f) {
            const auto t = mesh.triangle(f);
            centroids_.push_back((t[0] + t[1] + t[2]) / 3.0);
        }
        nodes_.reserve(2 * n);
        build_node(0, n);
    }

    const TriMesh& mesh() const { return *mesh_; }
    bool empty() const { return nodes_.empty(); }

    // -- nearest surface point ------------------------------------------------

    NearestHit nearest(const Vec3& query) const {
        NearestHit best;
        if (nodes_.empty()) return best;
        double best_d2 = std::numeric_limits<double>::infinity();
        nearest_rec(0, query, best, best_d2);
        best.distance = std::sqrt(best_d2);
        return best;
    }

    // -- winding number --------------------------------------------------------

    /// Generalized winding number of `query`, Barnes-Hut accelerated: subtree
    /// contributions far from the query are replaced by their area-weighted
    /// normal dipole, near subtrees recurse down to exact solid angles.
    double fast_winding_number(const Vec3& query, double beta = 2.0) const {
        if (nodes_.empty()) return 0.0;
        return winding_rec(0, query, beta) / (4.0 * kPi);
    }

    /// Inside test for watertight meshes: winding number rounds to nonzero.
    bool contains(const Vec3& query) const {
        if (nodes_.empty()) return false;
        if (!nodes_[0].bounds.contains(query)) return false;  // outside hull of surface
        return std::abs(fast_winding_number(query)) > 0.5;
    }

    // -- ray casting -----------------------------------------------------------

    /// Counts ray/triangle crossings from `origin` along `dir` (t > 0).
    /// Returns nullopt when a hit is too close to an edge to be trusted;
    /// callers retry with another direction.
    std::optional<int> ray_crossings(const Vec3& origin, const Vec3& dir) const {
        if (nodes_.empty()) return 0;
        int count = 0;
        if (!ray_rec(0, origin, dir, count)) return std::nullopt;
        return count;
    }

    /// All intersection parameters t >= 0 of the ray with the surface.
    std::vector<double> ray_hits(const Vec3& origin, const Vec3& dir) const {
        std::vector<double> ts;
        if (nodes_.empty()) return ts;
        ray_hits_rec(0, origin, dir, ts);
        std::sort(ts.begin(), ts.end());
        return ts;
    }

    // -- mesh/mesh intersection --------------------------------------------------

    /// True when any triangle of `a` (posed by Ta) intersects any triangle of
    /// `b` (posed by Tb). Pure surface test; containment is checked separately.
    static bool surfaces_intersect(const MeshBvh& a, const RigidTransform& Ta,
                                   const MeshBvh& b, const RigidTransform& Tb) {
        if (a.nodes_.empty() || b.nodes_.empty()) return false;
        // Work in b's frame so only a's geometry is transformed per test.
        const RigidTransform rel = Tb.inverse() * Ta;
        return a.intersect_rec(0, b, 0, rel);
    }

private:
    struct Node {
        Aabb bounds;
        int left = -1, right = -1;      // children; leaf when left < 0
        std::uint32_t begin = 0, end = 0;  // face range into face_order_
        // Far-field winding data: multipole expansion of the patch's
        // solid-angle integral about the area centroid, exact through the
        // triangle second moments (truncation error O((radius/dist)^4)).
        Vec3 weighted_normal = Vec3::Zero();  // N  = sum a_f n_f
        Vec3 area_centroid = Vec3::Zero();
        Mat3 normal_moment = Mat3::Zero();    // D  = sum a_f n_f (c_f - c)^T
        Vec3 trace_sn = Vec3::Zero();         // ta = sum tr(S_f) n_f
        Vec3 sn = Vec3::Zero();               // tb = sum S_f n_f
        Mat3 q_moment[3] = {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};  // Q_i = sum n_f[i] S_f
        double radius = 0.0;            // max distance from centroid to node geometry
    };

    static constexpr std::uint32_t kLeafSize = 4;

    int build_node(std::size_t begin, std::size_t end) {
        Node node;
        node.begin = std::uint32_t(begin);
        node.end = std::uint32_t(end);
        double area_sum = 0.0;
        Vec3 weighted_centroid = Vec3::Zero();
        for (std::size_t i = begin; i < end; ++i) {
            const auto t = mesh_->triangle(face_order_[i]);
            node.bounds.extend(t[0]);
            node.bounds.extend(t[1]);
            node.bounds.extend(t[2]);
            const Vec3 cr = mesh_->face_cross(face_order_[i]);
            node.weighted_normal += 0.5 * cr;  // area * unit normal
            const double a = 0.5 * cr.norm();
            area_sum += a;
            weighted_centroid += a * (t[0] + t[1] + t[2]) / 3.0;
        }
        node.area_centroid = area_sum > 1e-300 ? Vec3(weighted_centroid / area_sum)
                                               : node.bounds.center();
        double r2 = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const auto t = mesh_->triangle(face_order_[i]);
            for (const auto& v : t) r2 = std::max(r2, (v - node.area_centroid).squaredNorm());
            const Vec3 an = 0.5 * mesh_->face_cross(face_order_[i]);  // area * unit normal
            const Vec3 d0 = t[0] - node.area_centroid;
            const Vec3 d1 = t[1] - node.area_centroid;
            const Vec3 d2 = t[2] - node.area_centroid;
            const Vec3 dc = (d0 + d1 + d2) / 3.0;
            node.normal_moment += an * dc.transpose();
            // S_f = integral over the face of (x-c)(x-c)^T dA
            //     = (a/12) [sum_i di di^T + (sum_i di)(sum_i di)^T]
            const double area = an.norm();
            if (area > 1e-300) {
                const Vec3 ds = d0 + d1 + d2;
                const Mat3 sf =
                    (area / 12.0) *
                    (d0 * d0.transpose() + d1 * d1.transpose() + d2 * d2.transpose() +
                     ds * ds.transpose());
                const Vec3 n_unit = an / area;
                node.trace_sn += sf.trace() * n_unit;
                node.sn += sf * n_unit;
                for (int axis = 0; axis < 3; ++axis) node.q_moment[axis] += n_unit[axis] * sf;
            }
        }
        node.radius = std::sqrt(r2);

        const int index = int(nodes_.size());
        nodes_.push_back(node);
        if (end - begin > kLeafSize) {
            int axis;
            (node.bounds.max - node.bounds.min).maxCoeff(&axis);
            const std::size_t mid = (begin + end) / 2;
            std::nth_element(face_order_.begin() + long(begin), face_order_.begin() + long(mid),
                             face_order_.begin() + long(end),
                             [&](std::size_t fa, std::size_t fb) {
                                 return centroids_[fa][axis] < centroids_[fb][axis];
                             });
            const int l = build_node(begin, mid);
            const int r = build_node(mid, end);
            nodes_[std::size_t(index)].left = l;
            nodes_[std::size_t(index)].right = r;
        }
        return index;
    }

    void nearest_rec(int ni, const Vec3& q, NearestHit& best, double& best_d2) const {
        const Node& node = nodes_[std::size_t(ni)];
        if (node.left < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const std::size_t f = face_order_[i];
                const auto t = mesh_->triangle(f);
                const Vec3 c = closest_point_on_triangle(q, t[0], t[1], t[2]);
                const double d2 = (c - q).squaredNorm();
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best.point = c;
                    best.face = int(f);
                }
            }
            return;
        }
        const double dl = nodes_[std::size_t(node.left)].bounds.squared_exterior_distance(q);
        const double dr = nodes_[std::size_t(node.right)].bounds.squared_exterior_distance(q);
        const int first = dl <= dr ? node.left : node.right;
        const int second = dl <= dr ? node.right : node.left;
        const double dfirst = std::min(dl, dr), dsecond = std::max(dl, dr);
        if (dfirst < best_d2) nearest_rec(first, q, best, best_d2);
        if (dsecond < best_d2) nearest_rec(second, q, best, best_d2);
    }

    double winding_rec(int ni, const Vec3& q, double beta) const {
        const Node& node = nodes_[std::size_t(ni)];
        const Vec3 d = node.area_centroid - q;
        const double dist = d.norm();
        if (dist > beta * node.radius && node.radius > 0.0) {
            const double r2 = dist * dist;
            const double r3 = r2 * dist;
            const double r5 = r3 * r2;
            const double r7 = r5 * r2;
            const double dipole = d.dot(node.weighted_normal) / r3;
            const double quad =
                (node.normal_moment.trace() - 3.0 * d.dot(node.normal_moment * d) / r2) / r3;
            double octu = -3.0 / r5 * (2.0 * d.dot(node.sn) + d.dot(node.trace_sn));
            double cubic = 0.0;
            for (int axis = 0; axis < 3; ++axis)
                cubic += d[axis] * d.dot(node.q_moment[axis] * d);
            octu += 15.0 / r7 * cubic;
            return dipole + quad + 0.5 * octu;
        }
        if (node.left < 0) {
            double omega = 0.0;
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const auto t = mesh_->triangle(face_order_[i]);
                omega += triangle_solid_angle(q, t[0], t[1], t[2]);
            }
            return omega;
        }
        return winding_rec(node.left, q, beta) + winding_rec(node.right, q, beta);
    }

    bool ray_box(const Aabb& b, const Vec3& o, const Vec3& inv_dir) const {
        double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 3; ++i) {
            double ta = (b.min[i] - o[i]) * inv_dir[i];
            double tb = (b.max[i] - o[i]) * inv_dir[i];
            if (ta > tb) std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
            if (t0 > t1) return false;
        }
        return true;
    }

    // Moller-Trumbore; returns false when the hit is numerically ambiguous.
    static bool ray_triangle(const Vec3& o, const Vec3& dir, const Vec3& a, const Vec3& b,
                             const Vec3& c, double& t, bool& ambiguous) {
        const Vec3 e1 = b - a, e2 = c - a;
        const Vec3 p = dir.cross(e2);
        const double det = e1.dot(p);
        if (std::abs(det) < 1e-14) { ambiguous = false; return false; }
        const double inv = 1.0 / det;
        const Vec3 s = o - a;
        const double u = s.dot(p) * inv;
        const Vec3 qv = s.cross(e1);
        const double v = dir.dot(qv) * inv;
        t = e2.dot(qv) * inv;
        const double edge_eps = 1e-10;
        if (u < -edge_eps || v < -edge_eps || u + v > 1.0 + edge_eps || t < -edge_eps) {
            ambiguous = false;
            return false;
        }
        ambiguous = (u < edge_eps || v < edge_eps || u + v > 1.0 - edge_eps ||
                     std::abs(t) < edge_eps);
        return t > 0.0;
    }

    bool ray_rec(int ni, const Vec3& o, const Vec3& dir, int& count) const {
        const Node& node = nodes_[std::size_t(ni)];
        const Vec3 inv_dir = dir.cwiseInverse();
        if (!ray_box(node.bounds, o, inv_dir)) return true;
        if (node.left < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const auto t = mesh_->triangle(face_order_[i]);
                double hit_t;
                bool ambiguous;
                const bool hit = ray_triangle(o, dir, t[0], t[1], t[2], hit_t, ambiguous);
                if (ambiguous) return false;
                if (hit) ++count;
            }
            return true;
        }
        return ray_rec(node.left, o, dir, count) && ray_rec(node.right, o, dir, count);
    }

    void ray_hits_rec(int ni, const Vec3& o, const Vec3& dir, std::vector<double>& ts) const {
        const Node& node = nodes_[std::size_t(ni)];
        if (!ray_box(node.bounds, o, dir.cwiseInverse())) return;
        if (node.left < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const auto t = mesh_->triangle(face_order_[i]);
                double hit_t;
                bool ambiguous;
                if (ray_triangle(o, dir, t[0], t[1], t[2], hit_t, ambiguous) && hit_t >= 0.0)
                    ts.push_back(hit_t);
            }
            return;
        }
        ray_hits_rec(node.left, o, dir, ts);
        ray_hits_rec(node.right, o, dir, ts);
    }

    static Aabb transformed_bounds(const Aabb& b, const RigidTransform& t) {
        Aabb out;
        for (int i = 0; i < 8; ++i) {
            const Vec3 corner(i & 1 ? b.max.x() : b.min.x(),
                              i & 2 ? b.max.y() : b.min.y(),
                              i & 4 ? b.max.z() : b.min.z());
            out.extend(t * corner);
        }
        return out;
    }

    bool intersect_rec(int ai, const MeshBvh& other, int bi, const RigidTransform& rel) const {
        const Node& na = nodes_[std::size_t(ai)];
        const Node& nb = other.nodes_[std::size_t(bi)];
        if (!transformed_bounds(na.bounds, rel).overlaps(nb.bounds)) return false;
        const bool a_leaf = na.left < 0, b_leaf = nb.left < 0;
        if (a_leaf && b_leaf) {
            for (std::uint32_t i = na.begin; i < na.end; ++i) {
                auto ta = mesh_->triangle(face_order_[i]);
                for (auto& v : ta) v = rel * v;
                for (std::uint32_t j = nb.begin; j < nb.end; ++j) {
                    const auto tb = other.mesh_->triangle(other.face_order_[j]);
                    if (triangles_intersect(ta[0], ta[1], ta[2], tb[0], tb[1], tb[2]))
                        return true;
                }
            }
            return false;
        }
        // split the node with larger extent
        const double ea = (na.bounds.max - na.bounds.min).squaredNorm();
        const double eb = (nb.bounds.max - nb.bounds.min).squaredNorm();
        if (b_leaf || (!a_leaf && ea > eb)) {
            return intersect_rec(na.left, other, bi, rel) ||
                   intersect_rec(na.right, other, bi, rel);
        }
        return intersect_rec(ai, other, nb.left, rel) || intersect_rec(ai, other, nb.right, rel);
    }

    const TriMesh* mesh_ = nullptr;
    std::vector<Node> nodes_;
    std::vector<std::size_t> face_order_;
    std::vector<Vec3> centroids_;
};

// ---------------------------------------------------------------------------
// kd-tree over a point set; nearest-sample queries for the collision loss.

class PointKdTree {
public:
    PointKdTree() = default;

    explicit PointKdTree(std::vector<Vec3> points) : points_(std::move(points)) {
        if (points_.empty()) return;
        order_.resize(points_.size());
        std::iota(order_.begin(), order_.end(), 0);
        nodes_.reserve(2 * points_.size());
        build(0, points_.size());
    }

    bool empty() const { return points_.empty(); }
    const std::vector<Vec3>& points() const { return points_; }

    /// Index of the nearest point and its distance.
    std::pair<std::size_t, double> nearest(const Vec3& q) const {
        std::size_t best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        nearest_rec(0, q, best, best_d2);
        return {best, std::sqrt(best_d2)};
    }

private:
    struct Node {
        Aabb bounds;
        int left = -1, right = -1;
        std::uint32_t begin = 0, end = 0;
    };
    static constexpr std::uint32_t kLeafSize = 8;

    int build(std::size_t begin, std::size_t end) {
        Node node;
        node.begin = std::uint32_t(begin);
        node.end = std::uint32_t(end);
        for (std::size_t i = begin; i < end; ++i) node.bounds.extend(points_[order_[i]]);
        const int index = int(nodes_.size());
        nodes_.push_back(node);
        if (end - begin > kLeafSize) {
            int axis;
            (node.bounds.max - node.bounds.min).maxCoeff(&axis);
            const std::size_t mid = (begin + end) / 2;
            std::nth_element(order_.begin() + long(begin), order_.begin() + long(mid),
                             order_.begin() + long(end), [&](std::size_t a, std::size_t b) {
                                 return points_[a][axis] < points_[b][axis];
                             });
            const int l = build(begin, mid);
            const int r = build(mid, end);
            nodes_[std::size_t(index)].left = l;
            nodes_[std::size_t(index)].right = r;
        }
        return index;
    }

    void nearest_rec(int ni, const Vec3& q, std::size_t& best, double& best_d2) const {
        const Node& node = nodes_[std::size_t(ni)];
        if (node.left < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const double d2 = (points_[order_[i]] - q).squaredNorm();
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = order_[i];
                }
            }
            return;
        }
        const double dl = nodes_[std::size_t(node.left)].bounds.squared_exterior_distance(q);
        const double dr = nodes_[std::size_t(node.right)].bounds.squared_exterior_distance(q);
        const int first = dl <= dr ? node.left : node.right;
        const int second = dl <= dr ? node.right : node.left;
        if (std::min(dl, dr) < best_d2) nearest_rec(first, q, best, best_d2);
        if (std::max(dl, dr) < best_d2) nearest_rec(second, q, best, best_d2);
    }

    std::vector<Vec3> points_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace graspgen
