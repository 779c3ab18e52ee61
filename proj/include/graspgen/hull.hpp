// Incremental convex hull in D dimensions (D=3 for support polygons, D=6 for
// wrench spaces). Beneath-beyond insertion with a maintained ridge map for
// horizon extraction; degenerate inputs are retried under a tiny seeded
// joggle. Scale targets dozens of input points, which is all the callers use.
#pragma once

#include "graspgen/core.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace graspgen {

struct HullDegenerate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <int D>
struct HullFacet {
    std::array<int, D> vertices;
    Eigen::Matrix<double, D, 1> normal;  // unit, outward
    double offset = 0.0;                 // normal . x = offset on the plane
};

template <int D>
class ConvexHull {
public:
    using Point = Eigen::Matrix<double, D, 1>;

    struct Result {
        bool full_dimensional = false;
        std::vector<HullFacet<D>> facets;
        Point interior = Point::Zero();
        std::vector<Point> points;  // facet indices refer to this list
    };

    /// Builds the hull; returns full_dimensional=false when the points span
    /// fewer than D dimensions. Throws HullDegenerate on numerical failure
    /// (callers joggle and retry via build_with_joggle).
    static Result build(const std::vector<Point>& input) {
        Result result;
        result.points = deduplicate(input);
        const auto& pts = result.points;
        if (pts.size() < D + 1) return result;

        const double scale = point_scale(pts);
        const auto simplex = initial_simplex(pts, scale);
        if (simplex.empty()) return result;  // not full-dimensional

        Builder b(pts, scale);
        b.seed_simplex(simplex);
        for (int i = 0; i < int(pts.size()); ++i) b.insert(i);
        result.full_dimensional = true;
        result.interior = b.interior;
        for (const auto& f : b.facets)
            if (f.alive) result.facets.push_back({f.vertices, f.normal, f.offset});
        return result;
    }

    /// build() with joggle-on-degeneracy: retries under growing seeded
    /// perturbations when facet construction hits a numerical degeneracy.
    static Result build_with_joggle(const std::vector<Point>& input, std::uint64_t seed,
                                    int max_attempts = 5) {
        try {
            return build(input);
        } catch (const HullDegenerate&) {
        }
        const double scale = point_scale(input);
        double magnitude = 1e-9 * scale;
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            Rng rng(derive_seed(seed, std::uint64_t(attempt)));
            std::vector<Point> joggled = input;
            for (auto& p : joggled)
                for (int d = 0; d < D; ++d) p[d] += rng.uniform(-magnitude, magnitude);
            try {
                return build(joggled);
            } catch (const HullDegenerate&) {
                magnitude *= 32.0;
            }
        }
        throw HullDegenerate("convex hull failed after joggle retries");
    }

private:
    static std::vector<Point> deduplicate(const std::vector<Point>& input) {
        const double scale = point_scale(input);
        const double tol2 = 1e-24 * scale * scale;
        std::vector<Point> out;
        for (const auto& p : input) {
            bool dup = false;
            for (const auto& q : out)
                if ((p - q).squaredNorm() <= tol2) { dup = true; break; }
            if (!dup) out.push_back(p);
        }
        return out;
    }

    static double point_scale(const std::vector<Point>& pts) {
        double s = 1e-30;
        for (const auto& p : pts) s = std::max(s, p.template lpNorm<Eigen::Infinity>());
        return s;
    }

    /// Greedy affinely independent D+1 subset (Gram-Schmidt residuals).
    static std::vector<int> initial_simplex(const std::vector<Point>& pts, double scale) {
        std::vector<int> chosen = {0};
        Eigen::Matrix<double, D, Eigen::Dynamic> basis(D, 0);
        while (int(chosen.size()) < D + 1) {
            double best_res = 0.0;
            int best = -1;
            Point best_dir = Point::Zero();
            for (int i = 0; i < int(pts.size()); ++i) {
                Point v = pts[std::size_t(i)] - pts[std::size_t(chosen[0])];
                for (int c = 0; c < basis.cols(); ++c) v -= basis.col(c).dot(v) * basis.col(c);
                const double res = v.norm();
                if (res > best_res) {
                    best_res = res;
                    best = i;
                    best_dir = v / res;
                }
            }
            if (best < 0 || best_res <= 1e-9 * scale) return {};  // rank-deficient
            chosen.push_back(best);
            basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
            basis.col(basis.cols() - 1) = best_dir;
        }
        return chosen;
    }

    struct Facet {
        std::array<int, D> vertices;
        Eigen::Matrix<double, D, 1> normal;
        double offset = 0.0;
        bool alive = true;
    };

    using RidgeKey = std::array<int, D - 1>;
    struct RidgeHash {
        std::size_t operator()(const RidgeKey& k) const {
            std::uint64_t h = 0xcbf29ce484222325ULL;
            for (const int v : k) h = fnv1a64(&v, sizeof(v), h);
            return std::size_t(h);
        }
    };

    struct Builder {
        const std::vector<Point>& pts;
        double scale;
        double eps;
        Point interior = Point::Zero();
        std::vector<Facet> facets;
        std::unordered_map<RidgeKey, std::array<int, 2>, RidgeHash> ridges;

        Builder(const std::vector<Point>& p, double s) : pts(p), scale(s), eps(1e-10 * s) {}

        void seed_simplex(const std::vector<int>& simplex) {
            interior.setZero();
            for (const int i : simplex) interior += pts[std::size_t(i)];
            interior /= double(simplex.size());
            for (int omit = 0; omit <= D; ++omit) {
                std::array<int, D> verts;
                int k = 0;
                for (int i = 0; i <= D; ++i)
                    if (i != omit) verts[std::size_t(k++)] = simplex[std::size_t(i)];
                add_facet(verts);
            }
        }

        // ridge slots store facet_id + 1; 0 marks an empty slot
        void register_ridges(int facet_id) {
            const auto& f = facets[std::size_t(facet_id)];
            for (int omit = 0; omit < D; ++omit) {
                auto& slot = ridges[ridge_key(f.vertices, omit)];
                if (slot[0] == 0) slot[0] = facet_id + 1;
                else if (slot[1] == 0) slot[1] = facet_id + 1;
                else throw HullDegenerate("ridge shared by more than two facets");
            }
        }

        static RidgeKey ridge_key(const std::array<int, D>& verts, int omit) {
            RidgeKey key;
            int k = 0;
            for (int i = 0; i < D; ++i)
                if (i != omit) key[std::size_t(k++)] = verts[std::size_t(i)];
            std::sort(key.begin(), key.end());
            return key;
        }

        void add_facet(const std::array<int, D>& verts) {
            Facet f;
            f.vertices = verts;
            // hyperplane through the D points: normal orthogonal to the edge
            // span, computed from the QR null space
            Eigen::Matrix<double, D, D - 1> edges;
            const Point& p0 = pts[std::size_t(verts[0])];
            for (int i = 1; i < D; ++i) edges.col(i - 1) = pts[std::size_t(verts[std::size_t(i)])] - p0;
            Eigen::ColPivHouseholderQR<Eigen::Matrix<double, D, D - 1>> qr(edges);
            if (qr.rank() < D - 1) throw HullDegenerate("degenerate facet (rank-deficient ridge)");
            const Eigen::Matrix<double, D, D> q = qr.householderQ();
            f.normal = q.col(D - 1);
            f.offset = f.normal.dot(p0);
            if (f.normal.dot(interior) > f.offset) {  // orient outward
                f.normal = -f.normal;
                f.offset = -f.offset;
            }
            if (f.offset - f.normal.dot(interior) < eps)
                throw HullDegenerate("interior point on facet plane");
            const int id = int(facets.size());
            facets.push_back(f);
            register_ridges(id);
        }

        void drop_facet(int facet_id) {
            auto& f = facets[std::size_t(facet_id)];
            f.alive = false;
            for (int omit = 0; omit < D; ++omit) {
                const RidgeKey key = ridge_key(f.vertices, omit);
                auto it = ridges.find(key);
                if (it == ridges.end()) continue;
                auto& slot = it->second;
                if (slot[0] == facet_id + 1) slot[0] = 0;
                if (slot[1] == facet_id + 1) slot[1] = 0;
                if (slot[0] == 0 && slot[1] == 0) ridges.erase(it);
            }
        }

        void insert(int point) {
            const Point& p = pts[std::size_t(point)];
            std::vector<int> visible;
            for (int i = 0; i < int(facets.size()); ++i) {
                if (!facets[std::size_t(i)].alive) continue;
                if (facets[std::size_t(i)].normal.dot(p) - facets[std::size_t(i)].offset > eps)
                    visible.push_back(i);
            }
            if (visible.empty()) return;  // interior (or already a hull vertex)

            // horizon: ridges of visible facets whose twin is hidden
            std::vector<RidgeKey> horizon;
            std::vector<bool> is_visible(facets.size(), false);
            for (const int f : visible) is_visible[std::size_t(f)] = true;
            for (const int fi : visible) {
                const auto& f = facets[std::size_t(fi)];
                for (int omit = 0; omit < D; ++omit) {
                    const RidgeKey key = ridge_key(f.vertices, omit);
                    const auto it = ridges.find(key);
                    if (it == ridges.end()) throw HullDegenerate("ridge map inconsistent");
                    const auto& slot = it->second;
                    const int other = (slot[0] == fi + 1) ? slot[1] : slot[0];
                    if (other == 0) throw HullDegenerate("open ridge in hull");
                    if (!is_visible[std::size_t(other - 1)]) horizon.push_back(key);
                }
            }
            for (const int f : visible) drop_facet(f);
            for (const auto& ridge : horizon) {
                std::array<int, D> verts;
                for (int i = 0; i < D - 1; ++i) verts[std::size_t(i)] = ridge[std::size_t(i)];
                verts[D - 1] = point;
                add_facet(verts);
            }
            if (facets.size() > 2000000) throw HullDegenerate("facet explosion");
        }
    };
};

}  // namespace graspgen
