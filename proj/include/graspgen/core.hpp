// Shared aliases, deterministic RNG, hashing and a small parallel-for.
//
// Everything downstream assumes: units are meters, angles are radians,
// rotations are canonical axis-angle 3-vectors (axis * angle, |angle| <= pi).
#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace graspgen {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using RigidTransform = Eigen::Isometry3d;

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Rotations as normalized axis-angle 3-vectors.

/// Rotation matrix from an axis-angle vector (direction = axis, norm = angle).
inline Mat3 rotation_from_axis_angle(const Vec3& r) {
    const double angle = r.norm();
    if (angle < 1e-14) return Mat3::Identity();
    return Eigen::AngleAxisd(angle, r / angle).toRotationMatrix();
}

/// Axis-angle vector of a rotation matrix, canonicalized to norm <= pi.
inline Vec3 axis_angle_from_rotation(const Mat3& R) {
    Eigen::AngleAxisd aa(R);
    double angle = aa.angle();  // Eigen returns angle in [0, pi]
    return aa.axis() * angle;
}

/// Re-encode an arbitrary axis-angle vector so its norm lies in [0, pi].
inline Vec3 canonicalize_axis_angle(const Vec3& r) {
    double angle = r.norm();
    if (angle <= kPi) return r;
    const Vec3 axis = r / angle;
    angle = std::fmod(angle, 2.0 * kPi);
    if (angle > kPi) angle -= 2.0 * kPi;  // may go negative: flip axis below
    if (angle < 0.0) return axis * angle; // (-axis)*(-angle) encoded directly
    return axis * angle;
}

/// Shortest-arc rotation taking unit vector `from` onto unit vector `to`.
inline Mat3 rotation_between(const Vec3& from, const Vec3& to) {
    return Eigen::Quaterniond::FromTwoVectors(from, to).toRotationMatrix();
}

inline bool is_rigid(const RigidTransform& t, double tol = 1e-9) {
    const Mat3 R = t.linear();
    if (((R.transpose() * R) - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(R.determinant() - 1.0) <= tol;
}

// ---------------------------------------------------------------------------
// Deterministic random number generation.
//
// All sampling in the engine flows through this generator so that outputs are
// byte-identical for a fixed seed regardless of platform or thread schedule.
// splitmix64 core, explicit distributions (no std::uniform_* involved).

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Lemire-style rejection-free-ish multiply-shift; deterministic.
        if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
        return std::uint64_t((__uint128_t(next_u64()) * __uint128_t(n)) >> 64);
    }

    /// Standard normal via Box-Muller (deterministic, no cached spare).
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    Vec3 gaussian_vec3() { return Vec3(gaussian(), gaussian(), gaussian()); }

    Vec3 unit_vec3() {
        Vec3 v = gaussian_vec3();
        while (v.norm() < 1e-12) v = gaussian_vec3();
        return v.normalized();
    }

private:
    std::uint64_t state_;
};

/// Derive a stream seed from a master seed and an index; used to hand each
/// parallel work item its own generator so results are schedule-independent.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    Rng mix(master ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    return mix.next_u64();
}

// ---------------------------------------------------------------------------
// Content hashing (FNV-1a 64) for mesh files and manifests.

inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[std::size_t(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Parallel for over [0, n) with stable per-index outputs.

inline int default_jobs() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc);
}

/// Runs fn(i) for i in [0, n). Work items must be independent; each writes
/// only its own output slot, so the result does not depend on scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         int jobs = 0) {
    if (jobs <= 0) jobs = default_jobs();
    if (n == 0) return;
    if (jobs == 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int nthreads = int(std::min<std::size_t>(std::size_t(jobs), n));
    pool.reserve(std::size_t(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace graspgen
