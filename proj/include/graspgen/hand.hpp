// Three-finger hand model: links with meshes, a joint tree rooted at the
// palm, forward kinematics to a posed world-frame mesh, and the description
// file loader. The 7-vector joint layout is
//   q = [spread, f1_prox, f1_dist, f2_prox, f2_dist, f3_prox, f3_dist]
// where the single spread DOF drives both mirrored base joints.
#pragma once

#include "graspgen/mesh_queries.hpp"
#include "graspgen/trimesh.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace graspgen {

inline constexpr int kHandDof = 7;

/// 7-DOF joint vector, radians.
struct JointConfig {
    std::array<double, kHandDof> q{};

    double& operator[](int i) { return q[std::size_t(i)]; }
    double operator[](int i) const { return q[std::size_t(i)]; }
    double spread() const { return q[0]; }

    static JointConfig zeros() { return JointConfig{}; }
};

/// 6D grasp pose: translation plus rotation as a normalized axis-angle
/// 3-vector (|r| <= pi after canonicalization).
struct GraspPose {
    Vec3 t = Vec3::Zero();
    Vec3 r = Vec3::Zero();

    RigidTransform transform() const {
        RigidTransform out = RigidTransform::Identity();
        out.linear() = rotation_from_axis_angle(r);
        out.translation() = t;
        return out;
    }

    static GraspPose from_transform(const RigidTransform& T) {
        GraspPose p;
        p.t = T.translation();
        p.r = axis_angle_from_rotation(T.linear());
        return p;
    }
};

struct HandLink {
    std::string name;
    TriMesh mesh;        // in link frame; may be empty (pure kinematic frame)
    std::string mesh_file;  // relative path when loaded from / saved to disk
};

struct HandJoint {
    std::string name;
    int parent_link = -1;
    int child_link = -1;
    Vec3 axis = Vec3::UnitZ();       // rotation axis in the joint frame
    RigidTransform origin = RigidTransform::Identity();  // parent -> joint frame
    int dof = -1;                    // index into q
    double scale = 1.0;              // joint angle = scale * q[dof]
    double lo = 0.0, hi = 0.0;       // limits on q[dof]
};

struct HandFinger {
    std::string name;
    int proximal_joint = -1;
    int distal_joint = -1;
    std::vector<int> links;          // links whose vertices belong to this finger
};

class HandModel {
public:
    std::string name = "hand";
    std::vector<HandLink> links;     // links[0] is the palm
    std::vector<HandJoint> joints;   // topological order (parents first)
    std::vector<HandFinger> fingers; // exactly 3
    int spread_dof = 0;
    double coupling_ratio = 0.344;   // distal/proximal ratio for coupled closing
    bool coupling_enabled = false;
    Vec3 approach_axis = Vec3::UnitZ();  // palm outward normal, wrist frame
    std::vector<int> contact_vertex_ids; // V_cont, indices into the posed mesh

    /// Joint limits per DOF: [lo, hi] on q[dof].
    std::array<std::pair<double, double>, kHandDof> dof_limits{};

    // Derived on finalize():
    std::vector<int> vertex_offset;  // per link, into the concatenated mesh
    std::vector<int> per_vertex_link;
    std::vector<double> vertex_area; // A_v of the concatenated rest mesh
    std::size_t total_vertices = 0;

    void finalize() {
        if (links.empty()) throw std::invalid_argument("hand model has no links");
        if (fingers.size() != 3) throw std::invalid_argument("hand model needs 3 fingers");
        // joint tree rooted at palm: every joint's parent must appear before
        // its child, and the child of joint i must not be the palm
        std::vector<bool> reached(links.size(), false);
        reached[0] = true;
        for (const auto& j : joints) {
            if (j.parent_link < 0 || j.parent_link >= int(links.size()) || j.child_link <= 0 ||
                j.child_link >= int(links.size()))
                throw std::invalid_argument("joint link index out of range: " + j.name);
            if (!reached[std::size_t(j.parent_link)])
                throw std::invalid_argument("joint tree is not in topological order: " + j.name);
            if (reached[std::size_t(j.child_link)])
                throw std::invalid_argument("joint graph is not a tree: " + j.name);
            reached[std::size_t(j.child_link)] = true;
            if (j.dof < 0 || j.dof >= kHandDof)
                throw std::invalid_argument("joint dof out of range: " + j.name);
        }
        for (std::size_t l = 0; l < links.size(); ++l)
            if (!reached[l]) throw std::invalid_argument("link unreachable from palm: " + links[l].name);
        for (const auto& j : joints) {
            auto& lim = dof_limits[std::size_t(j.dof)];
            lim = {j.lo, j.hi};
            if (!(j.lo < j.hi)) throw std::invalid_argument("joint limits need lo < hi: " + j.name);
        }
        const auto& spread_lim = dof_limits[std::size_t(spread_dof)];
        if (spread_lim.first < -1e-12 || spread_lim.second > kPi + 1e-12)
            throw std::invalid_argument("spread limits must lie within [0, pi]");

        vertex_offset.assign(links.size(), 0);
        per_vertex_link.clear();
        vertex_area.clear();
        int offset = 0;
        for (std::size_t l = 0; l < links.size(); ++l) {
            vertex_offset[l] = offset;
            for (std::size_t v = 0; v < links[l].mesh.vertex_count(); ++v) {
                per_vertex_link.push_back(int(l));
                vertex_area.push_back(links[l].mesh.vertex_incident_area()[v]);
            }
            offset += int(links[l].mesh.vertex_count());
        }
        total_vertices = std::size_t(offset);
        for (const int id : contact_vertex_ids)
            if (id < 0 || id >= offset)
                throw std::invalid_argument("contact vertex id out of range");
    }

    /// Concatenated rest mesh (all links in their own frames, palm at origin).
    TriMesh rest_mesh() const {
        std::vector<const TriMesh*> parts;
        for (const auto& l : links) parts.push_back(&l.mesh);
        return concatenate_meshes(parts);
    }

    /// Throws when any q entry violates its DOF limits; message names joints.
    void check_limits(const JointConfig& q, double tol = 1e-9) const {
        std::string offenders;
        for (const auto& j : joints) {
            const double v = q[j.dof];
            if (v < j.lo - tol || v > j.hi + tol) {
                if (!offenders.empty()) offenders += ", ";
                offenders += j.name;
            }
        }
        if (!offenders.empty())
            throw std::invalid_argument("joint configuration out of limits: " + offenders);
    }

    JointConfig clamp_to_limits(const JointConfig& q) const {
        JointConfig out = q;
        for (int d = 0; d < kHandDof; ++d) {
            const auto& [lo, hi] = dof_limits[std::size_t(d)];
            out[d] = std::clamp(out[d], lo, hi);
        }
        return out;
    }
};

using HandModelPtr = std::shared_ptr<const HandModel>;

/// A hand posed in the world: per-link poses, the concatenated world-frame
/// vertex array (indexed like the model's rest mesh) and the approach vector.
struct PosedHand {
    const HandModel* model = nullptr;
    std::vector<RigidTransform> link_poses;  // world_T_link
    std::vector<Vec3> vertices;              // concatenated, world frame
    Vec3 approach_dir = Vec3::UnitZ();       // unit
    Vec3 origin = Vec3::Zero();              // wrist origin in world frame

    /// Full world-frame TriMesh (face table from the model).
    TriMesh to_mesh() const {
        std::vector<std::array<int, 3>> faces;
        for (std::size_t l = 0; l < model->links.size(); ++l) {
            const int off = model->vertex_offset[l];
            for (const auto& f : model->links[l].mesh.faces())
                faces.push_back({f[0] + off, f[1] + off, f[2] + off});
        }
        return TriMesh::build(vertices, std::move(faces));
    }

    /// Vertex range [begin, end) of one link in the concatenated array.
    std::pair<int, int> link_vertex_range(int link) const {
        const int begin = model->vertex_offset[std::size_t(link)];
        const int end = begin + int(model->links[std::size_t(link)].mesh.vertex_count());
        return {begin, end};
    }
};

/// Forward kinematics: joint transforms composed down the tree, then the
/// wrist pose. Rejects configurations outside joint limits.
inline PosedHand forward_kinematics(const HandModel& model, const GraspPose& pose,
                                    const JointConfig& config) {
    model.check_limits(config);
    PosedHand out;
    out.model = &model;
    out.link_poses.assign(model.links.size(), RigidTransform::Identity());
    const RigidTransform world_T_palm = pose.transform();
    out.link_poses[0] = world_T_palm;
    for (const auto& j : model.joints) {
        const double angle = j.scale * config[j.dof];
        RigidTransform joint_T_child = RigidTransform::Identity();
        joint_T_child.linear() = Eigen::AngleAxisd(angle, j.axis).toRotationMatrix();
        out.link_poses[std::size_t(j.child_link)] =
            out.link_poses[std::size_t(j.parent_link)] * j.origin * joint_T_child;
    }
    out.vertices.resize(model.total_vertices);
    for (std::size_t l = 0; l < model.links.size(); ++l) {
        const auto& mesh = model.links[l].mesh;
        const auto& T = out.link_poses[l];
        const int off = model.vertex_offset[l];
        for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
            out.vertices[std::size_t(off) + v] = T * mesh.vertices()[v];
    }
    out.approach_dir = world_T_palm.linear() * model.approach_axis;
    out.origin = pose.t;
    return out;
}

// ---------------------------------------------------------------------------
// Bundled three-finger test hand. Barrett-like proportions (palm ~8 cm
// across, proximal links 7 cm, distal links 5.5 cm); the numbers are fixture
// constants, not measurements of any physical hand.

struct TestHandParams {
    double palm_half = 0.04;        // palm half-extent in x/y
    double palm_depth = 0.04;       // palm extends from z=-depth to z=0
    double finger_base_x = 0.035;
    double finger_base_y = 0.025;   // F1/F2 lateral offset
    double link_half = 0.008;       // finger box cross-section half-extent
    double proximal_len = 0.07;
    double distal_len = 0.055;
    double spread_hi = kPi;
    double proximal_hi = 2.44;
    double distal_hi = 0.84;
    bool coupling_enabled = false;
};

inline HandModel make_test_hand(const TestHandParams& p = {}) {
    HandModel m;
    m.name = "three-finger-fixture";

    auto box_link = [&](const std::string& name, const Vec3& lo, const Vec3& hi, int nx, int ny,
                        int nz) {
        HandLink link;
        link.name = name;
        link.mesh = make_box_grid(lo, hi, nx, ny, nz);
        link.mesh_file = name + ".obj";
        return link;
    };
    auto frame_link = [&](const std::string& name) {
        HandLink link;
        link.name = name;
        link.mesh = TriMesh::build({}, {});
        link.mesh_file = "";
        return link;
    };

    // 0: palm
    m.links.push_back(box_link("palm", Vec3(-p.palm_half, -p.palm_half, -p.palm_depth),
                               Vec3(p.palm_half, p.palm_half, 0.0), 2, 2, 1));
    const double lh = p.link_half;
    // finger links are boxes along +z in their own frames
    auto prox_box = [&](const std::string& name) {
        return box_link(name, Vec3(-lh, -lh, 0.0), Vec3(lh, lh, p.proximal_len), 1, 1, 3);
    };
    auto dist_box = [&](const std::string& name) {
        return box_link(name, Vec3(-lh, -lh, 0.0), Vec3(lh, lh, p.distal_len), 1, 1, 2);
    };

    // F1 (y > 0) and F2 (y < 0) carry the mirrored spread; F3 opposes them.
    struct FingerSpec {
        std::string tag;
        Vec3 base;
        double spread_scale;  // 0 = no spread joint
        Vec3 flex_axis;
        int prox_dof, dist_dof;
    };
    const std::vector<FingerSpec> specs = {
        {"f1", Vec3(-p.finger_base_x, p.finger_base_y, 0.0), +1.0, Vec3::UnitY(), 1, 2},
        {"f2", Vec3(-p.finger_base_x, -p.finger_base_y, 0.0), -1.0, Vec3::UnitY(), 3, 4},
        {"f3", Vec3(p.finger_base_x, 0.0, 0.0), 0.0, -Vec3::UnitY(), 5, 6},
    };

    for (const auto& s : specs) {
        HandFinger finger;
        finger.name = s.tag;
        int parent = 0;  // palm
        if (s.spread_scale != 0.0) {
            m.links.push_back(frame_link(s.tag + "_knuckle"));
            const int knuckle = int(m.links.size()) - 1;
            HandJoint spread;
            spread.name = s.tag + "_spread";
            spread.parent_link = parent;
            spread.child_link = knuckle;
            spread.axis = Vec3::UnitZ();
            spread.origin = RigidTransform::Identity();
            spread.origin.translation() = s.base;
            spread.dof = 0;
            spread.scale = s.spread_scale;
            spread.lo = 0.0;
            spread.hi = p.spread_hi;
            m.joints.push_back(spread);
            parent = knuckle;
        }
        m.links.push_back(prox_box(s.tag + "_prox"));
        const int prox = int(m.links.size()) - 1;
        HandJoint pj;
        pj.name = s.tag + "_prox";
        pj.parent_link = parent;
        pj.child_link = prox;
        pj.axis = s.flex_axis;
        pj.origin = RigidTransform::Identity();
        if (s.spread_scale == 0.0) pj.origin.translation() = s.base;
        pj.dof = s.prox_dof;
        pj.scale = 1.0;
        pj.lo = 0.0;
        pj.hi = p.proximal_hi;
        m.joints.push_back(pj);
        finger.proximal_joint = int(m.joints.size()) - 1;

        m.links.push_back(dist_box(s.tag + "_dist"));
        const int dist = int(m.links.size()) - 1;
        HandJoint dj;
        dj.name = s.tag + "_dist";
        dj.parent_link = prox;
        dj.child_link = dist;
        dj.axis = s.flex_axis;
        dj.origin = RigidTransform::Identity();
        dj.origin.translation() = Vec3(0, 0, p.proximal_len);
        dj.dof = s.dist_dof;
        dj.scale = 1.0;
        dj.lo = 0.0;
        dj.hi = p.distal_hi;
        m.joints.push_back(dj);
        finger.distal_joint = int(m.joints.size()) - 1;

        finger.links = {prox, dist};
        m.fingers.push_back(finger);
    }

    m.spread_dof = 0;
    m.coupling_ratio = 0.344;
    m.coupling_enabled = p.coupling_enabled;
    m.approach_axis = Vec3::UnitZ();
    m.finalize();

    // Default V_cont: distal-link vertices (fingertips) plus the palm face.
    for (const auto& finger : m.fingers) {
        const int dist_link = finger.links.back();
        const int off = m.vertex_offset[std::size_t(dist_link)];
        for (std::size_t v = 0; v < m.links[std::size_t(dist_link)].mesh.vertex_count(); ++v)
            m.contact_vertex_ids.push_back(off + int(v));
    }
    for (std::size_t v = 0; v < m.links[0].mesh.vertex_count(); ++v)
        if (m.links[0].mesh.vertices()[v].z() > -1e-9)
            m.contact_vertex_ids.push_back(m.vertex_offset[0] + int(v));
    return m;
}

}  // namespace graspgen
