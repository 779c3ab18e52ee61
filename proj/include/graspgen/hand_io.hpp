// Hand description files: a JSON document listing links (with OBJ mesh
// references), joints, finger chains, coupling and contact vertex ids.
// Schema is versioned via {"format": "graspgen-hand", "version": 1}.
#pragma once

#include "graspgen/hand.hpp"
#include "graspgen/mesh_io.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

namespace graspgen {

namespace hand_io_detail {

using nlohmann::json;

inline json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected a 3-vector");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline json transform_to_json(const RigidTransform& t) {
    return json{{"translation", vec3_to_json(t.translation())},
                {"rotation_axis_angle", vec3_to_json(axis_angle_from_rotation(t.linear()))}};
}

inline RigidTransform transform_from_json(const json& j) {
    RigidTransform t = RigidTransform::Identity();
    t.translation() = vec3_from_json(j.at("translation"));
    t.linear() = rotation_from_axis_angle(vec3_from_json(j.at("rotation_axis_angle")));
    return t;
}

}  // namespace hand_io_detail

/// Writes the description JSON and one OBJ per meshed link into `dir`.
inline void save_hand_description(const HandModel& model, const std::string& dir,
                                  const std::string& filename = "hand.json") {
    namespace fs = std::filesystem;
    using nlohmann::json;
    using namespace hand_io_detail;
    fs::create_directories(dir);

    json doc;
    doc["format"] = "graspgen-hand";
    doc["version"] = 1;
    doc["name"] = model.name;
    doc["approach_axis"] = vec3_to_json(model.approach_axis);
    doc["spread_dof"] = model.spread_dof;
    doc["coupling_ratio"] = model.coupling_ratio;
    doc["coupling_enabled"] = model.coupling_enabled;

    json links = json::array();
    for (const auto& l : model.links) {
        json jl;
        jl["name"] = l.name;
        if (l.mesh.vertex_count() > 0) {
            const std::string mesh_file = l.mesh_file.empty() ? l.name + ".obj" : l.mesh_file;
            save_obj(l.mesh, (fs::path(dir) / mesh_file).string());
            jl["mesh"] = mesh_file;
        }
        links.push_back(jl);
    }
    doc["links"] = links;

    json joints = json::array();
    for (const auto& j : model.joints) {
        joints.push_back(json{{"name", j.name},
                              {"parent", model.links[std::size_t(j.parent_link)].name},
                              {"child", model.links[std::size_t(j.child_link)].name},
                              {"axis", vec3_to_json(j.axis)},
                              {"origin", transform_to_json(j.origin)},
                              {"dof", j.dof},
                              {"scale", j.scale},
                              {"limits", json::array({j.lo, j.hi})}});
    }
    doc["joints"] = joints;

    json fingers = json::array();
    for (const auto& f : model.fingers) {
        json jf;
        jf["name"] = f.name;
        jf["proximal_joint"] = model.joints[std::size_t(f.proximal_joint)].name;
        jf["distal_joint"] = model.joints[std::size_t(f.distal_joint)].name;
        json fl = json::array();
        for (const int l : f.links) fl.push_back(model.links[std::size_t(l)].name);
        jf["links"] = fl;
        fingers.push_back(jf);
    }
    doc["fingers"] = fingers;
    doc["contact_vertex_ids"] = model.contact_vertex_ids;

    std::ofstream out(fs::path(dir) / filename);
    if (!out) throw std::runtime_error("cannot write hand description: " + dir);
    out << doc.dump(2) << "\n";
}

inline HandModel load_hand_description(const std::string& path) {
    namespace fs = std::filesystem;
    using nlohmann::json;
    using namespace hand_io_detail;

    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open hand description: " + path);
    json doc;
    in >> doc;
    if (doc.value("format", "") != "graspgen-hand")
        throw std::runtime_error(path + ": not a hand description file");
    if (doc.value("version", 0) != 1)
        throw std::runtime_error(path + ": unsupported hand description version");

    const fs::path dir = fs::path(path).parent_path();
    HandModel m;
    m.name = doc.value("name", "hand");
    m.approach_axis = vec3_from_json(doc.at("approach_axis")).normalized();
    m.spread_dof = doc.value("spread_dof", 0);
    m.coupling_ratio = doc.value("coupling_ratio", 0.344);
    m.coupling_enabled = doc.value("coupling_enabled", false);

    std::map<std::string, int> link_index;
    for (const auto& jl : doc.at("links")) {
        HandLink link;
        link.name = jl.at("name").get<std::string>();
        if (jl.contains("mesh")) {
            link.mesh_file = jl.at("mesh").get<std::string>();
            link.mesh = load_obj((dir / link.mesh_file).string());
        } else {
            link.mesh = TriMesh::build({}, {});
        }
        link_index[link.name] = int(m.links.size());
        m.links.push_back(std::move(link));
    }

    std::map<std::string, int> joint_index;
    for (const auto& jj : doc.at("joints")) {
        HandJoint j;
        j.name = jj.at("name").get<std::string>();
        j.parent_link = link_index.at(jj.at("parent").get<std::string>());
        j.child_link = link_index.at(jj.at("child").get<std::string>());
        j.axis = vec3_from_json(jj.at("axis")).normalized();
        j.origin = transform_from_json(jj.at("origin"));
        j.dof = jj.at("dof").get<int>();
        j.scale = jj.at("scale").get<double>();
        j.lo = jj.at("limits")[0].get<double>();
        j.hi = jj.at("limits")[1].get<double>();
        joint_index[j.name] = int(m.joints.size());
        m.joints.push_back(std::move(j));
    }

    for (const auto& jf : doc.at("fingers")) {
        HandFinger f;
        f.name = jf.at("name").get<std::string>();
        f.proximal_joint = joint_index.at(jf.at("proximal_joint").get<std::string>());
        f.distal_joint = joint_index.at(jf.at("distal_joint").get<std::string>());
        for (const auto& ln : jf.at("links")) f.links.push_back(link_index.at(ln.get<std::string>()));
        m.fingers.push_back(std::move(f));
    }

    m.contact_vertex_ids = doc.value("contact_vertex_ids", std::vector<int>{});
    m.finalize();
    return m;
}

}  // namespace graspgen
