// Dataset persistence: one directory per dataset with scenes/*.json,
// grasps/*.json, meshes/ by content hash, and a manifest carrying seeds and
// the engine configuration. All files are versioned JSON.
#pragma once

#include "graspgen/config.hpp"
#include "graspgen/object_grasps.hpp"
#include "graspgen/scene.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace graspgen {

namespace dataset_detail {

using nlohmann::json;

inline json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_from(const json& j) {
    return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

inline json transform_json(const RigidTransform& t) {
    json out = json::array();
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out.push_back(t.matrix()(r, c));
    return out;
}

inline RigidTransform transform_from(const json& j) {
    if (!j.is_array() || j.size() != 16)
        throw std::runtime_error("expected a 16-element row-major transform");
    Eigen::Matrix4d m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = j.at(std::size_t(4 * r + c)).get<double>();
    RigidTransform t = RigidTransform::Identity();
    t.matrix() = m;
    if (!is_rigid(t, 1e-6)) throw std::runtime_error("persisted transform is not rigid");
    return t;
}

inline json pose_json(const GraspPose& p) {
    return json{{"t", vec3_json(p.t)}, {"r", vec3_json(p.r)}};
}

inline GraspPose pose_from(const json& j) {
    GraspPose p;
    p.t = vec3_from(j.at("t"));
    p.r = vec3_from(j.at("r"));
    return p;
}

inline json config_json(const JointConfig& q) {
    json out = json::array();
    for (int i = 0; i < kHandDof; ++i) out.push_back(q[i]);
    return out;
}

inline JointConfig config_from(const json& j) {
    JointConfig q;
    for (int i = 0; i < kHandDof; ++i) q[i] = j.at(std::size_t(i)).get<double>();
    return q;
}

inline std::string file_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash missing file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    return hex64(fnv1a64(bytes.data(), bytes.size()));
}

}  // namespace dataset_detail

inline nlohmann::json scene_to_json(const Scene& scene) {
    using namespace dataset_detail;
    nlohmann::json doc;
    doc["format_version"] = scene.format_version;
    doc["seed"] = scene.seed;
    doc["table"] = {{"point", vec3_json(scene.table.plane.point)},
                    {"normal", vec3_json(scene.table.plane.normal)},
                    {"extent_min", {scene.table.extent_min.x(), scene.table.extent_min.y()}},
                    {"extent_max", {scene.table.extent_max.x(), scene.table.extent_max.y()}}};
    nlohmann::json objs = nlohmann::json::array();
    for (const auto& o : scene.objects) {
        objs.push_back({{"id", o.object_id},
                        {"mesh_hash", o.mesh_hash},
                        {"transform", transform_json(o.transform)},
                        {"stable_pose_id", o.stable_pose_id}});
    }
    doc["objects"] = objs;
    return doc;
}

inline Scene scene_from_json(const nlohmann::json& doc) {
    using namespace dataset_detail;
    Scene scene;
    scene.format_version = doc.at("format_version").get<int>();
    if (scene.format_version != 1) throw std::runtime_error("unsupported scene format_version");
    scene.seed = doc.at("seed").get<std::uint64_t>();
    const auto& t = doc.at("table");
    scene.table.plane = Plane(vec3_from(t.at("point")), vec3_from(t.at("normal")));
    scene.table.extent_min =
        Vec2(t.at("extent_min").at(0).get<double>(), t.at("extent_min").at(1).get<double>());
    scene.table.extent_max =
        Vec2(t.at("extent_max").at(0).get<double>(), t.at("extent_max").at(1).get<double>());
    for (const auto& o : doc.at("objects")) {
        ScenePlacement p;
        p.object_id = o.at("id").get<std::string>();
        p.mesh_hash = o.at("mesh_hash").get<std::string>();
        p.transform = transform_from(o.at("transform"));
        p.stable_pose_id = o.at("stable_pose_id").get<int>();
        scene.objects.push_back(std::move(p));
    }
    return scene;
}

inline nlohmann::json grasp_record_to_json(const GraspRecord& rec) {
    using namespace dataset_detail;
    nlohmann::json doc;
    doc["object_id"] = rec.object_id;
    doc["pose"] = pose_json(rec.pose);
    doc["config"] = config_json(rec.config);
    doc["spread_class"] = rec.spread_class;
    doc["standoff_class"] = rec.standoff_class;
    doc["direction_index"] = rec.direction_index;
    doc["refine_error"] = rec.refine_error;
    doc["finger_unreached"] = {rec.finger_unreached[0], rec.finger_unreached[1],
                               rec.finger_unreached[2]};
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& l : rec.labels) {
        labels.push_back({{"scene_id", l.scene_id},
                          {"instance_index", l.instance_index},
                          {"collision_free", l.collision_free},
                          {"epsilon", l.epsilon},
                          {"interpenetration_cm3", l.interpenetration_cm3}});
    }
    doc["labels"] = labels;
    return doc;
}

inline GraspRecord grasp_record_from_json(const nlohmann::json& doc) {
    using namespace dataset_detail;
    GraspRecord rec;
    rec.object_id = doc.at("object_id").get<std::string>();
    rec.pose = pose_from(doc.at("pose"));
    rec.config = config_from(doc.at("config"));
    rec.spread_class = doc.at("spread_class").get<int>();
    rec.standoff_class = doc.at("standoff_class").get<int>();
    rec.direction_index = doc.at("direction_index").get<int>();
    rec.refine_error = doc.at("refine_error").get<bool>();
    for (int i = 0; i < 3; ++i)
        rec.finger_unreached[std::size_t(i)] = doc.at("finger_unreached").at(std::size_t(i)).get<bool>();
    for (const auto& l : doc.at("labels")) {
        GraspRecord::SceneLabel label;
        label.scene_id = l.at("scene_id").get<std::string>();
        label.instance_index = l.at("instance_index").get<int>();
        label.collision_free = l.at("collision_free").get<bool>();
        label.epsilon = l.at("epsilon").get<double>();
        label.interpenetration_cm3 = l.at("interpenetration_cm3").get<double>();
        rec.labels.push_back(std::move(label));
    }
    return rec;
}

/// Writes a dataset directory: meshes by content hash, scene files, a grasp
/// file per object, and the manifest. Returns the manifest hash.
class DatasetWriter {
public:
    DatasetWriter(std::string dir, const EngineConfig& config)
        : dir_(std::move(dir)), config_(config) {
        namespace fs = std::filesystem;
        fs::create_directories(fs::path(dir_) / "scenes");
        fs::create_directories(fs::path(dir_) / "grasps");
        fs::create_directories(fs::path(dir_) / "meshes");
    }

    void add_library(const ObjectLibrary& library) {
        namespace fs = std::filesystem;
        for (const auto& obj : library.objects()) {
            const std::string rel = "meshes/" + obj.content_hash + ".obj";
            const fs::path path = fs::path(dir_) / rel;
            if (!fs::exists(path)) save_obj(obj.geometry.mesh(), path.string());
            mesh_files_[obj.id] = rel;
        }
    }

    std::string add_scene(const Scene& scene) {
        namespace fs = std::filesystem;
        std::ostringstream name;
        name << "scene_" << std::setfill('0') << std::setw(5) << scene_entries_.size();
        const std::string scene_id = name.str();
        const std::string rel = "scenes/" + scene_id + ".json";
        std::ofstream out(fs::path(dir_) / rel);
        out << scene_to_json(scene).dump(2) << "\n";
        out.close();
        scene_entries_.push_back({scene_id, rel, int(scene.objects.size())});
        return scene_id;
    }

    void add_grasps(const std::string& object_id, const std::vector<GraspRecord>& records) {
        namespace fs = std::filesystem;
        nlohmann::json doc;
        doc["format_version"] = kFormatVersion;
        doc["object_id"] = object_id;
        nlohmann::json recs = nlohmann::json::array();
        for (const auto& r : records) recs.push_back(grasp_record_to_json(r));
        doc["records"] = recs;
        const std::string rel = "grasps/" + object_id + ".json";
        std::ofstream out(fs::path(dir_) / rel);
        out << doc.dump(2) << "\n";
        grasp_files_.push_back(rel);
    }

    void note_saturated() { ++saturated_; }

    /// Writes the manifest and returns its content hash.
    std::string finish() {
        namespace fs = std::filesystem;
        nlohmann::json doc;
        doc["format_version"] = kFormatVersion;
        doc["kind"] = "graspgen-dataset";
        doc["engine_config"] = engine_config_to_json(config_);
        nlohmann::json scenes = nlohmann::json::array();
        for (const auto& e : scene_entries_) {
            scenes.push_back({{"id", e.id},
                              {"file", e.file},
                              {"object_count", e.object_count},
                              {"hash", dataset_detail::file_hash_hex(
                                           (fs::path(dir_) / e.file).string())}});
        }
        doc["scenes"] = scenes;
        nlohmann::json meshes = nlohmann::json::object();
        for (const auto& [id, rel] : mesh_files_) meshes[id] = rel;
        doc["objects"] = meshes;
        doc["grasp_files"] = grasp_files_;
        doc["saturated_scenes"] = saturated_;
        const std::string text = doc.dump(2) + "\n";
        std::ofstream out(fs::path(dir_) / "manifest.json");
        out << text;
        return hex64(fnv1a64(text.data(), text.size()));
    }

private:
    struct SceneEntry {
        std::string id;
        std::string file;
        int object_count;
    };
    std::string dir_;
    EngineConfig config_;
    std::vector<SceneEntry> scene_entries_;
    std::map<std::string, std::string> mesh_files_;
    std::vector<std::string> grasp_files_;
    int saturated_ = 0;
};

struct LoadedDataset {
    EngineConfig config;
    ObjectLibrary library;
    std::vector<std::pair<std::string, Scene>> scenes;  // (scene id, scene)
    int saturated_scenes = 0;
};

inline LoadedDataset load_dataset(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream in(fs::path(dir) / "manifest.json");
    if (!in) throw std::runtime_error("not a dataset directory (no manifest.json): " + dir);
    nlohmann::json doc;
    in >> doc;
    if (doc.value("kind", "") != "graspgen-dataset")
        throw std::runtime_error("manifest kind mismatch in " + dir);
    LoadedDataset out;
    out.config = engine_config_from_json(doc.at("engine_config"));
    out.saturated_scenes = doc.value("saturated_scenes", 0);
    for (const auto& [id, rel] : doc.at("objects").items()) {
        out.library.add(id, load_mesh((fs::path(dir) / rel.get<std::string>()).string()));
    }
    for (const auto& e : doc.at("scenes")) {
        std::ifstream sin(fs::path(dir) / e.at("file").get<std::string>());
        if (!sin) throw std::runtime_error("missing scene file in " + dir);
        nlohmann::json sdoc;
        sin >> sdoc;
        out.scenes.emplace_back(e.at("id").get<std::string>(), scene_from_json(sdoc));
    }
    return out;
}

inline std::vector<GraspRecord> load_grasp_records(const std::string& path,
                                                   std::string* object_id = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grasp file: " + path);
    nlohmann::json doc;
    in >> doc;
    if (object_id) *object_id = doc.at("object_id").get<std::string>();
    std::vector<GraspRecord> records;
    for (const auto& r : doc.at("records")) records.push_back(grasp_record_from_json(r));
    return records;
}

}  // namespace graspgen
