// Engine configuration: loss weights, metric parameters, sampler defaults,
// mesh-processing defaults and seeds. Parsed strictly (unknown keys are
// rejected with their JSON location) and echoed into every output artifact.
#pragma once

#include "graspgen/losses.hpp"
#include "graspgen/quality.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

namespace graspgen {

inline constexpr int kFormatVersion = 1;

struct DescentConfig {
    double step_translation = 0.005;  // meters
    double step_rotation = 0.05;      // radians (rotation and spread)
    int max_iterations = 40;
    double tolerance = 1e-4;          // convergence: loss improvement floor
    int patience = 5;                 // iterations the floor must persist
    int max_halvings = 10;            // backtracking line search depth
};

struct SamplerDefaults {
    int n_grasps = 100;
    bool rotation_filter = true;
    double max_polar_deg = 72.0;      // hemisphere cap for input rotations
    double rotation_noise_sigma = 0.1;  // rad, dataset-mode jitter
    DescentConfig descent;
};

struct SelftestReference {
    bool present = false;
    LossWeights weights;
    LossBreakdown expected;
};

struct EngineConfig {
    std::uint64_t seed = 0;
    LossWeights weights;
    QualityParams metric;
    std::size_t surface_samples = 2000;
    ContactDistanceMode contact_mode = ContactDistanceMode::Exact;
    SamplerDefaults sampler;
    std::string hand_description;  // empty = builtin fixture hand
    bool hand_coupling = false;
    SelftestReference selftest;
};

namespace config_detail {

using nlohmann::json;

inline void require_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw std::runtime_error("config: expected object at " + where);
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key))
            throw std::runtime_error("config: unknown key \"" + key + "\" at " + where + "/" +
                                     key);
    }
}

template <typename T>
inline void read_into(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace config_detail

inline EngineConfig engine_config_from_json(const nlohmann::json& doc) {
    using config_detail::read_into;
    using config_detail::require_keys;
    EngineConfig cfg;
    require_keys(doc, "", {"format_version", "seed", "weights", "metric", "mesh",
                           "contact_distance_mode", "sampler", "hand", "selftest"});
    if (doc.contains("format_version") && doc.at("format_version").get<int>() != kFormatVersion)
        throw std::runtime_error("config: unsupported format_version");
    read_into(doc, "seed", cfg.seed);

    if (doc.contains("weights")) {
        const auto& w = doc.at("weights");
        require_keys(w, "/weights", {"w_cont", "w_coll", "w_orient", "w_plane", "w_disc", "w_gp"});
        read_into(w, "w_cont", cfg.weights.w_cont);
        read_into(w, "w_coll", cfg.weights.w_coll);
        read_into(w, "w_orient", cfg.weights.w_orient);
        read_into(w, "w_plane", cfg.weights.w_plane);
        read_into(w, "w_disc", cfg.weights.w_disc);
        read_into(w, "w_gp", cfg.weights.w_gp);
        cfg.weights.validate();
    }
    if (doc.contains("metric")) {
        const auto& m = doc.at("metric");
        require_keys(m, "/metric",
                     {"friction_mu", "cone_edges", "contact_tolerance_m",
                      "target_penetration_cm3", "torque_scale_policy"});
        read_into(m, "friction_mu", cfg.metric.friction_mu);
        read_into(m, "cone_edges", cfg.metric.cone_edges);
        read_into(m, "contact_tolerance_m", cfg.metric.contact_tolerance);
        read_into(m, "target_penetration_cm3", cfg.metric.target_penetration_cm3);
        if (m.contains("torque_scale_policy") &&
            m.at("torque_scale_policy").get<std::string>() != "bounding_sphere")
            throw std::runtime_error("config: unknown torque_scale_policy");
    }
    if (doc.contains("mesh")) {
        const auto& m = doc.at("mesh");
        require_keys(m, "/mesh", {"surface_samples", "voxel_size_m"});
        read_into(m, "surface_samples", cfg.surface_samples);
        read_into(m, "voxel_size_m", cfg.metric.voxel_size);
    }
    if (doc.contains("contact_distance_mode")) {
        const auto mode = doc.at("contact_distance_mode").get<std::string>();
        if (mode == "exact") cfg.contact_mode = ContactDistanceMode::Exact;
        else if (mode == "k-sample") cfg.contact_mode = ContactDistanceMode::Sampled;
        else throw std::runtime_error("config: contact_distance_mode must be exact or k-sample");
    }
    if (doc.contains("sampler")) {
        const auto& s = doc.at("sampler");
        require_keys(s, "/sampler",
                     {"n_grasps", "rotation_filter", "max_polar_deg", "rotation_noise_sigma",
                      "descent"});
        read_into(s, "n_grasps", cfg.sampler.n_grasps);
        read_into(s, "rotation_filter", cfg.sampler.rotation_filter);
        read_into(s, "max_polar_deg", cfg.sampler.max_polar_deg);
        read_into(s, "rotation_noise_sigma", cfg.sampler.rotation_noise_sigma);
        if (s.contains("descent")) {
            const auto& d = s.at("descent");
            require_keys(d, "/sampler/descent",
                         {"step_translation_m", "step_rotation_rad", "max_iterations",
                          "tolerance", "patience", "max_halvings"});
            read_into(d, "step_translation_m", cfg.sampler.descent.step_translation);
            read_into(d, "step_rotation_rad", cfg.sampler.descent.step_rotation);
            read_into(d, "max_iterations", cfg.sampler.descent.max_iterations);
            read_into(d, "tolerance", cfg.sampler.descent.tolerance);
            read_into(d, "patience", cfg.sampler.descent.patience);
            read_into(d, "max_halvings", cfg.sampler.descent.max_halvings);
        }
    }
    if (doc.contains("hand")) {
        const auto& h = doc.at("hand");
        require_keys(h, "/hand", {"description", "coupling"});
        read_into(h, "description", cfg.hand_description);
        read_into(h, "coupling", cfg.hand_coupling);
    }
    if (doc.contains("selftest")) {
        const auto& s = doc.at("selftest");
        require_keys(s, "/selftest", {"reference"});
        if (s.contains("reference")) {
            const auto& r = s.at("reference");
            require_keys(r, "/selftest/reference", {"weights", "expected"});
            cfg.selftest.present = true;
            const auto& w = r.at("weights");
            require_keys(w, "/selftest/reference/weights",
                         {"w_cont", "w_coll", "w_orient", "w_plane"});
            read_into(w, "w_cont", cfg.selftest.weights.w_cont);
            read_into(w, "w_coll", cfg.selftest.weights.w_coll);
            read_into(w, "w_orient", cfg.selftest.weights.w_orient);
            read_into(w, "w_plane", cfg.selftest.weights.w_plane);
            const auto& e = r.at("expected");
            require_keys(e, "/selftest/reference/expected",
                         {"cont", "coll", "orient", "plane", "total"});
            cfg.selftest.expected.cont = e.at("cont").get<double>();
            cfg.selftest.expected.coll = e.at("coll").get<double>();
            cfg.selftest.expected.orient = e.at("orient").get<double>();
            cfg.selftest.expected.plane = e.at("plane").get<double>();
            cfg.selftest.expected.total = e.at("total").get<double>();
        }
    }
    return cfg;
}

inline nlohmann::json engine_config_to_json(const EngineConfig& cfg) {
    nlohmann::json doc;
    doc["format_version"] = kFormatVersion;
    doc["seed"] = cfg.seed;
    doc["weights"] = {{"w_cont", cfg.weights.w_cont},   {"w_coll", cfg.weights.w_coll},
                      {"w_orient", cfg.weights.w_orient}, {"w_plane", cfg.weights.w_plane},
                      {"w_disc", cfg.weights.w_disc},   {"w_gp", cfg.weights.w_gp}};
    doc["metric"] = {{"friction_mu", cfg.metric.friction_mu},
                     {"cone_edges", cfg.metric.cone_edges},
                     {"contact_tolerance_m", cfg.metric.contact_tolerance},
                     {"target_penetration_cm3", cfg.metric.target_penetration_cm3},
                     {"torque_scale_policy", "bounding_sphere"}};
    doc["mesh"] = {{"surface_samples", cfg.surface_samples},
                   {"voxel_size_m", cfg.metric.voxel_size}};
    doc["contact_distance_mode"] =
        cfg.contact_mode == ContactDistanceMode::Exact ? "exact" : "k-sample";
    doc["sampler"] = {{"n_grasps", cfg.sampler.n_grasps},
                      {"rotation_filter", cfg.sampler.rotation_filter},
                      {"max_polar_deg", cfg.sampler.max_polar_deg},
                      {"rotation_noise_sigma", cfg.sampler.rotation_noise_sigma},
                      {"descent",
                       {{"step_translation_m", cfg.sampler.descent.step_translation},
                        {"step_rotation_rad", cfg.sampler.descent.step_rotation},
                        {"max_iterations", cfg.sampler.descent.max_iterations},
                        {"tolerance", cfg.sampler.descent.tolerance},
                        {"patience", cfg.sampler.descent.patience},
                        {"max_halvings", cfg.sampler.descent.max_halvings}}}};
    doc["hand"] = {{"description", cfg.hand_description}, {"coupling", cfg.hand_coupling}};
    if (cfg.selftest.present) {
        doc["selftest"] = {
            {"reference",
             {{"weights",
               {{"w_cont", cfg.selftest.weights.w_cont},
                {"w_coll", cfg.selftest.weights.w_coll},
                {"w_orient", cfg.selftest.weights.w_orient},
                {"w_plane", cfg.selftest.weights.w_plane}}},
              {"expected",
               {{"cont", cfg.selftest.expected.cont},
                {"coll", cfg.selftest.expected.coll},
                {"orient", cfg.selftest.expected.orient},
                {"plane", cfg.selftest.expected.plane},
                {"total", cfg.selftest.expected.total}}}}}};
    }
    return doc;
}

inline EngineConfig load_engine_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json doc;
    in >> doc;
    return engine_config_from_json(doc);
}

inline void save_engine_config(const EngineConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << engine_config_to_json(cfg).dump(2) << "\n";
}

}  // namespace graspgen
