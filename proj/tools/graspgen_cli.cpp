// graspgen command line: dataset generation, grasp sampling, benchmark
// reporting and the embedded self-test suite.
//
// Exit codes: 0 success, 1 internal error, 2 bad arguments or unknown ids.
#include "graspgen/dataset_io.hpp"
#include "graspgen/fixtures.hpp"
#include "graspgen/hand_io.hpp"
#include "graspgen/report.hpp"
#include "graspgen/sampler.hpp"
#include "graspgen/selftest.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace graspgen;
namespace fs = std::filesystem;

EngineConfig load_config_or_default(const std::string& explicit_path) {
    if (!explicit_path.empty()) return load_engine_config(explicit_path);
    if (const char* env = std::getenv("GRASPGEN_CONFIG"); env && *env)
        return load_engine_config(env);
    return EngineConfig{};
}

HandModel load_hand(const EngineConfig& cfg, const std::string& override_path) {
    const std::string path = !override_path.empty() ? override_path : cfg.hand_description;
    if (path.empty() || path == "builtin") {
        TestHandParams params;
        params.coupling_enabled = cfg.hand_coupling;
        return make_test_hand(params);
    }
    HandModel model = load_hand_description(path);
    model.coupling_enabled = cfg.hand_coupling;
    return model;
}

ObjectLibrary load_mesh_dir(const std::string& dir, int* warnings) {
    ObjectLibrary pool;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".obj" || ext == ".stl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        try {
            pool.add(file.stem().string(), load_mesh(file.string()));
        } catch (const std::exception& e) {
            std::cerr << "warning: skipping " << file.string() << ": " << e.what() << "\n";
            if (warnings) ++(*warnings);
        }
    }
    return pool;
}

nlohmann::json grasp_detail_json(const SampledGrasp& g) {
    using dataset_detail::config_json;
    using dataset_detail::pose_json;
    using dataset_detail::vec3_json;
    nlohmann::json j;
    j["pose"] = pose_json(g.pose);
    j["config"] = config_json(g.config);
    j["input_rotation"] = vec3_json(g.input_rotation);
    j["coarse_pose"] = pose_json(g.coarse_pose);
    j["coarse_config"] = config_json(g.coarse_config);
    j["descent_iterations"] = g.descent_iterations;
    j["descent_stalled"] = g.descent_stalled;
    j["ray_fallback"] = g.ray_fallback;
    j["standoff_class"] = g.standoff_class;
    j["spread_class"] = g.spread_class;
    j["plane_lift"] = g.plane_lift;
    j["contact_count"] = g.evaluation.contact_count;
    j["torque_scale"] = g.evaluation.torque_scale;
    j["metric"] = {{"friction_mu", g.evaluation.params.friction_mu},
                   {"cone_edges", g.evaluation.params.cone_edges},
                   {"contact_tolerance_m", g.evaluation.params.contact_tolerance},
                   {"target_penetration_cm3", g.evaluation.params.target_penetration_cm3},
                   {"voxel_size_m", g.evaluation.params.voxel_size}};
    return j;
}

int cmd_gen_scenes(const std::string& config_path, const std::string& mesh_dir, bool builtin,
                   std::vector<int> counts, std::uint64_t seed, const std::string& out_dir,
                   int object_grasp_directions, bool transfer, int jobs) {
    EngineConfig cfg = load_config_or_default(config_path);
    cfg.seed = seed;
    int warnings = 0;
    ObjectLibrary pool;
    if (builtin) pool = fixture_library();
    else if (!mesh_dir.empty()) pool = load_mesh_dir(mesh_dir, &warnings);
    else {
        std::cerr << "error: need --mesh-dir or --builtin-objects\n";
        return 2;
    }
    if (pool.size() == 0) {
        std::cerr << "error: object pool is empty\n";
        return 2;
    }
    while (counts.size() < 4) counts.push_back(0);

    DatasetWriter writer(out_dir, cfg);
    writer.add_library(pool);
    TableSpec table;
    int scene_index = 0, saturated = 0, written = 0;
    std::vector<std::pair<std::string, Scene>> scenes;
    for (int level = 1; level <= 4; ++level) {
        for (int i = 0; i < counts[std::size_t(level - 1)]; ++i) {
            const std::uint64_t scene_seed = derive_seed(seed, std::uint64_t(scene_index++));
            try {
                Scene scene = generate_scene(pool, level, table, scene_seed);
                scenes.emplace_back(writer.add_scene(scene), std::move(scene));
                ++written;
            } catch (const std::runtime_error& e) {
                std::cerr << "warning: scene " << scene_index - 1 << " skipped: " << e.what()
                          << "\n";
                writer.note_saturated();
                ++saturated;
            }
        }
    }

    if (object_grasp_directions > 0) {
        const HandModel hand = load_hand(cfg, "");
        for (std::size_t oi = 0; oi < pool.size(); ++oi) {
            const auto& obj = pool.at(oi);
            auto records = generate_object_grasps(hand, obj, object_grasp_directions,
                                                  derive_seed(seed, 0xabc0 + oi),
                                                  cfg.metric.contact_tolerance);
            if (transfer) {
                for (const auto& [scene_id, scene] : scenes) {
                    bool present = false;
                    for (const auto& p : scene.objects) present |= p.object_id == obj.id;
                    if (!present) continue;
                    transfer_grasps(records, scene, scene_id, pool, cfg.metric, hand,
                                    cfg.weights, cfg.surface_samples, jobs);
                }
            }
            writer.add_grasps(obj.id, records);
        }
    }

    const std::string manifest_hash = writer.finish();
    std::cout << "scenes " << written << " saturated " << saturated << " objects " << pool.size()
              << " manifest " << manifest_hash << "\n";
    return 0;
}

int cmd_sample(const std::string& config_path, const std::string& dataset_dir,
               const std::string& scene_id, int target_index, int n, std::uint64_t seed,
               const std::string& out_path, const std::string& hand_path, int jobs) {
    EngineConfig cfg = load_config_or_default(config_path);
    const LoadedDataset dataset = load_dataset(dataset_dir);

    const Scene* scene = nullptr;
    for (const auto& [id, s] : dataset.scenes)
        if (id == scene_id) scene = &s;
    if (!scene) {
        std::cerr << "error: scene id not found in dataset: " << scene_id << "\n";
        return 2;
    }
    if (target_index < 0 || target_index >= int(scene->objects.size())) {
        std::cerr << "error: target index out of range for scene " << scene_id << ": "
                  << target_index << "\n";
        return 2;
    }

    const HandModel hand = load_hand(cfg, hand_path);
    const GraspSceneView view =
        scene_view(*scene, dataset.library, target_index, cfg.surface_samples);
    SamplerConfig sampler = sampler_from_engine(cfg);
    if (n > 0) sampler.n_grasps = n;
    sampler.seed = seed;
    sampler.jobs = jobs;
    const SampleRun run = sample_grasps(hand, view, sampler);

    Trace trace;
    trace.scene_id = scene_id;
    trace.target_id = scene->objects[std::size_t(target_index)].object_id;
    trace.object_count = int(scene->objects.size());
    trace.seed = seed;
    trace.n_grasps = int(run.grasps.size());
    trace.elapsed_seconds = run.elapsed_seconds;
    nlohmann::json details = nlohmann::json::array();
    int kept = 0;
    double best_eps = 0.0;
    for (const auto& g : run.grasps) {
        TraceGrasp tg;
        tg.kept = g.kept;
        tg.below_table = g.evaluation.below_table;
        tg.epsilon = g.evaluation.epsilon;
        tg.interpenetration_cm3 = g.evaluation.interpenetration_cm3;
        tg.loss_total = g.evaluation.losses.total;
        trace.grasps.push_back(tg);
        details.push_back(grasp_detail_json(g));
        kept += g.kept ? 1 : 0;
        if (g.kept) best_eps = std::max(best_eps, g.evaluation.epsilon);
    }
    if (!out_path.empty()) write_trace(out_path, trace, cfg, details);
    std::cout << "kept " << kept << "/" << run.grasps.size() << " removed "
              << run.grasps.size() - std::size_t(kept) << " best-eps " << std::fixed
              << std::setprecision(4) << best_eps << " elapsed " << std::setprecision(2)
              << run.elapsed_seconds << " s\n";
    return 0;
}

int cmd_report(const std::string& config_path, std::vector<std::string> inputs,
               const std::string& out_path) {
    EngineConfig cfg = load_config_or_default(config_path);
    std::vector<std::string> files;
    for (const auto& input : inputs) {
        if (fs::is_directory(input)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::recursive_directory_iterator(input)) {
                if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
                    found.push_back(entry.path());
            }
            std::sort(found.begin(), found.end());
            for (const auto& f : found) files.push_back(f.string());
        } else {
            files.push_back(input);
        }
    }
    if (files.empty()) {
        std::cerr << "error: no trace files\n";
        return 2;
    }
    std::vector<Trace> traces;
    int warnings = 0;
    for (const auto& file : files) {
        try {
            traces.push_back(read_trace(file));
        } catch (const std::exception& e) {
            std::cerr << "warning: skipping " << file << ": " << e.what() << "\n";
            ++warnings;
        }
    }
    if (traces.empty()) {
        std::cerr << "error: no readable traces\n";
        return 2;
    }
    BenchmarkReport report = build_report(traces);
    report.warning_count = warnings;
    std::cout << render_report_text(report);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return 1;
        }
        out << render_report_jsonl(report, cfg);
    }
    return 0;
}

int cmd_check(const std::string& config_path, bool quick) {
    const EngineConfig cfg = load_config_or_default(config_path);
    std::vector<std::string> failed;
    SelftestOptions options;
    options.quick = quick;
    const bool ok = run_selftest(cfg, std::cout, &failed, options);
    if (!ok) {
        std::cerr << "failed properties:";
        for (const auto& name : failed) std::cerr << " " << name;
        std::cerr << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-finger grasp synthesis and evaluation engine"};
    app.require_subcommand(1);

    std::string config_path;
    int jobs = 0;
    app.add_option("--config", config_path, "engine config file (or $GRASPGEN_CONFIG)");
    app.add_option("--jobs", jobs, "worker threads (0 = hardware)");

    // gen-scenes
    auto* gen = app.add_subcommand("gen-scenes", "generate a cluttered-scene dataset");
    std::string mesh_dir, out_dir;
    bool builtin = false, transfer = false;
    std::vector<int> counts = {1, 1, 1, 1};
    std::uint64_t seed = 0;
    int grasp_directions = 0;
    gen->add_option("--mesh-dir", mesh_dir, "directory of .obj/.stl meshes");
    gen->add_flag("--builtin-objects", builtin, "use the bundled fixture objects");
    gen->add_option("--counts", counts, "scenes per clutter level (1..4 objects)")
        ->expected(1, 4);
    gen->add_option("--seed", seed, "master seed");
    gen->add_option("--out", out_dir, "output dataset directory")->required();
    gen->add_option("--object-grasps", grasp_directions,
                    "also emit object-centric grasps with this many directions");
    gen->add_flag("--transfer", transfer, "label object grasps against every scene");

    // sample
    auto* sample = app.add_subcommand("sample", "sample grasps for a target in a scene");
    std::string dataset_dir, scene_id, trace_out, hand_path;
    int target_index = 0, n_grasps = 0;
    std::uint64_t sample_seed = 0;
    sample->add_option("--dataset", dataset_dir, "dataset directory")->required();
    sample->add_option("--scene", scene_id, "scene id (e.g. scene_00000)")->required();
    sample->add_option("--target", target_index, "target object index in the scene");
    sample->add_option("-n,--n-grasps", n_grasps, "grasps to sample (0 = config default)");
    sample->add_option("--seed", sample_seed, "sampler seed");
    sample->add_option("--out", trace_out, "trace output file (.jsonl)");
    sample->add_option("--hand", hand_path, "hand description file (default: builtin)");

    // report
    auto* report = app.add_subcommand("report", "summarize sampler traces");
    std::vector<std::string> report_inputs;
    std::string report_out;
    report->add_option("inputs", report_inputs, "trace files or directories")->required();
    report->add_option("--out", report_out, "machine-readable report file (.jsonl)");

    // check
    auto* check = app.add_subcommand("check", "run the embedded property suite");
    bool quick = false;
    check->add_flag("--quick", quick, "reduced budgets");

    // config
    auto* config_cmd = app.add_subcommand("config", "emit the default engine config");
    std::string config_out;
    config_cmd->add_option("--out", config_out, "output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed())
            return cmd_gen_scenes(config_path, mesh_dir, builtin, counts, seed, out_dir,
                                  grasp_directions, transfer, jobs);
        if (sample->parsed())
            return cmd_sample(config_path, dataset_dir, scene_id, target_index, n_grasps,
                              sample_seed, trace_out, hand_path, jobs);
        if (report->parsed()) return cmd_report(config_path, report_inputs, report_out);
        if (check->parsed()) return cmd_check(config_path, quick);
        if (config_cmd->parsed()) {
            save_engine_config(default_config_with_reference(), config_out);
            std::cout << "wrote " << config_out << "\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
