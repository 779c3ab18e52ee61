// Benchmark reporting over sampler trace files: top-10 quality averages,
// interpenetration, sampling time, kept and below-table fractions, overall
// and per clutter level. Reports are pure functions of the trace contents.
#pragma once

#include "graspgen/config.hpp"
#include "graspgen/quality.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace graspgen {

/// Everything the report needs from one sampled grasp.
struct TraceGrasp {
    bool kept = false;
    bool below_table = false;
    double epsilon = 0.0;
    double interpenetration_cm3 = 0.0;
    double loss_total = 0.0;
};

struct Trace {
    std::string scene_id;
    std::string target_id;
    int object_count = 0;
    std::uint64_t seed = 0;
    double elapsed_seconds = 0.0;
    int n_grasps = 0;
    std::vector<TraceGrasp> grasps;
};

struct ReportRow {
    int scene_count = 0;
    int grasp_count = 0;
    double avg_top10_epsilon = 0.0;
    double avg_top10_interpenetration = 0.0;
    double seconds_per_10_grasps = 0.0;
    double kept_fraction = 0.0;
    double below_table_fraction = 0.0;
    bool populated = false;
};

struct BenchmarkReport {
    ReportRow overall;
    std::map<int, ReportRow> per_clutter;  // keyed by object count (1..4)
    int trace_count = 0;
    int warning_count = 0;
};

// the Table-style row labels, kept verbatim for comparability
inline constexpr const char* kLabelEpsilon = "Avg. ε-quality over 10 grasps";
inline constexpr const char* kLabelInterpenetration =
    "Avg. interpenetration over 10 grasps (cm³)";
inline constexpr const char* kLabelTiming = "Grasp Sampling for 10 grasps (sec.)";

namespace report_detail {

/// Top-10 by epsilon among kept grasps (ties by lower interpenetration then
/// lower loss, matching rank_grasps).
inline std::vector<const TraceGrasp*> top10(const Trace& trace) {
    std::vector<const TraceGrasp*> kept;
    for (const auto& g : trace.grasps)
        if (g.kept) kept.push_back(&g);
    std::stable_sort(kept.begin(), kept.end(), [](const TraceGrasp* a, const TraceGrasp* b) {
        if (a->epsilon != b->epsilon) return a->epsilon > b->epsilon;
        if (a->interpenetration_cm3 != b->interpenetration_cm3)
            return a->interpenetration_cm3 < b->interpenetration_cm3;
        return a->loss_total < b->loss_total;
    });
    if (kept.size() > 10) kept.resize(10);
    return kept;
}

inline ReportRow summarize(const std::vector<const Trace*>& traces) {
    ReportRow row;
    if (traces.empty()) return row;
    double eps_sum = 0.0, interp_sum = 0.0, time_sum = 0.0;
    int eps_scenes = 0;
    std::size_t grasp_count = 0, kept_count = 0, below_count = 0;
    for (const auto* t : traces) {
        const auto top = top10(*t);
        if (!top.empty()) {
            double e = 0.0, v = 0.0;
            for (const auto* g : top) {
                e += g->epsilon;
                v += g->interpenetration_cm3;
            }
            eps_sum += e / double(top.size());
            interp_sum += v / double(top.size());
            ++eps_scenes;
        }
        if (t->n_grasps > 0) time_sum += t->elapsed_seconds * 10.0 / double(t->n_grasps);
        for (const auto& g : t->grasps) {
            ++grasp_count;
            kept_count += g.kept ? 1 : 0;
            below_count += g.below_table ? 1 : 0;
        }
    }
    row.scene_count = int(traces.size());
    row.grasp_count = int(grasp_count);
    row.avg_top10_epsilon = eps_scenes ? eps_sum / eps_scenes : 0.0;
    row.avg_top10_interpenetration = eps_scenes ? interp_sum / eps_scenes : 0.0;
    row.seconds_per_10_grasps = time_sum / double(traces.size());
    row.kept_fraction = grasp_count ? double(kept_count) / double(grasp_count) : 0.0;
    row.below_table_fraction = grasp_count ? double(below_count) / double(grasp_count) : 0.0;
    row.populated = eps_scenes > 0 || grasp_count > 0;
    return row;
}

}  // namespace report_detail

inline BenchmarkReport build_report(const std::vector<Trace>& traces) {
    BenchmarkReport report;
    report.trace_count = int(traces.size());
    std::vector<const Trace*> all;
    std::map<int, std::vector<const Trace*>> by_level;
    for (const auto& t : traces) {
        all.push_back(&t);
        by_level[t.object_count].push_back(&t);
    }
    report.overall = report_detail::summarize(all);
    for (int level = 1; level <= 4; ++level) {
        const auto it = by_level.find(level);
        report.per_clutter[level] = it == by_level.end()
                                        ? ReportRow{}
                                        : report_detail::summarize(it->second);
    }
    // levels outside 1..4 (if any) still contribute to overall only
    return report;
}

inline std::string render_report_text(const BenchmarkReport& report) {
    std::ostringstream out;
    auto cell = [](const ReportRow& row, double value) {
        std::ostringstream c;
        if (!row.populated) c << "n/a";
        else c << std::fixed << std::setprecision(3) << value;
        return c.str();
    };
    const int label_w = 44, col_w = 12;
    out << std::left << std::setw(label_w) << "" << std::right;
    for (int level = 1; level <= 4; ++level) {
        std::ostringstream h;
        h << level << (level == 1 ? " object" : " objects");
        out << std::setw(col_w) << h.str();
    }
    out << std::setw(col_w) << "overall" << "\n";

    auto line = [&](const std::string& label, auto getter) {
        out << std::left << std::setw(label_w) << label << std::right;
        for (int level = 1; level <= 4; ++level) {
            const auto& row = report.per_clutter.at(level);
            out << std::setw(col_w) << cell(row, getter(row));
        }
        out << std::setw(col_w) << cell(report.overall, getter(report.overall)) << "\n";
    };
    line(kLabelEpsilon, [](const ReportRow& r) { return r.avg_top10_epsilon; });
    line(kLabelInterpenetration, [](const ReportRow& r) { return r.avg_top10_interpenetration; });
    line(kLabelTiming, [](const ReportRow& r) { return r.seconds_per_10_grasps; });
    line("Kept fraction", [](const ReportRow& r) { return r.kept_fraction; });
    line("Below-table fraction", [](const ReportRow& r) { return r.below_table_fraction; });
    out << "traces: " << report.trace_count << ", warnings: " << report.warning_count << "\n";
    return out.str();
}

/// Machine-readable report: one JSON object per line (meta, then one row per
/// clutter level, then overall).
inline std::string render_report_jsonl(const BenchmarkReport& report,
                                       const EngineConfig& config) {
    std::ostringstream out;
    nlohmann::json meta;
    meta["kind"] = "graspgen-report";
    meta["format_version"] = kFormatVersion;
    meta["traces"] = report.trace_count;
    meta["warnings"] = report.warning_count;
    meta["engine_config"] = engine_config_to_json(config);
    out << meta.dump() << "\n";
    auto row_json = [](const std::string& level, const ReportRow& row) {
        nlohmann::json j;
        j["level"] = level;
        j["populated"] = row.populated;
        j["scenes"] = row.scene_count;
        j["grasps"] = row.grasp_count;
        if (row.populated) {
            j["avg_epsilon_top10"] = row.avg_top10_epsilon;
            j["avg_interpenetration_top10_cm3"] = row.avg_top10_interpenetration;
            j["seconds_per_10_grasps"] = row.seconds_per_10_grasps;
            j["kept_fraction"] = row.kept_fraction;
            j["below_table_fraction"] = row.below_table_fraction;
        }
        return j;
    };
    for (int level = 1; level <= 4; ++level)
        out << row_json(std::to_string(level), report.per_clutter.at(level)).dump() << "\n";
    out << row_json("overall", report.overall).dump() << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Trace file I/O (line-delimited JSON).

inline void write_trace(const std::string& path, const Trace& trace,
                        const EngineConfig& config, const nlohmann::json& grasp_details) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace file: " + path);
    nlohmann::json header;
    header["kind"] = "graspgen-trace";
    header["format_version"] = kFormatVersion;
    header["scene_id"] = trace.scene_id;
    header["target_id"] = trace.target_id;
    header["object_count"] = trace.object_count;
    header["seed"] = trace.seed;
    header["n_grasps"] = trace.n_grasps;
    header["engine_config"] = engine_config_to_json(config);
    out << header.dump() << "\n";
    for (std::size_t i = 0; i < trace.grasps.size(); ++i) {
        nlohmann::json line;
        const auto& g = trace.grasps[i];
        line["kept"] = g.kept;
        line["below_table"] = g.below_table;
        line["epsilon"] = g.epsilon;
        line["interpenetration_cm3"] = g.interpenetration_cm3;
        line["loss_total"] = g.loss_total;
        if (i < grasp_details.size()) line["detail"] = grasp_details.at(i);
        out << line.dump() << "\n";
    }
    // timing goes last so that everything above is deterministic per seed
    nlohmann::json timing;
    timing["elapsed_seconds"] = trace.elapsed_seconds;
    out << timing.dump() << "\n";
}

inline Trace read_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace file: " + path);
    const auto header = nlohmann::json::parse(line);
    if (header.value("kind", "") != "graspgen-trace")
        throw std::runtime_error("not a trace file: " + path);
    Trace trace;
    trace.scene_id = header.value("scene_id", "");
    trace.target_id = header.value("target_id", "");
    trace.object_count = header.value("object_count", 0);
    trace.seed = header.value("seed", std::uint64_t(0));
    trace.n_grasps = header.value("n_grasps", 0);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        if (j.contains("elapsed_seconds")) {
            trace.elapsed_seconds = j.at("elapsed_seconds").get<double>();
            continue;
        }
        TraceGrasp g;
        g.kept = j.at("kept").get<bool>();
        g.below_table = j.at("below_table").get<bool>();
        g.epsilon = j.at("epsilon").get<double>();
        g.interpenetration_cm3 = j.at("interpenetration_cm3").get<double>();
        g.loss_total = j.at("loss_total").get<double>();
        trace.grasps.push_back(g);
    }
    return trace;
}

}  // namespace graspgen
