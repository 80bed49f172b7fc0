#include "agenteval/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "agenteval/errors.hpp"

namespace agenteval {

namespace {

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

uint64_t fnv1a(const std::string& data) {
    uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string to_hex(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string config_hash(const RunConfig& cfg, const std::string& adapter_name,
                        const std::string& dataset_version) {
    json doc = {{"adapter", adapter_name},
                {"dataset_version", dataset_version},
                {"teacher_forcing", cfg.teacher_forcing},
                {"max_turns_per_mission", cfg.max_turns_per_mission},
                {"retry_budget", cfg.retry_budget},
                {"clarify_heuristic", cfg.clarify_heuristic},
                {"enum_max_nodes", cfg.enum_limits.max_nodes},
                {"enum_max_paths", cfg.enum_limits.max_paths},
                {"policy",
                 {{"string_case_insensitive", cfg.match_policy.string_case_insensitive},
                  {"trim_whitespace", cfg.match_policy.trim_whitespace},
                  {"numeric_tolerance", cfg.match_policy.numeric_tolerance},
                  {"accept_alternates", cfg.match_policy.accept_alternates}}}};
    return to_hex(fnv1a(doc.dump()));
}

std::string accuracy_table_csv(const AccuracyTable& table, const std::string& key_column) {
    std::string out = key_column + ",passed,total,accuracy\n";
    for (const auto& row : table) {
        out += row.key + "," + std::to_string(row.passed) + "," + std::to_string(row.total) + "," +
               fmt2(row.percent) + "\n";
    }
    return out;
}

std::string combo_heatmap_csv(const AccuracyTable& table) {
    std::string out = "length,combo,passed,total,accuracy\n";
    for (const auto& row : table) {
        const auto length = std::count(row.key.begin(), row.key.end(), '>') + 1;
        out += std::to_string(length) + "," + row.key + "," + std::to_string(row.passed) + "," +
               std::to_string(row.total) + "," + fmt2(row.percent) + "\n";
    }
    return out;
}

std::string error_distribution_csv(const std::vector<ErrorDistributionRow>& raw,
                                   const std::vector<ErrorDistributionRow>& folded) {
    std::string out = "view,class,count,percent\n";
    for (const auto& row : raw) {
        out += "raw," + std::string(error_class_to_string(row.error_class)) + "," +
               std::to_string(row.count) + "," + fmt2(row.percent) + "\n";
    }
    for (const auto& row : folded) {
        out += "folded," + std::string(error_class_to_string(row.error_class)) + "," +
               std::to_string(row.count) + "," + fmt2(row.percent) + "\n";
    }
    return out;
}

std::string summary_metrics_csv(const Aggregates& agg) {
    std::string out = "metric,value\n";
    out += "cases_total," + std::to_string(agg.cases_total) + "\n";
    out += "cases_scored," + std::to_string(agg.cases_scored) + "\n";
    out += "cases_passed," + std::to_string(agg.cases_passed) + "\n";
    out += "cases_unscored," + std::to_string(agg.cases_unscored) + "\n";
    out += "missions_total," + std::to_string(agg.missions_total) + "\n";
    out += "missions_passed," + std::to_string(agg.missions_passed) + "\n";
    out += "mission_accuracy," +
           fmt2(agg.missions_total == 0 ? 0.0
                                        : 100.0 * agg.missions_passed / agg.missions_total) +
           "\n";
    out += "case_accuracy," +
           fmt2(agg.cases_scored == 0 ? 0.0 : 100.0 * agg.cases_passed / agg.cases_scored) + "\n";
    out += "optimal_path_rate," +
           (agg.optimal_path_rate ? fmt2(*agg.optimal_path_rate) : std::string("absent")) + "\n";
    out += "accomplished_progress," + fmt2(agg.accomplished_progress) + "\n";
    out += "msss_cumulative," + fmt2(agg.msss_cumulative) + "\n";
    out += "msss_exact," + fmt2(agg.msss_exact) + "\n";
    return out;
}

std::string summary_text(const ReportBundle& bundle) {
    const Aggregates& agg = bundle.aggregates;
    std::string out;
    out += "run summary\n";
    out += "  adapter:          " + bundle.adapter_name + "\n";
    out += "  config hash:      " + bundle.config_hash + "\n";
    out += "  dataset version:  " + bundle.dataset_version + "\n";
    out += "  cases:            " + std::to_string(agg.cases_passed) + "/" +
           std::to_string(agg.cases_scored) + " passed";
    if (agg.cases_unscored > 0) {
        out += " (" + std::to_string(agg.cases_unscored) + " unscored)";
    }
    out += "\n";
    out += "  missions:         " + std::to_string(agg.missions_passed) + "/" +
           std::to_string(agg.missions_total) + " passed\n";
    out += "  optimal path rate: " +
           (agg.optimal_path_rate ? fmt2(*agg.optimal_path_rate) : std::string("absent")) + "\n";
    out += "  progress:          " + fmt2(agg.accomplished_progress) + "\n";
    out += "  msss (cumulative): " + fmt2(agg.msss_cumulative) + "\n";
    out += "  msss (exact):      " + fmt2(agg.msss_exact) + "\n";

    out += "\naccuracy by action type\n";
    for (const auto& row : agg.by_action_type) {
        out += "  " + row.key + ": " + fmt2(row.percent) + " (" + std::to_string(row.passed) + "/" +
               std::to_string(row.total) + ")\n";
    }
    out += "\naccuracy by relation type\n";
    for (const auto& row : agg.by_relation_type) {
        out += "  " + row.key + ": " + fmt2(row.percent) + " (" + std::to_string(row.passed) + "/" +
               std::to_string(row.total) + ")\n";
    }
    out += "\naccuracy by mission count\n";
    for (const auto& row : agg.by_mission_count) {
        out += "  " + row.key + ": " + fmt2(row.percent) + " (" + std::to_string(row.passed) + "/" +
               std::to_string(row.total) + ")\n";
    }
    return out;
}

namespace {

json mission_result_to_json(const MissionResult& r) {
    json out = {{"case_id", r.case_id},
                {"mission_index", r.mission_index},
                {"case_mission_count", r.case_mission_count},
                {"action_type", std::string(action_type_to_string(r.action_type))},
                {"relation_type", std::string(relation_type_to_string(r.relation_type))},
                {"combo_prefix", Combo{r.combo_prefix}.to_string()},
                {"passed", r.passed},
                {"reached", r.reached},
                {"steps_accepted", r.steps_accepted},
                {"steps_required", r.steps_required}};
    if (r.path_taken) out["path_taken"] = format_path(*r.path_taken);
    if (r.optimal) out["optimal"] = *r.optimal;
    if (r.error) out["error"] = std::string(error_class_to_string(*r.error));
    if (!r.fail_note.empty()) out["fail_note"] = r.fail_note;
    return out;
}

MissionResult mission_result_from_json(const json& doc) {
    MissionResult r;
    r.case_id = doc.value("case_id", std::string());
    r.mission_index = doc.value("mission_index", 0);
    r.case_mission_count = doc.value("case_mission_count", 1);
    r.action_type = action_type_from_string(doc.value("action_type", "chat")).value_or(ActionType::Chat);
    r.relation_type =
        relation_type_from_string(doc.value("relation_type", "none")).value_or(RelationType::None);
    std::string combo = doc.value("combo_prefix", std::string());
    std::size_t start = 0;
    while (start <= combo.size() && !combo.empty()) {
        std::size_t end = combo.find('>', start);
        std::string token = combo.substr(start, end == std::string::npos ? end : end - start);
        if (auto cls = action_class_from_string(token)) r.combo_prefix.push_back(*cls);
        if (end == std::string::npos) break;
        start = end + 1;
    }
    r.passed = doc.value("passed", false);
    r.reached = doc.value("reached", true);
    r.steps_accepted = doc.value("steps_accepted", 0);
    r.steps_required = doc.value("steps_required", 1);
    if (doc.contains("optimal")) r.optimal = doc.at("optimal").get<bool>();
    if (doc.contains("error")) {
        const std::string e = doc.at("error").get<std::string>();
        for (ErrorClass cls : {ErrorClass::ToolError, ErrorClass::ParamNameHallucination,
                               ErrorClass::ParamValueHallucination, ErrorClass::ParamValueError,
                               ErrorClass::FormatError}) {
            if (error_class_to_string(cls) == e) r.error = cls;
        }
    }
    r.fail_note = doc.value("fail_note", std::string());
    return r;
}

}  // namespace

json case_results_to_json(const std::vector<CaseResult>& results) {
    json out = json::array();
    for (const auto& cr : results) {
        json missions = json::array();
        for (const auto& mr : cr.mission_results) missions.push_back(mission_result_to_json(mr));
        json combo = json::array();
        for (ActionType t : cr.combo) combo.push_back(std::string(action_type_to_string(t)));
        json entry = {{"case_id", cr.case_id},
                      {"combo", combo},
                      {"all_passed", cr.all_passed},
                      {"unscored", cr.unscored},
                      {"mission_results", missions}};
        if (!cr.unscored_reason.empty()) entry["unscored_reason"] = cr.unscored_reason;
        out.push_back(entry);
    }
    return out;
}

std::vector<CaseResult> case_results_from_json(const json& doc) {
    std::vector<CaseResult> out;
    for (const auto& entry : doc) {
        CaseResult cr;
        cr.case_id = entry.value("case_id", std::string());
        for (const auto& t : entry.value("combo", json::array())) {
            if (auto at = action_type_from_string(t.get<std::string>())) cr.combo.push_back(*at);
        }
        cr.all_passed = entry.value("all_passed", false);
        cr.unscored = entry.value("unscored", false);
        cr.unscored_reason = entry.value("unscored_reason", std::string());
        for (const auto& m : entry.value("mission_results", json::array())) {
            cr.mission_results.push_back(mission_result_from_json(m));
        }
        out.push_back(std::move(cr));
    }
    return out;
}

ReportBundle write_report(const std::string& out_dir,
                          const std::string& adapter_name,
                          const RunConfig& cfg,
                          const DatasetFile& ds,
                          const std::vector<CaseRunOutput>& outputs,
                          int msss_max_n) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    ReportBundle bundle;
    bundle.adapter_name = adapter_name;
    bundle.dataset_version = ds.version;
    bundle.config_hash = config_hash(cfg, adapter_name, ds.version);
    bundle.timestamp = iso_timestamp();
    for (const auto& o : outputs) bundle.case_results.push_back(o.result);
    bundle.aggregates = aggregate(bundle.case_results, ds, msss_max_n);

    const Aggregates& agg = bundle.aggregates;
    auto emit = [&](const std::string& name, const std::string& content) {
        write_file(fs::path(out_dir) / name, content);
        bundle.files_written.push_back(name);
    };

    emit("transcripts.jsonl", transcripts_to_jsonl(outputs));
    emit("case_results.json", case_results_to_json(bundle.case_results).dump(2) + "\n");
    emit("accuracy_by_mission_count.csv", accuracy_table_csv(agg.by_mission_count, "mission_count"));
    emit("accuracy_by_action_type.csv", accuracy_table_csv(agg.by_action_type, "action_type"));
    emit("accuracy_by_relation_type.csv", accuracy_table_csv(agg.by_relation_type, "relation_type"));
    emit("combo_heatmap.csv", combo_heatmap_csv(agg.by_combo_prefix));
    emit("error_distribution.csv", error_distribution_csv(agg.errors_raw, agg.errors_folded));
    emit("summary_metrics.csv", summary_metrics_csv(agg));
    emit("summary.txt", summary_text(bundle));

    bundle.files_written.push_back("report.json");
    json manifest = {{"adapter", bundle.adapter_name},
                     {"config_hash", bundle.config_hash},
                     {"dataset_version", bundle.dataset_version},
                     {"timestamp", bundle.timestamp},
                     {"cases_total", agg.cases_total},
                     {"cases_unscored", agg.cases_unscored},
                     {"files", bundle.files_written}};
    write_file(fs::path(out_dir) / "report.json", manifest.dump(2) + "\n");
    return bundle;
}

}  // namespace agenteval
