#include "agenteval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "agenteval/errors.hpp"

namespace agenteval {

namespace {

std::string group_key(const MissionResult& r, GroupBy group_by) {
    switch (group_by) {
        case GroupBy::MissionCount:
            return std::to_string(r.case_mission_count);
        case GroupBy::ActionType:
            return std::string(action_type_to_string(r.action_type));
        case GroupBy::RelationType:
            return std::string(relation_type_to_string(r.relation_type));
        case GroupBy::ComboPrefix:
            return Combo{r.combo_prefix}.to_string();
    }
    throw Error("unknown group key");
}

double percent(int part, int whole) {
    return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

AccuracyTable accuracy(const std::vector<MissionResult>& results, GroupBy group_by) {
    std::map<std::string, std::pair<int, int>> groups;  // key -> {passed, total}
    for (const auto& r : results) {
        auto& [passed, total] = groups[group_key(r, group_by)];
        total++;
        if (r.passed) passed++;
    }

    AccuracyTable table;
    for (const auto& [key, counts] : groups) {
        table.push_back(AccuracyRow{key, counts.first, counts.second,
                                    percent(counts.first, counts.second)});
    }
    if (group_by == GroupBy::ComboPrefix) {
        std::stable_sort(table.begin(), table.end(), [](const AccuracyRow& a, const AccuracyRow& b) {
            auto depth = [](const std::string& k) { return std::count(k.begin(), k.end(), '>'); };
            return depth(a.key) != depth(b.key) ? depth(a.key) < depth(b.key) : a.key < b.key;
        });
    }
    return table;
}

std::optional<double> optimal_path_rate(const std::vector<MissionResult>& results) {
    int passed_multi = 0;
    int optimal = 0;
    for (const auto& r : results) {
        if (!is_multi_action(r.action_type) || !r.passed) continue;
        passed_multi++;
        if (r.optimal.value_or(false)) optimal++;
    }
    if (passed_multi == 0) return std::nullopt;
    return percent(optimal, passed_multi);
}

double accomplished_progress(const std::vector<CaseResult>& case_results) {
    // A failed or unreached mission earns its accepted-step fraction, capped
    // strictly below a full pass.
    constexpr double kFailedCap = 1.0 - 1e-12;

    double sum = 0.0;
    int cases = 0;
    for (const auto& cr : case_results) {
        if (cr.unscored || cr.mission_results.empty()) continue;
        double mission_sum = 0.0;
        for (const auto& mr : cr.mission_results) {
            if (mr.passed) {
                mission_sum += 1.0;
            } else {
                double required = std::max(1, mr.steps_required);
                double fraction = static_cast<double>(mr.steps_accepted) / required;
                mission_sum += std::clamp(fraction, 0.0, kFailedCap);
            }
        }
        sum += mission_sum / static_cast<double>(cr.mission_results.size());
        cases++;
    }
    return cases == 0 ? 0.0 : 100.0 * sum / static_cast<double>(cases);
}

double msss(const std::vector<Combo>& present, int max_n, MsssMode mode) {
    if (max_n < 1) throw Error("msss requires max_n >= 1");

    std::set<Combo> distinct;
    for (const auto& c : present) {
        const int len = static_cast<int>(c.seq.size());
        if (mode == MsssMode::Cumulative ? (len >= 1 && len <= max_n) : (len == max_n)) {
            distinct.insert(c);
        }
    }

    double denominator = 0.0;
    if (mode == MsssMode::Cumulative) {
        for (int i = 1; i <= max_n; ++i) denominator += std::pow(4.0, i);
    } else {
        denominator = std::pow(4.0, max_n);
    }
    return 100.0 * static_cast<double>(distinct.size()) / denominator;
}

double msss(const DatasetFile& ds, int max_n, MsssMode mode) {
    return msss(dataset_combos(ds), max_n, mode);
}

std::vector<ErrorDistributionRow> error_distribution(const std::vector<MissionResult>& results,
                                                     bool fold_format_errors) {
    const std::vector<ErrorClass> classes =
        fold_format_errors
            ? std::vector<ErrorClass>{ErrorClass::ToolError, ErrorClass::ParamNameHallucination,
                                      ErrorClass::ParamValueHallucination, ErrorClass::ParamValueError}
            : std::vector<ErrorClass>{ErrorClass::ToolError, ErrorClass::ParamNameHallucination,
                                      ErrorClass::ParamValueHallucination, ErrorClass::ParamValueError,
                                      ErrorClass::FormatError};

    std::map<ErrorClass, int> counts;
    int total = 0;
    for (const auto& r : results) {
        if (r.passed || !r.error) continue;
        ErrorClass cls = *r.error;
        if (fold_format_errors && cls == ErrorClass::FormatError) cls = ErrorClass::ToolError;
        counts[cls]++;
        total++;
    }

    std::vector<ErrorDistributionRow> rows;
    for (ErrorClass cls : classes) {
        rows.push_back({cls, counts[cls], percent(counts[cls], total)});
    }
    return rows;
}

std::vector<MissionResult> scored_missions(const std::vector<CaseResult>& case_results) {
    std::vector<MissionResult> out;
    for (const auto& cr : case_results) {
        if (cr.unscored) continue;
        out.insert(out.end(), cr.mission_results.begin(), cr.mission_results.end());
    }
    return out;
}

Aggregates aggregate(const std::vector<CaseResult>& case_results, const DatasetFile& ds, int msss_max_n) {
    Aggregates agg;
    agg.cases_total = static_cast<int>(case_results.size());
    for (const auto& cr : case_results) {
        if (cr.unscored) {
            agg.cases_unscored++;
            continue;
        }
        agg.cases_scored++;
        if (cr.all_passed) agg.cases_passed++;
    }

    const std::vector<MissionResult> missions = scored_missions(case_results);
    agg.missions_total = static_cast<int>(missions.size());
    agg.missions_passed =
        static_cast<int>(std::count_if(missions.begin(), missions.end(),
                                       [](const MissionResult& r) { return r.passed; }));

    agg.by_mission_count = accuracy(missions, GroupBy::MissionCount);
    agg.by_action_type = accuracy(missions, GroupBy::ActionType);
    agg.by_relation_type = accuracy(missions, GroupBy::RelationType);
    agg.by_combo_prefix = accuracy(missions, GroupBy::ComboPrefix);
    agg.optimal_path_rate = optimal_path_rate(missions);
    agg.accomplished_progress = accomplished_progress(case_results);
    agg.msss_cumulative = msss(ds, msss_max_n, MsssMode::Cumulative);
    agg.msss_exact = msss(ds, msss_max_n, MsssMode::Exact);
    agg.errors_raw = error_distribution(missions, false);
    agg.errors_folded = error_distribution(missions, true);
    return agg;
}

}  // namespace agenteval
