#pragma once
// Aggregation of per-mission outcomes into the metric suite: grouped
// accuracy tables, optimal path rate, accomplished progress, switching-space
// coverage, and the error distribution.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agenteval/dataset.hpp"
#include "agenteval/matcher.hpp"
#include "agenteval/plan_enum.hpp"

namespace agenteval {

struct MissionResult {
    std::string case_id;
    int mission_index = 0;
    int case_mission_count = 1;
    ActionType action_type = ActionType::Chat;
    RelationType relation_type = RelationType::None;
    std::vector<ActionClass> combo_prefix;  // collapsed types up to and including this mission
    bool passed = false;
    bool reached = true;  // false when an earlier abort made the mission unreachable
    std::optional<ExecutionPath> path_taken;
    std::optional<bool> optimal;  // set only for passed tool-type missions
    int steps_accepted = 0;
    int steps_required = 1;  // optimal step count of the gold graph; 1 for chat/clarify
    std::optional<ErrorClass> error;
    std::string fail_note;
};

struct CaseResult {
    std::string case_id;
    std::vector<ActionType> combo;
    std::vector<MissionResult> mission_results;
    bool all_passed = false;
    bool unscored = false;  // adapter failure; excluded from metric denominators
    std::string unscored_reason;
};

enum class GroupBy { MissionCount, ActionType, RelationType, ComboPrefix };

struct AccuracyRow {
    std::string key;
    int passed = 0;
    int total = 0;
    double percent = 0.0;
};

using AccuracyTable = std::vector<AccuracyRow>;

// Per-group pass percentage over missions. ComboPrefix keys each mission by
// the full collapsed action-class sequence up to and including itself.
AccuracyTable accuracy(const std::vector<MissionResult>& results, GroupBy group_by);

// Over passed multi-tool missions: percentage that took a minimum-step path.
// Absent (nullopt) when no multi mission passed.
std::optional<double> optimal_path_rate(const std::vector<MissionResult>& results);

// Mean over cases of the average per-mission completed fraction. A passed
// mission contributes 1; a failed or unreached one contributes
// steps_accepted / steps_required clamped to [0, 1).
double accomplished_progress(const std::vector<CaseResult>& case_results);

enum class MsssMode { Cumulative, Exact };

// Switching-space coverage: distinct combos present over all possible ones.
// Cumulative counts lengths 1..max_n against sum(4^i); Exact counts only
// length == max_n against 4^max_n.
double msss(const std::vector<Combo>& present, int max_n, MsssMode mode = MsssMode::Cumulative);
double msss(const DatasetFile& ds, int max_n, MsssMode mode = MsssMode::Cumulative);

struct ErrorDistributionRow {
    ErrorClass error_class;
    int count = 0;
    double percent = 0.0;
};

// Percentage per class over failed missions carrying an error class. With
// fold_format_errors set, FormatError counts as ToolError (four-class view).
std::vector<ErrorDistributionRow> error_distribution(const std::vector<MissionResult>& results,
                                                     bool fold_format_errors);

struct Aggregates {
    int cases_total = 0;
    int cases_scored = 0;
    int cases_passed = 0;
    int cases_unscored = 0;
    int missions_total = 0;
    int missions_passed = 0;
    AccuracyTable by_mission_count;
    AccuracyTable by_action_type;
    AccuracyTable by_relation_type;
    AccuracyTable by_combo_prefix;
    std::optional<double> optimal_path_rate;
    double accomplished_progress = 0.0;
    double msss_cumulative = 0.0;
    double msss_exact = 0.0;
    std::vector<ErrorDistributionRow> errors_raw;     // five classes
    std::vector<ErrorDistributionRow> errors_folded;  // FormatError folded into ToolError
};

// Full rollup. Unscored cases are excluded from every denominator and
// reported in cases_unscored; MSSS is a dataset property and uses all cases.
Aggregates aggregate(const std::vector<CaseResult>& case_results, const DatasetFile& ds, int msss_max_n = 4);

// Flattened scored missions, dataset order.
std::vector<MissionResult> scored_missions(const std::vector<CaseResult>& case_results);

}  // namespace agenteval
