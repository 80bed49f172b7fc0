#pragma once
// Report emission: CSV tables, per-case result JSON, transcripts, and the
// run manifest with its config hash.

#include <string>
#include <vector>

#include "agenteval/metrics.hpp"
#include "agenteval/runner.hpp"

namespace agenteval {

struct ReportBundle {
    std::string adapter_name;
    std::string config_hash;
    std::string dataset_version;
    std::string timestamp;  // ISO-8601 UTC; excluded from deterministic artifacts
    Aggregates aggregates;
    std::vector<CaseResult> case_results;
    std::vector<std::string> files_written;
};

// Covers every setting that can change results (policy, forcing, budgets,
// adapter identity, dataset version) so reports from different configs are
// never silently compared. Concurrency is deliberately excluded: it must
// not affect results.
std::string config_hash(const RunConfig& cfg, const std::string& adapter_name,
                        const std::string& dataset_version);

// Fixed column orders; percentages rendered with two decimals.
std::string accuracy_table_csv(const AccuracyTable& table, const std::string& key_column);
std::string combo_heatmap_csv(const AccuracyTable& table);
std::string error_distribution_csv(const std::vector<ErrorDistributionRow>& raw,
                                   const std::vector<ErrorDistributionRow>& folded);
std::string summary_metrics_csv(const Aggregates& agg);
std::string summary_text(const ReportBundle& bundle);
json case_results_to_json(const std::vector<CaseResult>& results);
std::vector<CaseResult> case_results_from_json(const json& doc);

// Writes the full bundle (transcripts.jsonl, case_results.json, CSV tables,
// summary.txt, report.json) into out_dir, creating it if needed. Returns
// the bundle with files_written filled in.
ReportBundle write_report(const std::string& out_dir,
                          const std::string& adapter_name,
                          const RunConfig& cfg,
                          const DatasetFile& ds,
                          const std::vector<CaseRunOutput>& outputs,
                          int msss_max_n = 4);

}  // namespace agenteval
