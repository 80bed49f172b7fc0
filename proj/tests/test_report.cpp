#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "agenteval/dataset.hpp"
#include "agenteval/report.hpp"
#include "agenteval/runner.hpp"

using namespace agenteval;

#ifndef AGENTEVAL_DATA_DIR
#define AGENTEVAL_DATA_DIR "data"
#endif

namespace {

const char* kFixture = AGENTEVAL_DATA_DIR "/cases.json";

}  // namespace

TEST_CASE("config hash is stable and sensitive") {
    RunConfig a;
    RunConfig b;
    CHECK(config_hash(a, "gold", "1") == config_hash(b, "gold", "1"));

    b.teacher_forcing = false;
    CHECK(config_hash(a, "gold", "1") != config_hash(b, "gold", "1"));

    b = a;
    b.match_policy.numeric_tolerance = 1e-6;
    CHECK(config_hash(a, "gold", "1") != config_hash(b, "gold", "1"));

    CHECK(config_hash(a, "gold", "1") != config_hash(a, "other", "1"));

    // Concurrency must not change results, so it must not change the hash.
    b = a;
    b.request_concurrency = 8;
    CHECK(config_hash(a, "gold", "1") == config_hash(b, "gold", "1"));
}

TEST_CASE("csv formats are schema stable") {
    AccuracyTable table = {{"single", 1, 2, 50.0}, {"chat", 2, 2, 100.0}};
    CHECK(accuracy_table_csv(table, "action_type") ==
          "action_type,passed,total,accuracy\n"
          "single,1,2,50.00\n"
          "chat,2,2,100.00\n");

    AccuracyTable combo = {{"single", 1, 1, 100.0}, {"single>chat", 0, 1, 0.0}};
    CHECK(combo_heatmap_csv(combo) ==
          "length,combo,passed,total,accuracy\n"
          "1,single,1,1,100.00\n"
          "2,single>chat,0,1,0.00\n");

    std::vector<ErrorDistributionRow> raw = {{ErrorClass::ToolError, 3, 75.0},
                                             {ErrorClass::ParamValueError, 1, 25.0}};
    std::vector<ErrorDistributionRow> folded = {{ErrorClass::ToolError, 4, 100.0}};
    CHECK(error_distribution_csv(raw, folded) ==
          "view,class,count,percent\n"
          "raw,tool_error,3,75.00\n"
          "raw,param_value_error,1,25.00\n"
          "folded,tool_error,4,100.00\n");
}

TEST_CASE("case results round-trip through json") {
    DatasetFile ds = load_dataset(kFixture);
    auto batch = evaluate_dataset_serial(ds, gold_adapter_factory(GoldMode::Optimal), RunConfig{});
    auto results = batch.case_results();

    json doc = case_results_to_json(results);
    auto back = case_results_from_json(doc);
    REQUIRE(back.size() == results.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
        CHECK(back[i].case_id == results[i].case_id);
        CHECK(back[i].all_passed == results[i].all_passed);
        CHECK(back[i].combo == results[i].combo);
        REQUIRE(back[i].mission_results.size() == results[i].mission_results.size());
        for (std::size_t m = 0; m < results[i].mission_results.size(); ++m) {
            const auto& x = results[i].mission_results[m];
            const auto& y = back[i].mission_results[m];
            CHECK(x.passed == y.passed);
            CHECK(x.steps_accepted == y.steps_accepted);
            CHECK(x.steps_required == y.steps_required);
            CHECK(x.action_type == y.action_type);
            CHECK(x.relation_type == y.relation_type);
            CHECK(x.optimal == y.optimal);
            CHECK(x.error == y.error);
            CHECK(x.combo_prefix == y.combo_prefix);
        }
    }
}

TEST_CASE("write_report emits the manifest-listed files") {
    namespace fs = std::filesystem;
    DatasetFile ds = load_dataset(kFixture);
    auto batch = evaluate_dataset_serial(ds, gold_adapter_factory(GoldMode::Optimal), RunConfig{});

    const std::string out_dir = "report_test_out";
    ReportBundle bundle = write_report(out_dir, "gold-optimal", RunConfig{}, ds, batch.outputs);

    CHECK(bundle.files_written.size() == 10);
    for (const auto& name : bundle.files_written) {
        CHECK(fs::exists(fs::path(out_dir) / name));
    }

    // The manifest itself lists every written file, including itself.
    std::ifstream in(fs::path(out_dir) / "report.json");
    json manifest = json::parse(in);
    CHECK(manifest["files"].size() == bundle.files_written.size());
    CHECK(manifest["config_hash"] == bundle.config_hash);
    CHECK(manifest["cases_unscored"] == 0);

    fs::remove_all(out_dir);
}

TEST_CASE("summary metrics report the optimal path rate as absent when undefined") {
    DatasetFile ds = load_dataset(kFixture);

    // Chat-only subset: no multi missions can pass.
    DatasetFile subset;
    subset.version = ds.version;
    subset.cases.push_back(*ds.find_case("case_03_smalltalk_chat"));

    auto batch = evaluate_dataset_serial(subset, gold_adapter_factory(GoldMode::Optimal), RunConfig{});
    Aggregates agg = aggregate(batch.case_results(), subset);
    CHECK_FALSE(agg.optimal_path_rate.has_value());
    CHECK(summary_metrics_csv(agg).find("optimal_path_rate,absent") != std::string::npos);
}
