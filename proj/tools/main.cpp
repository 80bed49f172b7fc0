// Command-line surface: dataset validation, plan inspection, evaluation
// runs, coverage reporting, and transcript replay.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "agenteval/dataset.hpp"
#include "agenteval/decision_tree.hpp"
#include "agenteval/errors.hpp"
#include "agenteval/metrics.hpp"
#include "agenteval/remote_adapter.hpp"
#include "agenteval/report.hpp"
#include "agenteval/runner.hpp"

using namespace agenteval;

namespace {

struct RunFlags {
    std::string dataset;
    std::string out_dir = "out";
    std::string adapter = "scripted";
    std::string script;
    std::string endpoint;
    std::string model;
    std::string auth_env;
    std::string teacher_forcing = "on";
    std::string msss_denominator = "cumulative";
    int timeout = 30;
    int retries = 2;
    int concurrency = 1;
    bool case_sensitive = false;
    bool no_trim = false;
    bool no_alternates = false;
    double numeric_epsilon = 1e-9;
};

RunConfig make_config(const RunFlags& flags) {
    RunConfig cfg;
    cfg.teacher_forcing = flags.teacher_forcing != "off";
    cfg.request_concurrency = flags.concurrency;
    cfg.retry_budget = flags.retries;
    cfg.match_policy.string_case_insensitive = !flags.case_sensitive;
    cfg.match_policy.trim_whitespace = !flags.no_trim;
    cfg.match_policy.accept_alternates = !flags.no_alternates;
    cfg.match_policy.numeric_tolerance = flags.numeric_epsilon;
    return cfg;
}

std::pair<AdapterFactory, std::string> make_adapter(const RunFlags& flags) {
    if (flags.adapter == "scripted") {
        if (flags.script.empty()) throw Error("--adapter scripted requires --script");
        ScriptBook book = load_script_book(flags.script);
        std::string name = book.adapter_name;
        return {script_book_factory(std::move(book)), name};
    }
    if (flags.adapter == "remote") {
        if (flags.endpoint.empty()) throw Error("--adapter remote requires --endpoint");
        RemoteConfig rc;
        rc.endpoint = flags.endpoint;
        rc.model_name = flags.model;
        rc.auth_env = flags.auth_env;
        rc.timeout_seconds = flags.timeout;
        rc.retry_budget = flags.retries;
        return {remote_adapter_factory(rc), rc.model_name.empty() ? "remote" : rc.model_name};
    }
    if (flags.adapter == "gold") return {gold_adapter_factory(GoldMode::Optimal), "gold-optimal"};
    if (flags.adapter == "gold-serial") return {gold_adapter_factory(GoldMode::Serial), "gold-serial"};
    throw Error("unknown adapter '" + flags.adapter + "'");
}

int finish_run(const RunFlags& flags, const DatasetFile& ds, const std::vector<CaseRunOutput>& outputs,
               const std::string& adapter_name, const RunConfig& cfg) {
    ReportBundle bundle = write_report(flags.out_dir, adapter_name, cfg, ds, outputs);
    std::cout << summary_text(bundle);
    std::cout << "\nwrote " << bundle.files_written.size() << " files to " << flags.out_dir << "\n";
    if (bundle.aggregates.cases_unscored > 0) {
        std::cerr << bundle.aggregates.cases_unscored << " case(s) unscored\n";
        return 1;
    }
    return 0;
}

int cmd_validate(const std::vector<std::string>& paths) {
    int violations_total = 0;
    for (const auto& path : paths) {
        DatasetFile ds = load_dataset(path);
        for (const auto& v : validate_dataset(ds)) {
            std::cout << v.case_id << "\t" << v.code << "\t" << v.detail << "\n";
            violations_total++;
        }
    }
    return violations_total == 0 ? 0 : 1;
}

int cmd_explain(const std::string& dataset, const std::string& case_id, int mission_index) {
    DatasetFile ds = load_dataset(dataset);
    const TestCase* tc = ds.find_case(case_id);
    if (tc == nullptr) {
        std::cerr << "case '" << case_id << "' not found\n";
        return 1;
    }
    if (mission_index < 0 || mission_index >= static_cast<int>(tc->missions.size())) {
        std::cerr << "mission " << mission_index << " not found in case '" << case_id << "'\n";
        return 1;
    }
    const Mission& mission = tc->missions[static_cast<std::size_t>(mission_index)];

    std::cout << "case " << tc->id << ", mission " << mission_index << " ("
              << action_type_to_string(mission.action_type) << ", "
              << relation_type_to_string(mission.relation_type) << ")\n";
    std::cout << "query: " << mission.query << "\n\n";

    if (mission.graph.empty()) {
        std::cout << "no tool plan (chat mission)\n";
        return 0;
    }

    std::cout << "dependency graph\n";
    for (const auto& node : mission.graph.nodes) {
        std::cout << "  [" << node.id << "] " << node.tool_name << " "
                  << node.gold_arguments.dump() << "\n";
    }
    for (const auto& [from, to] : mission.graph.edges) {
        std::cout << "  edge " << from << " -> " << to << "\n";
    }

    auto part = partition_paths(enumerate_paths(mission.graph));
    std::cout << "\nexecution paths (" << part.optimal.size() + part.suboptimal.size() << " total, "
              << part.optimal.size() << " optimal, optimal step count "
              << optimal_step_count(mission.graph) << ")\n";
    std::istringstream listing(format_path_listing(part));
    std::string line;
    while (std::getline(listing, line)) std::cout << "  " << line << "\n";

    std::cout << "\ndecision tree\n";
    std::istringstream tree(DecisionTree::build(part).render());
    while (std::getline(tree, line)) std::cout << "  " << line << "\n";
    return 0;
}

int cmd_coverage(const std::string& dataset, int max_n, const std::string& denominator,
                 const std::string& csv_out) {
    DatasetFile ds = load_dataset(dataset);
    CoverageReport report = coverage_report(ds, max_n);

    std::string csv = "length,combo,covered\n";
    for (const auto& row : report.lengths) {
        std::cout << "length " << row.length << ": " << row.covered.size() << " covered, "
                  << row.missing.size() << " missing\n";
        for (const auto& c : row.covered) {
            std::cout << "  + " << c.to_string() << "\n";
            csv += std::to_string(row.length) + "," + c.to_string() + ",1\n";
        }
        for (const auto& c : row.missing) {
            std::cout << "  - " << c.to_string() << "\n";
            csv += std::to_string(row.length) + "," + c.to_string() + ",0\n";
        }
    }

    double cumulative = msss(ds, max_n, MsssMode::Cumulative);
    double exact = msss(ds, max_n, MsssMode::Exact);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "msss cumulative: %.2f\nmsss exact: %.2f\n", cumulative, exact);
    std::cout << buf;
    if (denominator == "exact") {
        std::snprintf(buf, sizeof(buf), "msss (selected): %.2f\n", exact);
    } else {
        std::snprintf(buf, sizeof(buf), "msss (selected): %.2f\n", cumulative);
    }
    std::cout << buf;

    if (!csv_out.empty()) {
        std::ofstream out(csv_out, std::ios::binary | std::ios::trunc);
        if (!out) {
            std::cerr << "cannot write " << csv_out << "\n";
            return 2;
        }
        out << csv;
    }
    return 0;
}

int cmd_run(const RunFlags& flags) {
    DatasetFile ds = load_dataset(flags.dataset);
    auto violations = validate_dataset(ds);
    if (!violations.empty()) {
        for (const auto& v : violations) {
            std::cerr << v.case_id << "\t" << v.code << "\t" << v.detail << "\n";
        }
        std::cerr << "dataset invalid; refusing to run\n";
        return 2;
    }

    RunConfig cfg = make_config(flags);
    auto [factory, adapter_name] = make_adapter(flags);
    BatchResult batch = evaluate_dataset(ds, factory, cfg);
    return finish_run(flags, ds, batch.outputs, adapter_name, cfg);
}

int cmd_replay(const RunFlags& flags, const std::string& transcripts_path) {
    DatasetFile ds = load_dataset(flags.dataset);

    std::ifstream in(transcripts_path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot open " << transcripts_path << "\n";
        return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    auto transcripts = transcripts_from_jsonl(buf.str());

    RunConfig cfg = make_config(flags);
    cfg.request_concurrency = 1;  // replay is cheap and order matters for diffing
    BatchResult batch = evaluate_dataset_serial(ds, replay_factory(transcripts), cfg);
    return finish_run(flags, ds, batch.outputs, "replay", cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic evaluation harness for multi-mission tool-calling agents"};
    app.require_subcommand(1);

    RunFlags flags;
    std::vector<std::string> validate_paths;
    std::string case_id;
    int mission_index = 0;
    int max_n = 4;
    std::string coverage_csv;
    std::string transcripts_path;

    auto add_policy_flags = [&](CLI::App* cmd) {
        cmd->add_flag("--case-sensitive", flags.case_sensitive, "compare strings case-sensitively");
        cmd->add_flag("--no-trim", flags.no_trim, "keep surrounding whitespace significant");
        cmd->add_flag("--no-alternates", flags.no_alternates, "ignore annotated alternate values");
        cmd->add_option("--numeric-epsilon", flags.numeric_epsilon, "relative numeric tolerance");
    };

    CLI::App* validate = app.add_subcommand("validate", "check dataset files, print violations");
    validate->add_option("paths", validate_paths, "dataset files")->required();

    CLI::App* explain = app.add_subcommand("explain", "show the plan set and decision tree of a mission");
    explain->add_option("--dataset", flags.dataset, "dataset file")->required();
    explain->add_option("--case", case_id, "case id")->required();
    explain->add_option("--mission", mission_index, "mission index (0-based)");

    CLI::App* run = app.add_subcommand("run", "evaluate an adapter over a dataset");
    run->add_option("--dataset", flags.dataset, "dataset file")->required();
    run->add_option("--out", flags.out_dir, "output directory");
    run->add_option("--adapter", flags.adapter, "scripted | remote | gold | gold-serial");
    run->add_option("--script", flags.script, "script book JSON (scripted adapter)");
    run->add_option("--endpoint", flags.endpoint, "chat-completion endpoint URL (remote adapter)");
    run->add_option("--model", flags.model, "model name sent to the endpoint");
    run->add_option("--auth-env", flags.auth_env, "environment variable holding the bearer token");
    run->add_option("--timeout", flags.timeout, "request timeout, seconds");
    run->add_option("--retries", flags.retries, "transport retries per turn");
    run->add_option("--concurrency", flags.concurrency, "cases evaluated in parallel");
    run->add_option("--teacher-forcing", flags.teacher_forcing, "on | off")
        ->check(CLI::IsMember({"on", "off"}));
    run->add_option("--msss-denominator", flags.msss_denominator, "cumulative | exact")
        ->check(CLI::IsMember({"cumulative", "exact"}));
    add_policy_flags(run);

    CLI::App* coverage = app.add_subcommand("coverage", "switching-space coverage and msss");
    coverage->add_option("--dataset", flags.dataset, "dataset file")->required();
    coverage->add_option("--max-n", max_n, "maximum combo length")->check(CLI::Range(1, 6));
    coverage->add_option("--msss-denominator", flags.msss_denominator, "cumulative | exact")
        ->check(CLI::IsMember({"cumulative", "exact"}));
    coverage->add_option("--out", coverage_csv, "also write the per-combo table as CSV");

    CLI::App* replay = app.add_subcommand("replay", "re-validate stored transcripts");
    replay->add_option("--dataset", flags.dataset, "dataset file")->required();
    replay->add_option("--transcripts", transcripts_path, "transcripts.jsonl from a previous run")
        ->required();
    replay->add_option("--out", flags.out_dir, "output directory");
    replay->add_option("--teacher-forcing", flags.teacher_forcing, "on | off")
        ->check(CLI::IsMember({"on", "off"}));
    add_policy_flags(replay);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(validate_paths);
        if (explain->parsed()) return cmd_explain(flags.dataset, case_id, mission_index);
        if (run->parsed()) return cmd_run(flags);
        if (coverage->parsed()) {
            return cmd_coverage(flags.dataset, max_n, flags.msss_denominator, coverage_csv);
        }
        if (replay->parsed()) return cmd_replay(flags, transcripts_path);
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 0;
}
