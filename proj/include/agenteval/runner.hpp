#pragma once
// Multi-turn evaluation loop: presents tools and dialogue to an agent
// adapter, validates each turn against the decision tree, replays recorded
// observations, and emits per-mission results plus a self-contained
// transcript.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "agenteval/dataset.hpp"
#include "agenteval/matcher.hpp"
#include "agenteval/metrics.hpp"

namespace agenteval {

enum class Speaker { User, Agent, Tool, AiSummary };

std::string_view speaker_to_string(Speaker s);
std::optional<Speaker> speaker_from_string(std::string_view s);

struct TranscriptTurn {
    int mission_index = 0;
    Speaker speaker = Speaker::User;
    json payload;         // shape depends on speaker, see transcript_to_jsonl
    bool forced = false;  // injected gold content, not an agent decision
};

struct SessionTranscript {
    std::string case_id;
    std::vector<TranscriptTurn> turns;
};

// What an adapter produced for one turn. A missing action means the payload
// was unparseable; the runner records it and fails the mission as a format
// error.
struct AdapterResponse {
    std::optional<AgentAction> action;
    std::string raw_payload;  // kept for the transcript when malformed
};

// The agent-under-test boundary. Adapters are created fresh per case (see
// AdapterFactory), so implementations may keep per-case state.
class AgentAdapter {
public:
    virtual ~AgentAdapter() = default;
    virtual std::string name() const = 0;
    virtual AdapterResponse next(const TestCase& test_case, const SessionTranscript& history) = 0;
};

using AdapterFactory = std::function<std::unique_ptr<AgentAdapter>(const TestCase&)>;

struct RunConfig {
    bool teacher_forcing = true;
    MatchPolicy match_policy;
    int max_turns_per_mission = 0;  // 0 = auto: 2 * node_count + 2
    int request_concurrency = 1;
    int retry_budget = 2;
    // Treat a plain text reply on a clarify mission as the clarifying
    // question (remote models rarely tag clarifications explicitly).
    bool clarify_heuristic = true;
    EnumLimits enum_limits;

    int turn_budget(std::size_t node_count) const;
};

struct CaseRunOutput {
    CaseResult result;
    SessionTranscript transcript;
};

// Evaluates one case mission by mission. Adapter failures mark the case
// unscored rather than aborting the batch.
CaseRunOutput run_case(const TestCase& test_case, AgentAdapter& adapter, const RunConfig& cfg);

struct BatchResult {
    std::vector<CaseRunOutput> outputs;  // dataset order, independent of scheduling

    std::vector<CaseResult> case_results() const;
};

// Serial reference loop. The parallel variant must reproduce it exactly.
BatchResult evaluate_dataset_serial(const DatasetFile& ds, const AdapterFactory& factory, const RunConfig& cfg);

// Batch evaluation; uses OpenMP across cases when request_concurrency > 1.
// Output order and content are identical to the serial reference.
BatchResult evaluate_dataset(const DatasetFile& ds, const AdapterFactory& factory, const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Scripted adapters

// Plays a fixed list of actions in order; throws ScriptExhausted past the end.
std::unique_ptr<AgentAdapter> scripted_adapter(std::vector<AgentAction> script, std::string name = "scripted");

enum class GoldMode {
    Optimal,  // first optimal path, parallel steps as annotated
    Serial,   // always the smallest ready node, one call per turn
};

// Synthesizes the gold action sequence for a case: chat replies, clarify
// questions covering the missing parameters, and tool steps along a valid
// path with gold arguments.
std::vector<AgentAction> synthesize_gold_script(const TestCase& test_case, GoldMode mode,
                                                const EnumLimits& limits = {});

AdapterFactory gold_adapter_factory(GoldMode mode);

// Script book: per-case action lists, loadable from JSON (see README for
// the format). Cases without a script fail with ScriptExhausted -> unscored.
struct ScriptBook {
    std::string adapter_name = "scripted";
    std::map<std::string, std::vector<AgentAction>> scripts;  // case id -> actions
};

ScriptBook load_script_book(const std::string& path);
AdapterFactory script_book_factory(ScriptBook book);

// ---------------------------------------------------------------------------
// Transcript persistence (JSON-lines, one turn per line)

std::string transcript_to_jsonl(const SessionTranscript& transcript);
std::string transcripts_to_jsonl(const std::vector<CaseRunOutput>& outputs);
std::vector<SessionTranscript> transcripts_from_jsonl(const std::string& text);

// Adapter that re-issues the non-forced agent turns recorded in a
// transcript; re-running a case with it reproduces the original results.
AdapterFactory replay_factory(const std::vector<SessionTranscript>& transcripts);

// Parses one recorded agent payload back into an adapter response.
AdapterResponse agent_payload_to_response(const json& payload);
json agent_action_to_payload(const AgentAction& action);

}  // namespace agenteval
