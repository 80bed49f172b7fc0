#include "agenteval/runner.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "agenteval/decision_tree.hpp"
#include "agenteval/errors.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace agenteval {

std::string_view speaker_to_string(Speaker s) {
    switch (s) {
        case Speaker::User: return "user";
        case Speaker::Agent: return "agent";
        case Speaker::Tool: return "tool";
        case Speaker::AiSummary: return "ai_summary";
    }
    return "user";
}

std::optional<Speaker> speaker_from_string(std::string_view s) {
    if (s == "user") return Speaker::User;
    if (s == "agent") return Speaker::Agent;
    if (s == "tool") return Speaker::Tool;
    if (s == "ai_summary") return Speaker::AiSummary;
    return std::nullopt;
}

int RunConfig::turn_budget(std::size_t node_count) const {
    if (max_turns_per_mission > 0) return max_turns_per_mission;
    return static_cast<int>(2 * node_count + 2);
}

// ---------------------------------------------------------------------------
// Agent action <-> transcript payload

json agent_action_to_payload(const AgentAction& action) {
    switch (action.kind) {
        case AgentAction::Kind::ToolCalls: {
            json calls = json::array();
            for (const auto& c : action.calls) {
                calls.push_back({{"tool", c.tool_name}, {"arguments", c.arguments}});
            }
            return {{"kind", "tool_calls"}, {"calls", calls}};
        }
        case AgentAction::Kind::Chat:
            return {{"kind", "chat"}, {"text", action.text}};
        case AgentAction::Kind::Clarify:
            return {{"kind", "clarify"}, {"text", action.text}};
    }
    return json::object();
}

AdapterResponse agent_payload_to_response(const json& payload) {
    AdapterResponse resp;
    const std::string kind = payload.value("kind", std::string());
    if (kind == "tool_calls") {
        std::vector<ToolCall> calls;
        for (const auto& c : payload.value("calls", json::array())) {
            calls.push_back(ToolCall{c.value("tool", std::string()), c.value("arguments", json::object())});
        }
        resp.action = AgentAction::tool_calls(std::move(calls));
    } else if (kind == "chat") {
        resp.action = AgentAction::chat(payload.value("text", std::string()));
    } else if (kind == "clarify") {
        resp.action = AgentAction::clarify(payload.value("text", std::string()));
    } else {
        resp.raw_payload = payload.value("raw", payload.dump());
    }
    return resp;
}

// ---------------------------------------------------------------------------
// Case evaluation

namespace {

struct CaseSession {
    const TestCase& tc;
    AgentAdapter& adapter;
    const RunConfig& cfg;
    SessionTranscript& transcript;

    void append(int mission, Speaker speaker, json payload, bool forced = false) {
        transcript.turns.push_back(TranscriptTurn{mission, speaker, std::move(payload), forced});
    }

    AdapterResponse next_response() { return adapter.next(tc, transcript); }
};

// Deterministic level-peel completion of the unconsumed gold nodes, used
// both for teacher forcing and for the gold script synthesis.
std::vector<PlanStep> peel_remaining(const DependencyGraph& graph, const std::set<int>& consumed) {
    // Only edges among unconsumed nodes constrain the completion.
    std::map<int, int> indegree;
    std::map<int, std::vector<int>> successors;
    for (const auto& n : graph.nodes) {
        if (!consumed.count(n.id)) indegree[n.id] = 0;
    }
    for (const auto& [from, to] : graph.edges) {
        if (consumed.count(from) || consumed.count(to)) continue;
        indegree[to]++;
        successors[from].push_back(to);
    }

    std::set<int> remaining;
    for (const auto& [id, _] : indegree) remaining.insert(id);

    std::vector<PlanStep> steps;
    while (!remaining.empty()) {
        PlanStep step;
        for (int id : remaining) {
            if (indegree[id] == 0) step.ids.push_back(id);
        }
        if (step.ids.empty()) throw CycleError();
        for (int id : step.ids) {
            remaining.erase(id);
            for (int succ : successors[id]) indegree[succ]--;
        }
        steps.push_back(std::move(step));
    }
    return steps;
}

std::vector<ToolCall> gold_calls_for_step(const DependencyGraph& graph, const PlanStep& step) {
    std::vector<ToolCall> calls;
    for (int id : step.ids) {
        const InvocationNode* node = graph.find_node(id);
        calls.push_back(ToolCall{node->tool_name, node->gold_arguments});
    }
    return calls;
}

std::string synthesize_clarify_question(const ClarifyGold& gold) {
    std::string q = "Could you provide ";
    for (std::size_t i = 0; i < gold.missing_params.size(); ++i) {
        if (i > 0) q += gold.missing_params.size() == 2 ? " and " : ", ";
        q += gold.missing_params[i];
    }
    q += "?";
    return q;
}

void append_observations(CaseSession& session, const Mission& mission, const PlanStep& step,
                         bool forced) {
    for (int id : step.ids) {
        const InvocationNode* node = mission.graph.find_node(id);
        session.append(mission.index, Speaker::Tool,
                       {{"node", id},
                        {"status_code", node->observation.status_code},
                        {"response", node->observation.response}},
                       forced);
    }
}

// Injects the rest of the gold transcript after a failure so the next
// mission starts from gold context.
void inject_gold_completion(CaseSession& session, const Mission& mission,
                            const std::set<int>& consumed, bool clarify_answer_pending) {
    if (mission.action_type == ActionType::Chat) {
        session.append(mission.index, Speaker::Agent,
                       agent_action_to_payload(AgentAction::chat(mission.gold_chat.value_or(""))), true);
        return;
    }
    if (mission.action_type == ActionType::Clarify && clarify_answer_pending) {
        const ClarifyGold& gold = *mission.clarify_gold;
        session.append(mission.index, Speaker::Agent,
                       agent_action_to_payload(AgentAction::clarify(synthesize_clarify_question(gold))),
                       true);
        session.append(mission.index, Speaker::User, {{"text", gold.user_answer}}, true);
    }
    for (const auto& step : peel_remaining(mission.graph, consumed)) {
        session.append(mission.index, Speaker::Agent,
                       agent_action_to_payload(
                           AgentAction::tool_calls(gold_calls_for_step(mission.graph, step))),
                       true);
        append_observations(session, mission, step, true);
    }
}

struct MissionEval {
    MissionResult result;
    std::set<int> consumed_nodes;
    bool clarify_answer_pending = false;  // clarify turn never passed
};

// Applies the clarify-text convention for adapters that cannot tag
// clarifications: on a clarify mission a plain chat reply counts as the
// clarifying question.
AgentAction coerce_action(AgentAction action, const Mission& mission, const RunConfig& cfg) {
    if (cfg.clarify_heuristic && action.kind == AgentAction::Kind::Chat &&
        mission.action_type == ActionType::Clarify) {
        return AgentAction::clarify(action.text);
    }
    return action;
}

MissionEval run_mission(CaseSession& session, const Mission& mission, const ToolTable& tools) {
    const RunConfig& cfg = session.cfg;
    MissionEval eval;
    MissionResult& r = eval.result;
    r.mission_index = mission.index;
    r.action_type = mission.action_type;
    r.relation_type = mission.relation_type;

    // Chat missions: one turn, graded on action kind.
    if (mission.action_type == ActionType::Chat) {
        r.steps_required = 1;
        AdapterResponse resp = session.next_response();
        if (!resp.action) {
            session.append(mission.index, Speaker::Agent,
                           {{"kind", "malformed"}, {"raw", resp.raw_payload}});
            r.error = ErrorClass::FormatError;
            r.fail_note = "unparseable agent payload";
            return eval;
        }
        AgentAction action = *resp.action;
        session.append(mission.index, Speaker::Agent, agent_action_to_payload(action));
        NonToolResult nt = match_non_tool(action, mission, cfg.match_policy);
        if (nt.passed) {
            r.passed = true;
            r.steps_accepted = 1;
        } else {
            r.fail_note = "expected a chat reply";
        }
        return eval;
    }

    const NodeTable nodes = make_node_table(mission.graph);

    // Clarify missions: the clarify turn first, then the tool plan.
    bool tool_phase = mission.action_type != ActionType::Clarify;
    eval.clarify_answer_pending = !tool_phase;
    r.steps_required = tool_phase ? optimal_step_count(mission.graph) : 1;

    const std::vector<ExecutionPath> paths = enumerate_paths(mission.graph, cfg.enum_limits);
    const PathPartition partition = partition_paths(paths);
    const DecisionTree tree = DecisionTree::build(partition);
    MatchCursor cursor = tree.root_cursor();
    ExecutionPath taken;

    const int budget = cfg.turn_budget(mission.graph.nodes.size());
    for (int turn = 0; turn < budget; ++turn) {
        AdapterResponse resp = session.next_response();
        if (!resp.action) {
            session.append(mission.index, Speaker::Agent,
                           {{"kind", "malformed"}, {"raw", resp.raw_payload}});
            r.error = ErrorClass::FormatError;
            r.fail_note = "unparseable agent payload";
            return eval;
        }
        AgentAction action = coerce_action(*resp.action, mission, cfg);
        session.append(mission.index, Speaker::Agent, agent_action_to_payload(action));

        if (!tool_phase) {
            // Expecting the clarifying question.
            NonToolResult nt = match_non_tool(action, mission, cfg.match_policy);
            if (!nt.passed) {
                if (nt.reason == NonToolFailReason::MissingParamNotAsked) {
                    r.fail_note = "clarify question did not mention: ";
                    for (std::size_t i = 0; i < nt.params_not_asked.size(); ++i) {
                        if (i > 0) r.fail_note += ", ";
                        r.fail_note += nt.params_not_asked[i];
                    }
                } else {
                    r.fail_note = "expected a clarifying question";
                }
                return eval;
            }
            eval.clarify_answer_pending = false;
            r.steps_accepted = 1;
            session.append(mission.index, Speaker::User, {{"text", mission.clarify_gold->user_answer}});
            tool_phase = true;
            continue;
        }

        if (action.kind != AgentAction::Kind::ToolCalls) {
            MismatchDetail detail;
            detail.wrong_action_kind = true;
            detail.candidates = tree.legal_steps(cursor);
            r.error = classify_error(detail);
            r.fail_note = "expected tool calls";
            return eval;
        }

        StepMatchResult match =
            match_step(action.calls, tree.legal_steps(cursor), nodes, tools, cfg.match_policy);
        if (!match.ok()) {
            r.error = classify_error(*match.mismatch);
            r.fail_note = "turn did not realize a legal step";
            return eval;
        }

        auto [next_cursor, status] = tree.advance(cursor, *match.matched);
        cursor = next_cursor;
        taken.steps.push_back(*match.matched);
        for (int id : match.matched->ids) eval.consumed_nodes.insert(id);
        if (mission.action_type != ActionType::Clarify) r.steps_accepted++;
        append_observations(session, mission, *match.matched, false);

        if (status.is_complete()) {
            r.passed = true;
            r.path_taken = taken;
            if (is_tool_action(mission.action_type)) {
                r.optimal = status.kind == MatchStatus::Kind::CompleteOptimal;
            }
            return eval;
        }
    }

    MismatchDetail detail;
    detail.tool_mismatch = true;
    detail.note = "turn budget exhausted";
    r.error = classify_error(detail);
    r.fail_note = "turn budget exhausted before the plan completed";
    return eval;
}

}  // namespace

CaseRunOutput run_case(const TestCase& test_case, AgentAdapter& adapter, const RunConfig& cfg) {
    CaseRunOutput out;
    out.result.case_id = test_case.id;
    out.result.combo = test_case.combo();
    out.transcript.case_id = test_case.id;

    CaseSession session{test_case, adapter, cfg, out.transcript};
    const ToolTable tools = make_tool_table(test_case.tools);
    const std::vector<ActionClass> collapsed = test_case.combo_collapsed();

    bool aborted = false;
    for (const auto& mission : test_case.missions) {
        MissionResult r;
        r.case_id = test_case.id;
        r.mission_index = mission.index;
        r.case_mission_count = static_cast<int>(test_case.missions.size());
        r.action_type = mission.action_type;
        r.relation_type = mission.relation_type;
        r.combo_prefix.assign(collapsed.begin(), collapsed.begin() + mission.index + 1);
        r.steps_required = is_tool_action(mission.action_type) && !mission.graph.empty()
                               ? optimal_step_count(mission.graph)
                               : 1;

        if (aborted) {
            r.reached = false;
            out.result.mission_results.push_back(std::move(r));
            continue;
        }

        session.append(mission.index, Speaker::User, {{"text", mission.query}});

        try {
            MissionEval eval = run_mission(session, mission, tools);
            eval.result.case_id = r.case_id;
            eval.result.case_mission_count = r.case_mission_count;
            eval.result.combo_prefix = r.combo_prefix;
            r = std::move(eval.result);

            if (!r.passed) {
                if (cfg.teacher_forcing) {
                    inject_gold_completion(session, mission, eval.consumed_nodes,
                                           eval.clarify_answer_pending);
                } else {
                    aborted = true;
                }
            }
            if (!aborted) {
                session.append(mission.index, Speaker::AiSummary, {{"text", mission.ai_summary}});
            }
        } catch (const AmbiguousMatchError&) {
            throw;  // annotation defect; surface to the caller
        } catch (const AdapterError& e) {
            out.result.unscored = true;
            out.result.unscored_reason = e.what();
            r.reached = false;
        } catch (const ScriptExhausted& e) {
            out.result.unscored = true;
            out.result.unscored_reason = e.what();
            r.reached = false;
        }

        out.result.mission_results.push_back(std::move(r));
        if (out.result.unscored) break;
    }

    // Pad unreached missions so result shape always matches the combo.
    while (out.result.mission_results.size() < test_case.missions.size()) {
        const Mission& mission = test_case.missions[out.result.mission_results.size()];
        MissionResult r;
        r.case_id = test_case.id;
        r.mission_index = mission.index;
        r.case_mission_count = static_cast<int>(test_case.missions.size());
        r.action_type = mission.action_type;
        r.relation_type = mission.relation_type;
        r.combo_prefix.assign(collapsed.begin(), collapsed.begin() + mission.index + 1);
        r.reached = false;
        r.steps_required = is_tool_action(mission.action_type) && !mission.graph.empty()
                               ? optimal_step_count(mission.graph)
                               : 1;
        out.result.mission_results.push_back(std::move(r));
    }

    out.result.all_passed =
        !out.result.unscored &&
        std::all_of(out.result.mission_results.begin(), out.result.mission_results.end(),
                    [](const MissionResult& r) { return r.passed; });
    return out;
}

std::vector<CaseResult> BatchResult::case_results() const {
    std::vector<CaseResult> out;
    out.reserve(outputs.size());
    for (const auto& o : outputs) out.push_back(o.result);
    return out;
}

namespace {

CaseRunOutput run_case_guarded(const TestCase& tc, const AdapterFactory& factory, const RunConfig& cfg) {
    try {
        std::unique_ptr<AgentAdapter> adapter = factory(tc);
        if (!adapter) throw AdapterError("adapter factory returned null");
        return run_case(tc, *adapter, cfg);
    } catch (const std::exception& e) {
        CaseRunOutput out;
        out.result.case_id = tc.id;
        out.result.combo = tc.combo();
        out.result.unscored = true;
        out.result.unscored_reason = e.what();
        out.transcript.case_id = tc.id;
        const std::vector<ActionClass> collapsed = tc.combo_collapsed();
        for (const auto& mission : tc.missions) {
            MissionResult r;
            r.case_id = tc.id;
            r.mission_index = mission.index;
            r.case_mission_count = static_cast<int>(tc.missions.size());
            r.action_type = mission.action_type;
            r.relation_type = mission.relation_type;
            r.combo_prefix.assign(collapsed.begin(), collapsed.begin() + mission.index + 1);
            r.reached = false;
            out.result.mission_results.push_back(std::move(r));
        }
        return out;
    }
}

}  // namespace

BatchResult evaluate_dataset_serial(const DatasetFile& ds, const AdapterFactory& factory,
                                    const RunConfig& cfg) {
    BatchResult batch;
    batch.outputs.reserve(ds.cases.size());
    for (const auto& tc : ds.cases) {
        batch.outputs.push_back(run_case_guarded(tc, factory, cfg));
    }
    return batch;
}

BatchResult evaluate_dataset(const DatasetFile& ds, const AdapterFactory& factory, const RunConfig& cfg) {
    if (cfg.request_concurrency <= 1) return evaluate_dataset_serial(ds, factory, cfg);

    BatchResult batch;
    batch.outputs.resize(ds.cases.size());
    const int n = static_cast<int>(ds.cases.size());

#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) num_threads(cfg.request_concurrency)
#endif
    for (int i = 0; i < n; ++i) {
        batch.outputs[static_cast<std::size_t>(i)] =
            run_case_guarded(ds.cases[static_cast<std::size_t>(i)], factory, cfg);
    }
    return batch;
}

// ---------------------------------------------------------------------------
// Scripted adapters

namespace {

class ScriptedAdapter final : public AgentAdapter {
public:
    ScriptedAdapter(std::vector<AgentAction> script, std::string name)
        : script_(std::move(script)), name_(std::move(name)) {}

    std::string name() const override { return name_; }

    AdapterResponse next(const TestCase&, const SessionTranscript&) override {
        if (next_ >= script_.size()) throw ScriptExhausted();
        return AdapterResponse{script_[next_++], {}};
    }

private:
    std::vector<AgentAction> script_;
    std::string name_;
    std::size_t next_ = 0;
};

}  // namespace

std::unique_ptr<AgentAdapter> scripted_adapter(std::vector<AgentAction> script, std::string name) {
    return std::make_unique<ScriptedAdapter>(std::move(script), std::move(name));
}

std::vector<AgentAction> synthesize_gold_script(const TestCase& test_case, GoldMode mode,
                                                const EnumLimits& limits) {
    std::vector<AgentAction> script;
    for (const auto& mission : test_case.missions) {
        if (mission.action_type == ActionType::Chat) {
            script.push_back(AgentAction::chat(mission.gold_chat.value_or("Done.")));
            continue;
        }
        if (mission.action_type == ActionType::Clarify) {
            script.push_back(AgentAction::clarify(synthesize_clarify_question(*mission.clarify_gold)));
        }

        std::vector<PlanStep> steps;
        if (mode == GoldMode::Serial) {
            // Smallest ready node each turn: the lexicographically first
            // all-singleton path.
            std::set<int> consumed;
            while (consumed.size() < mission.graph.nodes.size()) {
                PlanStep layer = peel_remaining(mission.graph, consumed).front();
                PlanStep one{{layer.ids.front()}};
                consumed.insert(one.ids.front());
                steps.push_back(one);
            }
        } else {
            const PathPartition partition = partition_paths(enumerate_paths(mission.graph, limits));
            steps = partition.optimal.front().steps;
        }
        for (const auto& step : steps) {
            script.push_back(AgentAction::tool_calls(gold_calls_for_step(mission.graph, step)));
        }
    }
    return script;
}

AdapterFactory gold_adapter_factory(GoldMode mode) {
    const std::string name = mode == GoldMode::Optimal ? "gold-optimal" : "gold-serial";
    return [mode, name](const TestCase& tc) {
        return scripted_adapter(synthesize_gold_script(tc, mode), name);
    };
}

ScriptBook load_script_book(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path, e.what());
    }

    ScriptBook book;
    book.adapter_name = doc.value("adapter_name", std::string("scripted"));
    const json cases = doc.value("cases", json::object());
    for (auto it = cases.begin(); it != cases.end(); ++it) {
        std::vector<AgentAction> actions;
        for (const auto& turn : it.value()) {
            AdapterResponse resp = agent_payload_to_response(turn);
            if (!resp.action) throw ParseError(path, "unknown action kind in script for " + it.key());
            actions.push_back(*resp.action);
        }
        book.scripts[it.key()] = std::move(actions);
    }
    return book;
}

AdapterFactory script_book_factory(ScriptBook book) {
    auto shared = std::make_shared<ScriptBook>(std::move(book));
    return [shared](const TestCase& tc) -> std::unique_ptr<AgentAdapter> {
        auto it = shared->scripts.find(tc.id);
        std::vector<AgentAction> script;
        if (it != shared->scripts.end()) script = it->second;
        return scripted_adapter(std::move(script), shared->adapter_name);
    };
}

// ---------------------------------------------------------------------------
// Transcript persistence

std::string transcript_to_jsonl(const SessionTranscript& transcript) {
    std::string out;
    for (const auto& turn : transcript.turns) {
        json line = {{"case", transcript.case_id},
                     {"mission", turn.mission_index},
                     {"speaker", std::string(speaker_to_string(turn.speaker))},
                     {"payload", turn.payload}};
        if (turn.forced) line["forced"] = true;
        out += line.dump();
        out += "\n";
    }
    return out;
}

std::string transcripts_to_jsonl(const std::vector<CaseRunOutput>& outputs) {
    std::string out;
    for (const auto& o : outputs) out += transcript_to_jsonl(o.transcript);
    return out;
}

std::vector<SessionTranscript> transcripts_from_jsonl(const std::string& text) {
    std::vector<SessionTranscript> out;
    std::map<std::string, std::size_t> index;

    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        if (line.empty()) continue;
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError("<transcript>", e.what());
        }
        const std::string case_id = doc.value("case", std::string());
        auto it = index.find(case_id);
        if (it == index.end()) {
            index[case_id] = out.size();
            out.push_back(SessionTranscript{case_id, {}});
            it = index.find(case_id);
        }
        TranscriptTurn turn;
        turn.mission_index = doc.value("mission", 0);
        turn.speaker = speaker_from_string(doc.value("speaker", "user")).value_or(Speaker::User);
        turn.payload = doc.value("payload", json::object());
        turn.forced = doc.value("forced", false);
        out[it->second].turns.push_back(std::move(turn));
    }
    return out;
}

namespace {

// Replays the non-forced agent turns of a recorded transcript.
class TranscriptAdapter final : public AgentAdapter {
public:
    explicit TranscriptAdapter(std::vector<AdapterResponse> turns) : turns_(std::move(turns)) {}

    std::string name() const override { return "replay"; }

    AdapterResponse next(const TestCase&, const SessionTranscript&) override {
        if (next_ >= turns_.size()) throw ScriptExhausted("transcript has no further agent turns");
        return turns_[next_++];
    }

private:
    std::vector<AdapterResponse> turns_;
    std::size_t next_ = 0;
};

}  // namespace

AdapterFactory replay_factory(const std::vector<SessionTranscript>& transcripts) {
    auto shared = std::make_shared<std::vector<SessionTranscript>>(transcripts);
    return [shared](const TestCase& tc) -> std::unique_ptr<AgentAdapter> {
        std::vector<AdapterResponse> turns;
        for (const auto& t : *shared) {
            if (t.case_id != tc.id) continue;
            for (const auto& turn : t.turns) {
                if (turn.speaker == Speaker::Agent && !turn.forced) {
                    turns.push_back(agent_payload_to_response(turn.payload));
                }
            }
        }
        return std::make_unique<TranscriptAdapter>(std::move(turns));
    };
}

}  // namespace agenteval
