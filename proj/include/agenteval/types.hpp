#pragma once
// Domain types shared across the engine: tool schemas, dependency graphs,
// agent actions, and the per-case gold annotation. Everything here is
// immutable after dataset load and safe to share across threads.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace agenteval {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Tool schemas

enum class ParamKind { String, Integer, Number, Boolean, Enum, Array, Object };

std::string_view param_kind_to_string(ParamKind kind);
std::optional<ParamKind> param_kind_from_string(std::string_view s);

struct ParameterSpec {
    std::string name;
    ParamKind kind = ParamKind::String;
    bool required = false;
    std::optional<json> default_value;
    std::string description;
    std::vector<json> enum_values;        // kind == Enum
    std::vector<ParameterSpec> items;     // kind == Array: element type (0 or 1 entries)
    std::vector<ParameterSpec> fields;    // kind == Object: named sub-parameters
    std::vector<std::string> aliases;     // surface forms accepted by clarify matching
};

struct ToolSpec {
    std::string name;
    std::string description;
    std::vector<ParameterSpec> parameters;

    const ParameterSpec* find_parameter(std::string_view param) const;
};

// ---------------------------------------------------------------------------
// Agent actions

struct ToolCall {
    std::string tool_name;
    json arguments = json::object();  // parameter name -> typed value
};

// One agent turn: a batch of tool calls, a chat reply, or a clarifying
// question back to the user. Exactly one variant is populated.
struct AgentAction {
    enum class Kind { ToolCalls, Chat, Clarify };

    Kind kind = Kind::Chat;
    std::vector<ToolCall> calls;  // Kind::ToolCalls, non-empty
    std::string text;             // Kind::Chat / Kind::Clarify

    static AgentAction tool_calls(std::vector<ToolCall> calls);
    static AgentAction chat(std::string text);
    static AgentAction clarify(std::string text);
};

// ---------------------------------------------------------------------------
// Classifications

// Six-way action type completing one mission.
enum class ActionType { Single, MultiSerial, MultiParallel, MultiSerialParallel, Chat, Clarify };

// Four-way top-level alphabet used by the mission switching space.
enum class ActionClass { Single, Multi, Chat, Clarify };

// How a mission depends on prior dialogue. First mission of a case is None.
enum class RelationType { None, Implicit, Ellipsis, LongTermMemory };

std::string_view action_type_to_string(ActionType t);
std::optional<ActionType> action_type_from_string(std::string_view s);
ActionClass collapse_action_type(ActionType t);
std::string_view action_class_to_string(ActionClass c);
std::optional<ActionClass> action_class_from_string(std::string_view s);
std::string_view relation_type_to_string(RelationType r);
std::optional<RelationType> relation_type_from_string(std::string_view s);

inline bool is_tool_action(ActionType t) {
    return t == ActionType::Single || t == ActionType::MultiSerial ||
           t == ActionType::MultiParallel || t == ActionType::MultiSerialParallel;
}

inline bool is_multi_action(ActionType t) {
    return t == ActionType::MultiSerial || t == ActionType::MultiParallel ||
           t == ActionType::MultiSerialParallel;
}

// ---------------------------------------------------------------------------
// Gold annotation

// Recorded tool output replayed to the agent in place of live execution.
struct Observation {
    int status_code = 0;
    std::string response;
};

// One gold tool invocation. Node identity is the integer id, not the tool
// name: the same tool may be invoked several times within one mission.
struct InvocationNode {
    int id = 0;
    std::string tool_name;
    json gold_arguments = json::object();
    std::map<std::string, std::vector<json>> alternates;  // per-argument accepted values
    Observation observation;
};

// Per-mission DAG of invocation nodes; an edge (a, b) means a must complete
// before b starts.
struct DependencyGraph {
    std::vector<InvocationNode> nodes;
    std::vector<std::pair<int, int>> edges;

    bool empty() const { return nodes.empty(); }
    const InvocationNode* find_node(int id) const;

    // Structural problems (duplicate ids, dangling endpoints, duplicate or
    // self edges), one message each. Does not check acyclicity.
    std::vector<std::string> structural_violations() const;
};

struct ClarifyGold {
    std::vector<std::string> missing_params;
    std::map<std::string, std::vector<std::string>> param_aliases;
    std::string user_answer;
};

struct Mission {
    int index = 0;
    std::string query;
    ActionType action_type = ActionType::Chat;
    RelationType relation_type = RelationType::None;
    DependencyGraph graph;  // empty iff action_type == Chat
    std::optional<ClarifyGold> clarify_gold;
    std::optional<std::string> gold_chat;
    std::string ai_summary;
};

struct TestCase {
    std::string id;
    std::vector<ToolSpec> tools;
    std::vector<Mission> missions;  // length 1..4

    // Derived from mission labels, never authored.
    std::vector<ActionType> combo() const;
    std::vector<ActionClass> combo_collapsed() const;
    const ToolSpec* find_tool(std::string_view name) const;
};

// ---------------------------------------------------------------------------
// Operations

// Derives the action type from graph shape plus the clarify/chat flags.
// Throws GraphError/CycleError for malformed graphs, Error on bad flags.
ActionType classify_action_type(const DependencyGraph& graph, bool clarify_flag, bool chat_flag);

enum class SchemaViolationKind { UnknownParameter, MissingRequired, TypeMismatch };

struct SchemaViolation {
    SchemaViolationKind kind;
    std::string parameter;
    std::string detail;
};

// Checks one call against its tool schema. Violations are data, not errors;
// an empty list means the call is schema-valid.
std::vector<SchemaViolation> validate_tool_call_schema(const ToolCall& call, const ToolSpec& spec);

}  // namespace agenteval
