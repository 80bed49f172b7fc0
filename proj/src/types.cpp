#include "agenteval/types.hpp"

#include <algorithm>
#include <set>

#include "agenteval/errors.hpp"

namespace agenteval {

std::string_view param_kind_to_string(ParamKind kind) {
    switch (kind) {
        case ParamKind::String: return "string";
        case ParamKind::Integer: return "integer";
        case ParamKind::Number: return "number";
        case ParamKind::Boolean: return "boolean";
        case ParamKind::Enum: return "enum";
        case ParamKind::Array: return "array";
        case ParamKind::Object: return "object";
    }
    return "string";
}

std::optional<ParamKind> param_kind_from_string(std::string_view s) {
    if (s == "string") return ParamKind::String;
    if (s == "integer") return ParamKind::Integer;
    if (s == "number") return ParamKind::Number;
    if (s == "boolean") return ParamKind::Boolean;
    if (s == "enum") return ParamKind::Enum;
    if (s == "array") return ParamKind::Array;
    if (s == "object") return ParamKind::Object;
    return std::nullopt;
}

const ParameterSpec* ToolSpec::find_parameter(std::string_view param) const {
    for (const auto& p : parameters) {
        if (p.name == param) return &p;
    }
    return nullptr;
}

AgentAction AgentAction::tool_calls(std::vector<ToolCall> calls) {
    AgentAction a;
    a.kind = Kind::ToolCalls;
    a.calls = std::move(calls);
    return a;
}

AgentAction AgentAction::chat(std::string text) {
    AgentAction a;
    a.kind = Kind::Chat;
    a.text = std::move(text);
    return a;
}

AgentAction AgentAction::clarify(std::string text) {
    AgentAction a;
    a.kind = Kind::Clarify;
    a.text = std::move(text);
    return a;
}

std::string_view action_type_to_string(ActionType t) {
    switch (t) {
        case ActionType::Single: return "single";
        case ActionType::MultiSerial: return "multi_serial";
        case ActionType::MultiParallel: return "multi_parallel";
        case ActionType::MultiSerialParallel: return "multi_serial_parallel";
        case ActionType::Chat: return "chat";
        case ActionType::Clarify: return "clarify";
    }
    return "chat";
}

std::optional<ActionType> action_type_from_string(std::string_view s) {
    if (s == "single") return ActionType::Single;
    if (s == "multi_serial") return ActionType::MultiSerial;
    if (s == "multi_parallel") return ActionType::MultiParallel;
    if (s == "multi_serial_parallel") return ActionType::MultiSerialParallel;
    if (s == "chat") return ActionType::Chat;
    if (s == "clarify") return ActionType::Clarify;
    return std::nullopt;
}

ActionClass collapse_action_type(ActionType t) {
    switch (t) {
        case ActionType::Single: return ActionClass::Single;
        case ActionType::MultiSerial:
        case ActionType::MultiParallel:
        case ActionType::MultiSerialParallel: return ActionClass::Multi;
        case ActionType::Chat: return ActionClass::Chat;
        case ActionType::Clarify: return ActionClass::Clarify;
    }
    return ActionClass::Chat;
}

std::string_view action_class_to_string(ActionClass c) {
    switch (c) {
        case ActionClass::Single: return "single";
        case ActionClass::Multi: return "multi";
        case ActionClass::Chat: return "chat";
        case ActionClass::Clarify: return "clarify";
    }
    return "chat";
}

std::optional<ActionClass> action_class_from_string(std::string_view s) {
    if (s == "single") return ActionClass::Single;
    if (s == "multi") return ActionClass::Multi;
    if (s == "chat") return ActionClass::Chat;
    if (s == "clarify") return ActionClass::Clarify;
    return std::nullopt;
}

std::string_view relation_type_to_string(RelationType r) {
    switch (r) {
        case RelationType::None: return "none";
        case RelationType::Implicit: return "implicit";
        case RelationType::Ellipsis: return "ellipsis";
        case RelationType::LongTermMemory: return "long_term_memory";
    }
    return "none";
}

std::optional<RelationType> relation_type_from_string(std::string_view s) {
    if (s == "none") return RelationType::None;
    if (s == "implicit") return RelationType::Implicit;
    if (s == "ellipsis") return RelationType::Ellipsis;
    if (s == "long_term_memory") return RelationType::LongTermMemory;
    return std::nullopt;
}

const InvocationNode* DependencyGraph::find_node(int id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

std::vector<std::string> DependencyGraph::structural_violations() const {
    std::vector<std::string> out;
    std::set<int> ids;
    for (const auto& n : nodes) {
        if (!ids.insert(n.id).second) {
            out.push_back("duplicate node id " + std::to_string(n.id));
        }
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& [from, to] : edges) {
        if (!ids.count(from) || !ids.count(to)) {
            out.push_back("edge (" + std::to_string(from) + "," + std::to_string(to) +
                          ") references a missing node");
            continue;
        }
        if (from == to) {
            out.push_back("self edge on node " + std::to_string(from));
        }
        if (!seen.insert({from, to}).second) {
            out.push_back("duplicate edge (" + std::to_string(from) + "," + std::to_string(to) + ")");
        }
    }
    return out;
}

std::vector<ActionType> TestCase::combo() const {
    std::vector<ActionType> out;
    out.reserve(missions.size());
    for (const auto& m : missions) out.push_back(m.action_type);
    return out;
}

std::vector<ActionClass> TestCase::combo_collapsed() const {
    std::vector<ActionClass> out;
    out.reserve(missions.size());
    for (const auto& m : missions) out.push_back(collapse_action_type(m.action_type));
    return out;
}

const ToolSpec* TestCase::find_tool(std::string_view name) const {
    for (const auto& t : tools) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

namespace {

// Peels indegree-0 layers; returns the ready-set size of every round or
// throws CycleError when nodes remain with no ready candidates.
std::vector<int> peel_layers(const DependencyGraph& graph) {
    std::map<int, int> indegree;
    for (const auto& n : graph.nodes) indegree[n.id] = 0;
    for (const auto& [from, to] : graph.edges) indegree[to]++;

    std::vector<int> layer_sizes;
    std::set<int> remaining;
    for (const auto& n : graph.nodes) remaining.insert(n.id);

    while (!remaining.empty()) {
        std::vector<int> ready;
        for (int id : remaining) {
            if (indegree[id] == 0) ready.push_back(id);
        }
        if (ready.empty()) throw CycleError();
        layer_sizes.push_back(static_cast<int>(ready.size()));
        for (int id : ready) {
            remaining.erase(id);
            for (const auto& [from, to] : graph.edges) {
                if (from == id) indegree[to]--;
            }
        }
    }
    return layer_sizes;
}

}  // namespace

ActionType classify_action_type(const DependencyGraph& graph, bool clarify_flag, bool chat_flag) {
    if (clarify_flag && chat_flag) {
        throw Error("classify_action_type: at most one of clarify/chat flags may be set");
    }
    if (chat_flag && !graph.empty()) {
        throw Error("classify_action_type: chat flag requires an empty graph");
    }
    if (chat_flag) return ActionType::Chat;

    auto structural = graph.structural_violations();
    if (!structural.empty()) throw GraphError(structural.front());
    if (!graph.empty()) peel_layers(graph);  // rejects cycles

    if (clarify_flag) return ActionType::Clarify;

    if (graph.empty()) throw GraphError("empty graph requires the chat flag");
    if (graph.nodes.size() == 1) return ActionType::Single;
    if (graph.edges.empty()) return ActionType::MultiParallel;

    // A unique linear extension forces one fully serial path.
    auto layers = peel_layers(graph);
    bool total_order = std::all_of(layers.begin(), layers.end(), [](int n) { return n == 1; });
    return total_order ? ActionType::MultiSerial : ActionType::MultiSerialParallel;
}

namespace {

bool value_matches_kind(const json& value, const ParameterSpec& spec);

bool object_matches_fields(const json& value, const ParameterSpec& spec) {
    if (!value.is_object()) return false;
    for (const auto& field : spec.fields) {
        auto it = value.find(field.name);
        if (it == value.end()) {
            if (field.required) return false;
            continue;
        }
        if (!value_matches_kind(*it, field)) return false;
    }
    return true;
}

bool value_matches_kind(const json& value, const ParameterSpec& spec) {
    switch (spec.kind) {
        case ParamKind::String: return value.is_string();
        case ParamKind::Integer:
            return value.is_number_integer() ||
                   (value.is_number_float() &&
                    value.get<double>() == static_cast<double>(static_cast<long long>(value.get<double>())));
        case ParamKind::Number: return value.is_number();
        case ParamKind::Boolean: return value.is_boolean();
        case ParamKind::Enum:
            return std::find(spec.enum_values.begin(), spec.enum_values.end(), value) !=
                   spec.enum_values.end();
        case ParamKind::Array: {
            if (!value.is_array()) return false;
            if (spec.items.empty()) return true;
            for (const auto& el : value) {
                if (!value_matches_kind(el, spec.items.front())) return false;
            }
            return true;
        }
        case ParamKind::Object: return object_matches_fields(value, spec);
    }
    return false;
}

}  // namespace

std::vector<SchemaViolation> validate_tool_call_schema(const ToolCall& call, const ToolSpec& spec) {
    std::vector<SchemaViolation> out;
    for (auto it = call.arguments.begin(); it != call.arguments.end(); ++it) {
        const ParameterSpec* param = spec.find_parameter(it.key());
        if (param == nullptr) {
            out.push_back({SchemaViolationKind::UnknownParameter, it.key(),
                           "not declared by tool '" + spec.name + "'"});
            continue;
        }
        if (!value_matches_kind(it.value(), *param)) {
            out.push_back({SchemaViolationKind::TypeMismatch, it.key(),
                           "value does not fit kind '" +
                               std::string(param_kind_to_string(param->kind)) + "'"});
        }
    }
    for (const auto& param : spec.parameters) {
        if (param.required && !call.arguments.contains(param.name)) {
            out.push_back({SchemaViolationKind::MissingRequired, param.name, "required parameter absent"});
        }
    }
    return out;
}

}  // namespace agenteval
