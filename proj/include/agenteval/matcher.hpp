#pragma once
// Decides whether an agent turn realizes a legal decision-tree step (tool
// names plus arguments), grades chat/clarify turns, and classifies failures.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agenteval/plan_enum.hpp"
#include "agenteval/types.hpp"

namespace agenteval {

// Failure taxonomy. Exactly one class per failed mission; precedence
// FormatError > ToolError > ParamNameHallucination > ParamValueHallucination
// > ParamValueError.
enum class ErrorClass {
    ToolError,
    ParamNameHallucination,
    ParamValueHallucination,
    ParamValueError,
    FormatError,
};

std::string_view error_class_to_string(ErrorClass e);

struct MatchPolicy {
    bool string_case_insensitive = true;
    bool trim_whitespace = true;
    double numeric_tolerance = 1e-9;  // relative
    bool accept_alternates = true;    // honor per-argument alternate values from the annotation
};

// Normalizes a schema-typed value under the policy: strings trimmed and
// case-folded, integral floats collapsed to integers, containers element- or
// field-wise. Idempotent.
json canonicalize_value(const json& value, const MatchPolicy& policy);

// Equality after canonicalization; numbers compare within the relative
// tolerance.
bool values_equal(const json& a, const json& b, const MatchPolicy& policy);

enum class ArgDiffKind {
    UnknownName,         // argument name absent from the tool schema
    HallucinatedValue,   // supplied, gold omits it, and it is not the declared default
    WrongValue,          // gold argument present with an unequal value
    MissingArgument,     // gold argument absent from the call
};

struct ArgDiff {
    std::string tool_name;
    std::string parameter;
    ArgDiffKind kind;
    json got;       // null when absent
    json expected;  // null when gold has no value for it
};

// Everything needed to classify a failed turn without re-walking the tree.
struct MismatchDetail {
    PlanStep nearest;                        // closest legal candidate step
    std::vector<PlanStep> candidates;        // all steps that were legal
    bool wrong_action_kind = false;          // non-tool turn where a tool turn was required
    bool format_error = false;               // unparseable model payload
    bool tool_mismatch = false;              // no tool-name bijection onto any candidate
    std::vector<std::string> expected_tools; // nearest step's tool names (sorted)
    std::vector<std::string> got_tools;      // turn's tool names (sorted)
    std::vector<ArgDiff> arg_diffs;
    std::string note;
};

struct StepMatchResult {
    std::optional<PlanStep> matched;
    std::optional<MismatchDetail> mismatch;

    bool ok() const { return matched.has_value(); }
};

using NodeTable = std::map<int, const InvocationNode*>;
using ToolTable = std::map<std::string, const ToolSpec*, std::less<>>;

NodeTable make_node_table(const DependencyGraph& graph);
ToolTable make_tool_table(const std::vector<ToolSpec>& tools);

// Finds the unique legal step whose nodes are matched bijectively by the
// turn's calls: same tool name per node, all gold arguments present and
// canonically equal (or listed alternates), extra arguments only when they
// equal a declared default. Order within the turn is irrelevant. Throws
// AmbiguousMatchError when two legal steps both match fully.
StepMatchResult match_step(const std::vector<ToolCall>& turn_calls,
                           const std::vector<PlanStep>& legal_steps,
                           const NodeTable& nodes,
                           const ToolTable& tools,
                           const MatchPolicy& policy);

// Collapses a mismatch into its error class by the fixed precedence.
ErrorClass classify_error(const MismatchDetail& detail);

enum class NonToolFailReason { None, WrongActionKind, MissingParamNotAsked };

struct NonToolResult {
    bool passed = false;
    NonToolFailReason reason = NonToolFailReason::None;
    std::vector<std::string> params_not_asked;
};

// Grades a chat or clarify turn. Chat passes on action kind alone; clarify
// additionally requires the question to mention every missing parameter (by
// name or annotated alias, case-insensitively).
NonToolResult match_non_tool(const AgentAction& action, const Mission& mission, const MatchPolicy& policy);

}  // namespace agenteval
