#include "agenteval/matcher.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "agenteval/errors.hpp"

namespace agenteval {

std::string_view error_class_to_string(ErrorClass e) {
    switch (e) {
        case ErrorClass::ToolError: return "tool_error";
        case ErrorClass::ParamNameHallucination: return "param_name_hallucination";
        case ErrorClass::ParamValueHallucination: return "param_value_hallucination";
        case ErrorClass::ParamValueError: return "param_value_error";
        case ErrorClass::FormatError: return "format_error";
    }
    return "tool_error";
}

namespace {

std::string fold_string(std::string s, const MatchPolicy& policy) {
    if (policy.trim_whitespace) {
        auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
        while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
        while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.pop_back();
    }
    if (policy.string_case_insensitive) {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    }
    return s;
}

}  // namespace

json canonicalize_value(const json& value, const MatchPolicy& policy) {
    switch (value.type()) {
        case json::value_t::string:
            return fold_string(value.get<std::string>(), policy);
        case json::value_t::number_float: {
            // Integral floats collapse to integers so 3.0 and 3 compare equal.
            double d = value.get<double>();
            if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15) {
                return json(static_cast<std::int64_t>(d));
            }
            return value;
        }
        case json::value_t::array: {
            json out = json::array();
            for (const auto& el : value) out.push_back(canonicalize_value(el, policy));
            return out;
        }
        case json::value_t::object: {
            json out = json::object();
            for (auto it = value.begin(); it != value.end(); ++it) {
                out[it.key()] = canonicalize_value(it.value(), policy);
            }
            return out;
        }
        default:
            return value;
    }
}

namespace {

bool canonical_equal(const json& a, const json& b, const MatchPolicy& policy) {
    if (a.is_number() && b.is_number()) {
        double x = a.get<double>();
        double y = b.get<double>();
        if (x == y) return true;
        double scale = std::max(std::abs(x), std::abs(y));
        return std::abs(x - y) <= policy.numeric_tolerance * scale;
    }
    if (a.type() != b.type()) return false;
    if (a.is_array()) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!canonical_equal(a[i], b[i], policy)) return false;
        }
        return true;
    }
    if (a.is_object()) {
        if (a.size() != b.size()) return false;
        for (auto it = a.begin(); it != a.end(); ++it) {
            auto jt = b.find(it.key());
            if (jt == b.end() || !canonical_equal(it.value(), *jt, policy)) return false;
        }
        return true;
    }
    return a == b;
}

}  // namespace

bool values_equal(const json& a, const json& b, const MatchPolicy& policy) {
    return canonical_equal(canonicalize_value(a, policy), canonicalize_value(b, policy), policy);
}

NodeTable make_node_table(const DependencyGraph& graph) {
    NodeTable table;
    for (const auto& n : graph.nodes) table[n.id] = &n;
    return table;
}

ToolTable make_tool_table(const std::vector<ToolSpec>& tools) {
    ToolTable table;
    for (const auto& t : tools) table[t.name] = &t;
    return table;
}

namespace {

bool gold_accepts(const InvocationNode& node, const std::string& param, const json& got,
                  const json& gold, const MatchPolicy& policy) {
    if (values_equal(got, gold, policy)) return true;
    if (!policy.accept_alternates) return false;
    auto it = node.alternates.find(param);
    if (it == node.alternates.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](const json& alt) { return values_equal(got, alt, policy); });
}

// Diffs one call against one gold node. Empty result means the call
// realizes the node.
std::vector<ArgDiff> diff_call(const ToolCall& call, const InvocationNode& node,
                               const ToolSpec* spec, const MatchPolicy& policy) {
    std::vector<ArgDiff> diffs;

    for (auto it = node.gold_arguments.begin(); it != node.gold_arguments.end(); ++it) {
        auto got = call.arguments.find(it.key());
        if (got == call.arguments.end()) {
            diffs.push_back({call.tool_name, it.key(), ArgDiffKind::MissingArgument, json(), it.value()});
        } else if (!gold_accepts(node, it.key(), *got, it.value(), policy)) {
            diffs.push_back({call.tool_name, it.key(), ArgDiffKind::WrongValue, *got, it.value()});
        }
    }

    for (auto it = call.arguments.begin(); it != call.arguments.end(); ++it) {
        if (node.gold_arguments.contains(it.key())) continue;
        const ParameterSpec* param = spec ? spec->find_parameter(it.key()) : nullptr;
        if (param == nullptr) {
            diffs.push_back({call.tool_name, it.key(), ArgDiffKind::UnknownName, it.value(), json()});
        } else if (!param->default_value.has_value() ||
                   !values_equal(it.value(), *param->default_value, policy)) {
            // Supplying an omitted optional is fine only at its default.
            json expected = param->default_value.value_or(json());
            diffs.push_back({call.tool_name, it.key(), ArgDiffKind::HallucinatedValue, it.value(), expected});
        }
    }
    return diffs;
}

struct Assignment {
    bool tool_bijection = false;       // calls map 1:1 onto nodes by tool name
    int fully_matched = 0;             // calls with zero diffs
    std::vector<ArgDiff> diffs;        // under the best pairing

    bool full() const { return tool_bijection && diffs.empty(); }
};

struct StepContext {
    std::vector<const InvocationNode*> nodes;
    std::vector<const ToolSpec*> specs;
};

// Exhaustive pairing search; steps are small (bounded by the enumeration
// node cap). Maximizes fully matched calls, then minimizes diff count.
void search_pairing(const std::vector<ToolCall>& calls, const StepContext& ctx,
                    const MatchPolicy& policy, std::size_t call_index,
                    std::vector<bool>& used, int fully, std::vector<ArgDiff>& diffs,
                    Assignment& best) {
    if (call_index == calls.size()) {
        if (!best.tool_bijection || fully > best.fully_matched ||
            (fully == best.fully_matched && diffs.size() < best.diffs.size())) {
            best.tool_bijection = true;
            best.fully_matched = fully;
            best.diffs = diffs;
        }
        return;
    }
    for (std::size_t n = 0; n < ctx.nodes.size(); ++n) {
        if (used[n] || ctx.nodes[n]->tool_name != calls[call_index].tool_name) continue;
        used[n] = true;
        auto call_diffs = diff_call(calls[call_index], *ctx.nodes[n], ctx.specs[n], policy);
        std::size_t before = diffs.size();
        diffs.insert(diffs.end(), call_diffs.begin(), call_diffs.end());
        search_pairing(calls, ctx, policy, call_index + 1, used,
                       fully + (call_diffs.empty() ? 1 : 0), diffs, best);
        diffs.resize(before);
        used[n] = false;
    }
}

Assignment assign_step(const std::vector<ToolCall>& calls, const PlanStep& step,
                       const NodeTable& nodes, const ToolTable& tools, const MatchPolicy& policy) {
    Assignment best;
    if (calls.size() != step.ids.size()) return best;

    StepContext ctx;
    for (int id : step.ids) {
        auto it = nodes.find(id);
        if (it == nodes.end()) return best;
        ctx.nodes.push_back(it->second);
        auto spec = tools.find(it->second->tool_name);
        ctx.specs.push_back(spec == tools.end() ? nullptr : spec->second);
    }

    std::vector<bool> used(ctx.nodes.size(), false);
    std::vector<ArgDiff> diffs;
    search_pairing(calls, ctx, policy, 0, used, 0, diffs, best);
    return best;
}

std::vector<std::string> sorted_tool_names(const std::vector<ToolCall>& calls) {
    std::vector<std::string> names;
    for (const auto& c : calls) names.push_back(c.tool_name);
    std::sort(names.begin(), names.end());
    return names;
}

std::vector<std::string> sorted_step_tools(const PlanStep& step, const NodeTable& nodes) {
    std::vector<std::string> names;
    for (int id : step.ids) {
        auto it = nodes.find(id);
        names.push_back(it == nodes.end() ? "?" : it->second->tool_name);
    }
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace

StepMatchResult match_step(const std::vector<ToolCall>& turn_calls,
                           const std::vector<PlanStep>& legal_steps,
                           const NodeTable& nodes,
                           const ToolTable& tools,
                           const MatchPolicy& policy) {
    StepMatchResult result;

    std::vector<std::pair<PlanStep, Assignment>> attempts;
    std::vector<PlanStep> full_matches;
    for (const auto& step : legal_steps) {
        Assignment a = assign_step(turn_calls, step, nodes, tools, policy);
        if (a.full()) full_matches.push_back(step);
        attempts.push_back({step, std::move(a)});
    }

    if (full_matches.size() > 1) {
        throw AmbiguousMatchError("turn matches " + std::to_string(full_matches.size()) +
                                  " legal steps; annotation is defective");
    }
    if (full_matches.size() == 1) {
        result.matched = full_matches.front();
        return result;
    }

    // Nearest candidate: prefer steps with a tool-name bijection, then the
    // most fully matched calls, then the fewest diffs; ties resolve to the
    // canonically first step.
    MismatchDetail detail;
    detail.got_tools = sorted_tool_names(turn_calls);

    const std::pair<PlanStep, Assignment>* best = nullptr;
    for (const auto& entry : attempts) {
        if (best == nullptr) {
            best = &entry;
            continue;
        }
        const Assignment& a = entry.second;
        const Assignment& b = best->second;
        if (a.tool_bijection != b.tool_bijection) {
            if (a.tool_bijection) best = &entry;
            continue;
        }
        if (a.tool_bijection && (a.fully_matched > b.fully_matched ||
                                 (a.fully_matched == b.fully_matched && a.diffs.size() < b.diffs.size()))) {
            best = &entry;
        }
    }

    if (best != nullptr) {
        detail.nearest = best->first;
        detail.expected_tools = sorted_step_tools(best->first, nodes);
        if (best->second.tool_bijection) {
            detail.arg_diffs = best->second.diffs;
        } else {
            detail.tool_mismatch = true;
        }
    } else {
        detail.tool_mismatch = true;
        detail.note = "no legal steps remain";
    }
    for (const auto& entry : attempts) detail.candidates.push_back(entry.first);

    result.mismatch = std::move(detail);
    return result;
}

ErrorClass classify_error(const MismatchDetail& detail) {
    if (detail.format_error) return ErrorClass::FormatError;
    if (detail.wrong_action_kind || detail.tool_mismatch) return ErrorClass::ToolError;

    bool unknown = false, hallucinated = false, wrong = false;
    for (const auto& d : detail.arg_diffs) {
        switch (d.kind) {
            case ArgDiffKind::UnknownName: unknown = true; break;
            case ArgDiffKind::HallucinatedValue: hallucinated = true; break;
            case ArgDiffKind::WrongValue:
            case ArgDiffKind::MissingArgument: wrong = true; break;
        }
    }
    if (unknown) return ErrorClass::ParamNameHallucination;
    if (hallucinated) return ErrorClass::ParamValueHallucination;
    if (wrong) return ErrorClass::ParamValueError;
    return ErrorClass::ToolError;
}

NonToolResult match_non_tool(const AgentAction& action, const Mission& mission,
                             const MatchPolicy& policy) {
    NonToolResult result;

    if (mission.action_type == ActionType::Chat) {
        if (action.kind == AgentAction::Kind::Chat) {
            result.passed = true;
        } else {
            result.reason = NonToolFailReason::WrongActionKind;
        }
        return result;
    }

    if (mission.action_type != ActionType::Clarify) {
        result.reason = NonToolFailReason::WrongActionKind;
        return result;
    }

    if (action.kind != AgentAction::Kind::Clarify) {
        result.reason = NonToolFailReason::WrongActionKind;
        return result;
    }

    MatchPolicy fold_policy = policy;
    fold_policy.string_case_insensitive = true;
    const std::string text = fold_string(action.text, fold_policy);

    const ClarifyGold* gold = mission.clarify_gold ? &*mission.clarify_gold : nullptr;
    if (gold == nullptr) {
        result.passed = true;  // nothing annotated to check
        return result;
    }

    for (const auto& param : gold->missing_params) {
        std::vector<std::string> surfaces{param};
        auto aliases = gold->param_aliases.find(param);
        if (aliases != gold->param_aliases.end()) {
            surfaces.insert(surfaces.end(), aliases->second.begin(), aliases->second.end());
        }
        bool mentioned = std::any_of(surfaces.begin(), surfaces.end(), [&](const std::string& s) {
            return text.find(fold_string(s, fold_policy)) != std::string::npos;
        });
        if (!mentioned) result.params_not_asked.push_back(param);
    }

    if (result.params_not_asked.empty()) {
        result.passed = true;
    } else {
        result.reason = NonToolFailReason::MissingParamNotAsked;
    }
    return result;
}

}  // namespace agenteval
