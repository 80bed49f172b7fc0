#include "agenteval/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "agenteval/errors.hpp"
#include "agenteval/plan_enum.hpp"

namespace agenteval {

const TestCase* DatasetFile::find_case(std::string_view id) const {
    for (const auto& c : cases) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

std::string Combo::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i > 0) out += ">";
        out += action_class_to_string(seq[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

const json& require_field(const json& obj, const char* field, const std::string& case_id) {
    auto it = obj.find(field);
    if (it == obj.end()) throw SchemaError(case_id, field, "missing");
    return *it;
}

std::string require_string(const json& obj, const char* field, const std::string& case_id) {
    const json& v = require_field(obj, field, case_id);
    if (!v.is_string()) throw SchemaError(case_id, field, "expected a string");
    return v.get<std::string>();
}

ParameterSpec parse_parameter(const json& doc, const std::string& case_id, const std::string& tool);

std::vector<ParameterSpec> parse_parameter_list(const json& doc, const std::string& case_id,
                                                const std::string& tool, const char* field) {
    if (!doc.is_array()) throw SchemaError(case_id, field, "expected an array");
    std::vector<ParameterSpec> out;
    std::set<std::string> names;
    for (const auto& p : doc) {
        ParameterSpec spec = parse_parameter(p, case_id, tool);
        if (!names.insert(spec.name).second) {
            throw SchemaError(case_id, field, "duplicate parameter name '" + spec.name + "'");
        }
        out.push_back(std::move(spec));
    }
    return out;
}

ParameterSpec parse_parameter(const json& doc, const std::string& case_id, const std::string& tool) {
    if (!doc.is_object()) throw SchemaError(case_id, "parameters", "expected an object");
    ParameterSpec spec;
    spec.name = require_string(doc, "name", case_id);
    const std::string field_ctx = tool + "." + spec.name;

    auto kind = param_kind_from_string(require_string(doc, "kind", case_id));
    if (!kind) throw SchemaError(case_id, field_ctx, "unknown parameter kind");
    spec.kind = *kind;

    spec.required = doc.value("required", false);
    if (doc.contains("default")) spec.default_value = doc.at("default");
    spec.description = doc.value("description", std::string());
    if (doc.contains("enum")) {
        for (const auto& v : doc.at("enum")) spec.enum_values.push_back(v);
    }
    if (doc.contains("items")) {
        spec.items.push_back(parse_parameter(doc.at("items"), case_id, field_ctx));
    }
    if (doc.contains("fields")) {
        spec.fields = parse_parameter_list(doc.at("fields"), case_id, field_ctx, "fields");
    }
    if (doc.contains("aliases")) {
        for (const auto& a : doc.at("aliases")) spec.aliases.push_back(a.get<std::string>());
    }

    if (spec.kind == ParamKind::Enum && spec.enum_values.empty()) {
        throw SchemaError(case_id, field_ctx, "enum kind requires at least one value");
    }
    if (spec.default_value && spec.required) {
        throw SchemaError(case_id, field_ctx, "a parameter with a default cannot be required");
    }
    return spec;
}

ToolSpec parse_tool(const json& doc, const std::string& case_id) {
    ToolSpec tool;
    tool.name = require_string(doc, "name", case_id);
    if (tool.name.empty()) throw SchemaError(case_id, "tools.name", "tool name is empty");
    tool.description = doc.value("description", std::string());
    tool.parameters =
        parse_parameter_list(require_field(doc, "parameters", case_id), case_id, tool.name, "parameters");
    return tool;
}

DependencyGraph parse_graph(const json& doc, const std::string& case_id) {
    DependencyGraph graph;
    if (!doc.is_object()) throw SchemaError(case_id, "graph", "expected an object");

    for (const auto& n : doc.value("nodes", json::array())) {
        InvocationNode node;
        if (!n.contains("id") || !n.at("id").is_number_integer()) {
            throw SchemaError(case_id, "graph.nodes.id", "expected an integer");
        }
        node.id = n.at("id").get<int>();
        node.tool_name = require_string(n, "tool", case_id);
        node.gold_arguments = n.value("arguments", json::object());
        if (!node.gold_arguments.is_object()) {
            throw SchemaError(case_id, "graph.nodes.arguments", "expected an object");
        }
        if (n.contains("alternates")) {
            for (auto it = n.at("alternates").begin(); it != n.at("alternates").end(); ++it) {
                std::vector<json> values;
                for (const auto& v : it.value()) values.push_back(v);
                node.alternates[it.key()] = std::move(values);
            }
        }
        // Absence is a semantic violation reported by validate_dataset, not
        // a load failure.
        if (n.contains("observation")) {
            const json& obs = n.at("observation");
            node.observation.status_code = obs.value("status_code", 0);
            node.observation.response = obs.value("response", std::string());
        }
        graph.nodes.push_back(std::move(node));
    }

    for (const auto& e : doc.value("edges", json::array())) {
        if (!e.is_array() || e.size() != 2) {
            throw SchemaError(case_id, "graph.edges", "expected [from, to] pairs");
        }
        graph.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return graph;
}

Mission parse_mission(const json& doc, int index, const std::string& case_id) {
    Mission m;
    m.index = index;
    m.query = require_string(doc, "query", case_id);

    auto action = action_type_from_string(require_string(doc, "action_type", case_id));
    if (!action) throw SchemaError(case_id, "action_type", "unknown action type");
    m.action_type = *action;

    auto relation = relation_type_from_string(require_string(doc, "relation_type", case_id));
    if (!relation) throw SchemaError(case_id, "relation_type", "unknown relation type");
    m.relation_type = *relation;

    if (doc.contains("graph")) m.graph = parse_graph(doc.at("graph"), case_id);

    if (doc.contains("clarify")) {
        const json& c = doc.at("clarify");
        ClarifyGold gold;
        for (const auto& p : require_field(c, "missing_params", case_id)) {
            gold.missing_params.push_back(p.get<std::string>());
        }
        if (c.contains("param_aliases")) {
            for (auto it = c.at("param_aliases").begin(); it != c.at("param_aliases").end(); ++it) {
                std::vector<std::string> aliases;
                for (const auto& a : it.value()) aliases.push_back(a.get<std::string>());
                gold.param_aliases[it.key()] = std::move(aliases);
            }
        }
        gold.user_answer = require_string(c, "user_answer", case_id);
        m.clarify_gold = std::move(gold);
    }

    if (doc.contains("gold_chat")) m.gold_chat = doc.at("gold_chat").get<std::string>();
    m.ai_summary = require_string(doc, "ai_summary", case_id);
    return m;
}

TestCase parse_case(const json& doc) {
    if (!doc.is_object()) throw SchemaError("?", "cases", "expected an object");
    TestCase tc;
    tc.id = require_string(doc, "id", "?");

    std::set<std::string> tool_names;
    for (const auto& t : require_field(doc, "tools", tc.id)) {
        ToolSpec tool = parse_tool(t, tc.id);
        if (!tool_names.insert(tool.name).second) {
            throw SchemaError(tc.id, "tools", "duplicate tool name '" + tool.name + "'");
        }
        tc.tools.push_back(std::move(tool));
    }

    const json& missions = require_field(doc, "missions", tc.id);
    if (!missions.is_array() || missions.empty() || missions.size() > 4) {
        throw SchemaError(tc.id, "missions", "expected 1 to 4 missions");
    }
    int index = 0;
    for (const auto& m : missions) {
        Mission mission = parse_mission(m, index++, tc.id);
        for (const auto& node : mission.graph.nodes) {
            if (std::none_of(tc.tools.begin(), tc.tools.end(),
                             [&](const ToolSpec& t) { return t.name == node.tool_name; })) {
                throw ReferenceError(tc.id, "node " + std::to_string(node.id) +
                                                " references unknown tool '" + node.tool_name + "'");
            }
        }
        tc.missions.push_back(std::move(mission));
    }
    return tc;
}

}  // namespace

DatasetFile parse_dataset(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin, e.what());
    }
    if (!doc.is_object()) throw ParseError(origin, "top level must be an object");

    DatasetFile ds;
    ds.version = doc.value("version", std::string());
    if (ds.version != kDatasetVersion) {
        throw ParseError(origin, "unrecognized format version '" + ds.version + "'");
    }

    std::set<std::string> ids;
    for (const auto& c : doc.value("cases", json::array())) {
        TestCase tc = parse_case(c);
        if (!ids.insert(tc.id).second) throw SchemaError(tc.id, "id", "duplicate case id");
        ds.cases.push_back(std::move(tc));
    }
    std::sort(ds.cases.begin(), ds.cases.end(),
              [](const TestCase& a, const TestCase& b) { return a.id < b.id; });
    return ds;
}

DatasetFile load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str(), path);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json parameter_to_json(const ParameterSpec& p) {
    json out = json::object();
    out["name"] = p.name;
    out["kind"] = std::string(param_kind_to_string(p.kind));
    out["required"] = p.required;
    if (p.default_value) out["default"] = *p.default_value;
    if (!p.description.empty()) out["description"] = p.description;
    if (!p.enum_values.empty()) out["enum"] = p.enum_values;
    if (!p.items.empty()) out["items"] = parameter_to_json(p.items.front());
    if (!p.fields.empty()) {
        json fields = json::array();
        for (const auto& f : p.fields) fields.push_back(parameter_to_json(f));
        out["fields"] = fields;
    }
    if (!p.aliases.empty()) out["aliases"] = p.aliases;
    return out;
}

json graph_to_json(const DependencyGraph& g) {
    json nodes = json::array();
    for (const auto& n : g.nodes) {
        json node = json::object();
        node["id"] = n.id;
        node["tool"] = n.tool_name;
        node["arguments"] = n.gold_arguments;
        if (!n.alternates.empty()) {
            json alts = json::object();
            for (const auto& [param, values] : n.alternates) alts[param] = values;
            node["alternates"] = alts;
        }
        node["observation"] = {{"status_code", n.observation.status_code},
                               {"response", n.observation.response}};
        nodes.push_back(node);
    }
    json edges = json::array();
    for (const auto& [from, to] : g.edges) edges.push_back(json::array({from, to}));
    return json{{"nodes", nodes}, {"edges", edges}};
}

json mission_to_json(const Mission& m) {
    json out = json::object();
    out["query"] = m.query;
    out["action_type"] = std::string(action_type_to_string(m.action_type));
    out["relation_type"] = std::string(relation_type_to_string(m.relation_type));
    out["graph"] = graph_to_json(m.graph);
    if (m.clarify_gold) {
        json c = json::object();
        c["missing_params"] = m.clarify_gold->missing_params;
        if (!m.clarify_gold->param_aliases.empty()) {
            json aliases = json::object();
            for (const auto& [param, list] : m.clarify_gold->param_aliases) aliases[param] = list;
            c["param_aliases"] = aliases;
        }
        c["user_answer"] = m.clarify_gold->user_answer;
        out["clarify"] = c;
    }
    if (m.gold_chat) out["gold_chat"] = *m.gold_chat;
    out["ai_summary"] = m.ai_summary;
    return out;
}

}  // namespace

std::string serialize_dataset(const DatasetFile& ds) {
    json cases = json::array();
    for (const auto& tc : ds.cases) {
        json c = json::object();
        c["id"] = tc.id;
        json tools = json::array();
        for (const auto& t : tc.tools) {
            json tool = json::object();
            tool["name"] = t.name;
            if (!t.description.empty()) tool["description"] = t.description;
            json params = json::array();
            for (const auto& p : t.parameters) params.push_back(parameter_to_json(p));
            tool["parameters"] = params;
            tools.push_back(tool);
        }
        c["tools"] = tools;
        json missions = json::array();
        for (const auto& m : tc.missions) missions.push_back(mission_to_json(m));
        c["missions"] = missions;
        cases.push_back(c);
    }
    json doc{{"version", ds.version.empty() ? kDatasetVersion : ds.version}, {"cases", cases}};
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Validation

std::vector<DatasetViolation> validate_dataset(const DatasetFile& ds) {
    std::vector<DatasetViolation> out;

    for (const auto& tc : ds.cases) {
        for (const auto& m : tc.missions) {
            const std::string where = "mission " + std::to_string(m.index);
            const bool is_chat = m.action_type == ActionType::Chat;
            const bool is_clarify = m.action_type == ActionType::Clarify;

            if (m.index == 0 && m.relation_type != RelationType::None) {
                out.push_back({tc.id, "RelationFirstNotNone",
                               where + ": the first mission must have relation 'none'"});
            }
            if (m.index > 0 && m.relation_type == RelationType::None) {
                out.push_back({tc.id, "RelationLaterNone",
                               where + ": later missions must declare a relation type"});
            }

            if (is_clarify != m.clarify_gold.has_value()) {
                out.push_back({tc.id, "ClarifyGoldRule",
                               where + ": clarify gold must be present exactly for clarify missions"});
            }
            if (is_chat != m.gold_chat.has_value()) {
                out.push_back({tc.id, "GoldChatRule",
                               where + ": gold chat must be present exactly for chat missions"});
            }
            if (is_chat != m.graph.empty()) {
                out.push_back({tc.id, "ChatGraphRule",
                               where + ": the graph must be empty exactly for chat missions"});
                continue;
            }

            auto structural = m.graph.structural_violations();
            for (const auto& s : structural) {
                out.push_back({tc.id, "GraphStructure", where + ": " + s});
            }
            if (!structural.empty()) continue;

            for (const auto& node : m.graph.nodes) {
                if (node.observation.status_code == 0 && node.observation.response.empty()) {
                    out.push_back({tc.id, "MissingObservation",
                                   where + ": node " + std::to_string(node.id) +
                                       " has no recorded observation"});
                }
            }

            try {
                ActionType derived = classify_action_type(m.graph, is_clarify, is_chat);
                if (derived != m.action_type) {
                    out.push_back({tc.id, "ActionTypeMismatch",
                                   where + ": labeled '" +
                                       std::string(action_type_to_string(m.action_type)) +
                                       "' but graph shape implies '" +
                                       std::string(action_type_to_string(derived)) + "'"});
                }
            } catch (const CycleError&) {
                out.push_back({tc.id, "CycleDetected", where + ": gold graph contains a cycle"});
            } catch (const Error& e) {
                out.push_back({tc.id, "GraphStructure", where + ": " + e.what()});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Switching space

namespace {

constexpr ActionClass kAlphabet[] = {ActionClass::Single, ActionClass::Multi, ActionClass::Chat,
                                     ActionClass::Clarify};

void append_length(std::vector<Combo>& out, int n) {
    // Counting in base 4 with the most significant position first keeps the
    // output lexicographic.
    std::vector<int> digits(static_cast<std::size_t>(n), 0);
    while (true) {
        Combo combo;
        for (int d : digits) combo.seq.push_back(kAlphabet[d]);
        out.push_back(std::move(combo));

        int pos = n - 1;
        while (pos >= 0 && digits[pos] == 3) digits[pos--] = 0;
        if (pos < 0) break;
        digits[pos]++;
    }
}

}  // namespace

std::vector<Combo> generate_switchspace(int n, bool cumulative) {
    if (n < 1 || n > 6) throw Error("switchspace length must be in [1, 6]");
    std::vector<Combo> out;
    for (int len = cumulative ? 1 : n; len <= n; ++len) append_length(out, len);
    return out;
}

std::vector<Combo> dataset_combos(const DatasetFile& ds) {
    std::set<Combo> seen;
    for (const auto& tc : ds.cases) seen.insert(Combo{tc.combo_collapsed()});
    return {seen.begin(), seen.end()};
}

CoverageReport coverage_report(const DatasetFile& ds, int max_n) {
    CoverageReport report;
    const std::vector<Combo> present = dataset_combos(ds);

    for (int len = 1; len <= max_n; ++len) {
        CoverageLength row;
        row.length = len;
        std::set<Combo> covered;
        for (const auto& c : present) {
            if (static_cast<int>(c.seq.size()) == len) covered.insert(c);
        }
        for (const auto& c : generate_switchspace(len)) {
            (covered.count(c) ? row.covered : row.missing).push_back(c);
        }
        report.lengths.push_back(std::move(row));
    }
    return report;
}

}  // namespace agenteval
