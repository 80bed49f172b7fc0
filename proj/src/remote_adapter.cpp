#include "agenteval/remote_adapter.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "agenteval/errors.hpp"

namespace agenteval {

namespace {

json parameter_schema(const ParameterSpec& p) {
    json schema = json::object();
    switch (p.kind) {
        case ParamKind::String: schema["type"] = "string"; break;
        case ParamKind::Integer: schema["type"] = "integer"; break;
        case ParamKind::Number: schema["type"] = "number"; break;
        case ParamKind::Boolean: schema["type"] = "boolean"; break;
        case ParamKind::Enum:
            schema["type"] = "string";
            schema["enum"] = p.enum_values;
            break;
        case ParamKind::Array:
            schema["type"] = "array";
            if (!p.items.empty()) schema["items"] = parameter_schema(p.items.front());
            break;
        case ParamKind::Object: {
            schema["type"] = "object";
            json props = json::object();
            json required = json::array();
            for (const auto& f : p.fields) {
                props[f.name] = parameter_schema(f);
                if (f.required) required.push_back(f.name);
            }
            schema["properties"] = props;
            if (!required.empty()) schema["required"] = required;
            break;
        }
    }
    if (!p.description.empty()) schema["description"] = p.description;
    if (p.default_value) schema["default"] = *p.default_value;
    return schema;
}

json history_to_messages(const SessionTranscript& history) {
    json messages = json::array();
    for (const auto& turn : history.turns) {
        switch (turn.speaker) {
            case Speaker::User:
                messages.push_back({{"role", "user"}, {"content", turn.payload.value("text", "")}});
                break;
            case Speaker::Agent: {
                const std::string kind = turn.payload.value("kind", "");
                if (kind == "tool_calls") {
                    json calls = json::array();
                    int index = 0;
                    for (const auto& c : turn.payload.value("calls", json::array())) {
                        calls.push_back(
                            {{"id", "call_" + std::to_string(index++)},
                             {"type", "function"},
                             {"function",
                              {{"name", c.value("tool", "")},
                               {"arguments", c.value("arguments", json::object()).dump()}}}});
                    }
                    messages.push_back(
                        {{"role", "assistant"}, {"content", nullptr}, {"tool_calls", calls}});
                } else {
                    messages.push_back(
                        {{"role", "assistant"}, {"content", turn.payload.value("text", "")}});
                }
                break;
            }
            case Speaker::Tool:
                messages.push_back({{"role", "tool"},
                                    {"content", turn.payload.value("response", "")},
                                    {"tool_call_id", "node_" + std::to_string(turn.payload.value("node", 0))}});
                break;
            case Speaker::AiSummary:
                messages.push_back({{"role", "assistant"}, {"content", turn.payload.value("text", "")}});
                break;
        }
    }
    return messages;
}

// Splits a full URL into {scheme://host[:port], path}.
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

json tool_spec_to_wire(const ToolSpec& spec) {
    json props = json::object();
    json required = json::array();
    for (const auto& p : spec.parameters) {
        props[p.name] = parameter_schema(p);
        if (p.required) required.push_back(p.name);
    }
    return {{"type", "function"},
            {"function",
             {{"name", spec.name},
              {"description", spec.description},
              {"parameters",
               {{"type", "object"}, {"properties", props}, {"required", required}}}}}};
}

json build_chat_request(const RemoteConfig& cfg, const TestCase& test_case,
                        const SessionTranscript& history) {
    json tools = json::array();
    for (const auto& t : test_case.tools) tools.push_back(tool_spec_to_wire(t));
    return {{"model", cfg.model_name},
            {"messages", history_to_messages(history)},
            {"tools", tools}};
}

AdapterResponse parse_chat_response(const std::string& body) {
    AdapterResponse resp;
    resp.raw_payload = body;

    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded()) return resp;

    const json* message = nullptr;
    if (doc.contains("choices") && doc.at("choices").is_array() && !doc.at("choices").empty()) {
        const json& choice = doc.at("choices").front();
        if (choice.contains("message")) message = &choice.at("message");
    }
    if (message == nullptr) return resp;

    if (message->contains("tool_calls") && message->at("tool_calls").is_array() &&
        !message->at("tool_calls").empty()) {
        std::vector<ToolCall> calls;
        for (const auto& tc : message->at("tool_calls")) {
            if (!tc.contains("function")) return resp;
            const json& fn = tc.at("function");
            ToolCall call;
            call.tool_name = fn.value("name", std::string());
            if (call.tool_name.empty()) return resp;

            // Arguments arrive either as a JSON-encoded string or inline.
            if (fn.contains("arguments") && fn.at("arguments").is_string()) {
                json args = json::parse(fn.at("arguments").get<std::string>(), nullptr, false);
                if (args.is_discarded() || !args.is_object()) return resp;
                call.arguments = args;
            } else if (fn.contains("arguments") && fn.at("arguments").is_object()) {
                call.arguments = fn.at("arguments");
            } else {
                return resp;
            }
            calls.push_back(std::move(call));
        }
        resp.action = AgentAction::tool_calls(std::move(calls));
        return resp;
    }

    if (message->contains("content") && message->at("content").is_string()) {
        resp.action = AgentAction::chat(message->at("content").get<std::string>());
        return resp;
    }
    return resp;
}

namespace {

class RemoteAdapter final : public AgentAdapter {
public:
    explicit RemoteAdapter(RemoteConfig cfg) : cfg_(std::move(cfg)) {}

    std::string name() const override {
        return cfg_.model_name.empty() ? "remote" : cfg_.model_name;
    }

    AdapterResponse next(const TestCase& test_case, const SessionTranscript& history) override {
        const json request = build_chat_request(cfg_, test_case, history);
        const auto [base, path] = split_url(cfg_.endpoint);

        httplib::Headers headers;
        if (!cfg_.auth_env.empty()) {
            if (const char* token = std::getenv(cfg_.auth_env.c_str())) {
                headers.emplace("Authorization", std::string("Bearer ") + token);
            }
        }

        std::string last_error;
        for (int attempt = 0; attempt <= cfg_.retry_budget; ++attempt) {
            httplib::Client client(base);
            client.set_connection_timeout(cfg_.timeout_seconds, 0);
            client.set_read_timeout(cfg_.timeout_seconds, 0);

            auto res = client.Post(path, headers, request.dump(), "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200) {
                last_error = "http status " + std::to_string(res->status);
                continue;
            }
            // A well-formed HTTP reply with an unparseable body is the
            // model's answer, not a transport fault: no retry.
            return parse_chat_response(res->body);
        }
        throw AdapterError("remote adapter failed after " + std::to_string(cfg_.retry_budget + 1) +
                           " attempts: " + last_error);
    }

private:
    RemoteConfig cfg_;
};

}  // namespace

std::unique_ptr<AgentAdapter> remote_adapter(const RemoteConfig& cfg) {
    return std::make_unique<RemoteAdapter>(cfg);
}

AdapterFactory remote_adapter_factory(const RemoteConfig& cfg) {
    return [cfg](const TestCase&) { return remote_adapter(cfg); };
}

}  // namespace agenteval
