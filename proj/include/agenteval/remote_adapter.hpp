#pragma once
// Remote agent adapter speaking the JSON-over-HTTP chat-completion protocol
// with tool support: dialogue history maps to a messages array, tool specs
// to a tools array; tool-call responses parse back into agent actions.

#include <memory>
#include <string>

#include "agenteval/runner.hpp"

namespace agenteval {

struct RemoteConfig {
    std::string endpoint;      // full URL, e.g. http://127.0.0.1:8089/v1/chat/completions
    std::string model_name;
    std::string auth_env;      // environment variable holding the bearer token; empty = none
    int timeout_seconds = 30;
    int retry_budget = 2;      // transport retries per turn
};

// Builds the wire request for a case and history. Exposed for tests.
json build_chat_request(const RemoteConfig& cfg, const TestCase& test_case, const SessionTranscript& history);

// Parses one chat-completion response body. Tool calls become
// AgentAction::ToolCalls, plain text becomes Chat; anything unparseable
// yields a response without an action (a format-error turn).
AdapterResponse parse_chat_response(const std::string& body);

// JSON schema fragment for one tool, as published to the endpoint.
json tool_spec_to_wire(const ToolSpec& spec);

std::unique_ptr<AgentAdapter> remote_adapter(const RemoteConfig& cfg);
AdapterFactory remote_adapter_factory(const RemoteConfig& cfg);

}  // namespace agenteval
