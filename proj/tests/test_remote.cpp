#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <memory>
#include <thread>

#include <httplib.h>

#include "agenteval/dataset.hpp"
#include "agenteval/errors.hpp"
#include "agenteval/remote_adapter.hpp"
#include "agenteval/runner.hpp"

using namespace agenteval;

namespace {

// Three single-mission cases exercised against the stub endpoint: a clean
// tool call, a malformed-arguments reply, and a flaky route that needs
// retries.
const char* kRemoteDataset = R"({
  "version": "1",
  "cases": [
    {
      "id": "remote_01_ok",
      "tools": [
        {"name": "get_weather", "parameters": [
          {"name": "city", "kind": "string", "required": true}]}
      ],
      "missions": [
        {
          "query": "Weather in Paris?",
          "action_type": "single",
          "relation_type": "none",
          "graph": {
            "nodes": [
              {"id": 0, "tool": "get_weather", "arguments": {"city": "Paris"},
               "observation": {"status_code": 200, "response": "18 C"}}
            ],
            "edges": []
          },
          "ai_summary": "Paris is 18 C."
        }
      ]
    },
    {
      "id": "remote_02_malformed",
      "tools": [
        {"name": "get_weather", "parameters": [
          {"name": "city", "kind": "string", "required": true}]}
      ],
      "missions": [
        {
          "query": "Weather in Rome?",
          "action_type": "single",
          "relation_type": "none",
          "graph": {
            "nodes": [
              {"id": 0, "tool": "get_weather", "arguments": {"city": "Rome"},
               "observation": {"status_code": 200, "response": "25 C"}}
            ],
            "edges": []
          },
          "ai_summary": "Rome is 25 C."
        }
      ]
    },
    {
      "id": "remote_03_flaky",
      "tools": [
        {"name": "get_weather", "parameters": [
          {"name": "city", "kind": "string", "required": true}]}
      ],
      "missions": [
        {
          "query": "Weather in Oslo?",
          "action_type": "single",
          "relation_type": "none",
          "graph": {
            "nodes": [
              {"id": 0, "tool": "get_weather", "arguments": {"city": "Oslo"},
               "observation": {"status_code": 200, "response": "9 C"}}
            ],
            "edges": []
          },
          "ai_summary": "Oslo is 9 C."
        }
      ]
    }
  ]
})";

std::string tool_call_reply(const std::string& city) {
    json reply = {{"choices",
                   json::array({{{"message",
                                  {{"role", "assistant"},
                                   {"content", nullptr},
                                   {"tool_calls",
                                    json::array({{{"id", "call_0"},
                                                  {"type", "function"},
                                                  {"function",
                                                   {{"name", "get_weather"},
                                                    {"arguments", json({{"city", city}}).dump()}}}}})}}}}})}};
    return reply.dump();
}

struct StubServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> flaky_hits{0};
    std::atomic<int> auth_seen{0};

    StubServer() {
        server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            if (req.has_header("Authorization")) auth_seen++;

            json body = json::parse(req.body, nullptr, false);
            REQUIRE_FALSE(body.is_discarded());
            const std::string text = body.dump();

            if (text.find("Paris") != std::string::npos) {
                res.set_content(tool_call_reply("Paris"), "application/json");
                return;
            }
            if (text.find("Rome") != std::string::npos) {
                // Tool call with arguments that are not valid JSON.
                json reply = {{"choices",
                               json::array({{{"message",
                                              {{"role", "assistant"},
                                               {"tool_calls",
                                                json::array({{{"type", "function"},
                                                              {"function",
                                                               {{"name", "get_weather"},
                                                                {"arguments", "{{{broken"}}}}})}}}}})}};
                res.set_content(reply.dump(), "application/json");
                return;
            }
            if (text.find("Oslo") != std::string::npos) {
                // Two transport-level failures, then success.
                if (flaky_hits.fetch_add(1) < 2) {
                    res.status = 503;
                    res.set_content("unavailable", "text/plain");
                    return;
                }
                res.set_content(tool_call_reply("Oslo"), "application/json");
                return;
            }
            res.status = 404;
        });

        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~StubServer() {
        server.stop();
        if (thread.joinable()) thread.join();
    }

    RemoteConfig config() const {
        RemoteConfig cfg;
        cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
        cfg.model_name = "stub-model";
        cfg.timeout_seconds = 5;
        cfg.retry_budget = 3;
        return cfg;
    }
};

}  // namespace

TEST_CASE("wire request carries messages and tool schemas") {
    DatasetFile ds = parse_dataset(kRemoteDataset);
    const TestCase& tc = ds.cases[0];

    SessionTranscript history;
    history.case_id = tc.id;
    history.turns.push_back({0, Speaker::User, {{"text", "Weather in Paris?"}}, false});

    RemoteConfig cfg;
    cfg.model_name = "m";
    json req = build_chat_request(cfg, tc, history);
    CHECK(req["model"] == "m");
    REQUIRE(req["messages"].size() == 1);
    CHECK(req["messages"][0]["role"] == "user");
    REQUIRE(req["tools"].size() == 1);
    CHECK(req["tools"][0]["function"]["name"] == "get_weather");
    CHECK(req["tools"][0]["function"]["parameters"]["required"][0] == "city");
}

TEST_CASE("response parsing: tool calls, text, malformed") {
    auto tool = parse_chat_response(tool_call_reply("Paris"));
    REQUIRE(tool.action.has_value());
    REQUIRE(tool.action->kind == AgentAction::Kind::ToolCalls);
    REQUIRE(tool.action->calls.size() == 1);
    CHECK(tool.action->calls[0].tool_name == "get_weather");
    CHECK(tool.action->calls[0].arguments["city"] == "Paris");

    auto text = parse_chat_response(R"({"choices": [{"message": {"content": "hello there"}}]})");
    REQUIRE(text.action.has_value());
    CHECK(text.action->kind == AgentAction::Kind::Chat);
    CHECK(text.action->text == "hello there");

    CHECK_FALSE(parse_chat_response("{{{").action.has_value());
    CHECK_FALSE(parse_chat_response(R"({"choices": []})").action.has_value());
    CHECK_FALSE(parse_chat_response(
                    R"({"choices": [{"message": {"tool_calls": [{"function":
                        {"name": "f", "arguments": "not json"}}]}}]})")
                    .action.has_value());
}

TEST_CASE("full run against the stub server") {
    StubServer stub;
    DatasetFile ds = parse_dataset(kRemoteDataset);

    RunConfig cfg;
    cfg.retry_budget = 3;
    auto batch = evaluate_dataset_serial(ds, remote_adapter_factory(stub.config()), cfg);
    REQUIRE(batch.outputs.size() == 3);

    const auto& ok = batch.outputs[0].result;
    CHECK(ok.case_id == "remote_01_ok");
    CHECK_FALSE(ok.unscored);
    CHECK(ok.all_passed);

    const auto& malformed = batch.outputs[1].result;
    CHECK_FALSE(malformed.unscored);
    CHECK_FALSE(malformed.all_passed);
    REQUIRE(malformed.mission_results[0].error.has_value());
    CHECK(*malformed.mission_results[0].error == ErrorClass::FormatError);

    const auto& flaky = batch.outputs[2].result;
    CHECK_FALSE(flaky.unscored);
    CHECK(flaky.all_passed);  // two 503s consumed from the retry budget
    CHECK(stub.flaky_hits.load() >= 3);
}

TEST_CASE("auth header comes from the named environment variable") {
    StubServer stub;
    DatasetFile ds = parse_dataset(kRemoteDataset);
    ds.cases.resize(1);

    setenv("AGENTEVAL_TEST_TOKEN", "sekrit", 1);
    RemoteConfig rc = stub.config();
    rc.auth_env = "AGENTEVAL_TEST_TOKEN";

    auto batch = evaluate_dataset_serial(ds, remote_adapter_factory(rc), RunConfig{});
    CHECK(batch.outputs[0].result.all_passed);
    CHECK(stub.auth_seen.load() > 0);
    unsetenv("AGENTEVAL_TEST_TOKEN");
}

TEST_CASE("unreachable endpoint exhausts retries and the case is unscored") {
    DatasetFile ds = parse_dataset(kRemoteDataset);
    ds.cases.resize(1);

    RemoteConfig rc;
    rc.endpoint = "http://127.0.0.1:9/v1/chat/completions";  // discard port, nothing listens
    rc.model_name = "m";
    rc.timeout_seconds = 1;
    rc.retry_budget = 1;

    auto batch = evaluate_dataset_serial(ds, remote_adapter_factory(rc), RunConfig{});
    CHECK(batch.outputs[0].result.unscored);
}
