#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "agenteval/dataset.hpp"
#include "agenteval/errors.hpp"
#include "agenteval/metrics.hpp"

using namespace agenteval;

#ifndef AGENTEVAL_DATA_DIR
#define AGENTEVAL_DATA_DIR "data"
#endif

namespace {

const char* kFixture = AGENTEVAL_DATA_DIR "/cases.json";

std::string minimal_case_json(const std::string& extra_mission_fields) {
    return R"({
      "version": "1",
      "cases": [
        {
          "id": "c1",
          "tools": [
            {"name": "t", "parameters": [{"name": "x", "kind": "string", "required": true}]}
          ],
          "missions": [
            {
              "query": "q",
              "action_type": "single",
              "relation_type": "none",
              "graph": {
                "nodes": [
                  {"id": 0, "tool": "t", "arguments": {"x": "v"},
                   "observation": {"status_code": 200, "response": "ok"}}
                ],
                "edges": []
              },
              "ai_summary": "s")" +
           extra_mission_fields + R"(
            }
          ]
        }
      ]
    })";
}

}  // namespace

TEST_CASE("bundled fixture loads, validates cleanly, and covers the basics") {
    DatasetFile ds = load_dataset(kFixture);
    CHECK(ds.cases.size() == 16);
    CHECK(validate_dataset(ds).empty());

    // Sorted by id.
    for (std::size_t i = 1; i < ds.cases.size(); ++i) {
        CHECK(ds.cases[i - 1].id < ds.cases[i].id);
    }

    // All six action types and all three relation kinds appear.
    std::set<ActionType> actions;
    std::set<RelationType> relations;
    for (const auto& tc : ds.cases) {
        for (const auto& m : tc.missions) {
            actions.insert(m.action_type);
            relations.insert(m.relation_type);
        }
    }
    CHECK(actions.size() == 6);
    CHECK(relations.count(RelationType::Implicit) == 1);
    CHECK(relations.count(RelationType::Ellipsis) == 1);
    CHECK(relations.count(RelationType::LongTermMemory) == 1);

    // All four length-1 combos covered.
    auto report = coverage_report(ds, 4);
    CHECK(report.lengths[0].missing.empty());
    CHECK(report.lengths[0].covered.size() == 4);
}

TEST_CASE("round trip is byte stable") {
    DatasetFile ds = load_dataset(kFixture);
    std::string once = serialize_dataset(ds);
    DatasetFile reloaded = parse_dataset(once);
    CHECK(serialize_dataset(reloaded) == once);
    CHECK(reloaded.cases.size() == ds.cases.size());
}

TEST_CASE("empty dataset is valid") {
    DatasetFile ds = parse_dataset(R"({"version": "1", "cases": []})");
    CHECK(ds.cases.empty());
    CHECK(validate_dataset(ds).empty());
}

TEST_CASE("load errors: parse, schema, reference") {
    CHECK_THROWS_AS(parse_dataset("{not json"), ParseError);
    CHECK_THROWS_AS(parse_dataset(R"({"version": "0.9", "cases": []})"), ParseError);

    // Unknown tool referenced by a node.
    std::string bad = minimal_case_json("");
    auto pos = bad.find("\"tool\": \"t\"");
    bad.replace(pos, std::string("\"tool\": \"t\"").size(), "\"tool\": \"nosuch\"");
    CHECK_THROWS_AS(parse_dataset(bad), ReferenceError);

    // Missing required mission field.
    CHECK_THROWS_AS(parse_dataset(R"({
      "version": "1",
      "cases": [{"id": "c", "tools": [], "missions": [{"action_type": "chat"}]}]
    })"),
                    SchemaError);

    // Parameter with both default and required.
    CHECK_THROWS_AS(parse_dataset(R"({
      "version": "1",
      "cases": [{
        "id": "c",
        "tools": [{"name": "t", "parameters": [
          {"name": "x", "kind": "string", "required": true, "default": "v"}]}],
        "missions": []
      }]
    })"),
                    SchemaError);
}

TEST_CASE("validation violations are reported as data") {
    SUBCASE("action type mismatch") {
        std::string text = minimal_case_json("");
        auto pos = text.find("\"single\"");
        text.replace(pos, 8, "\"multi_parallel\"");
        DatasetFile ds = parse_dataset(text);
        auto violations = validate_dataset(ds);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].code == "ActionTypeMismatch");
        CHECK(violations[0].case_id == "c1");
    }

    SUBCASE("cyclic gold graph") {
        DatasetFile ds = parse_dataset(R"({
          "version": "1",
          "cases": [{
            "id": "c1",
            "tools": [{"name": "t", "parameters": []}],
            "missions": [{
              "query": "q", "action_type": "multi_serial", "relation_type": "none",
              "graph": {
                "nodes": [
                  {"id": 0, "tool": "t", "arguments": {}, "observation": {"status_code": 200, "response": "a"}},
                  {"id": 1, "tool": "t", "arguments": {}, "observation": {"status_code": 200, "response": "b"}}
                ],
                "edges": [[0, 1], [1, 0]]
              },
              "ai_summary": "s"
            }]
          }]
        })");
        auto violations = validate_dataset(ds);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].code == "CycleDetected");
    }

    SUBCASE("relation ordering rules") {
        std::string text = minimal_case_json("");
        auto pos = text.find("\"none\"");
        text.replace(pos, 6, "\"ellipsis\"");
        auto violations = validate_dataset(parse_dataset(text));
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].code == "RelationFirstNotNone");
    }

    SUBCASE("missing observation") {
        std::string text = minimal_case_json("");
        auto pos = text.find(R"("observation": {"status_code": 200, "response": "ok"})");
        text.replace(pos, std::string(R"("observation": {"status_code": 200, "response": "ok"})").size(),
                     R"("observation": {"status_code": 0, "response": ""})");
        auto violations = validate_dataset(parse_dataset(text));
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].code == "MissingObservation");
    }

    SUBCASE("clarify gold presence rules") {
        std::string text = minimal_case_json(R"(,
              "clarify": {"missing_params": ["x"], "user_answer": "v"})");
        auto violations = validate_dataset(parse_dataset(text));
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].code == "ClarifyGoldRule");
    }
}

TEST_CASE("switchspace sizes are 4, 16, 64, 256 and 340 cumulative") {
    CHECK(generate_switchspace(1).size() == 4);
    CHECK(generate_switchspace(2).size() == 16);
    CHECK(generate_switchspace(3).size() == 64);
    CHECK(generate_switchspace(4).size() == 256);
    CHECK(generate_switchspace(4, true).size() == 340);
    CHECK_THROWS_AS(generate_switchspace(0), Error);
    CHECK_THROWS_AS(generate_switchspace(7), Error);

    // Lexicographic order with the fixed alphabet.
    auto combos = generate_switchspace(1);
    CHECK(combos[0].to_string() == "single");
    CHECK(combos[1].to_string() == "multi");
    CHECK(combos[2].to_string() == "chat");
    CHECK(combos[3].to_string() == "clarify");
}

TEST_CASE("coverage treats duplicate combos as one") {
    DatasetFile ds = parse_dataset(R"({
      "version": "1",
      "cases": [
        {"id": "a", "tools": [], "missions": [
          {"query": "q", "action_type": "chat", "relation_type": "none",
           "graph": {"nodes": [], "edges": []}, "gold_chat": "x", "ai_summary": "s"}]},
        {"id": "b", "tools": [], "missions": [
          {"query": "q", "action_type": "chat", "relation_type": "none",
           "graph": {"nodes": [], "edges": []}, "gold_chat": "x", "ai_summary": "s"}]}
      ]
    })");
    auto report = coverage_report(ds, 1);
    CHECK(report.lengths[0].covered.size() == 1);
    CHECK(report.lengths[0].missing.size() == 3);
}

TEST_CASE("empty dataset coverage is all missing") {
    DatasetFile ds = parse_dataset(R"({"version": "1", "cases": []})");
    auto report = coverage_report(ds, 2);
    CHECK(report.lengths[0].covered.empty());
    CHECK(report.lengths[0].missing.size() == 4);
    CHECK(report.lengths[1].missing.size() == 16);
    CHECK(msss(ds, 4) == 0.0);
}
