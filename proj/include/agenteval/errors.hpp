#pragma once
// Exception hierarchy for the evaluation engine.
//
// Diagnostics that describe bad *data* (dataset violations, schema
// mismatches found during matching) travel as plain structs; exceptions
// are reserved for conditions that make an operation impossible.

#include <stdexcept>
#include <string>

namespace agenteval {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Dependency graph contains a cycle; no execution path exists.
struct CycleError : Error {
    explicit CycleError(const std::string& msg = "dependency graph contains a cycle")
        : Error(msg) {}
};

// Structurally broken graph: dangling edge endpoint, duplicate node id, ...
struct GraphError : Error {
    explicit GraphError(const std::string& msg) : Error(msg) {}
};

// Enumeration would exceed the configured node or path cap. Hard error by
// design: metric correctness depends on the path set being complete.
struct LimitError : Error {
    explicit LimitError(const std::string& msg) : Error(msg) {}
};

// Dataset file is not valid JSON.
struct ParseError : Error {
    ParseError(const std::string& path, const std::string& detail)
        : Error("parse error in " + path + ": " + detail), path(path) {}
    std::string path;
};

// Dataset JSON parsed but a field is missing or of the wrong shape.
struct SchemaError : Error {
    SchemaError(const std::string& case_id, const std::string& field, const std::string& detail)
        : Error("schema error in case '" + case_id + "', field '" + field + "': " + detail),
          case_id(case_id),
          field(field) {}
    std::string case_id;
    std::string field;
};

// Dataset references a tool or node id that does not exist.
struct ReferenceError : Error {
    ReferenceError(const std::string& case_id, const std::string& detail)
        : Error("reference error in case '" + case_id + "': " + detail), case_id(case_id) {}
    std::string case_id;
};

// Two legal steps matched the same agent turn: the annotation is defective
// (two interchangeable invocation nodes ended up in competing steps).
struct AmbiguousMatchError : Error {
    explicit AmbiguousMatchError(const std::string& msg) : Error(msg) {}
};

// Scripted adapter ran past the end of its script.
struct ScriptExhausted : Error {
    explicit ScriptExhausted(const std::string& msg = "scripted adapter exhausted") : Error(msg) {}
};

// Adapter could not produce a turn (remote failure after retries, script
// exhaustion). The affected case is marked unscored.
struct AdapterError : Error {
    explicit AdapterError(const std::string& msg) : Error(msg) {}
};

}  // namespace agenteval
