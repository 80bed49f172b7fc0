#pragma once
// Dataset file format (versioned UTF-8 JSON), loading and validation, and
// mission-switching-space coverage.

#include <string>
#include <vector>

#include "agenteval/types.hpp"

namespace agenteval {

inline constexpr const char* kDatasetVersion = "1";

struct DatasetFile {
    std::string version;
    std::vector<TestCase> cases;  // sorted by case id

    const TestCase* find_case(std::string_view id) const;
};

// An ordered action-type combination over the 4-way top-level alphabet.
struct Combo {
    std::vector<ActionClass> seq;

    std::string to_string() const;  // "single>chat>multi"
    bool operator==(const Combo&) const = default;
    auto operator<=>(const Combo&) const = default;
};

// Loads and fully types a dataset. Throws ParseError for broken JSON,
// SchemaError for malformed fields, ReferenceError for unknown tools or
// node ids. Semantic checks live in validate_dataset.
DatasetFile load_dataset(const std::string& path);
DatasetFile parse_dataset(const std::string& text, const std::string& origin = "<memory>");

// Canonical serialization: sorted keys, two-space indent, trailing newline.
// load(serialize(ds)) reproduces ds byte-exactly.
std::string serialize_dataset(const DatasetFile& ds);

struct DatasetViolation {
    std::string case_id;
    std::string code;    // CycleDetected, ActionTypeMismatch, ...
    std::string detail;
};

// Per-case semantic checks: graph acyclicity, label consistency with
// classify_action_type, observation presence, relation ordering, clarify
// and chat gold presence rules. Violations are data.
std::vector<DatasetViolation> validate_dataset(const DatasetFile& ds);

// All 4^n combos of exactly length n in lexicographic order; with
// cumulative set, all lengths 1..n ordered by length then lexicographically.
std::vector<Combo> generate_switchspace(int n, bool cumulative = false);

struct CoverageLength {
    int length = 0;
    std::vector<Combo> covered;
    std::vector<Combo> missing;
};

struct CoverageReport {
    std::vector<CoverageLength> lengths;  // 1..max_n
};

CoverageReport coverage_report(const DatasetFile& ds, int max_n);

// Distinct collapsed combos present in the dataset (set semantics).
std::vector<Combo> dataset_combos(const DatasetFile& ds);

}  // namespace agenteval
