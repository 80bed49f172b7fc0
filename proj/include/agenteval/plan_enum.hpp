#pragma once
// Execution-plan enumeration over dependency graphs: every valid sequence
// of parallel steps, plus the optimal/suboptimal split by step count.

#include <string>
#include <vector>

#include "agenteval/types.hpp"

namespace agenteval {

// A set of node ids invoked in parallel within one agent turn. Ids are kept
// sorted ascending; members form an antichain of the remaining dependencies.
struct PlanStep {
    std::vector<int> ids;

    bool operator==(const PlanStep&) const = default;
    auto operator<=>(const PlanStep&) const = default;
};

// An ordered sequence of steps that consumes the whole graph exactly once,
// with every edge crossing strictly forward.
struct ExecutionPath {
    std::vector<PlanStep> steps;

    std::size_t step_count() const { return steps.size(); }
    std::size_t node_count() const;

    bool operator==(const ExecutionPath&) const = default;
    auto operator<=>(const ExecutionPath&) const = default;
};

struct EnumLimits {
    std::size_t max_nodes = 12;
    std::size_t max_paths = 100000;
};

// All valid execution paths of the graph, canonically ordered (step members
// sorted by id, paths sorted lexicographically). Throws CycleError,
// GraphError, or LimitError; never truncates silently.
std::vector<ExecutionPath> enumerate_paths(const DependencyGraph& graph, const EnumLimits& limits = {});

// Minimum number of steps over all valid paths == length in nodes of the
// longest dependency chain. Computed by level peeling, without enumerating.
int optimal_step_count(const DependencyGraph& graph);

struct PathPartition {
    std::vector<ExecutionPath> optimal;     // step count == minimum over the set
    std::vector<ExecutionPath> suboptimal;  // everything else
};

PathPartition partition_paths(const std::vector<ExecutionPath>& paths);

// Deterministic text forms used by golden tests and the explain command.
std::string format_step(const PlanStep& step);                 // "[0,1]"
std::string format_path(const ExecutionPath& path);            // "[0,1] [2] [3]"
std::string format_path_listing(const PathPartition& part);    // one path per line, optimal flagged

}  // namespace agenteval
