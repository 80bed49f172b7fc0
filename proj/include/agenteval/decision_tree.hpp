#pragma once
// Prefix tree over the enumerated execution paths, with incremental
// trajectory validation: each observed step either descends (pruning the
// sibling subtrees) or terminates the match.

#include <string>
#include <vector>

#include "agenteval/plan_enum.hpp"

namespace agenteval {

struct MatchStatus {
    enum class Kind { Continue, CompleteOptimal, CompleteSuboptimal, Mismatch };

    Kind kind = Kind::Continue;
    std::vector<PlanStep> expected;  // Mismatch: steps that would have been legal
    PlanStep got;                    // Mismatch: the step actually observed

    bool is_terminal() const { return kind != Kind::Continue; }
    bool is_complete() const {
        return kind == Kind::CompleteOptimal || kind == Kind::CompleteSuboptimal;
    }
};

// Lightweight validation position. Cursors are independent values; many
// trajectories may advance concurrently against one shared tree.
struct MatchCursor {
    int node = 0;              // index into the tree arena
    int steps_consumed = 0;
    int surviving_leaves = 0;  // input paths still compatible with the consumed prefix
};

class DecisionTree {
public:
    struct Node {
        PlanStep step;               // label; empty at the root sentinel
        std::vector<int> children;   // arena indices, canonically ordered by step
        bool is_complete = false;    // a full input path ends here
        bool is_optimal = false;     // that path is in the optimal partition
        int leaf_count = 0;          // leaves in this subtree
    };

    // Builds the merged prefix tree. Leaf count equals path count; each leaf
    // carries the optimality flag of its path. Throws Error on an empty set.
    static DecisionTree build(const PathPartition& partition);

    MatchCursor root_cursor() const;

    // One validation step. Requires a non-terminal cursor (throws
    // std::logic_error otherwise). On a match, descends and shrinks the
    // surviving-leaf count; at a leaf returns the Complete* status.
    std::pair<MatchCursor, MatchStatus> advance(const MatchCursor& cursor, const PlanStep& observed) const;

    // Batch form of advance: applies steps until termination or exhaustion;
    // second member is the number of steps accepted.
    std::pair<MatchStatus, int> replay(const std::vector<PlanStep>& steps) const;

    // Steps that are legal from this cursor (the children labels).
    std::vector<PlanStep> legal_steps(const MatchCursor& cursor) const;

    int leaf_count() const { return nodes_[0].leaf_count; }
    const Node& node(int index) const { return nodes_[index]; }

    // Indented text rendering used by golden tests and `explain`.
    std::string render() const;

private:
    std::vector<Node> nodes_;  // nodes_[0] is the root sentinel

    int insert_path(const ExecutionPath& path, bool optimal);
};

}  // namespace agenteval
