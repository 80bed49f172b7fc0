#include "agenteval/decision_tree.hpp"

#include <algorithm>
#include <stdexcept>

#include "agenteval/errors.hpp"

namespace agenteval {

int DecisionTree::insert_path(const ExecutionPath& path, bool optimal) {
    int node = 0;
    for (const auto& step : path.steps) {
        int child = -1;
        for (int c : nodes_[node].children) {
            if (nodes_[c].step == step) {
                child = c;
                break;
            }
        }
        if (child < 0) {
            child = static_cast<int>(nodes_.size());
            nodes_.push_back(Node{step, {}, false, false, 0});
            nodes_[node].children.push_back(child);
        }
        node = child;
    }
    nodes_[node].is_complete = true;
    nodes_[node].is_optimal = optimal;
    return node;
}

DecisionTree DecisionTree::build(const PathPartition& partition) {
    if (partition.optimal.empty() && partition.suboptimal.empty()) {
        throw Error("decision tree requires a non-empty path set");
    }

    DecisionTree tree;
    tree.nodes_.push_back(Node{});  // root sentinel
    for (const auto& p : partition.optimal) tree.insert_path(p, true);
    for (const auto& p : partition.suboptimal) tree.insert_path(p, false);

    // Canonical child order, then leaf counts bottom-up.
    for (auto& node : tree.nodes_) {
        std::sort(node.children.begin(), node.children.end(),
                  [&](int a, int b) { return tree.nodes_[a].step < tree.nodes_[b].step; });
    }
    for (int i = static_cast<int>(tree.nodes_.size()) - 1; i >= 0; --i) {
        Node& node = tree.nodes_[i];
        node.leaf_count = node.is_complete ? 1 : 0;
        for (int c : node.children) node.leaf_count += tree.nodes_[c].leaf_count;
    }
    return tree;
}

MatchCursor DecisionTree::root_cursor() const {
    return MatchCursor{0, 0, nodes_[0].leaf_count};
}

std::pair<MatchCursor, MatchStatus> DecisionTree::advance(const MatchCursor& cursor,
                                                          const PlanStep& observed) const {
    const Node& here = nodes_[cursor.node];
    if (here.children.empty()) {
        throw std::logic_error("advance called on a terminal cursor");
    }

    for (int c : here.children) {
        const Node& child = nodes_[c];
        if (child.step != observed) continue;

        MatchCursor next{c, cursor.steps_consumed + 1, child.leaf_count};
        MatchStatus status;
        if (child.children.empty()) {
            status.kind = child.is_optimal ? MatchStatus::Kind::CompleteOptimal
                                           : MatchStatus::Kind::CompleteSuboptimal;
        } else {
            status.kind = MatchStatus::Kind::Continue;
        }
        return {next, status};
    }

    MatchStatus status;
    status.kind = MatchStatus::Kind::Mismatch;
    status.got = observed;
    for (int c : here.children) status.expected.push_back(nodes_[c].step);
    return {cursor, status};
}

std::pair<MatchStatus, int> DecisionTree::replay(const std::vector<PlanStep>& steps) const {
    MatchCursor cursor = root_cursor();
    MatchStatus status;  // Continue by default
    int accepted = 0;
    for (const auto& step : steps) {
        std::tie(cursor, status) = advance(cursor, step);
        if (status.kind == MatchStatus::Kind::Mismatch) return {status, accepted};
        accepted++;
        if (status.is_complete()) return {status, accepted};
    }
    return {status, accepted};
}

std::vector<PlanStep> DecisionTree::legal_steps(const MatchCursor& cursor) const {
    std::vector<PlanStep> out;
    for (int c : nodes_[cursor.node].children) out.push_back(nodes_[c].step);
    return out;
}

namespace {

void render_node(const DecisionTree& tree, int index, int depth, std::string& out) {
    const auto& node = tree.node(index);
    if (depth > 0) {
        out.append(static_cast<std::size_t>(depth) * 2, ' ');
        out += format_step(node.step);
        if (node.is_complete) {
            out += node.is_optimal ? " (complete, optimal)" : " (complete)";
        }
        out += "\n";
    } else {
        out += "root\n";
    }
    for (int c : node.children) render_node(tree, c, depth + 1, out);
}

}  // namespace

std::string DecisionTree::render() const {
    std::string out;
    render_node(*this, 0, 0, out);
    return out;
}

}  // namespace agenteval
