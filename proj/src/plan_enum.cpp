#include "agenteval/plan_enum.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "agenteval/errors.hpp"

namespace agenteval {

std::size_t ExecutionPath::node_count() const {
    std::size_t n = 0;
    for (const auto& s : steps) n += s.ids.size();
    return n;
}

namespace {

struct EnumState {
    std::map<int, int> indegree;
    std::map<int, bool> visited;
    std::map<int, std::vector<int>> successors;
    std::vector<PlanStep> current;
    std::vector<ExecutionPath> paths;
    std::size_t node_count = 0;
    std::size_t max_paths = 0;

    std::vector<int> ready_nodes() const {
        std::vector<int> ready;
        for (const auto& [id, deg] : indegree) {
            if (deg == 0 && !visited.at(id)) ready.push_back(id);
        }
        return ready;  // map iteration keeps ids ascending
    }
};

void dfs(EnumState& st, std::size_t consumed) {
    if (consumed == st.node_count) {
        if (st.paths.size() >= st.max_paths) {
            throw LimitError("path count exceeds limit of " + std::to_string(st.max_paths));
        }
        st.paths.push_back(ExecutionPath{st.current});
        return;
    }

    const std::vector<int> ready = st.ready_nodes();
    if (ready.empty()) throw CycleError();

    // Ready nodes are mutually independent, so every non-empty subset is a
    // legal parallel step.
    const std::size_t k = ready.size();
    for (std::size_t mask = 1; mask < (1ull << k); ++mask) {
        PlanStep step;
        for (std::size_t bit = 0; bit < k; ++bit) {
            if (mask & (1ull << bit)) step.ids.push_back(ready[bit]);
        }
        for (int id : step.ids) {
            st.visited[id] = true;
            for (int succ : st.successors[id]) st.indegree[succ]--;
        }
        st.current.push_back(step);

        dfs(st, consumed + step.ids.size());

        st.current.pop_back();
        for (int id : step.ids) {
            st.visited[id] = false;
            for (int succ : st.successors[id]) st.indegree[succ]++;
        }
    }
}

}  // namespace

std::vector<ExecutionPath> enumerate_paths(const DependencyGraph& graph, const EnumLimits& limits) {
    auto structural = graph.structural_violations();
    if (!structural.empty()) throw GraphError(structural.front());
    if (graph.nodes.size() > limits.max_nodes) {
        throw LimitError("graph has " + std::to_string(graph.nodes.size()) +
                         " nodes, limit is " + std::to_string(limits.max_nodes));
    }
    if (graph.empty()) return {};

    EnumState st;
    st.node_count = graph.nodes.size();
    st.max_paths = limits.max_paths;
    for (const auto& n : graph.nodes) {
        st.indegree[n.id] = 0;
        st.visited[n.id] = false;
    }
    for (const auto& [from, to] : graph.edges) {
        st.indegree[to]++;
        st.successors[from].push_back(to);
    }

    dfs(st, 0);

    std::sort(st.paths.begin(), st.paths.end());
    return st.paths;
}

int optimal_step_count(const DependencyGraph& graph) {
    auto structural = graph.structural_violations();
    if (!structural.empty()) throw GraphError(structural.front());
    if (graph.empty()) return 0;

    // Peel maximal ready layers; the round count equals the longest chain.
    std::map<int, int> indegree;
    std::map<int, std::vector<int>> successors;
    for (const auto& n : graph.nodes) indegree[n.id] = 0;
    for (const auto& [from, to] : graph.edges) {
        indegree[to]++;
        successors[from].push_back(to);
    }

    std::set<int> remaining;
    for (const auto& n : graph.nodes) remaining.insert(n.id);

    int rounds = 0;
    while (!remaining.empty()) {
        std::vector<int> ready;
        for (int id : remaining) {
            if (indegree[id] == 0) ready.push_back(id);
        }
        if (ready.empty()) throw CycleError();
        rounds++;
        for (int id : ready) {
            remaining.erase(id);
            for (int succ : successors[id]) indegree[succ]--;
        }
    }
    return rounds;
}

PathPartition partition_paths(const std::vector<ExecutionPath>& paths) {
    PathPartition part;
    if (paths.empty()) return part;

    std::size_t best = paths.front().step_count();
    for (const auto& p : paths) best = std::min(best, p.step_count());

    for (const auto& p : paths) {
        (p.step_count() == best ? part.optimal : part.suboptimal).push_back(p);
    }
    return part;
}

std::string format_step(const PlanStep& step) {
    std::string out = "[";
    for (std::size_t i = 0; i < step.ids.size(); ++i) {
        if (i > 0) out += ",";
        out += std::to_string(step.ids[i]);
    }
    out += "]";
    return out;
}

std::string format_path(const ExecutionPath& path) {
    std::string out;
    for (std::size_t i = 0; i < path.steps.size(); ++i) {
        if (i > 0) out += " ";
        out += format_step(path.steps[i]);
    }
    return out;
}

std::string format_path_listing(const PathPartition& part) {
    std::vector<std::pair<ExecutionPath, bool>> rows;
    for (const auto& p : part.optimal) rows.push_back({p, true});
    for (const auto& p : part.suboptimal) rows.push_back({p, false});
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::string out;
    for (const auto& [path, optimal] : rows) {
        out += format_path(path);
        out += optimal ? "  (optimal)" : "";
        out += "\n";
    }
    return out;
}

}  // namespace agenteval
