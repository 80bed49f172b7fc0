#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "agenteval/errors.hpp"
#include "agenteval/plan_enum.hpp"
#include "oracles.hpp"

using namespace agenteval;

namespace {

DependencyGraph fig_graph() {
    return oracles::make_graph({0, 1, 2, 3}, {{1, 2}, {0, 3}, {2, 3}});
}

ExecutionPath path_of(std::vector<std::vector<int>> steps) {
    ExecutionPath p;
    for (auto& s : steps) p.steps.push_back(PlanStep{std::move(s)});
    return p;
}

}  // namespace

TEST_CASE("toy graph yields exactly the five known paths") {
    auto paths = enumerate_paths(fig_graph());
    REQUIRE(paths.size() == 5);

    std::vector<ExecutionPath> expected = {
        path_of({{0}, {1}, {2}, {3}}),
        path_of({{0, 1}, {2}, {3}}),
        path_of({{1}, {0}, {2}, {3}}),
        path_of({{1}, {0, 2}, {3}}),
        path_of({{1}, {2}, {0}, {3}}),
    };
    CHECK(paths == expected);  // canonical ordering included
}

TEST_CASE("single node, independent pair, chains") {
    CHECK(enumerate_paths(oracles::make_graph({0}, {})).size() == 1);

    auto pair_paths = enumerate_paths(oracles::make_graph({3, 7}, {}));
    REQUIRE(pair_paths.size() == 3);
    CHECK(pair_paths[0] == path_of({{3}, {7}}));
    CHECK(pair_paths[1] == path_of({{3, 7}}));
    CHECK(pair_paths[2] == path_of({{7}, {3}}));

    auto chain = enumerate_paths(oracles::make_graph({0, 1}, {{0, 1}}));
    REQUIRE(chain.size() == 1);
    CHECK(chain[0] == path_of({{0}, {1}}));
}

TEST_CASE("cycle and limit errors") {
    CHECK_THROWS_AS(enumerate_paths(oracles::make_graph({0, 1}, {{0, 1}, {1, 0}})), CycleError);

    EnumLimits tight;
    tight.max_nodes = 3;
    CHECK_THROWS_AS(enumerate_paths(oracles::make_graph({0, 1, 2, 3}, {}), tight), LimitError);

    EnumLimits few_paths;
    few_paths.max_paths = 2;
    CHECK_THROWS_AS(enumerate_paths(oracles::make_graph({0, 1}, {}), few_paths), LimitError);

    CHECK_THROWS_AS(enumerate_paths(oracles::make_graph({0}, {{0, 9}})), GraphError);
}

TEST_CASE("optimal step count: toy graph, all-parallel, chain") {
    CHECK(optimal_step_count(fig_graph()) == 3);
    CHECK(optimal_step_count(oracles::make_graph({0, 1, 2, 3, 4}, {})) == 1);
    CHECK(optimal_step_count(oracles::make_graph({0, 1, 2}, {{0, 1}, {1, 2}})) == 3);
}

TEST_CASE("partition splits the toy paths 2/3") {
    auto part = partition_paths(enumerate_paths(fig_graph()));
    REQUIRE(part.optimal.size() == 2);
    REQUIRE(part.suboptimal.size() == 3);
    for (const auto& p : part.optimal) CHECK(p.step_count() == 3);
    for (const auto& p : part.suboptimal) CHECK(p.step_count() == 4);

    auto single = partition_paths({path_of({{0}})});
    CHECK(single.optimal.size() == 1);
    CHECK(single.suboptimal.empty());

    auto pair = partition_paths(enumerate_paths(oracles::make_graph({0, 1}, {})));
    REQUIRE(pair.optimal.size() == 1);
    CHECK(pair.optimal[0] == path_of({{0, 1}}));
    CHECK(pair.suboptimal.size() == 2);
}

TEST_CASE("enumeration equals the brute-force oracle on small random graphs") {
    std::mt19937 rng(20250808);
    int graphs = 0;
    for (int n = 1; n <= 6; ++n) {
        for (double p : {0.0, 0.25, 0.5, 0.75}) {
            for (int rep = 0; rep < 8; ++rep) {
                auto g = oracles::random_dag(rng, n, p);
                CHECK(enumerate_paths(g) == oracles::brute_force_paths(g));
                graphs++;
            }
        }
    }
    CHECK(graphs == 6 * 4 * 8);
}

TEST_CASE("every enumerated path satisfies the path invariants") {
    std::mt19937 rng(7);
    for (int rep = 0; rep < 40; ++rep) {
        auto g = oracles::random_dag(rng, 5, 0.4);
        std::map<int, int> step_of;
        for (const auto& path : enumerate_paths(g)) {
            step_of.clear();
            std::size_t covered = 0;
            for (std::size_t s = 0; s < path.steps.size(); ++s) {
                for (int id : path.steps[s].ids) {
                    CHECK(step_of.emplace(id, static_cast<int>(s)).second);  // no repeats
                    covered++;
                }
            }
            CHECK(covered == g.nodes.size());  // exact partition
            for (const auto& [from, to] : g.edges) {
                CHECK(step_of[from] < step_of[to]);  // edges strictly forward
            }
            CHECK(path.step_count() >= static_cast<std::size_t>(optimal_step_count(g)));
            CHECK(path.step_count() <= g.nodes.size());
        }
    }
}

TEST_CASE("optimal step count equals longest-chain DP on random graphs") {
    std::mt19937 rng(99);
    for (int rep = 0; rep < 200; ++rep) {
        int n = 1 + static_cast<int>(rng() % 12);
        double p = (rep % 5) * 0.2;
        auto g = oracles::random_dag(rng, n, p);
        CHECK(optimal_step_count(g) == oracles::longest_chain(g));
    }
}

TEST_CASE("path count is invariant under node relabeling") {
    std::mt19937 rng(4242);
    for (int rep = 0; rep < 25; ++rep) {
        auto g = oracles::random_dag(rng, 5, 0.35);
        auto base = enumerate_paths(g).size();

        // Relabel ids through a shuffled map.
        std::vector<int> perm = {10, 21, 32, 43, 54};
        std::shuffle(perm.begin(), perm.end(), rng);
        DependencyGraph h = g;
        for (auto& node : h.nodes) node.id = perm[static_cast<std::size_t>(node.id)];
        for (auto& [from, to] : h.edges) {
            from = perm[static_cast<std::size_t>(from)];
            to = perm[static_cast<std::size_t>(to)];
        }
        CHECK(enumerate_paths(h).size() == base);
    }
}

TEST_CASE("path listing golden text for the toy graph") {
    auto part = partition_paths(enumerate_paths(fig_graph()));
    CHECK(format_path_listing(part) ==
          "[0] [1] [2] [3]\n"
          "[0,1] [2] [3]  (optimal)\n"
          "[1] [0] [2] [3]\n"
          "[1] [0,2] [3]  (optimal)\n"
          "[1] [2] [0] [3]\n");
}
