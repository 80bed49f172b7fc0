// Benchmark comparing the serial reference loops against the OpenMP batch
// kernels: dataset evaluation across cases and path enumeration across
// graphs. Verifies byte-identical outputs before reporting speedups.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <vector>

#include "agenteval/dataset.hpp"
#include "agenteval/errors.hpp"
#include "agenteval/plan_enum.hpp"
#include "agenteval/runner.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

using namespace agenteval;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Random 9-node DAGs, rejecting any whose path set would overflow the cap
// so the timed sweep never aborts.
std::vector<DependencyGraph> bench_graphs(int count, const EnumLimits& limits) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<DependencyGraph> out;
    const int n = 9;

    while (static_cast<int>(out.size()) < count) {
        DependencyGraph g;
        for (int i = 0; i < n; ++i) {
            InvocationNode node;
            node.id = i;
            node.tool_name = "tool_" + std::to_string(i);
            node.observation = {200, "ok"};
            g.nodes.push_back(std::move(node));
        }
        double p = 0.35 + 0.3 * coin(rng);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (coin(rng) < p) g.edges.emplace_back(i, j);
            }
        }
        try {
            enumerate_paths(g, limits);
            out.push_back(std::move(g));
        } catch (const LimitError&) {
            // too many antichains; draw again
        }
    }
    return out;
}

DatasetFile replicated_fixture(const std::string& path, int copies) {
    DatasetFile base = load_dataset(path);
    DatasetFile out;
    out.version = base.version;
    for (int i = 0; i < copies; ++i) {
        for (TestCase tc : base.cases) {
            char suffix[16];
            std::snprintf(suffix, sizeof(suffix), "_%04d", i);
            tc.id += suffix;
            out.cases.push_back(std::move(tc));
        }
    }
    std::sort(out.cases.begin(), out.cases.end(),
              [](const TestCase& a, const TestCase& b) { return a.id < b.id; });
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    int copies = argc > 1 ? std::atoi(argv[1]) : 40;
    std::string data = argc > 2 ? argv[2] : "data/cases.json";

    int threads = 1;
#if defined(_OPENMP)
    threads = omp_get_max_threads();
#endif
    std::cout << "threads available: " << threads << "\n\n";

    // --- dataset evaluation: serial reference vs OpenMP batch ---
    DatasetFile ds = replicated_fixture(data, copies);
    std::cout << "dataset evaluation over " << ds.cases.size() << " cases (gold adapter)\n";

    RunConfig serial_cfg;
    auto t0 = Clock::now();
    auto serial = evaluate_dataset_serial(ds, gold_adapter_factory(GoldMode::Optimal), serial_cfg);
    double serial_s = seconds_since(t0);

    RunConfig par_cfg;
    par_cfg.request_concurrency = threads;
    t0 = Clock::now();
    auto parallel = evaluate_dataset(ds, gold_adapter_factory(GoldMode::Optimal), par_cfg);
    double parallel_s = seconds_since(t0);

    if (transcripts_to_jsonl(serial.outputs) != transcripts_to_jsonl(parallel.outputs)) {
        std::cerr << "FAIL: parallel evaluation diverged from the serial reference\n";
        return 1;
    }
    std::printf("  serial:   %8.3f s\n", serial_s);
    std::printf("  parallel: %8.3f s  (x%d threads, speedup %.2f)\n\n", parallel_s, threads,
                parallel_s > 0 ? serial_s / parallel_s : 0.0);

    // --- path enumeration sweep: serial loop vs OpenMP loop ---
    const int graph_count = 400;
    EnumLimits limits;
    limits.max_paths = 50000;
    std::vector<DependencyGraph> graphs = bench_graphs(graph_count, limits);

    std::cout << "path enumeration over " << graph_count << " nine-node graphs\n";
    std::vector<std::size_t> counts_serial(graphs.size());
    t0 = Clock::now();
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        counts_serial[i] = enumerate_paths(graphs[i], limits).size();
    }
    double enum_serial_s = seconds_since(t0);

    std::vector<std::size_t> counts_parallel(graphs.size());
    t0 = Clock::now();
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < static_cast<int>(graphs.size()); ++i) {
        counts_parallel[static_cast<std::size_t>(i)] =
            enumerate_paths(graphs[static_cast<std::size_t>(i)], limits).size();
    }
    double enum_parallel_s = seconds_since(t0);

    if (counts_serial != counts_parallel) {
        std::cerr << "FAIL: parallel enumeration diverged from the serial reference\n";
        return 1;
    }
    std::size_t total_paths = 0;
    for (std::size_t c : counts_serial) total_paths += c;
    std::printf("  serial:   %8.3f s  (%zu paths)\n", enum_serial_s, total_paths);
    std::printf("  parallel: %8.3f s  (speedup %.2f)\n", enum_parallel_s,
                enum_parallel_s > 0 ? enum_serial_s / enum_parallel_s : 0.0);
    return 0;
}
