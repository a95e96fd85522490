#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fodg/dataset.hpp"
#include "fodg/graph.hpp"
#include "fodg/search.hpp"

namespace fodg {

/// One worker runs a whole query, or several traversal teams share one query.
enum class ExecutionMode { kPerQueryWorker, kSharedQueryWorkers };

const char* mode_name(ExecutionMode mode);

struct ModeThresholds {
    std::uint32_t batch_threshold = 0;  // b_T; 0 = available parallel workers
    std::uint32_t topm_threshold = 512; // M_T
};

/// Shared-workers mode for small batches or large M, per-query otherwise.
ExecutionMode choose_mode(std::uint64_t batch_size, std::uint32_t topm,
                          const ModeThresholds& thresholds);

struct EngineOptions {
    ExecutionMode mode = ExecutionMode::kPerQueryWorker;
    std::uint32_t team_count = 4;  // shared mode traversals per query
    unsigned num_threads = 0;
};

/// Batch search. Per-query mode runs one independent traversal per query;
/// results are a pure function of (params.seed, query index) and do not
/// depend on worker count. Shared mode runs team_count traversals per query
/// with p=1, distinct seeds, and one shared standard-policy visited table;
/// the result is the top-k of the union of the team top-M lists.
std::vector<SearchResult> batch_search(const Graph& graph, const Dataset& ds,
                                       const Dataset& queries, const SearchParams& params,
                                       const EngineOptions& options);

struct BenchRecord {
    std::string dataset;
    ExecutionMode mode;
    SearchParams params;
    std::uint32_t graph_degree = 0;
    double mean_iterations = 0.0;
    double recall = 0.0;
    double qps = 0.0;
};

/// CSV contract for plotting scripts: stable header + column order.
std::string bench_csv_header();
std::string bench_csv_row(const BenchRecord& r);

/// One timed record per grid point: recall averaged over queries against the
/// supplied ground truth, QPS over the whole batch after one untimed warm-up
/// pass. Load time is excluded; per-batch buffer allocation is included.
std::vector<BenchRecord> run_benchmark(const Graph& graph, const Dataset& ds,
                                       const Dataset& queries,
                                       const std::vector<std::vector<std::uint32_t>>& truth,
                                       const std::vector<SearchParams>& param_grid,
                                       const EngineOptions& options,
                                       const std::string& dataset_name = "dataset");

}  // namespace fodg
