#include "fodg/engine.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>

namespace fodg {

namespace {

SearchResult merge_team_results(const std::vector<SearchResult>& team_results, std::uint32_t k) {
    // Union of the team top-M lists: sort by (dist, id), dedup by id, take k.
    std::vector<std::pair<float, std::uint32_t>> pool;
    SearchStats stats;
    stats.converged = true;
    for (const auto& r : team_results) {
        for (std::size_t i = 0; i < r.ids.size(); ++i) pool.emplace_back(r.dists[i], r.ids[i]);
        stats.distance_evals += r.stats.distance_evals;
        stats.hash_resets += r.stats.hash_resets;
        stats.iterations = std::max(stats.iterations, r.stats.iterations);
        stats.converged = stats.converged && r.stats.converged;
    }
    std::sort(pool.begin(), pool.end());
    SearchResult out;
    out.stats = stats;
    std::uint32_t prev = kInvalidId;
    for (auto& [d, id] : pool) {
        if (out.ids.size() == k) break;
        if (id == prev) continue;  // duplicates share a distance, so adjacent
        prev = id;
        out.ids.push_back(id);
        out.dists.push_back(d);
    }
    return out;
}

SearchResult shared_query_search(const Graph& graph, const Dataset& ds,
                                 std::span<const float> query, const SearchParams& params,
                                 std::uint32_t team_count, std::uint64_t query_seed) {
    SearchParams team_params = params;
    team_params.width = 1;              // one parent per team per iteration
    team_params.k = params.topm;        // teams hand back their whole top-M list
    team_params.hash_policy = HashPolicy::kStandard;
    team_params.min_iterations = std::min(params.min_iterations, team_params.resolved_max_iterations());

    std::uint64_t expected =
        static_cast<std::uint64_t>(team_params.resolved_max_iterations() + 1) * team_count *
        graph.degree;
    VisitedTable shared = VisitedTable::standard_sized(expected);

    std::vector<Traversal> teams;
    teams.reserve(team_count);
    for (std::uint32_t t = 0; t < team_count; ++t) {
        SearchParams p = team_params;
        p.seed = mix_seed(query_seed + 0x7ea4ull * (t + 1));
        teams.emplace_back(graph, ds, query, p, &shared);
    }
    for (auto& t : teams) t.init();

    // Lockstep rounds: every live team advances one iteration before any team
    // takes the next, so no team monopolizes the shared visited table.
    bool progressed = true;
    while (progressed) {
        progressed = false;
        for (auto& t : teams) {
            if (!t.done()) {
                t.step();
                progressed = true;
            }
        }
    }

    std::vector<SearchResult> team_results;
    team_results.reserve(team_count);
    for (auto& t : teams) team_results.push_back(t.finish());
    return merge_team_results(team_results, params.k);
}

}  // namespace

const char* mode_name(ExecutionMode mode) {
    return mode == ExecutionMode::kPerQueryWorker ? "per_query" : "shared";
}

ExecutionMode choose_mode(std::uint64_t batch_size, std::uint32_t topm,
                          const ModeThresholds& thresholds) {
    std::uint32_t b_t = thresholds.batch_threshold != 0 ? thresholds.batch_threshold
                                                        : resolve_thread_count(0);
    if (batch_size < b_t || topm > thresholds.topm_threshold)
        return ExecutionMode::kSharedQueryWorkers;
    return ExecutionMode::kPerQueryWorker;
}

std::vector<SearchResult> batch_search(const Graph& graph, const Dataset& ds,
                                       const Dataset& queries, const SearchParams& params,
                                       const EngineOptions& options) {
    if (queries.size() == 0) return {};
    if (queries.dim() != ds.dim()) throw UsageError("batch_search: query dimension mismatch");
    params.validate();
    if (options.mode == ExecutionMode::kSharedQueryWorkers && options.team_count < 2)
        throw UsageError("batch_search: shared mode requires team_count >= 2");

    std::vector<SearchResult> results(queries.size());
    parallel_for(queries.size(), options.num_threads, [&](std::size_t qi) {
        // Per-query seed depends only on the base seed and the query index,
        // never on worker assignment.
        std::uint64_t qseed = mix_seed(params.seed ^ (0x0badull + qi));
        if (options.mode == ExecutionMode::kPerQueryWorker) {
            SearchParams p = params;
            p.seed = qseed;
            results[qi] = search_one(graph, ds, queries.row(static_cast<std::uint32_t>(qi)), p);
        } else {
            results[qi] = shared_query_search(graph, ds,
                                              queries.row(static_cast<std::uint32_t>(qi)),
                                              params, options.team_count, qseed);
        }
    });
    return results;
}

std::string bench_csv_header() { return "dataset,mode,M,p,d,k,iterations,recall,qps"; }

std::string bench_csv_row(const BenchRecord& r) {
    std::ostringstream os;
    os << r.dataset << ',' << mode_name(r.mode) << ',' << r.params.topm << ','
       << r.params.width << ',' << r.graph_degree << ',' << r.params.k << ',' << std::fixed
       << std::setprecision(2) << r.mean_iterations << ',' << std::setprecision(6) << r.recall
       << ',' << std::setprecision(1) << r.qps;
    return os.str();
}

std::vector<BenchRecord> run_benchmark(const Graph& graph, const Dataset& ds,
                                       const Dataset& queries,
                                       const std::vector<std::vector<std::uint32_t>>& truth,
                                       const std::vector<SearchParams>& param_grid,
                                       const EngineOptions& options,
                                       const std::string& dataset_name) {
    if (queries.size() == 0) throw UsageError("run_benchmark: no queries");
    if (truth.size() < queries.size()) throw UsageError("run_benchmark: missing ground truth rows");
    for (const auto& p : param_grid) {
        p.validate();
        for (std::uint32_t qi = 0; qi < queries.size(); ++qi)
            if (truth[qi].size() < p.k)
                throw UsageError("run_benchmark: ground truth shorter than k");
    }

    std::vector<BenchRecord> records;
    records.reserve(param_grid.size());
    for (const auto& p : param_grid) {
        batch_search(graph, ds, queries, p, options);  // warm-up, untimed

        auto t0 = std::chrono::steady_clock::now();
        std::vector<SearchResult> results = batch_search(graph, ds, queries, p, options);
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        double recall_sum = 0.0;
        double iter_sum = 0.0;
        for (std::uint32_t qi = 0; qi < queries.size(); ++qi) {
            // Tolerates results shorter than k (counts them as misses).
            std::size_t hits = 0;
            for (std::uint32_t id : results[qi].ids)
                for (std::uint32_t j = 0; j < p.k; ++j)
                    if (truth[qi][j] == id) { ++hits; break; }
            recall_sum += static_cast<double>(hits) / p.k;
            iter_sum += results[qi].stats.iterations;
        }

        BenchRecord rec;
        rec.dataset = dataset_name;
        rec.mode = options.mode;
        rec.params = p;
        rec.graph_degree = graph.degree;
        rec.mean_iterations = iter_sum / queries.size();
        rec.recall = recall_sum / queries.size();
        rec.qps = queries.size() / std::max(elapsed, 1e-12);
        records.push_back(rec);
    }
    return records;
}

}  // namespace fodg
