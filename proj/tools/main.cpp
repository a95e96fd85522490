// Command line front end: graph construction, graph metrics, query search,
// and the recall/QPS benchmark harness.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "fodg/engine.hpp"
#include "fodg/graph_metrics.hpp"
#include "fodg/graph_opt.hpp"
#include "fodg/io.hpp"
#include "fodg/knn_build.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitFormat = 3;

struct GridSpec {
    std::vector<std::uint32_t> topm_values{64};
    std::vector<std::uint32_t> width_values{1};
};

std::vector<std::uint32_t> parse_u32_list(const std::string& csv) {
    std::vector<std::uint32_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
    }
    if (out.empty()) throw fodg::UsageError("empty value list in grid spec");
    return out;
}

void apply_grid_entry(GridSpec& grid, const std::string& entry) {
    auto eq = entry.find('=');
    if (eq == std::string::npos)
        throw fodg::UsageError("grid entry must look like M=16,32,64: " + entry);
    std::string key = entry.substr(0, eq);
    auto values = parse_u32_list(entry.substr(eq + 1));
    if (key == "M")
        grid.topm_values = values;
    else if (key == "p")
        grid.width_values = values;
    else
        throw fodg::UsageError("unknown grid key (expected M or p): " + key);
}

fodg::ExecutionMode resolve_mode(const std::string& mode_flag, std::uint64_t batch,
                                 std::uint32_t topm, std::uint32_t b_t, std::uint32_t m_t) {
    if (mode_flag == "per-query") return fodg::ExecutionMode::kPerQueryWorker;
    if (mode_flag == "shared") return fodg::ExecutionMode::kSharedQueryWorkers;
    return fodg::choose_mode(batch, topm, {b_t, m_t});
}

struct BuildArgs {
    std::string data_path, out_path;
    std::uint32_t d = 32, d_init = 0;
    std::string mode = "rank";
    std::string builder = "auto";
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

int cmd_build(const BuildArgs& a) {
    if (a.d == 0) throw fodg::UsageError("build: --d must be >= 1");
    std::uint32_t d_init = a.d_init != 0 ? a.d_init : 2 * a.d;
    if (d_init < a.d) throw fodg::UsageError("build: --d-init must be >= --d");

    fodg::Dataset ds = fodg::load_fvecs(a.data_path);
    fodg::ReorderMode mode =
        a.mode == "distance" ? fodg::ReorderMode::kDistance : fodg::ReorderMode::kRank;
    if (a.mode != "rank" && a.mode != "distance")
        throw fodg::UsageError("build: --mode must be rank or distance");
    if (mode == fodg::ReorderMode::kDistance && ds.size() >= 100000)
        std::cerr << "fodg: warning: distance-mode reordering costs O(N*d_init^2) distance "
                     "computations on N="
                  << ds.size() << "\n";

    bool use_exact = a.builder == "exact" || (a.builder == "auto" && ds.size() <= 4096);
    if (a.builder != "exact" && a.builder != "nn-descent" && a.builder != "auto")
        throw fodg::UsageError("build: --builder must be exact, nn-descent, or auto");
    if (d_init >= ds.size()) throw fodg::UsageError("build: --d-init must be < N");

    auto t0 = std::chrono::steady_clock::now();
    fodg::KnnGraph knn;
    if (use_exact) {
        knn = fodg::exact_knn_graph(ds, d_init, a.threads);
    } else {
        fodg::NNDescentParams np;
        np.seed = a.seed;
        np.num_threads = a.threads;
        knn = fodg::nn_descent(ds, d_init, np);
        if (!knn.converged)
            std::cerr << "fodg: warning: nn-descent hit max_rounds before converging\n";
    }
    double knn_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    fodg::OptimizeOptions opts;
    opts.mode = mode;
    opts.num_threads = a.threads;
    fodg::OptimizeStats stats;
    fodg::Graph graph = fodg::optimize(
        knn, a.d, opts, mode == fodg::ReorderMode::kDistance ? &ds : nullptr, &stats);
    fodg::save_graph(graph, a.out_path);

    std::cout << "builder=" << (use_exact ? "exact" : "nn-descent") << "\n"
              << "reorder_mode=" << a.mode << "\n"
              << "num_nodes=" << graph.num_nodes << "\n"
              << "degree=" << graph.degree << "\n"
              << "d_init=" << d_init << "\n"
              << "knn_build_seconds=" << knn_seconds << "\n"
              << stats.report();
    return kExitOk;
}

struct SearchArgs {
    std::string graph_path, data_path, query_path;
    fodg::SearchParams params;
    std::string hash = "standard";
    std::string mode = "auto";
    std::uint32_t team_count = 4;
    std::uint32_t b_t = 0, m_t = 512;
    unsigned threads = 0;
};

fodg::SearchParams finalize_params(const SearchArgs& a) {
    fodg::SearchParams p = a.params;
    if (a.hash == "forgettable")
        p.hash_policy = fodg::HashPolicy::kForgettable;
    else if (a.hash != "standard")
        throw fodg::UsageError("--hash must be standard or forgettable");
    return p;
}

int cmd_search(const SearchArgs& a) {
    fodg::Graph graph = fodg::load_graph(a.graph_path);
    fodg::Dataset ds = fodg::load_fvecs(a.data_path);
    fodg::Dataset queries = fodg::load_fvecs(a.query_path);
    fodg::SearchParams params = finalize_params(a);

    fodg::EngineOptions opts;
    opts.mode = resolve_mode(a.mode, queries.size(), params.topm, a.b_t, a.m_t);
    opts.team_count = a.team_count;
    opts.num_threads = a.threads;

    auto results = fodg::batch_search(graph, ds, queries, params, opts);
    for (std::uint32_t qi = 0; qi < results.size(); ++qi) {
        const auto& r = results[qi];
        std::cout << "query " << qi << ":";
        for (std::size_t i = 0; i < r.ids.size(); ++i)
            std::cout << ' ' << r.ids[i] << ':' << r.dists[i];
        std::cout << "\n";
    }
    return kExitOk;
}

struct BenchArgs : SearchArgs {
    std::string truth_path;
    std::vector<std::string> grid_entries;
    std::string out_path;  // empty = stdout
    std::string dataset_name = "dataset";
};

int cmd_bench(const BenchArgs& a) {
    fodg::Graph graph = fodg::load_graph(a.graph_path);
    fodg::Dataset ds = fodg::load_fvecs(a.data_path);
    fodg::Dataset queries = fodg::load_fvecs(a.query_path);
    fodg::IdMatrix truth_mat = fodg::load_ivecs(a.truth_path);

    std::vector<std::vector<std::uint32_t>> truth(truth_mat.rows);
    for (std::uint32_t i = 0; i < truth_mat.rows; ++i) {
        truth[i].reserve(truth_mat.cols);
        for (std::int32_t id : truth_mat.row(i)) {
            if (id < 0) throw fodg::FormatError("negative id in ground truth");
            truth[i].push_back(static_cast<std::uint32_t>(id));
        }
    }

    GridSpec grid;
    for (const auto& e : a.grid_entries) apply_grid_entry(grid, e);

    fodg::SearchParams base = finalize_params(a);
    std::vector<fodg::SearchParams> param_grid;
    for (std::uint32_t m : grid.topm_values) {
        for (std::uint32_t p : grid.width_values) {
            fodg::SearchParams sp = base;
            sp.topm = m;
            sp.width = p;
            param_grid.push_back(sp);
        }
    }

    fodg::EngineOptions opts;
    opts.mode = resolve_mode(a.mode, queries.size(),
                             *std::max_element(grid.topm_values.begin(), grid.topm_values.end()),
                             a.b_t, a.m_t);
    opts.team_count = a.team_count;
    opts.num_threads = a.threads;

    auto records =
        fodg::run_benchmark(graph, ds, queries, truth, param_grid, opts, a.dataset_name);

    std::ostringstream csv;
    csv << fodg::bench_csv_header() << "\n";
    for (const auto& r : records) csv << fodg::bench_csv_row(r) << "\n";
    if (a.out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(a.out_path, std::ios::trunc);
        if (!out) throw fodg::FormatError("cannot open for writing: " + a.out_path);
        out << csv.str();
    }
    return kExitOk;
}

int cmd_metrics(const std::string& graph_path, unsigned threads) {
    fodg::Graph graph = fodg::load_graph(graph_path);
    std::cout << fodg::measure_graph(graph, threads).report();
    return kExitOk;
}

void add_search_flags(CLI::App* cmd, SearchArgs& a) {
    cmd->add_option("--graph", a.graph_path, "graph file")->required();
    cmd->add_option("--data", a.data_path, "dataset .fvecs")->required();
    cmd->add_option("--queries", a.query_path, "query .fvecs")->required();
    cmd->add_option("--k", a.params.k, "results per query");
    cmd->add_option("--M", a.params.topm, "internal top-M list length");
    cmd->add_option("--p", a.params.width, "parents per iteration");
    cmd->add_option("--i-max", a.params.max_iterations, "max iterations (0 = auto)");
    cmd->add_option("--min-iterations", a.params.min_iterations, "min iterations");
    cmd->add_option("--hash", a.hash, "visited table policy: standard | forgettable");
    cmd->add_option("--hash-bits", a.params.hash_bits, "forgettable table size = 2^bits");
    cmd->add_option("--reset-interval", a.params.reset_interval, "forgettable reset interval");
    cmd->add_option("--seed", a.params.seed, "random seed");
    cmd->add_option("--threads", a.threads, "worker threads (0 = all cores)");
    cmd->add_option("--exec", a.mode, "execution mode: auto | per-query | shared");
    cmd->add_option("--team-count", a.team_count, "shared-mode teams per query");
    cmd->add_option("--b-t", a.b_t, "batch-size threshold (0 = worker count)");
    cmd->add_option("--m-t", a.m_t, "top-M threshold for mode choice");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fixed out-degree graph ANN search"};
    app.require_subcommand(1);

    BuildArgs build_args;
    auto* build = app.add_subcommand("build", "build and optimize a search graph");
    build->add_option("--data", build_args.data_path, "dataset .fvecs")->required();
    build->add_option("--out", build_args.out_path, "output graph file")->required();
    build->add_option("--d", build_args.d, "final out-degree");
    build->add_option("--d-init", build_args.d_init, "initial k-NN degree (0 = 2*d)");
    build->add_option("--mode", build_args.mode, "reordering mode: rank | distance");
    build->add_option("--builder", build_args.builder, "initial graph: exact | nn-descent | auto");
    build->add_option("--seed", build_args.seed, "random seed");
    build->add_option("--threads", build_args.threads, "worker threads (0 = all cores)");

    std::string metrics_graph;
    unsigned metrics_threads = 0;
    auto* metrics = app.add_subcommand("metrics", "graph quality report");
    metrics->add_option("--graph", metrics_graph, "graph file")->required();
    metrics->add_option("--threads", metrics_threads, "worker threads");

    SearchArgs search_args;
    auto* search = app.add_subcommand("search", "run queries and print top-k");
    add_search_flags(search, search_args);

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "recall/QPS benchmark over a parameter grid");
    add_search_flags(bench, bench_args);
    bench->add_option("--truth", bench_args.truth_path, "ground-truth .ivecs")->required();
    bench->add_option("--grid", bench_args.grid_entries, "grid entries, e.g. M=16,32,64 p=1,2");
    bench->add_option("--out", bench_args.out_path, "CSV output path (default stdout)");
    bench->add_option("--name", bench_args.dataset_name, "dataset label for the CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*build) return cmd_build(build_args);
        if (*metrics) return cmd_metrics(metrics_graph, metrics_threads);
        if (*search) return cmd_search(search_args);
        if (*bench) return cmd_bench(bench_args);
    } catch (const fodg::UsageError& e) {
        std::cerr << "fodg: usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const fodg::FormatError& e) {
        std::cerr << "fodg: " << e.what() << "\n";
        return kExitFormat;
    } catch (const std::exception& e) {
        std::cerr << "fodg: error: " << e.what() << "\n";
        return kExitFormat;
    }
    return kExitOk;
}
