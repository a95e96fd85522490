#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fodg/dataset.hpp"
#include "fodg/graph.hpp"
#include "fodg/knn_build.hpp"

namespace fodg {

/// Edge weight used when testing whether a 2-edge route can replace a direct
/// edge: the edge's position in its source row (rank) or the squared distance.
enum class ReorderMode { kRank, kDistance };

/// Variable-degree reverse adjacency; row y holds sources x of edges x->y,
/// ordered by the rank of x->y in the pruned graph, capped at `cap` entries.
struct ReverseGraph {
    std::uint32_t num_nodes = 0;
    std::vector<std::vector<std::uint32_t>> rows;
};

struct OptimizeOptions {
    ReorderMode mode = ReorderMode::kRank;
    bool reorder = true;      // detour counting + reorder; off = plain truncation
    bool add_reverse = true;  // reverse-edge construction + interleave merge
    unsigned num_threads = 0;
};

/// Per-stage wall times (seconds) for the build report.
struct OptimizeStats {
    double count_seconds = 0.0;
    double reorder_seconds = 0.0;
    double reverse_seconds = 0.0;
    double merge_seconds = 0.0;
    double total_seconds = 0.0;

    std::string report() const;  // line-oriented key=value
};

/// For every edge X->Y, the number of nodes Z with edges X->Z and Z->Y such
/// that max(w(X->Z), w(Z->Y)) < w(X->Y). Rank mode reads only the adjacency;
/// distance mode recomputes the three distances from the dataset on the fly
/// (which is what makes it the expensive variant).
std::vector<std::uint32_t> count_detourable_routes(const KnnGraph& g, ReorderMode mode,
                                                   const Dataset* ds = nullptr,
                                                   unsigned num_threads = 0);

/// Stable re-sort of each row ascending by (detour count, initial rank), then
/// truncation to the first d entries. Position in the output row is the rank.
Graph reorder_and_prune(const KnnGraph& g, const std::vector<std::uint32_t>& counts,
                        std::uint32_t d, unsigned num_threads = 0);

/// Plain truncation to the first d entries of each distance-sorted row.
Graph truncate_graph(const KnnGraph& g, std::uint32_t d);

ReverseGraph build_reverse_graph(const Graph& pruned, std::uint32_t cap);

/// Interleave pruned and reverse rows (pruned first; ceil(d/2) from pruned for
/// odd d), skipping ids already emitted and compensating from the pruned row.
Graph merge_graphs(const Graph& pruned, const ReverseGraph& rev, std::uint32_t d);

/// Full pipeline: detour counting -> reorder+prune -> reverse graph -> merge.
/// Rank mode never touches the dataset; pass ds only for distance mode.
Graph optimize(const KnnGraph& g, std::uint32_t d, const OptimizeOptions& opts,
               const Dataset* ds = nullptr, OptimizeStats* stats = nullptr);

}  // namespace fodg
