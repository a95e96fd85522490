#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fodg/dataset.hpp"
#include "fodg/graph.hpp"

namespace fodg {

/// k-NN graph with per-edge squared distances; every row sorted ascending by
/// (distance, id), no self loops, no duplicates.
struct KnnGraph {
    std::uint32_t num_nodes = 0;
    std::uint32_t degree = 0;
    std::vector<std::uint32_t> ids;    // num_nodes * degree
    std::vector<float> dists;          // num_nodes * degree
    bool converged = true;             // false when nn_descent hit max_rounds
    double graph_recall = -1.0;        // vs exact; filled on request

    std::span<const std::uint32_t> row_ids(std::uint32_t i) const {
        return {ids.data() + static_cast<std::size_t>(i) * degree, degree};
    }
    std::span<const float> row_dists(std::uint32_t i) const {
        return {dists.data() + static_cast<std::size_t>(i) * degree, degree};
    }
};

struct NNDescentParams {
    double sample_rate = 0.5;        // rho, fraction of "new" entries joined per round
    double termination_delta = 0.001;
    std::uint32_t max_rounds = 20;
    std::uint64_t seed = 0;
    unsigned num_threads = 0;        // 0 = hardware concurrency
};

/// Brute-force k-NN graph; the oracle path for small inputs and the reference
/// the approximate builder is scored against.
KnnGraph exact_knn_graph(const Dataset& ds, std::uint32_t k, unsigned num_threads = 0);

/// NN-descent: random initial rows, then rounds of local joins over sampled
/// new/old forward+reverse neighbors until insertions drop below
/// delta * N * k or max_rounds. Deterministic for a fixed seed.
KnnGraph nn_descent(const Dataset& ds, std::uint32_t k, const NNDescentParams& params);

/// Sort every row ascending by (distance, id). Idempotent.
void sort_neighbor_lists(KnnGraph& g);

/// Mean per-row recall of g against the exact k-NN graph on the same data.
double knn_graph_recall(const KnnGraph& g, const KnnGraph& exact);

}  // namespace fodg
