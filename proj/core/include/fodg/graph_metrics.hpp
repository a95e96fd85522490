#pragma once

#include <cstdint>
#include <string>

#include "fodg/graph.hpp"

namespace fodg {

struct GraphQualityReport {
    std::uint32_t num_nodes = 0;
    std::uint32_t degree = 0;
    std::uint64_t strong_cc = 0;
    double avg_2hop = 0.0;
    std::uint64_t max_2hop = 0;  // d + d^2

    std::string report() const;  // line-oriented key=value
};

/// Number of strongly connected components (iterative Tarjan; no recursion so
/// deep graphs do not blow the stack).
std::uint64_t strong_cc_count(const Graph& g);

/// Mean over nodes of the number of distinct nodes (excluding the source)
/// reachable in at most two edges. Per-node maximum is d + d^2.
double avg_2hop_count(const Graph& g, unsigned num_threads = 0);

GraphQualityReport measure_graph(const Graph& g, unsigned num_threads = 0);

}  // namespace fodg
