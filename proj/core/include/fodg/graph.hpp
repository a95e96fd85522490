#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fodg/common.hpp"

namespace fodg {

/// Directed graph with a fixed out-degree: N rows of exactly `degree` node
/// ids. Row order is meaningful (distance order, rank order, or merged order
/// depending on the producing stage).
struct Graph {
    std::uint32_t num_nodes = 0;
    std::uint32_t degree = 0;
    std::vector<std::uint32_t> ids;  // num_nodes * degree, row-major

    std::span<const std::uint32_t> row(std::uint32_t i) const {
        return {ids.data() + static_cast<std::size_t>(i) * degree, degree};
    }
    std::span<std::uint32_t> row(std::uint32_t i) {
        return {ids.data() + static_cast<std::size_t>(i) * degree, degree};
    }
};

/// Scan for structural invariants: ids in range, no self loops, no duplicate
/// ids within a row, MSB clear. Throws FormatError on violation.
void validate_graph(const Graph& g);

}  // namespace fodg
