#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fodg/dataset.hpp"
#include "fodg/graph.hpp"

namespace fodg {

/// Integer matrix as loaded from an .ivecs file (ground-truth id lists).
struct IdMatrix {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::int32_t> data;  // row-major

    std::span<const std::int32_t> row(std::uint32_t i) const {
        return {data.data() + static_cast<std::size_t>(i) * cols, cols};
    }
};

// TexMex-style .fvecs / .ivecs: repeated [int32 dim][dim components],
// little-endian, all records sharing one dim.
Dataset load_fvecs(const std::string& path);
IdMatrix load_ivecs(const std::string& path);
void save_fvecs(const Dataset& ds, const std::string& path);
void save_ivecs(const IdMatrix& m, const std::string& path);

// Graph container: 8-byte magic "CAGGRAPH", u64 N, u32 degree, then
// N*degree u32 ids, row-major, little-endian. Parent flags (id MSB) are
// never persisted.
void save_graph(const Graph& g, const std::string& path);
Graph load_graph(const std::string& path);

}  // namespace fodg
