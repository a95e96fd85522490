#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fodg/dataset.hpp"

namespace fodg {

/// Neighbor ids with optional parallel distances, sorted ascending by
/// (distance, id).
struct NeighborList {
    std::vector<std::uint32_t> ids;
    std::vector<float> dists;
};

/// Exact k nearest neighbors of q by exhaustive scan; the ground-truth oracle
/// for every recall measurement. Ties broken by ascending id.
NeighborList exact_topk(const Dataset& ds, std::span<const float> q, std::uint32_t k);

/// recall@k = |result ∩ truth| / k. Both lists must be duplicate-free and of
/// equal length.
double recall(std::span<const std::uint32_t> result_ids,
              std::span<const std::uint32_t> truth_ids);

}  // namespace fodg
