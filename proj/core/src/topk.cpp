#include "fodg/topk.hpp"

#include <algorithm>
#include <unordered_set>

#include "fodg/common.hpp"

namespace fodg {

NeighborList exact_topk(const Dataset& ds, std::span<const float> q, std::uint32_t k) {
    if (q.size() != ds.dim()) throw UsageError("exact_topk: query dimension mismatch");
    if (k == 0 || k > ds.size()) throw UsageError("exact_topk: k out of range [1, N]");

    // Bounded max-heap keyed by (dist, id); the root is the current worst.
    auto worse = [](const std::pair<float, std::uint32_t>& a,
                    const std::pair<float, std::uint32_t>& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    };
    std::vector<std::pair<float, std::uint32_t>> heap;
    heap.reserve(k);
    for (std::uint32_t i = 0; i < ds.size(); ++i) {
        float d = squared_l2(ds.row(i), q);
        if (heap.size() < k) {
            heap.emplace_back(d, i);
            std::push_heap(heap.begin(), heap.end(), worse);
        } else if (worse({d, i}, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), worse);
            heap.back() = {d, i};
            std::push_heap(heap.begin(), heap.end(), worse);
        }
    }
    std::sort(heap.begin(), heap.end(), worse);

    NeighborList out;
    out.ids.reserve(k);
    out.dists.reserve(k);
    for (auto& [d, id] : heap) {
        out.ids.push_back(id);
        out.dists.push_back(d);
    }
    return out;
}

double recall(std::span<const std::uint32_t> result_ids,
              std::span<const std::uint32_t> truth_ids) {
    if (truth_ids.empty()) throw UsageError("recall: empty ground truth");
    if (result_ids.size() != truth_ids.size())
        throw UsageError("recall: result and truth lengths differ");
    std::unordered_set<std::uint32_t> truth(truth_ids.begin(), truth_ids.end());
    if (truth.size() != truth_ids.size()) throw UsageError("recall: duplicate ids in truth");
    std::unordered_set<std::uint32_t> seen;
    std::size_t hits = 0;
    for (std::uint32_t id : result_ids) {
        if (!seen.insert(id).second) throw UsageError("recall: duplicate ids in result");
        if (truth.count(id)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(truth_ids.size());
}

}  // namespace fodg
