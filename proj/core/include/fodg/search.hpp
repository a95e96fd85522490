#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fodg/dataset.hpp"
#include "fodg/graph.hpp"

namespace fodg {

enum class HashPolicy { kStandard, kForgettable };

struct SearchParams {
    std::uint32_t k = 10;
    std::uint32_t topm = 64;           // M, internal top-M list length (M >= k)
    std::uint32_t width = 1;           // p, parents expanded per iteration
    std::uint32_t max_iterations = 0;  // 0 = ceil(2M/p) clamped to [16, 256]
    std::uint32_t min_iterations = 1;
    HashPolicy hash_policy = HashPolicy::kStandard;
    std::uint32_t hash_bits = 11;       // forgettable table size = 2^bits
    std::uint32_t reset_interval = 1;   // iterations between forgettable resets
    std::uint64_t seed = 0;

    std::uint32_t resolved_max_iterations() const;
    void validate() const;
};

/// Buffer element: node id in the low 31 bits, parent flag in the MSB.
struct Entry {
    std::uint32_t id = kInvalidId;
    float dist = 0.0f;
};

inline bool entry_less(const Entry& a, const Entry& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return strip_flag(a.id) < strip_flag(b.id);
}

/// Internal top-M list followed by the p*d candidate list, one contiguous
/// allocation. Skipped/dummy slots hold {kInvalidId, +inf}.
struct SearchBuffer {
    std::uint32_t topm_size = 0;
    std::uint32_t cand_size = 0;
    std::vector<Entry> entries;  // topm_size + cand_size

    SearchBuffer() = default;
    SearchBuffer(std::uint32_t m, std::uint32_t cand);

    std::span<Entry> topm() { return {entries.data(), topm_size}; }
    std::span<const Entry> topm() const { return {entries.data(), topm_size}; }
    std::span<Entry> candidates() { return {entries.data() + topm_size, cand_size}; }
    std::span<const Entry> candidates() const {
        return {entries.data() + topm_size, cand_size};
    }
};

/// Replace the top-M segment with the M smallest entries of the whole buffer:
/// sort the candidates, then a two-list merge against the already-sorted
/// top-M segment. Duplicate ids collapse to one entry keeping the parent
/// flag. Bit-equal to a full sort of the concatenated buffer.
void update_topm(SearchBuffer& buf);

/// First p unflagged top-M entries; their flags are set in place. An empty
/// return means every live entry has been a parent: convergence.
std::vector<std::uint32_t> select_parents(SearchBuffer& buf, std::uint32_t p);

/// Open-addressing hash set of visited node ids, linear probing.
class VisitedTable {
public:
    VisitedTable(HashPolicy policy, std::uint32_t capacity_pow2);

    /// Standard policy, capacity = smallest power of two >= 2 * expected.
    static VisitedTable standard_sized(std::uint64_t expected_inserts);

    enum class Insert { kInserted, kPresent, kFull };
    Insert insert(std::uint32_t id);
    bool contains(std::uint32_t id) const;

    HashPolicy policy() const { return policy_; }
    std::uint32_t capacity() const { return static_cast<std::uint32_t>(slots_.size()); }
    std::uint32_t size() const { return count_; }
    void clear();

private:
    HashPolicy policy_;
    std::uint32_t mask_;
    std::uint32_t count_ = 0;
    std::vector<std::uint32_t> slots_;
};

/// Empty the table and register exactly the given (current top-M) ids.
/// No-op with a misuse warning under the standard policy.
void reset_table(VisitedTable& table, std::span<const std::uint32_t> topm_ids);

struct SearchStats {
    std::uint32_t iterations = 0;
    std::uint64_t distance_evals = 0;
    std::uint32_t hash_resets = 0;
    bool converged = false;
};

struct SearchResult {
    std::vector<std::uint32_t> ids;  // flags stripped, sorted by (dist, id)
    std::vector<float> dists;
    SearchStats stats;
};

/// One query's traversal, exposed stepwise so callers (and tests) can drive
/// iterations individually; search_one is the plain run-to-completion wrapper.
/// A shared visited table may be injected for multi-team execution.
class Traversal {
public:
    Traversal(const Graph& graph, const Dataset& ds, std::span<const float> query,
              const SearchParams& params, VisitedTable* shared_table = nullptr);

    /// Step 0: fill the candidate list with p*d uniformly random samples
    /// (with replacement; the visited table collapses duplicates).
    void init();

    /// One iteration: top-M update, parent selection, neighbor expansion with
    /// visited filtering. Returns false once converged or out of iterations.
    bool step();

    bool done() const { return done_; }

    /// Gather parents' neighbor rows into the candidate list, computing a
    /// distance only on first visit; already-visited ids get the +inf
    /// sentinel. Normally driven by step(); public for stepwise callers.
    void expand_candidates(std::span<const std::uint32_t> parents);

    /// Final top-M flush and top-k extraction.
    SearchResult finish();

    const SearchBuffer& buffer() const { return buf_; }
    const SearchStats& stats() const { return stats_; }
    const VisitedTable& table() const { return *table_; }

private:
    float eval_or_skip(std::uint32_t id, bool& evaluated);

    const Graph& graph_;
    const Dataset& ds_;
    std::span<const float> query_;
    SearchParams params_;
    std::uint32_t max_iter_;
    SearchBuffer buf_;
    VisitedTable own_table_;
    VisitedTable* table_;
    SearchStats stats_;
    std::uint64_t rng_state_;
    bool pending_candidates_ = false;
    bool done_ = false;
};

SearchResult search_one(const Graph& graph, const Dataset& ds,
                        std::span<const float> query, const SearchParams& params);

}  // namespace fodg
