#include "fodg/search.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace fodg {

namespace {

constexpr float kInf = std::numeric_limits<float>::infinity();

std::uint32_t next_pow2(std::uint64_t x) {
    std::uint64_t c = 1;
    while (c < x) c <<= 1;
    if (c > (1ull << 31)) throw UsageError("visited table capacity overflow");
    return static_cast<std::uint32_t>(c);
}

std::uint32_t hash_id(std::uint32_t id, std::uint32_t mask) {
    return (id * 2654435761u) & mask;  // Knuth multiplicative hash
}

/// xorshift-style step over splitmix64 state; cheap per-sample randomness.
std::uint64_t rng_next(std::uint64_t& state) {
    state = mix_seed(state);
    return state;
}

}  // namespace

std::uint32_t SearchParams::resolved_max_iterations() const {
    if (max_iterations != 0) return max_iterations;
    std::uint32_t it = (2 * topm + width - 1) / width;  // ceil(2M/p)
    return std::clamp<std::uint32_t>(it, 16, 256);
}

void SearchParams::validate() const {
    if (k == 0) throw UsageError("search: k must be >= 1");
    if (k > topm) throw UsageError("search: require k <= M");
    if (width == 0) throw UsageError("search: p must be >= 1");
    if (min_iterations > resolved_max_iterations())
        throw UsageError("search: min_iterations exceeds max_iterations");
    if (hash_policy == HashPolicy::kForgettable) {
        if (hash_bits < 4 || hash_bits > 24)
            throw UsageError("search: forgettable hash_bits out of range");
        if (reset_interval == 0) throw UsageError("search: reset_interval must be >= 1");
    }
}

SearchBuffer::SearchBuffer(std::uint32_t m, std::uint32_t cand)
    : topm_size(m), cand_size(cand), entries(m + cand, Entry{kInvalidId, kInf}) {}

void update_topm(SearchBuffer& buf) {
    auto cand = buf.candidates();
    std::vector<Entry> sorted_cand(cand.begin(), cand.end());
    std::sort(sorted_cand.begin(), sorted_cand.end(), entry_less);

    auto top = buf.topm();
    std::vector<Entry> merged;
    merged.reserve(buf.topm_size);

    std::size_t ti = 0, ci = 0;
    while (ti < top.size() || ci < sorted_cand.size()) {
        Entry next;
        if (ci >= sorted_cand.size() || (ti < top.size() && entry_less(top[ti], sorted_cand[ci]))) {
            next = top[ti++];
        } else {
            next = sorted_cand[ci++];
        }
        // Duplicate ids carry equal distances, so they arrive adjacently;
        // collapse keeping the parent flag, even when the duplicate straddles
        // the top-M cut. Dummy/sentinel slots never dedup.
        if (!merged.empty() && strip_flag(next.id) == strip_flag(merged.back().id) &&
            strip_flag(next.id) != (kInvalidId & kIdMask)) {
            merged.back().id |= next.id & kParentFlag;
            continue;
        }
        if (merged.size() == buf.topm_size) break;
        merged.push_back(next);
    }
    while (merged.size() < buf.topm_size) merged.push_back(Entry{kInvalidId, kInf});
    std::copy(merged.begin(), merged.end(), buf.entries.begin());
}

std::vector<std::uint32_t> select_parents(SearchBuffer& buf, std::uint32_t p) {
    std::vector<std::uint32_t> parents;
    parents.reserve(p);
    for (Entry& e : buf.topm()) {
        if (parents.size() == p) break;
        if (e.id == kInvalidId) continue;  // dummy
        if (has_parent_flag(e.id)) continue;
        parents.push_back(strip_flag(e.id));
        e.id |= kParentFlag;
    }
    return parents;
}

VisitedTable::VisitedTable(HashPolicy policy, std::uint32_t capacity_pow2)
    : policy_(policy), mask_(capacity_pow2 - 1), slots_(capacity_pow2, kInvalidId) {
    if (capacity_pow2 == 0 || (capacity_pow2 & mask_) != 0)
        throw UsageError("visited table capacity must be a power of two");
}

VisitedTable VisitedTable::standard_sized(std::uint64_t expected_inserts) {
    // "At least twice" the worst-case insert count keeps the load factor
    // under 0.5 so linear probing stays short.
    return VisitedTable(HashPolicy::kStandard, next_pow2(2 * std::max<std::uint64_t>(1, expected_inserts)));
}

VisitedTable::Insert VisitedTable::insert(std::uint32_t id) {
    if (count_ == slots_.size()) return Insert::kFull;
    std::uint32_t pos = hash_id(id, mask_);
    while (slots_[pos] != kInvalidId) {
        if (slots_[pos] == id) return Insert::kPresent;
        pos = (pos + 1) & mask_;
    }
    slots_[pos] = id;
    ++count_;
    return Insert::kInserted;
}

bool VisitedTable::contains(std::uint32_t id) const {
    std::uint32_t pos = hash_id(id, mask_);
    while (slots_[pos] != kInvalidId) {
        if (slots_[pos] == id) return true;
        pos = (pos + 1) & mask_;
    }
    return false;
}

void VisitedTable::clear() {
    std::fill(slots_.begin(), slots_.end(), kInvalidId);
    count_ = 0;
}

void reset_table(VisitedTable& table, std::span<const std::uint32_t> topm_ids) {
    if (table.policy() == HashPolicy::kStandard) {
        std::cerr << "fodg: warning: reset_table called on a standard-policy table; ignored\n";
        return;
    }
    table.clear();
    for (std::uint32_t id : topm_ids) table.insert(id);
}

Traversal::Traversal(const Graph& graph, const Dataset& ds, std::span<const float> query,
                     const SearchParams& params, VisitedTable* shared_table)
    : graph_(graph),
      ds_(ds),
      query_(query),
      params_(params),
      max_iter_((params.validate(), params.resolved_max_iterations())),
      buf_(params.topm, params.width * graph.degree),
      own_table_(shared_table != nullptr
                     ? VisitedTable(HashPolicy::kStandard, 1)  // unused placeholder
                 : params.hash_policy == HashPolicy::kForgettable
                     ? VisitedTable(HashPolicy::kForgettable, 1u << params.hash_bits)
                     : VisitedTable::standard_sized(
                           static_cast<std::uint64_t>(max_iter_ + 1) * params.width *
                           graph.degree)),
      table_(shared_table != nullptr ? shared_table : &own_table_),
      rng_state_(mix_seed(params.seed ^ 0x5eedull)) {
    if (query.size() != ds.dim()) throw UsageError("search: query dimension mismatch");
    if (graph.num_nodes != ds.size()) throw UsageError("search: graph/dataset size mismatch");
}

float Traversal::eval_or_skip(std::uint32_t id, bool& evaluated) {
    auto r = table_->insert(id);
    if (r == VisitedTable::Insert::kFull) {
        if (table_->policy() == HashPolicy::kForgettable) {
            // Early reset; reseed with whatever the top-M list currently holds.
            std::vector<std::uint32_t> keep;
            for (const Entry& e : buf_.topm())
                if (e.id != kInvalidId) keep.push_back(strip_flag(e.id));
            reset_table(*table_, keep);
            ++stats_.hash_resets;
            r = table_->insert(id);
        } else {
            throw std::logic_error("visited table overflow under standard sizing");
        }
    }
    if (r == VisitedTable::Insert::kInserted) {
        evaluated = true;
        ++stats_.distance_evals;
        return squared_l2(ds_.row(id), query_);
    }
    evaluated = false;
    return kInf;
}

void Traversal::init() {
    auto cand = buf_.candidates();
    for (std::uint32_t j = 0; j < buf_.cand_size; ++j) {
        std::uint32_t id = static_cast<std::uint32_t>(rng_next(rng_state_) % graph_.num_nodes);
        bool evaluated = false;
        float d = eval_or_skip(id, evaluated);
        cand[j] = evaluated ? Entry{id, d} : Entry{kInvalidId, kInf};
    }
    pending_candidates_ = true;
}

void Traversal::expand_candidates(std::span<const std::uint32_t> parents) {
    auto cand = buf_.candidates();
    std::uint32_t slot = 0;
    for (std::uint32_t parent : parents) {
        for (std::uint32_t id : graph_.row(parent)) {
            bool evaluated = false;
            float d = eval_or_skip(id, evaluated);
            cand[slot++] = evaluated ? Entry{id, d} : Entry{kInvalidId, kInf};
        }
    }
    // Unused slots when fewer than p parents remain.
    for (; slot < buf_.cand_size; ++slot) cand[slot] = Entry{kInvalidId, kInf};
    pending_candidates_ = true;
}

bool Traversal::step() {
    if (done_) return false;
    update_topm(buf_);
    pending_candidates_ = false;
    ++stats_.iterations;

    std::vector<std::uint32_t> parents = select_parents(buf_, params_.width);
    if (parents.empty()) {
        // Every consumable entry has been a parent: the top-M id set cannot
        // change any more.
        stats_.converged = stats_.iterations >= params_.min_iterations;
        done_ = true;
        return false;
    }
    expand_candidates(parents);

    if (table_->policy() == HashPolicy::kForgettable &&
        stats_.iterations % params_.reset_interval == 0) {
        std::vector<std::uint32_t> keep;
        for (const Entry& e : buf_.topm())
            if (e.id != kInvalidId) keep.push_back(strip_flag(e.id));
        reset_table(*table_, keep);
        ++stats_.hash_resets;
    }

    if (stats_.iterations >= max_iter_) done_ = true;
    return !done_;
}

SearchResult Traversal::finish() {
    if (pending_candidates_) update_topm(buf_);
    SearchResult result;
    result.stats = stats_;
    auto top = buf_.topm();
    for (const Entry& e : top) {
        if (result.ids.size() == params_.k) break;
        if (e.id == kInvalidId) break;
        result.ids.push_back(strip_flag(e.id));
        result.dists.push_back(e.dist);
    }
    return result;
}

SearchResult search_one(const Graph& graph, const Dataset& ds,
                        std::span<const float> query, const SearchParams& params) {
    Traversal t(graph, ds, query, params);
    t.init();
    while (t.step()) {
    }
    return t.finish();
}

}  // namespace fodg
