#include "fodg/knn_build.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "fodg/topk.hpp"

namespace fodg {

namespace {

struct Slot {
    std::uint32_t id;
    float dist;
    bool fresh;  // inserted since last sampled for a local join
};

bool slot_less(const Slot& a, const Slot& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.id < b.id;
}

/// Bounded sorted insertion: accept only if strictly better than the current
/// worst and the id is not already present. Keeps the row at size k.
bool try_insert(std::vector<Slot>& row, std::uint32_t id, float dist) {
    Slot cand{id, dist, true};
    if (!slot_less(cand, row.back())) return false;
    for (const Slot& s : row)
        if (s.id == id) return false;
    auto pos = std::upper_bound(row.begin(), row.end(), cand, slot_less);
    row.pop_back();
    row.insert(pos, cand);
    return true;
}

}  // namespace

KnnGraph exact_knn_graph(const Dataset& ds, std::uint32_t k, unsigned num_threads) {
    if (k == 0 || k >= ds.size()) throw UsageError("exact_knn_graph: require 1 <= k < N");

    KnnGraph g;
    g.num_nodes = ds.size();
    g.degree = k;
    g.ids.resize(static_cast<std::size_t>(g.num_nodes) * k);
    g.dists.resize(g.ids.size());

    parallel_for(g.num_nodes, num_threads, [&](std::size_t i) {
        std::uint32_t v = static_cast<std::uint32_t>(i);
        // Top k+1 always contains at least k non-self ids.
        NeighborList nl = exact_topk(ds, ds.row(v), k + 1);
        std::size_t out = static_cast<std::size_t>(v) * k;
        std::uint32_t written = 0;
        for (std::uint32_t j = 0; j < nl.ids.size() && written < k; ++j) {
            if (nl.ids[j] == v) continue;
            g.ids[out + written] = nl.ids[j];
            g.dists[out + written] = nl.dists[j];
            ++written;
        }
    });
    return g;
}

void sort_neighbor_lists(KnnGraph& g) {
    if (g.dists.size() != g.ids.size())
        throw UsageError("sort_neighbor_lists: rows have no distances");
    std::vector<Slot> row(g.degree);
    for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
        std::size_t base = static_cast<std::size_t>(v) * g.degree;
        for (std::uint32_t j = 0; j < g.degree; ++j)
            row[j] = {g.ids[base + j], g.dists[base + j], false};
        std::sort(row.begin(), row.end(), slot_less);
        for (std::uint32_t j = 0; j < g.degree; ++j) {
            g.ids[base + j] = row[j].id;
            g.dists[base + j] = row[j].dist;
        }
    }
}

double knn_graph_recall(const KnnGraph& g, const KnnGraph& exact) {
    if (g.num_nodes != exact.num_nodes || g.degree != exact.degree)
        throw UsageError("knn_graph_recall: shape mismatch");
    double sum = 0.0;
    for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
        auto truth = exact.row_ids(v);
        std::unordered_set<std::uint32_t> truth_set(truth.begin(), truth.end());
        std::size_t hits = 0;
        for (std::uint32_t id : g.row_ids(v))
            if (truth_set.count(id)) ++hits;
        sum += static_cast<double>(hits) / g.degree;
    }
    return sum / g.num_nodes;
}

KnnGraph nn_descent(const Dataset& ds, std::uint32_t k, const NNDescentParams& params) {
    const std::uint32_t n = ds.size();
    if (k == 0 || k >= n) throw UsageError("nn_descent: require 1 <= k < N");
    if (params.sample_rate <= 0.0 || params.sample_rate > 1.0)
        throw UsageError("nn_descent: sample_rate must be in (0, 1]");
    if (params.termination_delta <= 0.0 || params.termination_delta >= 1.0)
        throw UsageError("nn_descent: termination_delta must be in (0, 1)");

    std::vector<std::vector<Slot>> rows(n);

    // Random initialization: k distinct non-self ids per row.
    parallel_for(n, params.num_threads, [&](std::size_t i) {
        std::uint32_t v = static_cast<std::uint32_t>(i);
        std::mt19937_64 rng(mix_seed(params.seed ^ (0x1234567ull + v)));
        std::uniform_int_distribution<std::uint32_t> pick(0, n - 1);
        std::unordered_set<std::uint32_t> chosen;
        auto& row = rows[v];
        row.reserve(k);
        while (row.size() < k) {
            std::uint32_t id = pick(rng);
            if (id == v || !chosen.insert(id).second) continue;
            row.push_back({id, squared_l2(ds.row(v), ds.row(id)), true});
        }
        std::sort(row.begin(), row.end(), slot_less);
    });

    const std::uint32_t sample_cap =
        static_cast<std::uint32_t>(std::ceil(params.sample_rate * k));
    const std::uint64_t stop_below = static_cast<std::uint64_t>(
        params.termination_delta * static_cast<double>(n) * k);

    bool converged = false;
    std::uint32_t round = 0;
    std::vector<std::vector<std::uint32_t>> fresh_cand(n), stale_cand(n);
    std::vector<std::vector<std::pair<std::uint32_t, bool>>> reverse(n);

    for (; round < params.max_rounds; ++round) {
        // Reverse neighbor lists, capped at k per node via reservoir sampling.
        for (auto& r : reverse) r.clear();
        for (std::uint32_t u = 0; u < n; ++u) {
            std::mt19937_64 rng(mix_seed(params.seed ^ (round * 0x9e37ull + u) ^ 0xABCDull));
            for (const Slot& s : rows[u]) {
                auto& bucket = reverse[s.id];
                if (bucket.size() < k) {
                    bucket.emplace_back(u, s.fresh);
                } else {
                    std::uniform_int_distribution<std::size_t> pick(0, bucket.size());
                    std::size_t j = pick(rng);
                    if (j < bucket.size()) bucket[j] = {u, s.fresh};
                }
            }
        }

        // Candidate selection. Fresh forward entries that get sampled become
        // stale; fresh reverse entries are used as-is (their flag lives in the
        // source row and is cleared when that row samples them).
        for (std::uint32_t v = 0; v < n; ++v) {
            auto& fresh = fresh_cand[v];
            auto& stale = stale_cand[v];
            fresh.clear();
            stale.clear();
            std::vector<std::uint32_t> fresh_pool;
            std::unordered_set<std::uint32_t> seen{v};
            for (Slot& s : rows[v]) {
                if (!seen.insert(s.id).second) continue;
                if (s.fresh) fresh_pool.push_back(s.id); else stale.push_back(s.id);
            }
            for (auto& [u, was_fresh] : reverse[v]) {
                if (!seen.insert(u).second) continue;
                if (was_fresh) fresh_pool.push_back(u); else stale.push_back(u);
            }
            if (fresh_pool.size() <= sample_cap) {
                fresh = std::move(fresh_pool);
            } else {
                std::mt19937_64 rng(mix_seed(params.seed ^ (round * 0x51ull + v) ^ 0xEFull));
                std::shuffle(fresh_pool.begin(), fresh_pool.end(), rng);
                fresh.assign(fresh_pool.begin(), fresh_pool.begin() + sample_cap);
            }
            // Clear the flag on sampled forward entries.
            std::unordered_set<std::uint32_t> sampled(fresh.begin(), fresh.end());
            for (Slot& s : rows[v])
                if (s.fresh && sampled.count(s.id)) s.fresh = false;
        }

        // Local join: evaluate fresh x fresh and fresh x stale pairs.
        std::vector<std::vector<std::pair<std::uint64_t, float>>> proposals(n);
        parallel_for(n, params.num_threads, [&](std::size_t i) {
            std::uint32_t v = static_cast<std::uint32_t>(i);
            auto& out = proposals[v];
            const auto& fresh = fresh_cand[v];
            const auto& stale = stale_cand[v];
            for (std::size_t a = 0; a < fresh.size(); ++a) {
                for (std::size_t b = a + 1; b < fresh.size(); ++b) {
                    float d = squared_l2(ds.row(fresh[a]), ds.row(fresh[b]));
                    out.emplace_back((static_cast<std::uint64_t>(fresh[a]) << 32) | fresh[b], d);
                }
                for (std::uint32_t sid : stale) {
                    if (sid == fresh[a]) continue;
                    float d = squared_l2(ds.row(fresh[a]), ds.row(sid));
                    out.emplace_back((static_cast<std::uint64_t>(fresh[a]) << 32) | sid, d);
                }
            }
        });

        // Sequential apply keeps the result independent of the worker count.
        std::uint64_t inserted = 0;
        for (std::uint32_t v = 0; v < n; ++v) {
            for (auto& [packed, d] : proposals[v]) {
                std::uint32_t a = static_cast<std::uint32_t>(packed >> 32);
                std::uint32_t b = static_cast<std::uint32_t>(packed & 0xffffffffu);
                if (try_insert(rows[a], b, d)) ++inserted;
                if (try_insert(rows[b], a, d)) ++inserted;
            }
        }

        if (inserted < stop_below) {
            converged = true;
            break;
        }
    }

    KnnGraph g;
    g.num_nodes = n;
    g.degree = k;
    g.converged = converged;
    g.ids.resize(static_cast<std::size_t>(n) * k);
    g.dists.resize(g.ids.size());
    for (std::uint32_t v = 0; v < n; ++v) {
        std::size_t base = static_cast<std::size_t>(v) * k;
        for (std::uint32_t j = 0; j < k; ++j) {
            g.ids[base + j] = rows[v][j].id;
            g.dists[base + j] = rows[v][j].dist;
        }
    }
    return g;
}

}  // namespace fodg
