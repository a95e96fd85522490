#include "fodg/graph_opt.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace fodg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_sorted(const KnnGraph& g) {
    if (g.dists.size() != g.ids.size())
        throw UsageError("graph_opt: input rows have no distances");
    for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
        auto ids = g.row_ids(v);
        auto dists = g.row_dists(v);
        for (std::uint32_t j = 1; j < g.degree; ++j) {
            bool ok = dists[j - 1] < dists[j] ||
                      (dists[j - 1] == dists[j] && ids[j - 1] < ids[j]);
            if (!ok) throw UsageError("graph_opt: input rows must be distance-sorted");
        }
    }
}

}  // namespace

std::string OptimizeStats::report() const {
    std::ostringstream os;
    os << "stage_detour_count_seconds=" << count_seconds << "\n"
       << "stage_reorder_seconds=" << reorder_seconds << "\n"
       << "stage_reverse_seconds=" << reverse_seconds << "\n"
       << "stage_merge_seconds=" << merge_seconds << "\n"
       << "optimize_total_seconds=" << total_seconds << "\n";
    return os.str();
}

std::vector<std::uint32_t> count_detourable_routes(const KnnGraph& g, ReorderMode mode,
                                                   const Dataset* ds, unsigned num_threads) {
    require_sorted(g);
    if (mode == ReorderMode::kDistance && ds == nullptr)
        throw UsageError("count_detourable_routes: distance mode requires the dataset");
    if (mode == ReorderMode::kDistance && ds->size() != g.num_nodes)
        throw UsageError("count_detourable_routes: dataset/graph size mismatch");

    const std::uint32_t deg = g.degree;
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(g.num_nodes) * deg, 0);

    parallel_for(g.num_nodes, num_threads, [&](std::size_t i) {
        std::uint32_t x = static_cast<std::uint32_t>(i);
        auto xrow = g.row_ids(x);
        std::unordered_map<std::uint32_t, std::uint32_t> rank_of;
        rank_of.reserve(deg * 2);
        for (std::uint32_t r = 0; r < deg; ++r) rank_of.emplace(xrow[r], r);

        // Distance mode recomputes every leg from the vectors rather than
        // reusing the stored row distances; this is the expensive variant the
        // rank approximation replaces.
        std::vector<float> xdist;
        if (mode == ReorderMode::kDistance) {
            xdist.resize(deg);
            for (std::uint32_t r = 0; r < deg; ++r)
                xdist[r] = squared_l2(ds->row(x), ds->row(xrow[r]));
        }

        std::size_t base = static_cast<std::size_t>(x) * deg;
        for (std::uint32_t rz = 0; rz < deg; ++rz) {
            std::uint32_t z = xrow[rz];
            auto zrow = g.row_ids(z);
            for (std::uint32_t rzy = 0; rzy < deg; ++rzy) {
                std::uint32_t y = zrow[rzy];
                if (y == x) continue;
                auto it = rank_of.find(y);
                if (it == rank_of.end()) continue;  // X->Y not an edge
                std::uint32_t ry = it->second;
                if (ry == rz) continue;  // Z == Y
                bool detour;
                if (mode == ReorderMode::kRank) {
                    detour = std::max(rz, rzy) < ry;
                } else {
                    float wzy = squared_l2(ds->row(z), ds->row(y));
                    detour = std::max(xdist[rz], wzy) < xdist[ry];
                }
                if (detour) ++counts[base + ry];
            }
        }
    });
    return counts;
}

Graph reorder_and_prune(const KnnGraph& g, const std::vector<std::uint32_t>& counts,
                        std::uint32_t d, unsigned num_threads) {
    if (d == 0 || d > g.degree)
        throw UsageError("reorder_and_prune: require 1 <= d <= input degree");
    if (counts.size() != g.ids.size())
        throw UsageError("reorder_and_prune: counts size mismatch");

    Graph out;
    out.num_nodes = g.num_nodes;
    out.degree = d;
    out.ids.resize(static_cast<std::size_t>(g.num_nodes) * d);

    parallel_for(g.num_nodes, num_threads, [&](std::size_t i) {
        std::uint32_t v = static_cast<std::uint32_t>(i);
        std::size_t base = static_cast<std::size_t>(v) * g.degree;
        std::vector<std::uint32_t> order(g.degree);
        std::iota(order.begin(), order.end(), 0u);
        // Stable sort on the count alone: equal counts keep initial-rank order.
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return counts[base + a] < counts[base + b];
        });
        auto src = g.row_ids(v);
        std::size_t obase = static_cast<std::size_t>(v) * d;
        for (std::uint32_t j = 0; j < d; ++j) out.ids[obase + j] = src[order[j]];
    });
    return out;
}

Graph truncate_graph(const KnnGraph& g, std::uint32_t d) {
    if (d == 0 || d > g.degree)
        throw UsageError("truncate_graph: require 1 <= d <= input degree");
    Graph out;
    out.num_nodes = g.num_nodes;
    out.degree = d;
    out.ids.resize(static_cast<std::size_t>(g.num_nodes) * d);
    for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
        auto src = g.row_ids(v);
        std::copy(src.begin(), src.begin() + d,
                  out.ids.begin() + static_cast<std::size_t>(v) * d);
    }
    return out;
}

ReverseGraph build_reverse_graph(const Graph& pruned, std::uint32_t cap) {
    ReverseGraph rev;
    rev.num_nodes = pruned.num_nodes;
    rev.rows.resize(pruned.num_nodes);

    // Candidates per target node: (rank of x->y in the pruned row, x).
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> cand(pruned.num_nodes);
    for (std::uint32_t x = 0; x < pruned.num_nodes; ++x) {
        auto row = pruned.row(x);
        for (std::uint32_t r = 0; r < pruned.degree; ++r) cand[row[r]].emplace_back(r, x);
    }
    for (std::uint32_t y = 0; y < pruned.num_nodes; ++y) {
        auto& c = cand[y];
        std::sort(c.begin(), c.end());  // ascending by (rank, source id)
        std::uint32_t keep = std::min<std::uint32_t>(cap, static_cast<std::uint32_t>(c.size()));
        rev.rows[y].reserve(keep);
        for (std::uint32_t j = 0; j < keep; ++j) rev.rows[y].push_back(c[j].second);
    }
    return rev;
}

Graph merge_graphs(const Graph& pruned, const ReverseGraph& rev, std::uint32_t d) {
    if (pruned.degree != d) throw UsageError("merge_graphs: pruned degree must equal d");
    if (rev.num_nodes != pruned.num_nodes) throw UsageError("merge_graphs: size mismatch");

    Graph out;
    out.num_nodes = pruned.num_nodes;
    out.degree = d;
    out.ids.resize(static_cast<std::size_t>(pruned.num_nodes) * d);

    for (std::uint32_t v = 0; v < pruned.num_nodes; ++v) {
        auto prow = pruned.row(v);
        const auto& rrow = rev.rows[v];
        std::size_t obase = static_cast<std::size_t>(v) * d;
        std::uint32_t emitted = 0;

        auto already = [&](std::uint32_t id) {
            for (std::uint32_t j = 0; j < emitted; ++j)
                if (out.ids[obase + j] == id) return true;
            return false;
        };
        std::size_t pi = 0, ri = 0;
        auto draw_p = [&]() -> std::int64_t {
            while (pi < prow.size()) {
                std::uint32_t id = prow[pi++];
                if (!already(id)) return id;
            }
            return -1;
        };
        auto draw_r = [&]() -> std::int64_t {
            while (ri < rrow.size()) {
                std::uint32_t id = rrow[ri++];
                if (!already(id)) return id;
            }
            return -1;
        };

        // Interleave p,r,p,r,... starting from the pruned row; a side that
        // runs out (or yields only duplicates) is compensated by the other.
        for (std::uint32_t slot = 0; slot < d; ++slot) {
            std::int64_t id = (slot % 2 == 0) ? draw_p() : draw_r();
            if (id < 0) id = (slot % 2 == 0) ? draw_r() : draw_p();
            if (id < 0)
                throw UsageError("merge_graphs: fewer than d distinct candidates");
            out.ids[obase + emitted++] = static_cast<std::uint32_t>(id);
        }
    }
    return out;
}

Graph optimize(const KnnGraph& g, std::uint32_t d, const OptimizeOptions& opts,
               const Dataset* ds, OptimizeStats* stats) {
    if (d == 0 || d > g.degree) throw UsageError("optimize: require 1 <= d <= input degree");
    OptimizeStats local;
    auto total0 = Clock::now();

    Graph pruned;
    if (opts.reorder) {
        auto t0 = Clock::now();
        std::vector<std::uint32_t> counts =
            count_detourable_routes(g, opts.mode, ds, opts.num_threads);
        local.count_seconds = seconds_since(t0);
        t0 = Clock::now();
        pruned = reorder_and_prune(g, counts, d, opts.num_threads);
        local.reorder_seconds = seconds_since(t0);
    } else {
        require_sorted(g);
        pruned = truncate_graph(g, d);
    }

    Graph result;
    if (opts.add_reverse) {
        auto t0 = Clock::now();
        ReverseGraph rev = build_reverse_graph(pruned, d);
        local.reverse_seconds = seconds_since(t0);
        t0 = Clock::now();
        result = merge_graphs(pruned, rev, d);
        local.merge_seconds = seconds_since(t0);
    } else {
        result = std::move(pruned);
    }

    local.total_seconds = seconds_since(total0);
    if (stats) *stats = local;
    return result;
}

}  // namespace fodg
