#include "fodg/graph_metrics.hpp"

#include <atomic>
#include <sstream>
#include <vector>

namespace fodg {

std::string GraphQualityReport::report() const {
    std::ostringstream os;
    os << "num_nodes=" << num_nodes << "\n"
       << "degree=" << degree << "\n"
       << "strong_cc=" << strong_cc << "\n"
       << "avg_2hop=" << avg_2hop << "\n"
       << "max_2hop=" << max_2hop << "\n";
    return os.str();
}

// Tarjan with an explicit stack; recursion depth would be O(N) otherwise.
std::uint64_t strong_cc_count(const Graph& g) {
    const std::uint32_t n = g.num_nodes;
    constexpr std::uint32_t kUnvisited = 0xffffffffu;
    std::vector<std::uint32_t> index(n, kUnvisited), lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    std::uint32_t next_index = 0;
    std::uint64_t components = 0;

    struct Frame {
        std::uint32_t node;
        std::uint32_t edge;  // next out-edge to visit
    };
    std::vector<Frame> call;

    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        call.push_back({root, 0});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!call.empty()) {
            Frame& f = call.back();
            if (f.edge < g.degree) {
                std::uint32_t w = g.row(f.node)[f.edge++];
                if (index[w] == kUnvisited) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[f.node] = std::min(lowlink[f.node], index[w]);
                }
            } else {
                std::uint32_t v = f.node;
                call.pop_back();
                if (!call.empty())
                    lowlink[call.back().node] = std::min(lowlink[call.back().node], lowlink[v]);
                if (lowlink[v] == index[v]) {
                    ++components;
                    std::uint32_t w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                    } while (w != v);
                }
            }
        }
    }
    return components;
}

double avg_2hop_count(const Graph& g, unsigned num_threads) {
    const std::uint32_t n = g.num_nodes;
    unsigned t = resolve_thread_count(num_threads);
    if (static_cast<std::size_t>(t) > n) t = static_cast<unsigned>(n);

    // One stamp array per worker; a chunked loop so workers map to disjoint
    // node ranges.
    std::vector<std::uint64_t> partial(t, 0);
    std::size_t chunk = (n + t - 1) / t;
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < t; ++w) {
        std::size_t begin = static_cast<std::size_t>(w) * chunk;
        std::size_t end = std::min<std::size_t>(n, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&, w, begin, end] {
            std::vector<std::uint32_t> stamp(n, 0xffffffffu);
            std::uint64_t sum = 0;
            for (std::size_t i = begin; i < end; ++i) {
                std::uint32_t v = static_cast<std::uint32_t>(i);
                std::uint32_t count = 0;
                auto visit = [&](std::uint32_t u) {
                    if (u != v && stamp[u] != v) {
                        stamp[u] = v;
                        ++count;
                    }
                };
                for (std::uint32_t a : g.row(v)) {
                    visit(a);
                    for (std::uint32_t b : g.row(a)) visit(b);
                }
                sum += count;
            }
            partial[w] = sum;
        });
    }
    for (auto& th : workers) th.join();

    std::uint64_t total = 0;
    for (std::uint64_t s : partial) total += s;
    return static_cast<double>(total) / n;
}

GraphQualityReport measure_graph(const Graph& g, unsigned num_threads) {
    GraphQualityReport r;
    r.num_nodes = g.num_nodes;
    r.degree = g.degree;
    r.strong_cc = strong_cc_count(g);
    r.avg_2hop = avg_2hop_count(g, num_threads);
    r.max_2hop = static_cast<std::uint64_t>(g.degree) +
                 static_cast<std::uint64_t>(g.degree) * g.degree;
    return r;
}

}  // namespace fodg
