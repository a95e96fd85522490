#include <doctest.h>

#include "fodg/graph_metrics.hpp"
#include "fodg/graph_opt.hpp"
#include "fodg/knn_build.hpp"
#include "test_util.hpp"

using namespace fodg;

namespace {

Graph cycle_graph(std::uint32_t n) {
    Graph g;
    g.num_nodes = n;
    g.degree = 1;
    for (std::uint32_t v = 0; v < n; ++v) g.ids.push_back((v + 1) % n);
    return g;
}

}  // namespace

TEST_CASE("strong_cc_count") {
    SUBCASE("directed cycle is one component") {
        CHECK(strong_cc_count(cycle_graph(10)) == 1);
    }
    SUBCASE("chain prefix yields one component per chain node") {
        // 0->1->2->3->2: {2,3} form a cycle, 0 and 1 are singletons -> 3 CCs.
        Graph dag{4, 1, {1, 2, 3, 2}};
        CHECK(strong_cc_count(dag) == 3);
    }
    SUBCASE("two disjoint 2-cycles") {
        Graph g{4, 1, {1, 0, 3, 2}};
        CHECK(strong_cc_count(g) == 2);
    }
    SUBCASE("invariant under relabeling") {
        Graph g{4, 1, {1, 0, 3, 2}};
        Graph relabeled{4, 1, {3, 2, 1, 0}};  // swap labels 0<->2, 1<->3
        CHECK(strong_cc_count(g) == strong_cc_count(relabeled));
    }
}

TEST_CASE("avg_2hop_count") {
    SUBCASE("complete digraph on 3 nodes") {
        Graph g{3, 2, {1, 2, 0, 2, 0, 1}};
        CHECK(avg_2hop_count(g) == 2.0);
    }
    SUBCASE("2-cycle excludes the source") {
        Graph g{2, 1, {1, 0}};
        CHECK(avg_2hop_count(g) == 1.0);
    }
    SUBCASE("never exceeds d + d^2") {
        Dataset ds = testutil::make_uniform_dataset(400, 8, 3);
        KnnGraph knn = exact_knn_graph(ds, 12);
        Graph g = optimize(knn, 6, {});
        double max2 = 6 + 36;
        CHECK(avg_2hop_count(g) <= max2);
        CHECK(avg_2hop_count(g) > 0.0);
    }
    SUBCASE("thread count does not change the result") {
        Dataset ds = testutil::make_uniform_dataset(200, 4, 4);
        Graph g = optimize(exact_knn_graph(ds, 8), 4, {});
        CHECK(avg_2hop_count(g, 1) == avg_2hop_count(g, 4));
    }
}

TEST_CASE("measure_graph report") {
    Graph g{2, 1, {1, 0}};
    auto r = measure_graph(g);
    CHECK(r.strong_cc == 1);
    CHECK(r.avg_2hop == 1.0);
    CHECK(r.max_2hop == 2);
    auto text = r.report();
    CHECK(text.find("strong_cc=1") != std::string::npos);
    CHECK(text.find("avg_2hop=1") != std::string::npos);
}

TEST_CASE("every optimization variant beats plain truncation on 2-hop coverage") {
    for (std::uint64_t seed : {11ull, 12ull}) {
        Dataset ds = testutil::make_uniform_dataset(1024, 16, seed);
        KnnGraph knn = exact_knn_graph(ds, 24);

        Graph truncated = truncate_graph(knn, 8);
        OptimizeOptions reorder_only{ReorderMode::kRank, true, false, 0};
        OptimizeOptions reverse_only{ReorderMode::kRank, false, true, 0};
        OptimizeOptions full{ReorderMode::kRank, true, true, 0};

        double h_trunc = avg_2hop_count(truncated);
        CHECK(avg_2hop_count(optimize(knn, 8, reorder_only)) > h_trunc);
        CHECK(avg_2hop_count(optimize(knn, 8, reverse_only)) > h_trunc);
        CHECK(avg_2hop_count(optimize(knn, 8, full)) > h_trunc);
    }
}
