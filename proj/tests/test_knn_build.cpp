#include <doctest.h>

#include <unordered_set>

#include "fodg/knn_build.hpp"
#include "test_util.hpp"

using namespace fodg;

namespace {

void check_row_invariants(const KnnGraph& g) {
    for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
        auto ids = g.row_ids(v);
        auto dists = g.row_dists(v);
        std::unordered_set<std::uint32_t> seen;
        for (std::uint32_t j = 0; j < g.degree; ++j) {
            REQUIRE(ids[j] != v);
            REQUIRE(ids[j] < g.num_nodes);
            REQUIRE(seen.insert(ids[j]).second);
            if (j > 0) {
                bool sorted = dists[j - 1] < dists[j] ||
                              (dists[j - 1] == dists[j] && ids[j - 1] < ids[j]);
                REQUIRE(sorted);
            }
        }
    }
}

}  // namespace

TEST_CASE("exact_knn_graph on 1-D points") {
    Dataset ds = testutil::make_points_1d({0, 1, 3, 7});

    auto g1 = exact_knn_graph(ds, 1);
    CHECK(g1.ids == std::vector<std::uint32_t>{1, 0, 1, 2});

    auto g2 = exact_knn_graph(ds, 2);
    CHECK(g2.row_ids(3)[0] == 2);
    CHECK(g2.row_ids(3)[1] == 1);
    CHECK(g2.row_dists(3)[0] == 16.0f);
    CHECK(g2.row_dists(3)[1] == 36.0f);

    CHECK_THROWS_AS(exact_knn_graph(ds, 4), UsageError);
}

TEST_CASE("exact_knn_graph with duplicate rows") {
    Dataset ds = testutil::make_points_1d({2, 9, 2, 30});
    auto g = exact_knn_graph(ds, 1);
    // Duplicate point wins with distance 0.
    CHECK(g.row_ids(0)[0] == 2);
    CHECK(g.row_ids(2)[0] == 0);
    CHECK(g.row_dists(0)[0] == 0.0f);
}

TEST_CASE("sort_neighbor_lists") {
    KnnGraph g;
    g.num_nodes = 1;
    g.degree = 2;

    SUBCASE("two-element sort") {
        g.ids = {5, 2};
        g.dists = {0.9f, 0.1f};
        sort_neighbor_lists(g);
        CHECK(g.ids == std::vector<std::uint32_t>{2, 5});
        CHECK(g.dists == std::vector<float>{0.1f, 0.9f});
    }
    SUBCASE("equal distances break ties by id") {
        g.ids = {5, 2};
        g.dists = {0.3f, 0.3f};
        sort_neighbor_lists(g);
        CHECK(g.ids == std::vector<std::uint32_t>{2, 5});
    }
    SUBCASE("idempotent on sorted input") {
        g.ids = {2, 5};
        g.dists = {0.1f, 0.9f};
        sort_neighbor_lists(g);
        auto once = g.ids;
        sort_neighbor_lists(g);
        CHECK(g.ids == once);
    }
    SUBCASE("missing distances") {
        g.ids = {5, 2};
        g.dists.clear();
        CHECK_THROWS_AS(sort_neighbor_lists(g), UsageError);
    }
}

TEST_CASE("nn_descent reaches high graph recall on random data") {
    Dataset ds = testutil::make_uniform_dataset(100, 8, 42);
    auto exact = exact_knn_graph(ds, 8);

    NNDescentParams params;
    params.seed = 1;
    auto approx = nn_descent(ds, 8, params);
    check_row_invariants(approx);
    CHECK(knn_graph_recall(approx, exact) >= 0.90);
}

TEST_CASE("nn_descent with k = N-1 equals the exact graph") {
    Dataset ds = testutil::make_uniform_dataset(24, 4, 5);
    auto exact = exact_knn_graph(ds, 23);
    NNDescentParams params;
    params.seed = 3;
    auto approx = nn_descent(ds, 23, params);
    CHECK(approx.ids == exact.ids);
}

TEST_CASE("nn_descent determinism") {
    Dataset ds = testutil::make_uniform_dataset(80, 6, 9);
    NNDescentParams params;
    params.seed = 77;
    auto a = nn_descent(ds, 6, params);
    auto b = nn_descent(ds, 6, params);
    CHECK(a.ids == b.ids);
    CHECK(a.dists == b.dists);

    params.num_threads = 1;
    auto c = nn_descent(ds, 6, params);
    CHECK(c.ids == a.ids);
}

TEST_CASE("nn_descent parameter validation") {
    Dataset ds = testutil::make_uniform_dataset(16, 2, 1);
    NNDescentParams bad;
    bad.sample_rate = 0.0;
    CHECK_THROWS_AS(nn_descent(ds, 4, bad), UsageError);
    bad = {};
    bad.termination_delta = 1.5;
    CHECK_THROWS_AS(nn_descent(ds, 4, bad), UsageError);
    CHECK_THROWS_AS(nn_descent(ds, 16, {}), UsageError);
}
