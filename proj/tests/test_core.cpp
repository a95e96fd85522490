#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "fodg/topk.hpp"
#include "test_util.hpp"

using namespace fodg;

TEST_CASE("squared L2 basics") {
    std::vector<float> z2{0, 0}, p34{3, 4}, v3{1, 2, 3};
    CHECK(distance(z2, z2) == 0.0f);
    CHECK(distance(p34, z2) == 25.0f);
    CHECK(distance(v3, v3) == 0.0f);
    CHECK(distance(p34, z2) == distance(z2, p34));
    CHECK_THROWS_AS(distance(z2, v3), UsageError);
}

TEST_CASE("exact_topk on 1-D points") {
    Dataset ds = testutil::make_points_1d({0, 1, 3, 7});

    std::vector<float> q1{2.9f};
    auto r1 = exact_topk(ds, q1, 1);
    CHECK(r1.ids == std::vector<std::uint32_t>{2});

    std::vector<float> q2{0.4f};
    auto r2 = exact_topk(ds, q2, 2);
    CHECK(r2.ids == std::vector<std::uint32_t>{0, 1});

    // Self query returns self first.
    auto r3 = exact_topk(ds, ds.row(3), 1);
    CHECK(r3.ids == std::vector<std::uint32_t>{3});

    CHECK_THROWS_AS(exact_topk(ds, q1, 5), UsageError);
    CHECK_THROWS_AS(exact_topk(ds, q1, 0), UsageError);
}

TEST_CASE("exact_topk tie-break is ascending id") {
    Dataset ds = testutil::make_points_1d({5, 5, 5, 1});
    std::vector<float> q{5.0f};
    auto r = exact_topk(ds, q, 3);
    CHECK(r.ids == std::vector<std::uint32_t>{0, 1, 2});
}

TEST_CASE("exact_topk is permutation-stable") {
    Dataset ds = testutil::make_uniform_dataset(64, 6, 7);
    std::vector<float> q(6, 0.5f);
    auto base = exact_topk(ds, q, 5);

    // Shuffle rows, relabel, expect the relabeled result.
    std::vector<std::uint32_t> perm(ds.size());
    std::iota(perm.begin(), perm.end(), 0u);
    std::mt19937_64 rng(11);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<float> shuffled(ds.size() * std::size_t(ds.dim()));
    for (std::uint32_t i = 0; i < ds.size(); ++i) {
        auto row = ds.row(perm[i]);
        std::copy(row.begin(), row.end(), shuffled.begin() + std::size_t(i) * ds.dim());
    }
    Dataset ds2(ds.dim(), std::move(shuffled));
    auto shuffled_result = exact_topk(ds2, q, 5);
    for (std::size_t j = 0; j < 5; ++j) CHECK(perm[shuffled_result.ids[j]] == base.ids[j]);
}

TEST_CASE("recall") {
    std::vector<std::uint32_t> a{1, 2, 3}, b{1, 2, 4}, t{1, 2, 3};
    CHECK(recall(a, t) == 1.0);
    CHECK(recall(b, t) == doctest::Approx(2.0 / 3.0));
    std::vector<std::uint32_t> r9{9}, t7{7};
    CHECK(recall(r9, t7) == 0.0);

    // Invariant to ordering of either list.
    std::vector<std::uint32_t> a_rev{3, 2, 1}, t_rev{3, 1, 2};
    CHECK(recall(a_rev, t_rev) == 1.0);

    std::vector<std::uint32_t> dup{1, 1, 2};
    CHECK_THROWS_AS(recall(dup, t), UsageError);
    CHECK_THROWS_AS(recall(a, dup), UsageError);
}

TEST_CASE("dataset validation") {
    CHECK_THROWS_AS(Dataset(0, {1.0f}), UsageError);
    CHECK_THROWS_AS(Dataset(2, {1.0f}), UsageError);
    CHECK_THROWS_AS(Dataset(1, {}), UsageError);
    std::vector<float> with_nan{1.0f, std::numeric_limits<float>::quiet_NaN()};
    CHECK_THROWS_AS(Dataset(1, std::move(with_nan)), UsageError);
}
