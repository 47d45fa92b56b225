#include <doctest.h>

#include "intdc/neighbors.hpp"
#include "oracles.hpp"

using namespace intdc;

TEST_CASE("build_index: sizes and errors") {
    CHECK(NeighborIndex(RowMatrix::Ones(1, 3), Metric::euclidean).size() == 1);
    std::mt19937_64 rng(1);
    CHECK(NeighborIndex(oracle::random_points(rng, 997, 3), Metric::euclidean).size() == 997);
    CHECK_THROWS_AS(NeighborIndex(RowMatrix(0, 3), Metric::euclidean), UsageError);
    RowMatrix bad = RowMatrix::Zero(4, 2);
    bad(2, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(NeighborIndex(bad, Metric::chebyshev), DataError);
}

TEST_CASE("knn: collinear points") {
    RowMatrix p(4, 1);
    p << 0, 1, 2, 3;
    const NeighborIndex idx(p, Metric::euclidean);
    const auto nn = idx.knn(0, 2, true);
    REQUIRE(nn.size() == 2);
    CHECK(nn[0] == Neighbor{1, 1.0});
    CHECK(nn[1] == Neighbor{2, 2.0});
    // Without self exclusion the query is its own nearest neighbour.
    CHECK(idx.knn(0, 1, false).front() == Neighbor{0, 0.0});
}

TEST_CASE("knn: ties go to the lower row") {
    RowMatrix p(5, 1);
    p << 0, 1, -1, 1, -1;
    const NeighborIndex idx(p, Metric::chebyshev);
    const auto nn = idx.knn(0, 3);
    CHECK(nn[0].row == 1);
    CHECK(nn[1].row == 2);
    CHECK(nn[2].row == 3);
}

TEST_CASE("knn: eligibility errors report the eligible count") {
    std::mt19937_64 rng(2);
    const NeighborIndex idx(oracle::random_points(rng, 10, 2), Metric::euclidean);
    try {
        idx.knn(5, 8, true, 1);  // rows 4 and 6 fall in the window
        FAIL("expected an error");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("only 7") != std::string::npos);
    }
    CHECK(idx.eligible_count(5, true, 1) == 7);
    CHECK(idx.knn(5, 7, true, 1).size() == 7);
}

TEST_CASE("knn: K = 40 on an embedding-sized cloud") {
    std::mt19937_64 rng(3);
    const NeighborIndex idx(oracle::random_points(rng, 997, 3), Metric::euclidean);
    CHECK(idx.knn(500, 40).size() == 40);
}

TEST_CASE("knn and count_within agree with brute force on random instances") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> rows(2, 300), cols(1, 6), kpick(1, 30), theiler_pick(0, 3);
    std::uniform_real_distribution<double> radius(0.01, 0.8);
    int instances = 0;
    for (; instances < 200; ++instances) {
        const bool lattice = instances % 4 == 0;  // exercise exact ties
        const RowMatrix p = oracle::random_points(rng, rows(rng), cols(rng), lattice);
        for (bool cheb : {false, true}) {
            const NeighborIndex idx(p, cheb ? Metric::chebyshev : Metric::euclidean);
            for (int rep = 0; rep < 3; ++rep) {
                const Eigen::Index q = std::uniform_int_distribution<Eigen::Index>(0, p.rows() - 1)(rng);
                const int theiler = theiler_pick(rng);
                const bool exclude_self = rep != 2;
                const auto expected = oracle::brute_knn(p, q, kpick(rng), cheb, exclude_self, theiler);
                if (expected.empty()) continue;
                const int k = static_cast<int>(expected.size());
                const auto got = idx.knn(q, k, exclude_self, theiler);
                REQUIRE(got.size() == expected.size());
                for (std::size_t i = 0; i < got.size(); ++i) {
                    CHECK(got[i].row == expected[i].second);
                    CHECK(got[i].distance == expected[i].first);
                    if (i) CHECK(got[i - 1].distance <= got[i].distance);
                }
                const double r = lattice ? std::floor(radius(rng) * 5.0) + 1.0 : radius(rng);
                for (bool strict : {false, true})
                    CHECK(idx.count_within(q, r, strict) == oracle::brute_count(p, q, r, cheb, strict));
            }
        }
    }
    CHECK(instances == 200);
}

TEST_CASE("count_within: edge cases") {
    RowMatrix p(3, 2);
    p << 0, 0, 0, 0, 5, 5;
    const NeighborIndex idx(p, Metric::euclidean);
    CHECK(idx.count_within(0, 1.0, false) >= 1);  // duplicate of the query
    CHECK(idx.count_within(2, 1.0, true) == 0);
    CHECK_THROWS_AS(idx.count_within(0, 0.0, true), UsageError);
}

TEST_CASE("chebyshev distance never exceeds euclidean") {
    std::mt19937_64 rng(8);
    const RowMatrix p = oracle::random_points(rng, 60, 4);
    const NeighborIndex e(p, Metric::euclidean), c(p, Metric::chebyshev);
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index j = 0; j < p.rows(); ++j) CHECK(c.distance(i, j) <= e.distance(i, j));
}

TEST_CASE("knn_point matches brute force from an external point") {
    std::mt19937_64 rng(9);
    const RowMatrix p = oracle::random_points(rng, 120, 2);
    const NeighborIndex idx(p, Metric::euclidean);
    RowMatrix both(121, 2);
    both << p, RowMatrix::Constant(1, 2, 0.5);
    const auto expected = oracle::brute_knn(both, 120, 7, false, true, 0);
    const double q[2] = {0.5, 0.5};
    const auto got = idx.knn_point(q, 7);
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].row == expected[i].second);
        CHECK(got[i].distance == expected[i].first);
    }
}
