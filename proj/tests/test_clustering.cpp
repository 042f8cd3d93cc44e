#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "readc/clustering.hpp"

using namespace readc;

TEST_SUITE_BEGIN("clustering");

namespace {

std::vector<StateVector> random_points(Rng& rng, std::size_t n, std::size_t dim, double span) {
    std::vector<StateVector> pts;
    for (std::size_t i = 0; i < n; ++i) {
        StateVector p(dim);
        for (double& v : p) v = rng.uniform(0.0, span);
        pts.push_back(std::move(p));
    }
    return pts;
}

}  // namespace

TEST_CASE("identical points collapse into one cluster at any positive cutoff") {
    const std::vector<StateVector> pts{{1.0, 2.0}, {1.0, 2.0}};
    const ClusterPartition part = ward_cluster(pts, 1e-9);
    CHECK(part.clusters.size() == 1);
    CHECK(part.clusters[0] == std::vector<std::size_t>{0, 1});
}

TEST_CASE("ward merge costs on a line match the hand evaluation") {
    const std::vector<StateVector> pts{{0.0}, {1.0}, {10.0}};
    const ClusterPartition part = ward_cluster(pts, 3.0);
    REQUIRE(part.clusters.size() == 2);
    CHECK(part.clusters[0] == std::vector<std::size_t>{0, 1});
    CHECK(part.clusters[1] == std::vector<std::size_t>{2});
    REQUIRE(part.merge_heights.size() == 1);
    CHECK(part.merge_heights[0] == doctest::Approx(0.5));  // (1*1/2) * 1^2

    // Absorbing the far point would cost (2*1/3) * 9.5^2.
    const ClusterPartition all = ward_cluster(pts, 100.0);
    REQUIRE(all.merge_heights.size() == 2);
    CHECK(all.merge_heights[1] == doctest::Approx(2.0 / 3.0 * 9.5 * 9.5));
}

TEST_CASE("agglomeration equals the exhaustive-search oracle on small inputs") {
    Rng rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(7);  // up to 8 points
        const std::vector<StateVector> pts = random_points(rng, n, 2, 8.0);
        const double cutoff = rng.uniform(0.5, 40.0);

        const ClusterPartition got = ward_cluster(pts, cutoff);
        const oracles::WardOracle want = oracles::ward_reference(pts, cutoff);

        REQUIRE(got.clusters.size() == want.members.size());
        for (std::size_t c = 0; c < got.clusters.size(); ++c)
            CHECK(got.clusters[c] == want.members[c]);
        REQUIRE(got.merge_heights.size() == want.heights.size());
        for (std::size_t m = 0; m < got.merge_heights.size(); ++m)
            CHECK(got.merge_heights[m] == doctest::Approx(want.heights[m]).epsilon(1e-9));
    }
}

TEST_CASE("accepted merge costs are nondecreasing") {
    Rng rng(67);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<StateVector> pts = random_points(rng, 40, 3, 10.0);
        const ClusterPartition part = ward_cluster(pts, 1e9);
        for (std::size_t i = 1; i < part.merge_heights.size(); ++i)
            CHECK(part.merge_heights[i] >= part.merge_heights[i - 1] - 1e-9);
    }
}

TEST_CASE("partitions are disjoint covers") {
    Rng rng(71);
    for (double cutoff : {0.5, 3.0, 20.0, 1000.0}) {
        const std::vector<StateVector> pts = random_points(rng, 60, 4, 12.0);
        const ClusterPartition part = ward_cluster(pts, cutoff);
        std::vector<int> seen(pts.size(), 0);
        for (const auto& cluster : part.clusters)
            for (std::size_t idx : cluster) ++seen[idx];
        for (int count : seen) CHECK(count == 1);
    }
}

TEST_CASE("raising the cutoff never increases the cluster count") {
    Rng rng(73);
    const std::vector<StateVector> pts = random_points(rng, 50, 2, 10.0);
    std::size_t prev = pts.size() + 1;
    for (double cutoff : {0.01, 0.1, 1.0, 3.0, 10.0, 100.0, 10000.0}) {
        const std::size_t count = ward_cluster(pts, cutoff).clusters.size();
        CHECK(count <= prev);
        prev = count;
    }
}

TEST_CASE("cutoff bisection reaches requested cluster counts") {
    Rng rng(79);
    const std::vector<StateVector> pts = random_points(rng, 64, 3, 50.0);
    for (std::size_t target : {1ul, 4ul, 10ul, 32ul, 64ul}) {
        const ClusterPartition part = ward_cluster_count(pts, target);
        CHECK(part.clusters.size() == target);
    }
    // Unattainably large counts saturate at the number of points.
    CHECK(ward_cluster_count(pts, 500).clusters.size() == 64);
}

TEST_CASE("region selection picks the highest mean cluster") {
    const std::vector<StateVector> pts{{0.0}, {0.1}, {5.0}, {5.1}};
    const ClusterPartition part = ward_cluster(pts, 1.0);
    REQUIRE(part.clusters.size() == 2);

    std::vector<double> uncertainty{0.1, 0.2, 3.0, 1.0};  // cluster {2,3} mean 2.0
    Rng rng(5);
    double score = 0.0;
    int cluster = -1;
    const std::size_t pick = region_select(part, uncertainty, rng, &score, &cluster);
    CHECK(cluster == 1);
    CHECK(score == doctest::Approx(2.0));
    CHECK((pick == 2 || pick == 3));
}

TEST_CASE("region selection tie-breaks to the lowest cluster and replays under a seed") {
    const std::vector<StateVector> pts{{0.0}, {0.1}, {9.0}, {9.1}};
    const ClusterPartition part = ward_cluster(pts, 1.0);
    std::vector<double> equal(4, 1.0);
    int cluster = -1;
    Rng a(42);
    const std::size_t pick_a = region_select(part, equal, a, nullptr, &cluster);
    CHECK(cluster == 0);
    Rng b(42);
    CHECK(region_select(part, equal, b) == pick_a);
}

TEST_CASE("a dominant singleton region is always chosen") {
    const std::vector<StateVector> pts{{0.0}, {0.2}, {50.0}};
    const ClusterPartition part = ward_cluster(pts, 1.0);
    std::vector<double> uncertainty{0.0, 0.0, 10.0};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        CHECK(region_select(part, uncertainty, rng) == 2);
    }
}

TEST_SUITE_END();
