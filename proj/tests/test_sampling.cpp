#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "fcpo/sampling.hpp"

using namespace fcpo;
using sampling::Design;

namespace {

// Occupancy of the n equal strata for one dimension of a design.
std::vector<int> stratum_counts(const Design& d, int dim_idx, const Bounds& b, int n) {
    std::vector<int> counts(n, 0);
    for (const Vec& p : d.points) {
        const double u = (p[dim_idx] - b.lb[dim_idx]) / (b.ub[dim_idx] - b.lb[dim_idx]);
        int s = static_cast<int>(u * n);
        s = std::min(n - 1, std::max(0, s));
        ++counts[s];
    }
    return counts;
}

}  // namespace

TEST_SUITE("lhs") {
    TEST_CASE("single point lies inside the bounds") {
        RngStream rng(1);
        const Bounds b = Bounds::uniform(3, -2.0, 5.0);
        const Design d = sampling::lhs(1, b, rng);
        REQUIRE(d.points.size() == 1);
        for (int j = 0; j < 3; ++j) {
            CHECK(d.points[0][j] >= b.lb[j]);
            CHECK(d.points[0][j] < b.ub[j]);
        }
    }
    TEST_CASE("n=4 in [0,4] places one point per unit stratum") {
        RngStream rng(2);
        const Bounds b = Bounds::uniform(1, 0.0, 4.0);
        const Design d = sampling::lhs(4, b, rng);
        const std::vector<int> counts = stratum_counts(d, 0, b, 4);
        for (int c : counts) CHECK(c == 1);
    }
    TEST_CASE("stratum occupancy is exactly one in every dimension") {
        RngStream rng(3);
        const Bounds b = Bounds::uniform(3, -10.0, 10.0);
        const Design d = sampling::lhs(10, b, rng);
        for (int j = 0; j < 3; ++j) {
            const std::vector<int> counts = stratum_counts(d, j, b, 10);
            for (int c : counts) CHECK(c == 1);
        }
    }
    TEST_CASE("n < 1 rejected") {
        RngStream rng(4);
        const Bounds b = Bounds::uniform(1, 0.0, 1.0);
        CHECK_THROWS_AS(sampling::lhs(0, b, rng), std::invalid_argument);
    }
}

TEST_SUITE("lhs_maximin") {
    TEST_CASE("one candidate equals a plain draw") {
        const Bounds b = Bounds::uniform(2, 0.0, 1.0);
        RngStream r1(11), r2(11);
        const Design a = sampling::lhs_maximin(5, b, r1, 1);
        const Design c = sampling::lhs(5, b, r2);
        CHECK(a.points == c.points);
    }
    TEST_CASE("selected min-distance equals the max over replayed candidates") {
        const Bounds b = Bounds::uniform(3, -1.0, 1.0);
        RngStream r1(21), r2(21);
        const Design chosen = sampling::lhs_maximin(8, b, r1, 10);
        double best = 0.0;
        for (int c = 0; c < 10; ++c)
            best = std::max(best, sampling::min_pairwise_distance(sampling::lhs(8, b, r2)));
        CHECK(sampling::min_pairwise_distance(chosen) == doctest::Approx(best).epsilon(1e-15));
    }
    TEST_CASE("beats the median single draw on a 1-D two-point design") {
        const Bounds b = Bounds::uniform(1, 0.0, 1.0);
        RngStream r1(31);
        const Design chosen = sampling::lhs_maximin(2, b, r1, 20);
        RngStream r2(99);
        std::vector<double> dists;
        for (int c = 0; c < 51; ++c)
            dists.push_back(sampling::min_pairwise_distance(sampling::lhs(2, b, r2)));
        std::sort(dists.begin(), dists.end());
        CHECK(sampling::min_pairwise_distance(chosen) >= dists[dists.size() / 2]);
    }
    TEST_CASE("maximin designs keep the stratification property") {
        const Bounds b = Bounds::uniform(2, 0.0, 10.0);
        RngStream rng(41);
        const Design d = sampling::lhs_maximin(6, b, rng, 10);
        for (int j = 0; j < 2; ++j) {
            std::vector<int> counts(6, 0);
            for (const Vec& p : d.points)
                ++counts[std::min(5, static_cast<int>((p[j] - 0.0) / 10.0 * 6))];
            for (int c : counts) CHECK(c == 1);
        }
    }
}
