#include "oulab/mc.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

using namespace oulab;

TEST_SUITE("mc")
{
    TEST_CASE("pairwise sum is exact on integers and accurate on harmonic terms")
    {
        std::vector<double> v(100000);
        std::iota(v.begin(), v.end(), 1.0);
        CHECK(pairwise_sum(v) == 100000.0 * 100001.0 / 2.0);
        std::vector<double> h(1000000);
        long double ref = 0.0L;
        for (std::size_t i = 0; i < h.size(); ++i) {
            h[i] = 1.0 / static_cast<double>(i + 1);
            ref += h[i];
        }
        CHECK(pairwise_sum(h) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-15));
        CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
    }

    TEST_CASE("mean and standard error")
    {
        std::vector<double> const v{1.0, 2.0, 3.0, 4.0};
        auto const e = estimate_mean(v);
        CHECK(e.mean == 2.5);
        CHECK(e.n == 4);
        // sample sd = sqrt(5/3)
        CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
        CHECK_THROWS(estimate_mean(std::vector<double>{1.0}));
    }

    TEST_CASE("upper bound is non-decreasing in the confidence level")
    {
        McEstimate const e{1.0, 0.1, 100};
        double previous = -INFINITY;
        for (double c = 0.5; c < 0.99999; c += 0.01) {
            double const u = e.upper(c);
            CHECK(u >= previous);
            previous = u;
        }
        CHECK(e.upper(0.999) == doctest::Approx(1.0 + 0.1 * 3.090232306167813));
        CHECK(e.upper(0.5) == doctest::Approx(1.0));
    }

    TEST_CASE("parallel_for visits every index once for any worker count")
    {
        for (std::size_t workers : {1u, 2u, 3u, 7u, 64u}) {
            std::vector<int> hits(1001, 0);
            parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i] += 1; });
            CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
        }
        parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
    }

    TEST_CASE("parallel_for rethrows task failures")
    {
        CHECK_THROWS_AS(parallel_for(100, 4,
                                     [](std::size_t i) {
                                         if (i == 57) {
                                             throw std::runtime_error("boom");
                                         }
                                     }),
                        std::runtime_error);
    }

    TEST_CASE("resolve_workers maps zero to the hardware count")
    {
        CHECK(resolve_workers(3) == 3);
        CHECK(resolve_workers(0) >= 1);
    }
}
