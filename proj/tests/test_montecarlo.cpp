#include "qstat/errors.hpp"
#include "qstat/montecarlo.hpp"
#include "qstat/occupancy.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace qstat;

TEST_SUITE("montecarlo") {

TEST_CASE("certain picks")
{
    const auto hist = sample_mb_process(11, 1.0, 100, 5);
    CHECK(hist.counts[11] == 100);
    CHECK(std::accumulate(hist.counts.begin(), hist.counts.end(), std::uint64_t{0}) == 100);
    const auto none = sample_mb_process(11, 0.0, 100, 5);
    CHECK(none.counts[0] == 100);
}

TEST_CASE("two fair coins")
{
    const auto hist = sample_mb_process(2, 0.5, 1000000, 11);
    const auto f = hist.frequencies();
    CHECK(f[0] == doctest::Approx(0.25).epsilon(0.01));
    CHECK(f[1] == doctest::Approx(0.5).epsilon(0.01));
    CHECK(f[2] == doctest::Approx(0.25).epsilon(0.01));
    const std::vector<double> exact{0.25, 0.5, 0.25};
    CHECK(total_variation(hist, exact) < 0.005);
}

TEST_CASE("pick process converges to the binomial")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const std::uint64_t draws = 20000;
        const auto hist = sample_mb_process(11, 0.5, draws, seed);
        CHECK(total_variation(hist, pmf_vector(Statistics::MB, 11, 0.5)) <= 5.0 / std::sqrt(double(draws)));
    }
}

TEST_CASE("pick process is not Bose-Einstein")
{
    const auto hist = sample_mb_process(11, 0.5, 100000, 99);
    CHECK(total_variation(hist, pmf_vector(Statistics::BE, 11, 0.5)) > 0.1);
}

TEST_CASE("sample_pmf")
{
    const std::vector<double> point{1.0, 0.0, 0.0, 0.0};
    CHECK(sample_pmf(point, 500, 1).counts[0] == 500);

    const std::vector<double> last{0.0, 0.0, 1.0};
    CHECK(sample_pmf(last, 500, 1).counts[2] == 500);

    const std::vector<double> coin{0.5, 0.5};
    const auto hist = sample_pmf(coin, 10000, 3);
    CHECK(std::abs(double(hist.counts[0]) - 5000.0) <= 150.0);

    const auto uniform = sample_pmf(pmf_vector(Statistics::BE, 11, 0.5), 1000000, 17);
    for (double f : uniform.frequencies())
        CHECK(f == doctest::Approx(1.0 / 12.0).epsilon(0.03));

    const std::vector<double> bad{0.5, 0.4};
    CHECK_THROWS_AS(sample_pmf(bad, 10, 1), InvalidDistributionError);
    const std::vector<double> negative{1.5, -0.5};
    CHECK_THROWS_AS(sample_pmf(negative, 10, 1), InvalidDistributionError);
}

TEST_CASE("reproducibility")
{
    CHECK(sample_mb_process(9, 0.3, 5000, 77).counts == sample_mb_process(9, 0.3, 5000, 77).counts);
    CHECK(sample_mb_process(9, 0.3, 5000, 77).counts != sample_mb_process(9, 0.3, 5000, 78).counts);
    const auto pmf = pmf_vector(Statistics::BE, 9, 0.2);
    CHECK(sample_pmf(pmf, 5000, 4).counts == sample_pmf(pmf, 5000, 4).counts);

    // Explicit generator state continues rather than restarts.
    Rng rng(123);
    const auto first = sample_pmf(pmf, 5000, rng);
    const auto second = sample_pmf(pmf, 5000, rng);
    CHECK(first.counts != second.counts);
}

TEST_CASE("total_variation")
{
    SampleHistogram hist{2, 4, {1, 2, 1}};
    const std::vector<double> same{0.25, 0.5, 0.25};
    CHECK(total_variation(hist, same) == 0.0);
    SampleHistogram left{1, 10, {10, 0}};
    const std::vector<double> right{0.0, 1.0};
    CHECK(total_variation(left, right) == 1.0);
    CHECK_THROWS(total_variation(hist, right));
}

}
