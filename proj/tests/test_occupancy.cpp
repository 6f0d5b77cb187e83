#include "oracles.hpp"

#include "qstat/errors.hpp"
#include "qstat/occupancy.hpp"

#include <doctest.h>

#include <cmath>

using namespace qstat;

TEST_SUITE("occupancy") {

TEST_CASE("count_mb")
{
    CHECK(count_mb(2, 2) == 4);
    CHECK(count_mb(0, 5) == 1);

    BigInt by_hand = 1;
    for (int i = 0; i < 11; ++i)
        by_hand *= 2;
    CHECK(count_mb(11, 2) == by_hand);
    CHECK(count_mb(11, 2) == 2048);

    // No overflow at the documented size.
    CHECK(count_mb(64, 64) == boost::multiprecision::pow(BigInt(64), 64));
    CHECK(count_mb(64, 64) > BigInt(std::numeric_limits<std::uint64_t>::max()));

    CHECK_THROWS_AS(count_mb(3, 0), DomainError);
    CHECK(count_mb(0, 0) == 1);
}

TEST_CASE("count_be")
{
    CHECK(count_be(2, 2) == 3);
    CHECK(count_be(11, 2) == 12);
    for (unsigned n : {0u, 1u, 7u, 40u})
        CHECK(count_be(n, 1) == 1);
    CHECK_THROWS_AS(count_be(2, 0), DomainError);
}

TEST_CASE("count_fd")
{
    CHECK(count_fd(2, 2) == 1);
    CHECK(count_fd(0, 9) == 1);
    CHECK(count_fd(3, 5) == oracle::enumerate_subsets(3, 5));
    CHECK(count_fd(3, 5) == 10);
    for (int m = 0; m <= 12; ++m)
        for (int k = 0; k <= m; ++k)
            CHECK(count_fd(static_cast<unsigned>(k), static_cast<unsigned>(m)) == oracle::enumerate_subsets(k, m));
    CHECK_THROWS_AS(count_fd(3, 2), DomainError);
}

TEST_CASE("multiplicity matches Pascal's triangle")
{
    CHECK(multiplicity(OccupancyConfig(10, 11)) == 11);
    CHECK(multiplicity(OccupancyConfig(0, 11)) == 1);
    CHECK(multiplicity(OccupancyConfig(6, 11)) == 462);

    const auto row = oracle::pascal_row(30);
    for (int n = 0; n <= 30; ++n)
        CHECK(multiplicity(OccupancyConfig(n, 30)).convert_to<double>() == row[static_cast<size_t>(n)]);
}

TEST_CASE("counting consistency")
{
    for (unsigned total = 0; total <= 100; ++total) {
        CHECK(count_be(total, 2) == total + 1);
        BigInt sum = 0;
        for (unsigned n = 0; n <= total; ++n)
            sum += multiplicity(OccupancyConfig(static_cast<int>(n), static_cast<int>(total)));
        CHECK(sum == count_mb(total, 2));
    }
}

TEST_CASE("config and params invariants")
{
    CHECK_THROWS_AS(OccupancyConfig(12, 11), DomainError);
    CHECK_THROWS_AS(OccupancyConfig(-1, 11), DomainError);
    CHECK_THROWS_AS(ModelParams(Statistics::MB, 1.2), DomainError);
    CHECK_THROWS_AS(ModelParams(Statistics::BE, -0.1), DomainError);
    CHECK_THROWS_AS(ModelParams(Statistics::BE, NAN), DomainError);
    CHECK(ModelParams(Statistics::MB, 0.3).p2() == doctest::Approx(0.7));
}

TEST_CASE("mb_pmf worked values for eleven animals")
{
    CHECK(mb_pmf(OccupancyConfig(0, 11), 0.5) == doctest::Approx(0.00048828125).epsilon(1e-15));
    CHECK(std::round(mb_pmf(OccupancyConfig(0, 11), 0.5) * 1e4) / 1e4 == doctest::Approx(0.0005));
    CHECK(std::round(mb_pmf(OccupancyConfig(10, 11), 0.5) * 1e4) / 1e4 == doctest::Approx(0.0054));
    CHECK(std::round(mb_pmf(OccupancyConfig(6, 11), 0.5) * 1e4) / 1e4 == doctest::Approx(0.2256));
}

TEST_CASE("be_pmf worked values")
{
    for (int n = 0; n <= 11; ++n)
        CHECK(std::abs(be_pmf(OccupancyConfig(n, 11), 0.5) - 1.0 / 12.0) < 1e-15);
    CHECK(be_pmf(OccupancyConfig(0, 11), 1.0) == 0.0);
    CHECK(be_pmf(OccupancyConfig(7, 11), 0.16) == doctest::Approx((7 * 0.16 + 4 * 0.84) / 66.0).epsilon(1e-14));
    CHECK(be_pmf(OccupancyConfig(7, 11), 0.16) == doctest::Approx(0.0678787878787879));
    CHECK_THROWS_AS(be_pmf(OccupancyConfig(0, 0), 0.5), DomainError);
}

TEST_CASE("pmfs agree with independent oracles")
{
    for (int total : {1, 2, 5, 11, 30, 49, 50}) {
        for (double p : {0.0, 0.05, 0.3, 0.5, 0.77, 1.0}) {
            const auto mb = pmf_vector(Statistics::MB, total, p);
            const auto ref = oracle::binomial_pmf(total, p);
            const auto be = pmf_vector(Statistics::BE, total, p);
            const auto lin = oracle::linear_pmf(total, p);
            for (int n = 0; n <= total; ++n) {
                CHECK(mb[static_cast<size_t>(n)] == doctest::Approx(ref[static_cast<size_t>(n)]).epsilon(1e-12));
                CHECK(be[static_cast<size_t>(n)] == doctest::Approx(lin[static_cast<size_t>(n)]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("log-space path for large N matches the direct product")
{
    for (double p : {0.2, 0.5, 0.9}) {
        const auto ref = oracle::binomial_pmf(80, p);
        for (int n = 0; n <= 80; ++n) {
            const double want = ref[static_cast<size_t>(n)];
            CHECK(std::abs(mb_pmf(OccupancyConfig(n, 80), p) - want) <= 1e-12 * want);
        }
    }
}

TEST_CASE("brute-force equivalence over labelled assignments")
{
    for (int total = 1; total <= 8; ++total) {
        for (double p : {0.0, 0.1, 0.25, 0.5, 0.63, 1.0}) {
            const auto brute = oracle::labelled_assignment_pmf(total, p);
            for (int n = 0; n <= total; ++n)
                CHECK(mb_pmf(OccupancyConfig(n, total), p) ==
                      doctest::Approx(brute[static_cast<size_t>(n)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("normalization sweep")
{
    double worst = 0.0;
    for (int total = 1; total <= 100; ++total) {
        for (int i = 0; i <= 100; ++i) {
            const double p = i / 100.0;
            for (auto kind : {Statistics::MB, Statistics::BE}) {
                double sum = 0.0;
                for (double v : pmf_vector(kind, total, p))
                    sum += v;
                worst = std::max(worst, std::abs(sum - 1.0));
            }
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("symmetry under state swap")
{
    for (int total : {1, 4, 11, 60}) {
        for (double p : {0.0, 0.13, 0.5, 0.8}) {
            for (int n = 0; n <= total; ++n) {
                OccupancyConfig a(n, total);
                OccupancyConfig b(total - n, total);
                CHECK(mb_pmf(a, p) == doctest::Approx(mb_pmf(b, 1.0 - p)).epsilon(1e-12));
                CHECK(be_pmf(a, p) == doctest::Approx(be_pmf(b, 1.0 - p)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("BE is flat exactly at p1 = 0.5")
{
    for (int total = 2; total <= 30; ++total) {
        const auto flat = pmf_vector(Statistics::BE, total, 0.5);
        for (double v : flat)
            CHECK(v == doctest::Approx(flat[0]).epsilon(1e-14));
        const auto tilted = pmf_vector(Statistics::BE, total, 0.3);
        CHECK(tilted.front() != doctest::Approx(tilted.back()));
    }
}

}
