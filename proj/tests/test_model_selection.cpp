#include "qstat/errors.hpp"
#include "qstat/model_selection.hpp"
#include "qstat/montecarlo.hpp"

#include <doctest.h>

#include <cmath>

using namespace qstat;

namespace {

FitResult fake_fit(Statistics kind, double rss, int m = 12)
{
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
        idx.push_back(i);
    return FitResult{ModelParams(kind, 0.5), rss, 0.9, m, idx};
}

} // namespace

TEST_SUITE("model_selection") {

TEST_CASE("bic")
{
    CHECK(bic(fake_fit(Statistics::MB, 12.0)) == doctest::Approx(std::log(12.0)).epsilon(1e-14));
    CHECK(bic(fake_fit(Statistics::MB, 12.0)) == doctest::Approx(2.4849066497880004));
    CHECK(bic(fake_fit(Statistics::MB, 0.3)) == bic(fake_fit(Statistics::BE, 0.3)));

    // ΔBIC = m ln(rss_MB / rss_BE) when k is shared.
    const auto cmp = compare(fake_fit(Statistics::MB, 0.02 * std::exp(1.0)), fake_fit(Statistics::BE, 0.02));
    CHECK(cmp.delta_bic == doctest::Approx(12.0).epsilon(1e-12));

    // Zero residual is floored rather than sent to -inf.
    CHECK(std::isfinite(bic(fake_fit(Statistics::BE, 0.0))));
    CHECK(bic(fake_fit(Statistics::BE, 0.0)) == bic(fake_fit(Statistics::BE, 1e-12)));
}

TEST_CASE("verdicts from the psychological table")
{
    CHECK(verdict(19.31) == "BE strong");
    CHECK(verdict(-9.54) == "MB strong");
    CHECK(verdict(-1.69) == "MB weak");
    CHECK(verdict(-0.37) == "MB weak");
    CHECK(verdict(5.53) == "BE positive");
    CHECK(verdict(20.68) == "BE strong");
    CHECK(verdict(-3.0) == "MB positive");
    CHECK(verdict(0.0) == "tie");
    CHECK(winner_for(0.0) == Winner::Tie);
    CHECK(strength_for(0.0) == Strength::Weak);

    // Band edges: [t_weak, t_strong] is Positive.
    CHECK(strength_for(2.0) == Strength::Positive);
    CHECK(strength_for(6.0) == Strength::Positive);
    CHECK(strength_for(6.0001) == Strength::Strong);
    CHECK(strength_for(1.9999) == Strength::Weak);

    // Overridable thresholds.
    const Thresholds loose{3.0, 7.5};
    CHECK(verdict(2.97, loose) == "BE weak");
    CHECK(verdict(7.17, loose) == "BE positive");
}

TEST_CASE("compare")
{
    const auto mb = fake_fit(Statistics::MB, 0.01);
    const auto be = fake_fit(Statistics::BE, 0.001);
    const auto cmp = compare(mb, be);
    CHECK(cmp.delta_bic > 0.0);
    CHECK(cmp.winner == Winner::BE);
    CHECK(cmp.strength == Strength::Strong);
    CHECK(cmp.r_squared_winner == be.r_squared);

    const auto same = compare(fake_fit(Statistics::MB, 0.5), fake_fit(Statistics::BE, 0.5));
    CHECK(same.delta_bic == 0.0);
    CHECK(same.winner == Winner::Tie);

    CHECK_THROWS_AS(compare(fake_fit(Statistics::MB, 0.1, 12), fake_fit(Statistics::BE, 0.1, 9)), IncompatibleFitsError);
    auto shifted = fake_fit(Statistics::BE, 0.1, 12);
    shifted.indices.back() = 40;
    CHECK_THROWS_AS(compare(fake_fit(Statistics::MB, 0.1, 12), shifted), IncompatibleFitsError);
}

TEST_CASE("antisymmetry")
{
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        const auto a = fake_fit(Statistics::MB, 1e-4 + uniform01(rng));
        const auto b = fake_fit(Statistics::BE, 1e-4 + uniform01(rng));
        const auto ab = compare(a, b);
        const auto ba = compare(b, a);
        CHECK(ab.delta_bic == doctest::Approx(-ba.delta_bic).epsilon(1e-12));
        if (ab.winner == Winner::MB)
            CHECK(ba.winner == Winner::BE);
        else if (ab.winner == Winner::BE)
            CHECK(ba.winner == Winner::MB);
        CHECK(ab.strength == ba.strength);
    }
}

TEST_CASE("scale invariance of ΔBIC on frequencies")
{
    const std::vector<double> counts{4, 9, 3, 12, 20, 8, 5, 2, 1};
    std::vector<double> bigger;
    for (double c : counts)
        bigger.push_back(c * 37.5);
    const auto a = CountVector::dense(counts);
    const auto b = CountVector::dense(bigger);
    const double da = compare(fit(a, Statistics::MB), fit(a, Statistics::BE)).delta_bic;
    const double db = compare(fit(b, Statistics::MB), fit(b, Statistics::BE)).delta_bic;
    CHECK(da == doctest::Approx(db).epsilon(1e-9));
}

TEST_CASE("sampled data picks the generating model")
{
    int be_hits = 0;
    int mb_hits = 0;
    const auto be_pmf = pmf_vector(Statistics::BE, 11, 0.4);
    const auto mb_pmf = pmf_vector(Statistics::MB, 11, 0.55);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto be_cv = CountVector::dense(sample_pmf(be_pmf, 10000, seed).counts_as_double());
        const auto mb_cv = CountVector::dense(sample_pmf(mb_pmf, 10000, seed + 1000).counts_as_double());
        be_hits += compare(fit(be_cv, Statistics::MB), fit(be_cv, Statistics::BE)).winner == Winner::BE;
        mb_hits += compare(fit(mb_cv, Statistics::MB), fit(mb_cv, Statistics::BE)).winner == Winner::MB;
    }
    CHECK(be_hits >= 38);
    CHECK(mb_hits >= 38);
}

}
