#include "qstat/montecarlo.hpp"

#include "qstat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qstat {

double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> SampleHistogram::frequencies() const
{
    std::vector<double> out(counts.size(), 0.0);
    if (draws == 0)
        return out;
    for (size_t i = 0; i < counts.size(); ++i)
        out[i] = static_cast<double>(counts[i]) / static_cast<double>(draws);
    return out;
}

std::vector<double> SampleHistogram::counts_as_double() const
{
    return {counts.begin(), counts.end()};
}

SampleHistogram sample_mb_process(int total, double p1, std::uint64_t draws, Rng& rng)
{
    if (total < 0)
        throw DomainError("sample_mb_process: negative entity count");
    if (!(p1 >= 0.0 && p1 <= 1.0))
        throw DomainError("sample_mb_process: p1 outside [0, 1]");
    if (draws < 1)
        throw DomainError("sample_mb_process: at least one draw required");

    SampleHistogram hist{total, draws, std::vector<std::uint64_t>(static_cast<size_t>(total) + 1, 0)};
    for (std::uint64_t t = 0; t < draws; ++t) {
        int in_state1 = 0;
        for (int pick = 0; pick < total; ++pick)
            in_state1 += uniform01(rng) < p1 ? 1 : 0;
        ++hist.counts[static_cast<size_t>(in_state1)];
    }
    return hist;
}

SampleHistogram sample_mb_process(int total, double p1, std::uint64_t draws, std::uint64_t seed)
{
    Rng rng(seed);
    return sample_mb_process(total, p1, draws, rng);
}

SampleHistogram sample_pmf(std::span<const double> pmf, std::uint64_t draws, Rng& rng)
{
    if (pmf.empty())
        throw InvalidDistributionError("sample_pmf: empty distribution");
    if (draws < 1)
        throw DomainError("sample_pmf: at least one draw required");
    std::vector<double> cdf;
    cdf.reserve(pmf.size());
    double acc = 0.0;
    for (double p : pmf) {
        if (!(p >= 0.0))
            throw InvalidDistributionError("sample_pmf: negative or NaN probability");
        acc += p;
        cdf.push_back(acc);
    }
    if (std::abs(acc - 1.0) > 1e-9)
        throw InvalidDistributionError("sample_pmf: probabilities sum to " + std::to_string(acc));

    SampleHistogram hist{static_cast<int>(pmf.size()) - 1, draws, std::vector<std::uint64_t>(pmf.size(), 0)};
    for (std::uint64_t t = 0; t < draws; ++t) {
        const double u = uniform01(rng) * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        size_t idx = static_cast<size_t>(it - cdf.begin());
        if (it == cdf.end()) {
            // u rounded onto the final CDF value: take the last bin with mass.
            idx = pmf.size() - 1;
            while (pmf[idx] == 0.0 && idx > 0)
                --idx;
        }
        ++hist.counts[idx];
    }
    return hist;
}

SampleHistogram sample_pmf(std::span<const double> pmf, std::uint64_t draws, std::uint64_t seed)
{
    Rng rng(seed);
    return sample_pmf(pmf, draws, rng);
}

double total_variation(const SampleHistogram& hist, std::span<const double> pmf)
{
    if (hist.counts.size() != pmf.size())
        throw std::invalid_argument("total_variation: histogram has " + std::to_string(hist.counts.size()) +
                                    " bins, pmf has " + std::to_string(pmf.size()));
    const auto freq = hist.frequencies();
    double acc = 0.0;
    for (size_t i = 0; i < pmf.size(); ++i)
        acc += std::abs(freq[i] - pmf[i]);
    return 0.5 * acc;
}

} // namespace qstat
