#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace qstat {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one draw, so the
/// stream is identical across standard libraries.
double uniform01(Rng& rng);

struct SampleHistogram {
    int total_entities = 0;
    std::uint64_t draws = 0;
    /// counts[n] = trials that ended with n entities in state 1.
    std::vector<std::uint64_t> counts;

    std::vector<double> frequencies() const;
    std::vector<double> counts_as_double() const;
};

/// Each trial makes N independent picks, state 1 with probability p1, and
/// records how many landed in state 1.
SampleHistogram sample_mb_process(int total, double p1, std::uint64_t draws, Rng& rng);
SampleHistogram sample_mb_process(int total, double p1, std::uint64_t draws, std::uint64_t seed);

/// Categorical draws by inverse CDF. pmf must sum to 1 within 1e-9.
SampleHistogram sample_pmf(std::span<const double> pmf, std::uint64_t draws, Rng& rng);
SampleHistogram sample_pmf(std::span<const double> pmf, std::uint64_t draws, std::uint64_t seed);

/// Half the L1 distance between empirical frequencies and pmf.
double total_variation(const SampleHistogram& hist, std::span<const double> pmf);

} // namespace qstat
