#pragma once

// Counting functions for distinguishable / bosonic / fermionic occupancy and
// the two-state MB and BE probability mass functions.

#include <boost/multiprecision/cpp_int.hpp>

#include <string_view>
#include <vector>

namespace qstat {

using BigInt = boost::multiprecision::cpp_int;

enum class Statistics { MB, BE };

std::string_view to_string(Statistics kind);
Statistics parse_statistics(std::string_view text);

/// n entities in state 1 and total - n in state 2.
class OccupancyConfig {
public:
    OccupancyConfig(int n, int total);

    int n() const { return n_; }
    int total() const { return total_; }
    int complement() const { return total_ - n_; }

    friend bool operator==(const OccupancyConfig&, const OccupancyConfig&) = default;

private:
    int n_;
    int total_;
};

/// Statistics kind plus the probability of state 1. p2 is implied.
class ModelParams {
public:
    ModelParams(Statistics kind, double p1);

    Statistics kind() const { return kind_; }
    double p1() const { return p1_; }
    double p2() const { return 1.0 - p1_; }

private:
    Statistics kind_;
    double p1_;
};

/// M^N arrangements of N distinguishable entities over M states.
BigInt count_mb(unsigned entities, unsigned states);
/// C(N+M-1, N) arrangements of N identical bosons over M states.
BigInt count_be(unsigned entities, unsigned states);
/// C(M, N); requires N <= M.
BigInt count_fd(unsigned entities, unsigned states);
/// Labeled arrangements realising a two-state configuration, C(N, n).
BigInt multiplicity(const OccupancyConfig& cfg);

double mb_pmf(const OccupancyConfig& cfg, double p1);
double be_pmf(const OccupancyConfig& cfg, double p1);
double pmf(const OccupancyConfig& cfg, const ModelParams& params);

/// pmf evaluated at n = 0..total.
std::vector<double> pmf_vector(Statistics kind, int total, double p1);

} // namespace qstat
