#pragma once

#include "qstat/occupancy.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace qstat {

/// Observed counts over occupancy indices n of an N-entity system. Only the
/// indices present in the map take part in a fit, so masked ranges are just
/// missing keys.
class CountVector {
public:
    CountVector(int total_entities, std::map<int, double> counts);

    /// Every index 0..N included.
    static CountVector dense(std::span<const double> counts);

    int total_entities() const { return total_; }
    const std::map<int, double>& counts() const { return counts_; }
    std::vector<int> included_indices() const;
    double sum() const;

    /// Restrict to lo..hi (inclusive), intersected with the current mask.
    CountVector masked(int lo, int hi) const;

    friend bool operator==(const CountVector&, const CountVector&) = default;

private:
    int total_;
    std::map<int, double> counts_;
};

struct FitOptions {
    /// Fit raw counts against sum(counts) * pmf instead of relative frequencies.
    bool raw_counts = false;
    /// Rescale the model pmf so it sums to one over the included indices.
    bool renormalize_mask = false;
};

struct FitResult {
    ModelParams params;
    double rss = 0.0;
    /// Unset when the data has zero variance and the model does not match it.
    std::optional<double> r_squared;
    int n_points = 0;
    std::vector<int> indices;
};

/// Relative frequencies over the included indices, in index order.
std::vector<double> to_frequencies(const CountVector& cv);

/// 1 - SS_res / SS_tot. Throws DegenerateVarianceError when SS_tot == 0.
double r_squared(std::span<const double> observed, std::span<const double> model);

/// Model values at the included indices under the given options.
std::vector<double> model_values(const CountVector& cv, const ModelParams& params, const FitOptions& options = {});

/// Residual sum of squares of params against cv.
double residual_sum_of_squares(const CountVector& cv, const ModelParams& params, const FitOptions& options = {});

/// Least-squares estimate of p1 on [0, 1].
FitResult fit(const CountVector& cv, Statistics kind, const FitOptions& options = {});

} // namespace qstat
