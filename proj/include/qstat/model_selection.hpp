#pragma once

#include "qstat/estimation.hpp"

#include <optional>
#include <string>

namespace qstat {

enum class Winner { MB, BE, Tie };
enum class Strength { Weak, Positive, Strong };

/// |ΔBIC| bands: below weak is Weak, above strong is Strong, Positive between.
struct Thresholds {
    double weak = 2.0;
    double strong = 6.0;
    /// |ΔBIC| strictly below this is a tie.
    double tie = 1e-9;
};

struct ModelComparison {
    /// BIC_MB - BIC_BE; positive favours BE.
    double delta_bic = 0.0;
    Winner winner = Winner::Tie;
    Strength strength = Strength::Weak;
    std::optional<double> r_squared_winner;
};

/// Gaussian least-squares BIC, m ln(rss/m) + k ln m with k = 1 and rss
/// floored at 1e-12.
double bic(const FitResult& fit);

Winner winner_for(double delta_bic, const Thresholds& thresholds = {});
Strength strength_for(double delta_bic, const Thresholds& thresholds = {});

ModelComparison compare(const FitResult& fit_mb, const FitResult& fit_be, const Thresholds& thresholds = {});

/// "MB strong", "BE positive", ... or "tie".
std::string verdict(Winner winner, Strength strength);
std::string verdict(double delta_bic, const Thresholds& thresholds = {});

} // namespace qstat
