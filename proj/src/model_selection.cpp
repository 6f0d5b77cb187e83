#include "qstat/model_selection.hpp"

#include "qstat/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qstat {

namespace {
constexpr double kRssFloor = 1e-12;
constexpr int kFreeParameters = 1;
} // namespace

double bic(const FitResult& fit)
{
    if (fit.n_points < 2)
        throw std::invalid_argument("bic: need at least two fitted points");
    const double m = fit.n_points;
    return m * std::log(std::max(fit.rss, kRssFloor) / m) + kFreeParameters * std::log(m);
}

Winner winner_for(double delta_bic, const Thresholds& thresholds)
{
    if (std::abs(delta_bic) < thresholds.tie)
        return Winner::Tie;
    return delta_bic > 0.0 ? Winner::BE : Winner::MB;
}

Strength strength_for(double delta_bic, const Thresholds& thresholds)
{
    const double magnitude = std::abs(delta_bic);
    if (magnitude < thresholds.weak)
        return Strength::Weak;
    if (magnitude > thresholds.strong)
        return Strength::Strong;
    return Strength::Positive;
}

ModelComparison compare(const FitResult& fit_mb, const FitResult& fit_be, const Thresholds& thresholds)
{
    if (fit_mb.n_points != fit_be.n_points || fit_mb.indices != fit_be.indices)
        throw IncompatibleFitsError("compare: fits were made on different index masks");

    ModelComparison out;
    out.delta_bic = bic(fit_mb) - bic(fit_be);
    out.winner = winner_for(out.delta_bic, thresholds);
    out.strength = strength_for(out.delta_bic, thresholds);
    switch (out.winner) {
    case Winner::MB:
        out.r_squared_winner = fit_mb.r_squared;
        break;
    case Winner::BE:
        out.r_squared_winner = fit_be.r_squared;
        break;
    case Winner::Tie:
        if (fit_mb.r_squared && fit_be.r_squared)
            out.r_squared_winner = std::max(*fit_mb.r_squared, *fit_be.r_squared);
        else
            out.r_squared_winner = fit_mb.r_squared ? fit_mb.r_squared : fit_be.r_squared;
        break;
    }
    return out;
}

std::string verdict(Winner winner, Strength strength)
{
    if (winner == Winner::Tie)
        return "tie";
    std::string text = winner == Winner::MB ? "MB " : "BE ";
    switch (strength) {
    case Strength::Weak:
        return text + "weak";
    case Strength::Positive:
        return text + "positive";
    case Strength::Strong:
        return text + "strong";
    }
    return text;
}

std::string verdict(double delta_bic, const Thresholds& thresholds)
{
    return verdict(winner_for(delta_bic, thresholds), strength_for(delta_bic, thresholds));
}

} // namespace qstat
