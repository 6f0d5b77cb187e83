#include "qstat/estimation.hpp"

#include "qstat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qstat {

namespace {

constexpr double kGridStep = 1e-3;
constexpr double kGoldenTolerance = 1e-10;
constexpr double kExactFitRss = 1e-12;

double sum_of_squares(std::span<const double> a, std::span<const double> b)
{
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

std::vector<double> targets(const CountVector& cv, const FitOptions& options)
{
    if (!options.raw_counts)
        return to_frequencies(cv);
    std::vector<double> out;
    out.reserve(cv.counts().size());
    for (const auto& [n, c] : cv.counts())
        out.push_back(c);
    return out;
}

std::optional<double> r_squared_or_degenerate(std::span<const double> observed, std::span<const double> model, double rss)
{
    try {
        return r_squared(observed, model);
    } catch (const DegenerateVarianceError&) {
        // Flat data is fitted exactly only by a flat model; otherwise R² is undefined.
        if (rss < kExactFitRss)
            return 1.0;
        return std::nullopt;
    }
}

// Golden-section search for the minimum of f on [lo, hi].
template <class F>
double golden_section(F&& f, double lo, double hi)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    while (hi - lo > kGoldenTolerance) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

// Coarse grid over [0, 1] followed by golden-section refinement around the
// best grid point. The objective is a high-degree polynomial in p1 and can
// have several local minima, so the grid picks the basin.
template <class F>
double minimize_on_unit_interval(F&& objective)
{
    const int steps = static_cast<int>(std::lround(1.0 / kGridStep));
    int best_i = 0;
    double best = objective(0.0);
    for (int i = 1; i <= steps; ++i) {
        const double value = objective(i * kGridStep);
        if (value < best) {
            best = value;
            best_i = i;
        }
    }
    const double lo = std::max(0.0, (best_i - 1) * kGridStep);
    const double hi = std::min(1.0, (best_i + 1) * kGridStep);
    const double refined = std::clamp(golden_section(objective, lo, hi), 0.0, 1.0);

    double arg = best_i * kGridStep;
    for (double candidate : {refined, lo, hi}) {
        const double value = objective(candidate);
        if (value < best) {
            best = value;
            arg = candidate;
        }
    }
    return arg;
}

} // namespace

CountVector::CountVector(int total_entities, std::map<int, double> counts)
    : total_(total_entities), counts_(std::move(counts))
{
    if (total_ < 1)
        throw DomainError("count vector needs N >= 1, got " + std::to_string(total_));
    for (const auto& [n, c] : counts_) {
        if (n < 0 || n > total_)
            throw DomainError("occupancy index " + std::to_string(n) + " outside 0.." + std::to_string(total_));
        if (!(c >= 0.0) || !std::isfinite(c))
            throw DomainError("count at index " + std::to_string(n) + " must be a finite non-negative number");
    }
    if (counts_.size() < 2)
        throw DomainError("count vector needs at least two included indices");
    if (sum() <= 0.0)
        throw EmptyDataError("count vector has zero total mass");
}

CountVector CountVector::dense(std::span<const double> counts)
{
    std::map<int, double> m;
    for (size_t i = 0; i < counts.size(); ++i)
        m.emplace(static_cast<int>(i), counts[i]);
    return CountVector(static_cast<int>(counts.size()) - 1, std::move(m));
}

std::vector<int> CountVector::included_indices() const
{
    std::vector<int> out;
    out.reserve(counts_.size());
    for (const auto& entry : counts_)
        out.push_back(entry.first);
    return out;
}

double CountVector::sum() const
{
    double acc = 0.0;
    for (const auto& entry : counts_)
        acc += entry.second;
    return acc;
}

CountVector CountVector::masked(int lo, int hi) const
{
    std::map<int, double> kept;
    for (const auto& [n, c] : counts_)
        if (n >= lo && n <= hi)
            kept.emplace(n, c);
    return CountVector(total_, std::move(kept));
}

std::vector<double> to_frequencies(const CountVector& cv)
{
    const double total = cv.sum();
    if (total <= 0.0)
        throw EmptyDataError("cannot form frequencies from zero counts");
    std::vector<double> out;
    out.reserve(cv.counts().size());
    for (const auto& entry : cv.counts())
        out.push_back(entry.second / total);
    return out;
}

double r_squared(std::span<const double> observed, std::span<const double> model)
{
    if (observed.size() != model.size())
        throw std::invalid_argument("r_squared: length mismatch");
    if (observed.size() < 2)
        throw std::invalid_argument("r_squared: need at least two points");
    const double mean = std::accumulate(observed.begin(), observed.end(), 0.0) / static_cast<double>(observed.size());
    double ss_tot = 0.0;
    for (double v : observed)
        ss_tot += (v - mean) * (v - mean);
    // Spread at rounding level counts as none.
    if (ss_tot <= 1e-20 * mean * mean * static_cast<double>(observed.size()))
        throw DegenerateVarianceError("r_squared: observed values have zero variance");
    return 1.0 - sum_of_squares(observed, model) / ss_tot;
}

std::vector<double> model_values(const CountVector& cv, const ModelParams& params, const FitOptions& options)
{
    std::vector<double> out;
    out.reserve(cv.counts().size());
    for (const auto& entry : cv.counts())
        out.push_back(pmf(OccupancyConfig(entry.first, cv.total_entities()), params));

    double scale = options.raw_counts ? cv.sum() : 1.0;
    if (options.renormalize_mask) {
        const double mass = std::accumulate(out.begin(), out.end(), 0.0);
        // No model mass on the mask: the renormalised model is identically zero.
        scale = mass > 0.0 ? scale / mass : 0.0;
    }
    for (double& v : out)
        v *= scale;
    return out;
}

double residual_sum_of_squares(const CountVector& cv, const ModelParams& params, const FitOptions& options)
{
    const auto observed = targets(cv, options);
    const auto model = model_values(cv, params, options);
    return sum_of_squares(observed, model);
}

FitResult fit(const CountVector& cv, Statistics kind, const FitOptions& options)
{
    const auto observed = targets(cv, options);
    double p1 = 0.0;

    if (kind == Statistics::BE && !options.renormalize_mask) {
        // The BE model is affine in p1: value = a_n + p1 * b_n. Least squares
        // has a closed form, and clamping the unconstrained optimum is exact
        // because the objective is a convex quadratic.
        const int total = cv.total_entities();
        const double scale = (options.raw_counts ? cv.sum() : 1.0) / (0.5 * total * (total + 1.0));
        double num = 0.0;
        double den = 0.0;
        size_t i = 0;
        for (const auto& entry : cv.counts()) {
            const int n = entry.first;
            const double a = scale * (total - n);
            const double b = scale * (2 * n - total);
            num += b * (observed[i] - a);
            den += b * b;
            ++i;
        }
        p1 = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.5;
    } else {
        p1 = minimize_on_unit_interval(
            [&](double p) { return sum_of_squares(observed, model_values(cv, ModelParams(kind, p), options)); });
    }

    ModelParams params(kind, p1);
    const auto model = model_values(cv, params, options);
    const double rss = sum_of_squares(observed, model);
    return FitResult{params, rss, r_squared_or_degenerate(observed, model, rss),
                     static_cast<int>(observed.size()), cv.included_indices()};
}

} // namespace qstat
