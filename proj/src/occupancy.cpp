#include "qstat/occupancy.hpp"

#include "qstat/errors.hpp"

#include <cmath>
#include <string>

namespace qstat {

namespace {

// Above this size binomials are evaluated in log space.
constexpr int kDirectLimit = 50;

void check_probability(double p1)
{
    if (!(p1 >= 0.0 && p1 <= 1.0))
        throw DomainError("probability p1 must lie in [0, 1], got " + std::to_string(p1));
}

BigInt binomial(unsigned n, unsigned k)
{
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    BigInt result = 1;
    for (unsigned i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i; // exact: result is C(n-k+i, i)
    }
    return result;
}

double binomial_double(int n, int k)
{
    k = std::min(k, n - k);
    double result = 1.0;
    for (int i = 1; i <= k; ++i)
        result = result * (n - k + i) / i;
    return result;
}

double log_binomial(int n, int k)
{
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

} // namespace

std::string_view to_string(Statistics kind)
{
    return kind == Statistics::MB ? "MB" : "BE";
}

Statistics parse_statistics(std::string_view text)
{
    if (text == "mb" || text == "MB")
        return Statistics::MB;
    if (text == "be" || text == "BE")
        return Statistics::BE;
    throw DomainError("unknown statistics kind '" + std::string(text) + "'");
}

OccupancyConfig::OccupancyConfig(int n, int total) : n_(n), total_(total)
{
    if (total < 0 || n < 0 || n > total)
        throw DomainError("occupancy n=" + std::to_string(n) + " outside 0.." + std::to_string(total));
}

ModelParams::ModelParams(Statistics kind, double p1) : kind_(kind), p1_(p1)
{
    check_probability(p1);
}

BigInt count_mb(unsigned entities, unsigned states)
{
    if (states == 0 && entities > 0)
        throw DomainError("count_mb: no states for a non-empty system");
    return boost::multiprecision::pow(BigInt(states), entities);
}

BigInt count_be(unsigned entities, unsigned states)
{
    if (states == 0)
        throw DomainError("count_be: at least one state required");
    return binomial(entities + states - 1, entities);
}

BigInt count_fd(unsigned entities, unsigned states)
{
    if (entities > states)
        throw DomainError("count_fd: more fermions than states violates exclusion");
    return binomial(states, entities);
}

BigInt multiplicity(const OccupancyConfig& cfg)
{
    return binomial(static_cast<unsigned>(cfg.total()), static_cast<unsigned>(cfg.n()));
}

double mb_pmf(const OccupancyConfig& cfg, double p1)
{
    check_probability(p1);
    const int n = cfg.n();
    const int total = cfg.total();
    // Exact boundaries: 0^0 = 1, and log(0) must not leak into the log path.
    if (p1 == 0.0)
        return n == 0 ? 1.0 : 0.0;
    if (p1 == 1.0)
        return n == total ? 1.0 : 0.0;

    if (total <= kDirectLimit)
        return binomial_double(total, n) * std::pow(p1, n) * std::pow(1.0 - p1, total - n);

    const double log_p = log_binomial(total, n) + n * std::log(p1) + (total - n) * std::log1p(-p1);
    return std::exp(log_p);
}

double be_pmf(const OccupancyConfig& cfg, double p1)
{
    check_probability(p1);
    const int total = cfg.total();
    if (total == 0)
        throw DomainError("be_pmf: zero entities leaves the normaliser undefined");
    const double weight = cfg.n() * p1 + cfg.complement() * (1.0 - p1);
    return weight / (0.5 * total * (total + 1.0));
}

double pmf(const OccupancyConfig& cfg, const ModelParams& params)
{
    return params.kind() == Statistics::MB ? mb_pmf(cfg, params.p1()) : be_pmf(cfg, params.p1());
}

std::vector<double> pmf_vector(Statistics kind, int total, double p1)
{
    std::vector<double> out;
    out.reserve(static_cast<size_t>(total) + 1);
    for (int n = 0; n <= total; ++n) {
        OccupancyConfig cfg(n, total);
        out.push_back(kind == Statistics::MB ? mb_pmf(cfg, p1) : be_pmf(cfg, p1));
    }
    return out;
}

} // namespace qstat
