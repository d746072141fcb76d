#pragma once

// Straight-line versions of the estimator definitions, built on an
// independent polynomial path: Chebyshev coefficients from the three-term
// recurrence T_{k+1} = 2x T_k - T_{k-1}, Hermite values from the explicit sum
// He_m(x) = m! sum_j (-1)^j x^{m-2j} / (j! (m-2j)! 2^j), plain summation.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace tscore::testing
{

inline auto chebyshev_by_recurrence(int k) -> std::vector<double>
{
    std::vector<double> prev{1.0};
    if (k == 0)
    {
        return prev;
    }
    std::vector<double> cur{0.0, 1.0};
    for (int d = 1; d < k; ++d)
    {
        std::vector<double> next(static_cast<std::size_t>(d) + 2, 0.0);
        for (std::size_t j = 0; j < cur.size(); ++j)
        {
            next[j + 1] += 2.0 * cur[j];
        }
        for (std::size_t j = 0; j < prev.size(); ++j)
        {
            next[j] -= prev[j];
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

inline auto hermite_explicit(int m, double x) -> double
{
    double sum = 0.0;
    for (int j = 0; 2 * j <= m; ++j)
    {
        const double log_mag = std::lgamma(m + 1.0) - std::lgamma(j + 1.0) -
                               std::lgamma(m - 2.0 * j + 1.0) - j * std::log(2.0);
        const double term = std::round(std::exp(log_mag)) * std::pow(x, m - 2 * j);
        sum += (j % 2 == 0) ? term : -term;
    }
    return sum;
}

struct OracleConfig
{
    std::uint64_t n;
    int K;
    double M;
    double ceiling;
};

inline auto oracle_delta(double x, const OracleConfig& c) -> double
{
    std::vector<double> g(static_cast<std::size_t>(2 * c.K) + 1, 0.0);
    const auto t0 = chebyshev_by_recurrence(0);
    g[0] += 2.0 / std::numbers::pi * t0[0];
    for (int k = 1; k <= c.K; ++k)
    {
        const auto t = chebyshev_by_recurrence(2 * k);
        const double a = 4.0 / std::numbers::pi * std::pow(-1.0, k + 1) / (4.0 * k * k - 1.0);
        for (std::size_t j = 0; j < t.size(); ++j)
        {
            g[j] += a * t[j];
        }
    }
    double s = 0.0;
    for (int k = 1; k <= c.K; ++k)
    {
        s += g[static_cast<std::size_t>(2 * k)] * std::pow(c.M, -2.0 * k + 1.0) *
             hermite_explicit(2 * k, x);
    }
    return std::min(s, c.ceiling);
}

inline auto oracle_v(double x1, double x2, const OracleConfig& c) -> double
{
    const double t = 2.0 * std::sqrt(2.0 * std::log(static_cast<double>(c.n)));
    return oracle_delta(x1, c) * (std::abs(x2) <= t ? 1.0 : 0.0) +
           std::abs(x1) * (std::abs(x2) > t ? 1.0 : 0.0);
}

inline auto oracle_vs(double x1, double x2, const OracleConfig& c) -> double
{
    const double t = std::sqrt(2.0 * std::log(static_cast<double>(c.n)));
    const double a = std::abs(x2);
    return oracle_delta(x1, c) * ((t < a && a <= 2.0 * t) ? 1.0 : 0.0) +
           std::abs(x1) * (a > 2.0 * t ? 1.0 : 0.0);
}

inline auto oracle_u(double x1, double x2, const OracleConfig& c) -> double
{
    const double t = 2.0 * std::sqrt(2.0 * std::log(static_cast<double>(c.n)));
    return std::abs(x1) * (std::abs(x2) > t ? 1.0 : 0.0);
}

}  // namespace tscore::testing
