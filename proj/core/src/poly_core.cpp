#include "tscore/poly_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tscore/summation.hpp"

namespace tscore
{

namespace
{

// Binomial coefficient; exact for the arguments reached with k <= 60.
auto binomial(std::uint64_t n, std::uint64_t r) -> std::uint64_t
{
    if (r > n)
    {
        return 0;
    }
    r = std::min(r, n - r);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= r; ++i)
    {
        result = result * (n - r + i) / i;
    }
    return result;
}

}  // namespace

auto cheb_coeffs(int k) -> std::vector<double>
{
    if (k < 0 || k > kMaxChebyshevDegree)
    {
        throw std::invalid_argument("cheb_coeffs: degree must be in [0, 60], got " +
                                    std::to_string(k));
    }
    std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
    if (k == 0)
    {
        c[0] = 1.0;
        return c;
    }
    const auto uk = static_cast<std::uint64_t>(k);
    for (std::uint64_t j = 0; 2 * j <= uk; ++j)
    {
        // k/(k-j) C(k-j, j) = C(k-j, j) + C(k-j-1, j-1), an integer below 2^40.
        const std::uint64_t odd_part =
            j == 0 ? 1 : binomial(uk - j, j) + binomial(uk - j - 1, j - 1);
        const int power = k - 2 * static_cast<int>(j);
        // 2^{k-2j-1}, except the j = k/2 constant term where k/(k-j) C(k-j, j) = 2.
        double magnitude = 0.0;
        if (power == 0)
        {
            magnitude = static_cast<double>(odd_part) / 2.0;
        }
        else
        {
            magnitude = std::ldexp(static_cast<double>(odd_part), power - 1);
        }
        c[static_cast<std::size_t>(power)] = (j % 2 == 0) ? magnitude : -magnitude;
    }
    return c;
}

auto ChebCoeffs::operator()(double x) const noexcept -> double
{
    const double x2 = x * x;
    double acc = 0.0;
    for (auto it = g.rbegin(); it != g.rend(); ++it)
    {
        acc = acc * x2 + *it;
    }
    return acc;
}

auto gk_coeffs(int K) -> ChebCoeffs
{
    if (K < 1 || K > kMaxHalfDegree)
    {
        throw std::invalid_argument("gk_coeffs: K must be in [1, 30], got " + std::to_string(K));
    }
    const auto size = static_cast<std::size_t>(K) + 1;
    std::vector<CompensatedSum> acc(size);
    acc[0].add(2.0 / std::numbers::pi);
    for (int k = 1; k <= K; ++k)
    {
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        const double weight = sign * 4.0 / (std::numbers::pi * (4.0 * k * k - 1.0));
        const auto t = cheb_coeffs(2 * k);
        for (int m = 0; m <= k; ++m)
        {
            acc[static_cast<std::size_t>(m)].add(weight * t[2 * static_cast<std::size_t>(m)]);
        }
    }
    ChebCoeffs out{K, std::vector<double>(size)};
    for (std::size_t m = 0; m < size; ++m)
    {
        out.g[m] = acc[m].value();
    }
    return out;
}

auto hermite_eval(int max_degree, double x) -> HermiteTable
{
    if (max_degree < 0 || max_degree > 2 * kMaxHalfDegree)
    {
        throw std::invalid_argument("hermite_eval: degree must be in [0, 60], got " +
                                    std::to_string(max_degree));
    }
    HermiteTable table{max_degree, std::vector<double>(static_cast<std::size_t>(max_degree) + 1)};
    table.values[0] = 1.0;
    if (max_degree >= 1)
    {
        table.values[1] = x;
    }
    for (int k = 1; k < max_degree; ++k)
    {
        const auto i = static_cast<std::size_t>(k);
        table.values[i + 1] = x * table.values[i] - k * table.values[i - 1];
    }
    return table;
}

ApproxConfig::ApproxConfig(std::uint64_t n, int K)
    : ApproxConfig(n, K, default_scale(n), default_ceiling(n))
{
}

ApproxConfig::ApproxConfig(std::uint64_t n, int K, double scale, double ceiling)
    : n_(n), scale_(scale), ceiling_(ceiling), lower_(0.0), upper_(0.0)
{
    if (n < 2)
    {
        throw std::invalid_argument("ApproxConfig: n must be at least 2");
    }
    if (!(scale > 0.0) || !std::isfinite(scale))
    {
        throw std::invalid_argument("ApproxConfig: scale must be positive and finite");
    }
    if (!(ceiling > 0.0))
    {
        throw std::invalid_argument("ApproxConfig: ceiling must be positive");
    }
    coeffs_ = gk_coeffs(K);
    lower_ = std::sqrt(2.0 * std::log(static_cast<double>(n)));
    upper_ = 2.0 * lower_;
    weights_.resize(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k)
    {
        weights_[static_cast<std::size_t>(k) - 1] =
            coeffs_.g[static_cast<std::size_t>(k)] * std::pow(scale_, 1.0 - 2.0 * k);
    }
}

auto ApproxConfig::default_scale(std::uint64_t n) -> double
{
    return 8.0 * std::sqrt(std::log(static_cast<double>(n)));
}

auto ApproxConfig::default_ceiling(std::uint64_t n) -> double
{
    const auto dn = static_cast<double>(n);
    return dn * dn;
}

auto s_k(double x, const ApproxConfig& cfg) noexcept -> double
{
    // Only even degrees enter, so evaluating at |x| loses nothing and makes
    // the result exactly even.
    const double a = std::abs(x);
    const auto& w = cfg.weights();
    const int top = 2 * static_cast<int>(w.size());

    std::array<double, 2 * kMaxHalfDegree + 1> h{};
    h[0] = 1.0;
    h[1] = a;
    for (int k = 1; k < top; ++k)
    {
        const auto i = static_cast<std::size_t>(k);
        h[i + 1] = a * h[i] - k * h[i - 1];
    }

    CompensatedSum acc;
    for (std::size_t k = w.size(); k >= 1; --k)
    {
        acc.add(w[k - 1] * h[2 * k]);
    }
    return acc.value();
}

auto delta_k(double x, const ApproxConfig& cfg) noexcept -> double
{
    return std::min(s_k(x, cfg), cfg.ceiling());
}

auto k_from_rate(double r, std::uint64_t n) -> int
{
    if (!(r > 0.0) || n < 2)
    {
        throw std::invalid_argument("k_from_rate: need r > 0 and n >= 2");
    }
    const double k = std::floor(r * std::log(static_cast<double>(n)));
    return static_cast<int>(std::clamp(k, 1.0, static_cast<double>(kMaxHalfDegree)));
}

}  // namespace tscore
