#include "tscore/estimators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include "tscore/rng.hpp"
#include "tscore/summation.hpp"

namespace tscore
{

ZPanel::ZPanel(std::vector<double> z, std::vector<std::string> ids)
    : z_(std::move(z)), ids_(std::move(ids))
{
    for (std::size_t i = 0; i < z_.size(); ++i)
    {
        if (!std::isfinite(z_[i]))
        {
            throw std::invalid_argument("ZPanel: non-finite z-score at position " +
                                        std::to_string(i));
        }
    }
    if (!ids_.empty())
    {
        if (ids_.size() != z_.size())
        {
            throw std::invalid_argument("ZPanel: ids and z-scores differ in length");
        }
        std::unordered_set<std::string_view> seen;
        seen.reserve(ids_.size());
        for (const auto& id : ids_)
        {
            if (!seen.insert(id).second)
            {
                throw std::invalid_argument("ZPanel: duplicate id '" + id + "'");
            }
        }
    }
}

auto ZPanel::coordinate_key(std::size_t i) const -> std::uint64_t
{
    return ids_.empty() ? static_cast<std::uint64_t>(i) : stable_hash(ids_[i]);
}

auto to_string(EstimatorKind kind) -> std::string_view
{
    switch (kind)
    {
    case EstimatorKind::HybridThreshSplit:
        return "hybrid-thresh";
    case EstimatorKind::HybridThreshNoSplit:
        return "hybrid-thresh-nosplit";
    case EstimatorKind::SimpleThreshSplit:
        return "simple-thresh";
    case EstimatorKind::HybridNoThreshSplit:
        return "hybrid-nothresh";
    case EstimatorKind::Naive:
        return "naive";
    }
    return "unknown";
}

auto parse_estimator(std::string_view name) -> std::optional<EstimatorKind>
{
    for (const auto kind : kAllEstimators)
    {
        if (to_string(kind) == name)
        {
            return kind;
        }
    }
    return std::nullopt;
}

auto uses_split(EstimatorKind kind) noexcept -> bool
{
    return kind == EstimatorKind::HybridThreshSplit || kind == EstimatorKind::SimpleThreshSplit ||
           kind == EstimatorKind::HybridNoThreshSplit;
}

auto split(const ZPanel& panel, std::uint64_t seed, std::uint64_t stream) -> SplitPanel
{
    const std::uint64_t key = derive_key(seed, stream);
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const auto z = panel.z();
    SplitPanel out{std::vector<double>(z.size()), std::vector<double>(z.size())};
    for (std::size_t i = 0; i < z.size(); ++i)
    {
        const double g = keyed_normal(key, panel.coordinate_key(i));
        out.first[i] = (z[i] + g) * inv_sqrt2;
        out.second[i] = (z[i] - g) * inv_sqrt2;
    }
    return out;
}

auto v_hybrid(double x1, double x2, const ApproxConfig& cfg) noexcept -> double
{
    if (std::abs(x2) <= cfg.upper_threshold())
    {
        return delta_k(x1, cfg);
    }
    return std::abs(x1);
}

auto v_hybrid_thresh(double x1, double x2, const ApproxConfig& cfg) noexcept -> double
{
    const double a = std::abs(x2);
    if (a > cfg.upper_threshold())
    {
        return std::abs(x1);
    }
    if (a > cfg.lower_threshold())
    {
        return delta_k(x1, cfg);
    }
    return 0.0;
}

auto u_simple(double x1, double x2, const ApproxConfig& cfg) noexcept -> double
{
    return std::abs(x2) > cfg.upper_threshold() ? std::abs(x1) : 0.0;
}

namespace
{

void check_lengths(std::size_t nx, std::size_t ny, const ApproxConfig& cfg)
{
    if (nx != ny)
    {
        throw std::invalid_argument("estimate_tscore: panels differ in length (" +
                                    std::to_string(nx) + " vs " + std::to_string(ny) + ")");
    }
    if (nx < 2)
    {
        throw std::invalid_argument("estimate_tscore: need at least 2 coordinates");
    }
    if (cfg.n() != nx)
    {
        throw std::invalid_argument("estimate_tscore: config built for n = " +
                                    std::to_string(cfg.n()) + " but panels have length " +
                                    std::to_string(nx));
    }
}

template <typename PerCoordinate>
auto split_sum(const SplitPanel& x, const SplitPanel& y, const ApproxConfig& cfg,
               unsigned threads, PerCoordinate v) -> double
{
    return 2.0 * deterministic_sum(
                     x.first.size(),
                     [&](std::size_t i) {
                         return v(x.first[i], x.second[i], cfg) * v(y.first[i], y.second[i], cfg);
                     },
                     threads);
}

}  // namespace

auto estimate_tscore_split(const SplitPanel& x, const SplitPanel& y, EstimatorKind kind,
                           const ApproxConfig& cfg, unsigned threads) -> double
{
    if (x.first.size() != x.second.size() || y.first.size() != y.second.size())
    {
        throw std::invalid_argument("estimate_tscore_split: malformed split panel");
    }
    check_lengths(x.first.size(), y.first.size(), cfg);
    switch (kind)
    {
    case EstimatorKind::HybridThreshSplit:
        return split_sum(x, y, cfg, threads, v_hybrid_thresh);
    case EstimatorKind::HybridNoThreshSplit:
        return split_sum(x, y, cfg, threads, v_hybrid);
    case EstimatorKind::SimpleThreshSplit:
        return split_sum(x, y, cfg, threads, u_simple);
    default:
        throw std::invalid_argument("estimate_tscore_split: " + std::string(to_string(kind)) +
                                    " does not split");
    }
}

auto estimate_tscore_direct(std::span<const double> x, std::span<const double> y,
                            EstimatorKind kind, const ApproxConfig& cfg, unsigned threads)
    -> double
{
    check_lengths(x.size(), y.size(), cfg);
    switch (kind)
    {
    case EstimatorKind::HybridThreshNoSplit:
        return deterministic_sum(
            x.size(),
            [&](std::size_t i) { return v_hybrid(x[i], x[i], cfg) * v_hybrid(y[i], y[i], cfg); },
            threads);
    case EstimatorKind::Naive:
        return deterministic_sum(
            x.size(), [&](std::size_t i) { return std::abs(x[i] * y[i]); }, threads);
    default:
        throw std::invalid_argument("estimate_tscore_direct: " + std::string(to_string(kind)) +
                                    " requires splitting");
    }
}

auto estimate_tscore(const ZPanel& x, const ZPanel& y, EstimatorKind kind,
                     const ApproxConfig& cfg, std::uint64_t seed, unsigned threads)
    -> TScoreEstimate
{
    check_lengths(x.size(), y.size(), cfg);
    TScoreEstimate out;
    out.kind = kind;
    out.k_used = cfg.half_degree();
    if (uses_split(kind))
    {
        const auto xs = split(x, seed, kStreamX);
        const auto ys = split(y, seed, kStreamY);
        out.value = estimate_tscore_split(xs, ys, kind, cfg, threads);
        out.seed = seed;
    }
    else
    {
        out.value = estimate_tscore_direct(x.z(), y.z(), kind, cfg, threads);
    }
    return out;
}

auto true_tscore(std::span<const double> theta, std::span<const double> mu) -> double
{
    if (theta.size() != mu.size())
    {
        throw std::invalid_argument("true_tscore: vectors differ in length");
    }
    return deterministic_sum(theta.size(),
                             [&](std::size_t i) { return std::abs(theta[i] * mu[i]); });
}

}  // namespace tscore
