#pragma once

// Estimators of the absolute inner product T(theta, mu) = sum_i |theta_i mu_i|
// from paired observations x ~ N(theta, I), y ~ N(mu, I).
//
// Split variants first turn each panel into two independent copies
// (x_i + g_i)/sqrt(2) and (x_i - g_i)/sqrt(2), with means theta/sqrt(2); one
// copy selects the branch and the other is plugged in. Because
// T(theta, mu) = 2 T(theta/sqrt(2), mu/sqrt(2)), their sums carry a factor 2.
//
//   HybridThreshSplit    2 sum V^S(x_i) V^S(y_i)
//   HybridNoThreshSplit  2 sum V(x_i) V(y_i)
//   SimpleThreshSplit    2 sum U(x_i) U(y_i)
//   HybridThreshNoSplit  sum V(x_i, x_i) V(y_i, y_i), the hybrid estimator
//                        evaluated on the observation itself (no noise, no
//                        factor 2), the variant recommended for applications
//   Naive                sum |x_i y_i|

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tscore/poly_core.hpp"

namespace tscore
{

// Length-n vector of z-scores, optionally labelled. Finite values only;
// labels, when present, are unique and one per value.
class ZPanel
{
public:
    ZPanel() = default;
    explicit ZPanel(std::vector<double> z, std::vector<std::string> ids = {});

    [[nodiscard]] auto size() const noexcept -> std::size_t { return z_.size(); }
    [[nodiscard]] auto z() const noexcept -> std::span<const double> { return z_; }
    [[nodiscard]] auto ids() const noexcept -> std::span<const std::string> { return ids_; }
    [[nodiscard]] auto has_ids() const noexcept -> bool { return !ids_.empty(); }

    // Key of coordinate i in the splitting stream: hash of its label when
    // labelled, else its index.
    [[nodiscard]] auto coordinate_key(std::size_t i) const -> std::uint64_t;

private:
    std::vector<double> z_;
    std::vector<std::string> ids_;
};

struct SplitPanel
{
    std::vector<double> first;   // plugged into the estimate
    std::vector<double> second;  // used for the branch tests
};

enum class EstimatorKind
{
    HybridThreshSplit,
    HybridThreshNoSplit,
    SimpleThreshSplit,
    HybridNoThreshSplit,
    Naive,
};

inline constexpr std::array<EstimatorKind, 5> kAllEstimators = {
    EstimatorKind::HybridThreshSplit, EstimatorKind::HybridThreshNoSplit,
    EstimatorKind::SimpleThreshSplit, EstimatorKind::HybridNoThreshSplit,
    EstimatorKind::Naive,
};

// Flag names: hybrid-thresh, hybrid-thresh-nosplit, simple-thresh,
// hybrid-nothresh, naive.
auto to_string(EstimatorKind kind) -> std::string_view;
auto parse_estimator(std::string_view name) -> std::optional<EstimatorKind>;
auto uses_split(EstimatorKind kind) noexcept -> bool;

struct TScoreEstimate
{
    double value = 0.0;
    EstimatorKind kind = EstimatorKind::HybridThreshNoSplit;
    int k_used = 0;
    std::optional<std::uint64_t> seed;
};

// Stream tags separating the two panels of one estimate.
inline constexpr std::uint64_t kStreamX = 0;
inline constexpr std::uint64_t kStreamY = 1;

auto split(const ZPanel& panel, std::uint64_t seed, std::uint64_t stream = kStreamX) -> SplitPanel;

// Per-coordinate pieces. x1 is the plug-in copy, x2 the test copy.
auto v_hybrid(double x1, double x2, const ApproxConfig& cfg) noexcept -> double;
auto v_hybrid_thresh(double x1, double x2, const ApproxConfig& cfg) noexcept -> double;
auto u_simple(double x1, double x2, const ApproxConfig& cfg) noexcept -> double;

// Throws std::invalid_argument on length mismatch, on n < 2, or when cfg.n()
// differs from the panel length.
auto estimate_tscore(const ZPanel& x, const ZPanel& y, EstimatorKind kind,
                     const ApproxConfig& cfg, std::uint64_t seed, unsigned threads = 1)
    -> TScoreEstimate;

// Split variants from pre-split panels, so several estimators can share one
// split. Non-split kinds are rejected.
auto estimate_tscore_split(const SplitPanel& x, const SplitPanel& y, EstimatorKind kind,
                           const ApproxConfig& cfg, unsigned threads = 1) -> double;

// Non-split kinds on raw values. Split kinds are rejected.
auto estimate_tscore_direct(std::span<const double> x, std::span<const double> y,
                            EstimatorKind kind, const ApproxConfig& cfg, unsigned threads = 1)
    -> double;

auto true_tscore(std::span<const double> theta, std::span<const double> mu) -> double;

}  // namespace tscore
